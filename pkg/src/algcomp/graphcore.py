"""Graphs with tail/arrow endpoint marks, d-separation, CPDAGs and random DAGs.

A :class:`Graph` stores, for every adjacent pair ``(x, y)``, the endpoint mark
sitting at ``y``.  Directed ``x --> y`` therefore has an ARROW at ``y`` and a
TAIL at ``x``; undirected ``x --- y`` has tails at both ends.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


class GraphError(ValueError):
    pass


class Endpoint(enum.Enum):
    TAIL = "TAIL"
    ARROW = "ARROW"


class GraphKind(enum.Enum):
    TRUE_DAG = "true_DAG"
    TRUE_CPDAG = "true_CPDAG"


TAIL = Endpoint.TAIL
ARROW = Endpoint.ARROW


@dataclass(frozen=True, eq=False)
class Edge:
    """An edge ``a ? b`` with one endpoint mark at each end."""

    a: str
    b: str
    end_a: Endpoint
    end_b: Endpoint

    def __post_init__(self):
        if self.a == self.b:
            raise GraphError(f"self loop on {self.a!r}")

    def _key(self):
        return frozenset(((self.a, self.end_a), (self.b, self.end_b)))

    def __eq__(self, other):
        if not isinstance(other, Edge):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def is_directed(self) -> bool:
        return self.end_a != self.end_b

    @property
    def is_undirected(self) -> bool:
        return self.end_a == TAIL and self.end_b == TAIL

    @property
    def is_bidirected(self) -> bool:
        return self.end_a == ARROW and self.end_b == ARROW

    def __str__(self):
        return f"{self.a} {_TOKENS[(self.end_a, self.end_b)]} {self.b}"


_TOKENS = {
    (TAIL, ARROW): "-->",
    (ARROW, TAIL): "<--",
    (TAIL, TAIL): "---",
    (ARROW, ARROW): "<->",
}
_PARSE_TOKENS = {tok: ends for ends, tok in _TOKENS.items()}


class Graph:
    """Mixed graph over an ordered node list.

    At most one edge joins any pair of nodes.  Nodes may be flagged latent.
    The graph is mutable while being built; the algorithms in this package
    copy their inputs and never mutate a graph they were handed.
    """

    def __init__(self, nodes: Iterable[str] = (), latent: Iterable[str] = ()):
        self._nodes: list[str] = []
        self._index: dict[str, int] = {}
        self._ends: dict[str, dict[str, Endpoint]] = {}
        self._latent: set[str] = set()
        for n in nodes:
            self.add_node(n)
        for n in latent:
            self._check(n)
            self._latent.add(n)

    # -- construction -------------------------------------------------------

    def add_node(self, name: str, latent: bool = False) -> None:
        if not name or any(c in name for c in ";\t\n "):
            raise GraphError(f"invalid node name {name!r}")
        if name in self._index:
            raise GraphError(f"duplicate node {name!r}")
        self._index[name] = len(self._nodes)
        self._nodes.append(name)
        self._ends[name] = {}
        if latent:
            self._latent.add(name)

    def _check(self, *names: str) -> None:
        for n in names:
            if n not in self._index:
                raise GraphError(f"unknown node {n!r}")

    def add_edge(self, a: str, b: str, end_a: Endpoint, end_b: Endpoint) -> None:
        self._check(a, b)
        if a == b:
            raise GraphError(f"self loop on {a!r}")
        if b in self._ends[a]:
            raise GraphError(f"{a} and {b} are already adjacent")
        self._ends[a][b] = end_b
        self._ends[b][a] = end_a

    def add_directed(self, a: str, b: str) -> None:
        self.add_edge(a, b, TAIL, ARROW)

    def add_undirected(self, a: str, b: str) -> None:
        self.add_edge(a, b, TAIL, TAIL)

    def add(self, edge: Edge) -> None:
        self.add_edge(edge.a, edge.b, edge.end_a, edge.end_b)

    def remove_edge(self, a: str, b: str) -> None:
        self._check(a, b)
        if b not in self._ends[a]:
            raise GraphError(f"no edge between {a} and {b}")
        del self._ends[a][b]
        del self._ends[b][a]

    def set_endpoint(self, a: str, b: str, mark: Endpoint) -> None:
        """Set the mark at ``b`` on the existing edge between ``a`` and ``b``."""
        if b not in self._ends[a]:
            raise GraphError(f"no edge between {a} and {b}")
        self._ends[a][b] = mark

    def orient(self, a: str, b: str) -> None:
        """Turn the existing edge between ``a`` and ``b`` into ``a --> b``."""
        if b not in self._ends[a]:
            raise GraphError(f"no edge between {a} and {b}")
        self._ends[a][b] = ARROW
        self._ends[b][a] = TAIL

    def copy(self) -> "Graph":
        g = Graph()
        g._nodes = list(self._nodes)
        g._index = dict(self._index)
        g._ends = {n: dict(e) for n, e in self._ends.items()}
        g._latent = set(self._latent)
        return g

    # -- queries -------------------------------------------------------------

    @property
    def nodes(self) -> list[str]:
        return list(self._nodes)

    @property
    def latent(self) -> set[str]:
        return set(self._latent)

    @property
    def measured(self) -> list[str]:
        return [n for n in self._nodes if n not in self._latent]

    def is_latent(self, node: str) -> bool:
        return node in self._latent

    def index(self, node: str) -> int:
        self._check(node)
        return self._index[node]

    def __contains__(self, node) -> bool:
        return node in self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def num_edges(self) -> int:
        return sum(len(e) for e in self._ends.values()) // 2

    def is_adjacent(self, a: str, b: str) -> bool:
        return b in self._ends[a]

    def endpoint(self, a: str, b: str) -> Endpoint | None:
        """Mark at ``b`` on the edge between ``a`` and ``b`` (None if absent)."""
        return self._ends[a].get(b)

    def _sorted(self, names) -> list[str]:
        return sorted(names, key=self._index.__getitem__)

    def adjacent(self, node: str) -> list[str]:
        return self._sorted(self._ends[node])

    def is_directed(self, a: str, b: str) -> bool:
        """True iff ``a --> b``."""
        return self._ends[a].get(b) is ARROW and self._ends[b][a] is TAIL

    def is_undirected(self, a: str, b: str) -> bool:
        return self._ends[a].get(b) is TAIL and self._ends[b][a] is TAIL

    def parents(self, node: str) -> list[str]:
        return self._sorted(x for x in self._ends[node] if self.is_directed(x, node))

    def children(self, node: str) -> list[str]:
        return self._sorted(x for x in self._ends[node] if self.is_directed(node, x))

    def neighbors(self, node: str) -> list[str]:
        """Nodes joined to ``node`` by an undirected edge."""
        return self._sorted(x for x in self._ends[node] if self.is_undirected(node, x))

    def edge(self, a: str, b: str) -> Edge | None:
        if b not in self._ends[a]:
            return None
        return Edge(a, b, self._ends[b][a], self._ends[a][b])

    def edges(self) -> list[Edge]:
        """All edges, ordered by node position.

        Directed edges are reported tail first; symmetric edges list the
        earlier node first.
        """
        out = []
        for a in self._nodes:
            for b, mark_b in self._ends[a].items():
                mark_a = self._ends[b][a]
                if (mark_a, mark_b) == (ARROW, TAIL):
                    continue
                if mark_a == mark_b and self._index[b] < self._index[a]:
                    continue
                out.append(Edge(a, b, mark_a, mark_b))
        out.sort(key=lambda e: (self._index[e.a], self._index[e.b]))
        return out

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    def skeleton(self) -> "Graph":
        g = Graph(self._nodes, self._latent)
        for e in self.edges():
            g.add_undirected(e.a, e.b)
        return g

    def subgraph(self, nodes: Iterable[str]) -> "Graph":
        keep = self._sorted(set(nodes))
        g = Graph(keep, [n for n in keep if n in self._latent])
        for e in self.edges():
            if e.a in g and e.b in g:
                g.add(e)
        return g

    def with_nodes(self, nodes: Iterable[str]) -> "Graph":
        """Same edges, node list replaced by ``nodes`` (must be a permutation)."""
        nodes = list(nodes)
        if sorted(nodes) != sorted(self._nodes):
            raise GraphError("node lists differ")
        g = Graph(nodes, self._latent)
        for e in self.edges():
            g.add(e)
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._latent == other._latent
            and self.edge_set() == other.edge_set()
        )

    def __repr__(self):
        edges = ", ".join(str(e) for e in self.edges())
        return f"Graph(nodes={self._nodes}, edges=[{edges}])"

    # -- directed structure --------------------------------------------------

    def topological_order(self) -> list[str]:
        """Order of the nodes consistent with the directed edges.

        Undirected edges are ignored.  Raises GraphError on a directed cycle.
        """
        indeg = {n: len(self.parents(n)) for n in self._nodes}
        queue = deque(n for n in self._nodes if indeg[n] == 0)
        order = []
        while queue:
            n = queue.popleft()
            order.append(n)
            for c in self.children(n):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != len(self._nodes):
            raise GraphError("graph has a directed cycle")
        return order

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except GraphError:
            return False
        return True

    def is_dag(self) -> bool:
        return all(e.is_directed for e in self.edges()) and self.is_acyclic()

    def ancestors(self, nodes: Iterable[str]) -> set[str]:
        """``nodes`` together with all of their directed ancestors."""
        seen = set(nodes)
        stack = list(seen)
        while stack:
            n = stack.pop()
            for p in self.parents(n):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def unshielded_colliders(self) -> set[tuple[str, str, str]]:
        """Triples ``(x, y, z)`` with ``x --> y <-- z`` and x, z nonadjacent.

        Each collider is reported once, with ``x`` before ``z`` in node order.
        """
        out = set()
        for y in self._nodes:
            pa = self.parents(y)
            for x, z in itertools.combinations(pa, 2):
                if not self.is_adjacent(x, z):
                    out.add((x, y, z))
        return out


def _require_dag(g: Graph) -> None:
    if not g.is_dag():
        raise GraphError("expected a DAG (all edges directed, no cycles)")


# -- d-separation ---------------------------------------------------------------


def d_separated(g: Graph, x: str, y: str, z: Iterable[str] = ()) -> bool:
    """Decide whether ``x`` and ``y`` are d-separated by ``z`` in DAG ``g``.

    Uses the reachability ("Bayes ball") formulation: a trail is active when
    every non-collider on it is outside ``z`` and every collider has a
    descendant in ``z``.
    """
    z = set(z)
    g._check(x, y, *z)
    if x == y:
        raise GraphError("x and y must differ")
    if x in z or y in z:
        raise GraphError("x and y must not be in the conditioning set")
    an_z = g.ancestors(z)

    # state: (node, arrived_from_child) -- True when we came up an edge
    # node <-- previous, i.e. travelling against the arrow.
    start = [(x, True)]
    visited = set()
    queue = deque(start)
    while queue:
        node, up = queue.popleft()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node == y:
            return False
        if up and node not in z:
            for p in g.parents(node):
                queue.append((p, True))
            for c in g.children(node):
                queue.append((c, False))
        elif not up:
            if node not in z:
                for c in g.children(node):
                    queue.append((c, False))
            if node in an_z:
                for p in g.parents(node):
                    queue.append((p, True))
    return True


# -- Meek rules and CPDAGs ------------------------------------------------------


def meek_closure(g: Graph, skip_triples: Iterable[tuple[str, str, str]] = ()) -> Graph:
    """Apply Meek's rules R1-R4 until no rule fires.

    Only undirected edges are ever oriented.  ``skip_triples`` lists
    unshielded triples ``(a, b, c)`` that R1 must not use as evidence (the
    ambiguous triples of conservative PC); orientation is symmetric in
    ``a``/``c``.
    """
    if any(e.is_bidirected for e in g.edges()):
        raise GraphError("meek_closure does not accept bidirected edges")
    g = g.copy()
    skip = set()
    for a, b, c in skip_triples:
        skip.add((a, b, c))
        skip.add((c, b, a))

    changed = True
    while changed:
        changed = False
        for e in g.edges():
            if not e.is_undirected:
                continue
            for u, v in ((e.a, e.b), (e.b, e.a)):
                if _meek_orients(g, u, v, skip):
                    g.orient(u, v)
                    changed = True
                    break
    return g


def _meek_orients(g: Graph, a: str, b: str, skip) -> bool:
    """Whether some Meek rule forces the undirected edge a --- b into a --> b."""
    # R1: c --> a --- b, c and b nonadjacent
    for c in g.parents(a):
        if not g.is_adjacent(c, b) and (c, a, b) not in skip:
            return True
    # R2: a --> c --> b with a --- b
    for c in g.children(a):
        if g.is_directed(c, b):
            return True
    # R3: a --- c --> b, a --- d --> b, c and d nonadjacent
    cands = [c for c in g.neighbors(a) if g.is_directed(c, b)]
    for c, d in itertools.combinations(cands, 2):
        if not g.is_adjacent(c, d):
            return True
    # R4: a --- c --> d --> b, a adjacent to d, c and b nonadjacent
    for c in g.neighbors(a):
        if c == b or g.is_adjacent(c, b):
            continue
        for d in g.children(c):
            if d != a and g.is_directed(d, b) and g.is_adjacent(a, d):
                return True
    return False


def cpdag_of(dag: Graph) -> Graph:
    """The CPDAG (pattern) of the Markov equivalence class of ``dag``."""
    _require_dag(dag)
    pattern = dag.skeleton()
    for x, y, z in sorted(dag.unshielded_colliders()):
        pattern.orient(x, y)
        pattern.orient(z, y)
    return meek_closure(pattern)


def consistent_extension(pdag: Graph) -> Graph | None:
    """A DAG with the same skeleton and unshielded colliders as ``pdag``.

    Dor & Tarsi's procedure; returns None when no such extension exists.
    """
    work = pdag.copy()
    dag = pdag.copy()
    remaining = list(work.nodes)
    while remaining:
        for x in remaining:
            if work.children(x):
                continue
            nbrs = work.neighbors(x)
            adj = work.adjacent(x)
            if all(work.is_adjacent(y, w) for y in nbrs for w in adj if w != y):
                break
        else:
            return None
        for y in work.neighbors(x):
            dag.orient(y, x)
        for y in work.adjacent(x):
            work.remove_edge(x, y)
        remaining.remove(x)
    return dag


# -- random DAGs ------------------------------------------------------------------


def random_forward_dag(
    num_measures: int,
    num_latents: int = 0,
    avg_degree: float = 4,
    max_degree: int = 100,
    max_indegree: int = 100,
    max_outdegree: int = 100,
    connected: int = 0,
    seed=None,
) -> Graph:
    """Random DAG with ``round(avg_degree * n / 2)`` edges under degree caps.

    Nodes are ``X1..Xn`` followed by the latent ``L1..Lk``.  A uniformly
    random node order fixes the edge directions; candidate pairs are visited
    in random order and an edge is kept unless it would break a degree cap.
    If the candidates run out first, fewer edges are returned.
    """
    if num_measures < 1 or num_latents < 0 or avg_degree < 0:
        raise GraphError("need num_measures >= 1, num_latents >= 0, avg_degree >= 0")
    if min(max_degree, max_indegree, max_outdegree) < 1:
        raise GraphError("degree caps must be >= 1")
    if connected:
        raise GraphError("connected != 0 is not supported")
    rng = np.random.default_rng(seed)

    names = [f"X{i + 1}" for i in range(num_measures)]
    latents = [f"L{i + 1}" for i in range(num_latents)]
    g = Graph(names + latents, latents)
    nodes = g.nodes
    p = len(nodes)
    target = int(np.floor(avg_degree * p / 2 + 0.5))

    order = rng.permutation(p)
    pairs = [(order[i], order[j]) for i in range(p) for j in range(i + 1, p)]
    indeg = [0] * p
    outdeg = [0] * p
    added = 0
    for k in rng.permutation(len(pairs)):
        if added >= target:
            break
        u, v = pairs[k]
        if (
            outdeg[u] >= max_outdegree
            or indeg[v] >= max_indegree
            or indeg[u] + outdeg[u] >= max_degree
            or indeg[v] + outdeg[v] >= max_degree
        ):
            continue
        g.add_directed(nodes[u], nodes[v])
        outdeg[u] += 1
        indeg[v] += 1
        added += 1
    return g


# -- text format ------------------------------------------------------------------


def render_graph_text(g: Graph) -> str:
    """Native text form: node line, then numbered edge lines."""
    lines = ["Graph Nodes:", ";".join(g.nodes), "", "Graph Edges:"]
    for i, e in enumerate(g.edges(), 1):
        lines.append(f"{i}. {e}")
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str, latent: Iterable[str] = ()) -> Graph:
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2 or lines[0].strip() != "Graph Nodes:":
        raise GraphError("expected 'Graph Nodes:' header")
    node_line = lines[1].strip()
    nodes = node_line.split(";") if node_line else []
    g = Graph(nodes, latent)
    rest = [ln for ln in lines[2:]]
    while rest and rest[0].strip() == "":
        rest.pop(0)
    if not rest:
        return g
    if rest[0].strip() != "Graph Edges:":
        raise GraphError(f"expected 'Graph Edges:' header, got {rest[0]!r}")
    for ln in rest[1:]:
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 4 or not parts[0].endswith(".") or not parts[0][:-1].isdigit():
            raise GraphError(f"malformed edge line {ln!r}")
        _, a, tok, b = parts
        if tok not in _PARSE_TOKENS:
            raise GraphError(f"unknown edge token {tok!r} in line {ln!r}")
        if a not in g or b not in g:
            raise GraphError(f"unknown node in edge line {ln!r}")
        end_a, end_b = _PARSE_TOKENS[tok]
        g.add_edge(a, b, end_a, end_b)
    return g


def graph_from_edges(nodes: Iterable[str], edges: Iterable[str], latent=()) -> Graph:
    """Build a graph from edge strings like ``"A --> B"`` or ``"A --- B"``."""
    g = Graph(nodes, latent)
    for s in edges:
        a, tok, b = s.split()
        if tok not in _PARSE_TOKENS:
            raise GraphError(f"unknown edge token {tok!r}")
        g.add_edge(a, b, *_PARSE_TOKENS[tok])
    return g


def dag_from_adjacency(names: list[str], adj: Mapping | np.ndarray) -> Graph:
    """DAG from a 0/1 matrix where ``adj[i, j] == 1`` means ``names[i] --> names[j]``."""
    adj = np.asarray(adj)
    g = Graph(names)
    for i, j in zip(*np.nonzero(adj)):
        g.add_directed(names[i], names[j])
    return g
