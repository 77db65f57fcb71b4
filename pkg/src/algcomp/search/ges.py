"""Greedy equivalence search over CPDAGs (Chickering 2002 operators).

The forward phase repeatedly applies the valid Insert(X, Y, T) with the
largest strictly positive score change; the backward phase does the same
with Delete(X, Y, H).  After every operator the resulting PDAG is extended
to a DAG and mapped back to its CPDAG, so the state is always a pattern.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from ..graphcore import Graph, consistent_extension, cpdag_of

log = logging.getLogger(__name__)


@dataclass
class GesStep:
    phase: str  # "forward" or "backward"
    operator: tuple
    delta: float
    score: float
    graph: Graph


def _is_clique(g: Graph, nodes) -> bool:
    return all(g.is_adjacent(a, b) for a, b in itertools.combinations(nodes, 2))


def _blocked_semidirected(g: Graph, src: str, dst: str, blocked: set) -> bool:
    """True iff every semi-directed path src ~> dst meets ``blocked``."""
    seen = {src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in g.adjacent(v):
            if w in seen or w in blocked:
                continue
            if g.is_directed(w, v):
                continue  # edge points back at v
            if w == dst:
                return False
            seen.add(w)
            queue.append(w)
    return True


def _subsets(pool):
    for k in range(len(pool) + 1):
        yield from itertools.combinations(pool, k)


def score_pattern(score, g: Graph) -> float:
    """Score of a CPDAG via any of its consistent extensions."""
    dag = consistent_extension(g)
    if dag is None:
        raise ValueError("pattern has no consistent extension")
    return score.score_graph(dag)


def _best_insert(g: Graph, score, nodes):
    best = None
    for y in nodes:
        pa_y = set(g.parents(y))
        nbrs = g.neighbors(y)
        for x in nodes:
            if x == y or g.is_adjacent(x, y):
                continue
            na = [t for t in nbrs if g.is_adjacent(t, x)]
            t0 = [t for t in nbrs if not g.is_adjacent(t, x)]
            for t in _subsets(t0):
                s = set(na) | set(t)
                delta = score.local_score(y, s | pa_y | {x}) - score.local_score(y, s | pa_y)
                if delta <= 0 or (best is not None and delta <= best[0]):
                    continue
                if not _is_clique(g, s) or not _blocked_semidirected(g, y, x, s):
                    continue
                best = (delta, x, y, t)
    return best


def _apply_insert(g: Graph, x, y, t) -> Graph | None:
    h = g.copy()
    h.add_directed(x, y)
    for node in t:
        h.orient(node, y)
    dag = consistent_extension(h)
    return None if dag is None else cpdag_of(dag)


def _best_delete(g: Graph, score, nodes):
    best = None
    for y in nodes:
        pa_y = set(g.parents(y))
        nbrs = g.neighbors(y)
        for x in g.adjacent(y):
            if not (g.is_directed(x, y) or g.is_undirected(x, y)):
                continue
            na = [t for t in nbrs if t != x and g.is_adjacent(t, x)]
            for h in _subsets(na):
                rest = set(na) - set(h)
                base = rest | (pa_y - {x})
                delta = score.local_score(y, base) - score.local_score(y, base | {x})
                if delta <= 0 or (best is not None and delta <= best[0]):
                    continue
                if not _is_clique(g, rest):
                    continue
                best = (delta, x, y, h)
    return best


def _apply_delete(g: Graph, x, y, hs) -> Graph | None:
    h = g.copy()
    h.remove_edge(x, y)
    for node in hs:
        if h.is_undirected(y, node):
            h.orient(y, node)
        if h.is_undirected(x, node):
            h.orient(x, node)
    dag = consistent_extension(h)
    return None if dag is None else cpdag_of(dag)


def ges_search(
    score,
    variables: Sequence[str] | None = None,
    initial: Graph | None = None,
    trace: list | None = None,
) -> Graph:
    """Two-phase greedy equivalence search.

    Parameters
    ----------
    score
        Decomposable score object exposing ``local_score(y, parents)`` and
        ``score_graph(dag)`` (see :mod:`algcomp.oracle`).
    variables
        Node order of the result; defaults to the score's variables.
    initial
        Optional starting graph; search begins from its CPDAG.
    trace
        If given, a :class:`GesStep` is appended for every applied operator.
    """
    nodes = list(variables if variables is not None else score.variables)
    g = Graph(nodes)
    if initial is not None:
        start = consistent_extension(initial.subgraph(nodes).with_nodes(nodes))
        if start is None:
            log.warning("initial graph has no consistent extension; starting from empty")
        else:
            g = cpdag_of(start)
    current = score_pattern(score, g)

    for phase, find, apply in (
        ("forward", _best_insert, _apply_insert),
        ("backward", _best_delete, _apply_delete),
    ):
        while True:
            best = find(g, score, nodes)
            if best is None:
                break
            delta, x, y, sub = best
            nxt = apply(g, x, y, sub)
            if nxt is None:  # cannot happen for a valid operator
                log.warning("%s operator on %s, %s left no extension; stopping", phase, x, y)
                break
            g = nxt
            current = score_pattern(score, g)
            if trace is not None:
                trace.append(GesStep(phase, (x, y, tuple(sub)), delta, current, g))
    return g
