"""PC, PC-stable, CPC and CPC-stable.

All four share the same three stages: an adjacency search that removes
edges between conditionally independent pairs, orientation of unshielded
triples, and Meek propagation.  The stable variants freeze adjacency sets at
the start of each depth; the conservative variants orient a collider only
when every separating set found for its endpoints agrees.
"""

from __future__ import annotations

import enum
import itertools
from typing import Callable, Iterable, Sequence

from ..graphcore import Graph, meek_closure

IndependenceOracle = Callable[..., object]


class PcVariant(enum.Enum):
    PC = "pc"
    PC_STABLE = "pc_stable"
    CPC = "cpc"
    CPC_STABLE = "cpc_stable"

    @property
    def stable(self) -> bool:
        return self in (PcVariant.PC_STABLE, PcVariant.CPC_STABLE)

    @property
    def conservative(self) -> bool:
        return self in (PcVariant.CPC, PcVariant.CPC_STABLE)


class TripleMark(enum.Enum):
    COLLIDER = "collider"
    NONCOLLIDER = "noncollider"
    AMBIGUOUS = "ambiguous"


class SepsetMap:
    """Conditioning sets that separated each removed pair."""

    def __init__(self):
        self._sets: dict[frozenset, tuple[str, ...]] = {}

    def set(self, x: str, y: str, s: Iterable[str]) -> None:
        self._sets[frozenset((x, y))] = tuple(s)

    def get(self, x: str, y: str) -> tuple[str, ...] | None:
        return self._sets.get(frozenset((x, y)))

    def __contains__(self, pair) -> bool:
        return frozenset(pair) in self._sets

    def __len__(self) -> int:
        return len(self._sets)

    def items(self):
        for k, v in self._sets.items():
            yield tuple(sorted(k)), v


def _independent(test: IndependenceOracle, x, y, s) -> bool:
    res = test(x, y, tuple(s))
    return res if isinstance(res, bool) else res.independent


def fas(
    test: IndependenceOracle,
    variables: Sequence[str],
    depth: int = -1,
    stable: bool = False,
    initial: Graph | None = None,
) -> tuple[Graph, SepsetMap]:
    """Adjacency search.

    Starts from the complete undirected graph over ``variables`` (or from the
    skeleton of ``initial``) and, for conditioning-set sizes ``d = 0, 1, ...``,
    removes ``x --- y`` as soon as some ``S`` of size ``d`` drawn from the
    other adjacencies of ``x`` makes them independent.
    """
    if depth < -1:
        raise ValueError("depth must be -1 or >= 0")
    g = Graph(variables)
    if initial is None:
        for x, y in itertools.combinations(variables, 2):
            g.add_undirected(x, y)
    else:
        for e in initial.edges():
            if e.a in g and e.b in g:
                g.add_undirected(e.a, e.b)
    sepsets = SepsetMap()

    d = 0
    while depth < 0 or d <= depth:
        frozen = {v: g.adjacent(v) for v in variables} if stable else None
        for x in variables:
            for y in list(frozen[x] if stable else g.adjacent(x)):
                if not g.is_adjacent(x, y):
                    continue
                pool = frozen[x] if stable else g.adjacent(x)
                cand = [v for v in pool if v != y]
                if len(cand) < d:
                    continue
                for s in itertools.combinations(cand, d):
                    if _independent(test, x, y, s):
                        g.remove_edge(x, y)
                        sepsets.set(x, y, s)
                        break
        d += 1
        if all(len(g.adjacent(v)) - 1 < d for v in variables):
            break
    return g, sepsets


def unshielded_triples(g: Graph) -> list[tuple[str, str, str]]:
    """Triples ``(x, y, z)``, x and z adjacent to y but not to each other.

    Sorted lexicographically by node names, with ``x < z``.
    """
    out = []
    for y in g.nodes:
        for x, z in itertools.combinations(sorted(g.adjacent(y)), 2):
            if not g.is_adjacent(x, z):
                out.append((x, y, z))
    return sorted(out)


def _subsets(pool: Sequence[str], depth: int):
    top = len(pool) if depth < 0 else min(depth, len(pool))
    for k in range(top + 1):
        yield from itertools.combinations(pool, k)


def find_sepset(test: IndependenceOracle, g: Graph, x: str, z: str, depth: int = -1):
    """Smallest set from adj(x) or adj(z) that separates x and z, or None."""
    ax = [v for v in g.adjacent(x) if v != z]
    az = [v for v in g.adjacent(z) if v != x]
    top = max(len(ax), len(az)) if depth < 0 else depth
    for k in range(top + 1):
        for pool in (ax, az):
            for s in itertools.combinations(pool, k) if k <= len(pool) else ():
                if _independent(test, x, z, s):
                    return s
    return None


def _orient_collider(g: Graph, x: str, y: str, z: str) -> None:
    # first orientation wins: never overwrite an arrowhead already placed
    for a in (x, z):
        if g.is_undirected(a, y):
            g.orient(a, y)


def orient_unshielded(
    skeleton: Graph,
    sepsets: SepsetMap,
    conservative: tuple[IndependenceOracle, int] | None = None,
) -> tuple[Graph, dict[tuple[str, str, str], TripleMark]]:
    """Orient unshielded colliders.

    Standard rule: ``x --> y <-- z`` iff y is not in sepset(x, z).  With
    ``conservative=(test, depth)`` every subset of adj(x) \\ {z} and of
    adj(z) \\ {x} up to ``depth`` is tested; y in none of the separating sets
    gives a collider, y in all a noncollider, anything else is ambiguous and
    left unoriented.
    """
    g = skeleton.copy()
    marks: dict[tuple[str, str, str], TripleMark] = {}
    for x, y, z in unshielded_triples(skeleton):
        if conservative is None:
            s = sepsets.get(x, z)
            if s is None:
                continue
            mark = TripleMark.NONCOLLIDER if y in s else TripleMark.COLLIDER
        else:
            test, depth = conservative
            found = []
            for pool in (
                [v for v in skeleton.adjacent(x) if v != z],
                [v for v in skeleton.adjacent(z) if v != x],
            ):
                for s in _subsets(pool, depth):
                    if _independent(test, x, z, s):
                        found.append(s)
            if not found and (x, z) in sepsets:
                found.append(sepsets.get(x, z))
            with_y = sum(y in s for s in found)
            if found and with_y == 0:
                mark = TripleMark.COLLIDER
            elif found and with_y == len(found):
                mark = TripleMark.NONCOLLIDER
            else:
                mark = TripleMark.AMBIGUOUS
        marks[(x, y, z)] = mark
        if mark is TripleMark.COLLIDER:
            _orient_collider(g, x, y, z)
    return g, marks


def pc_search(
    variant: PcVariant,
    test: IndependenceOracle,
    variables: Sequence[str],
    depth: int = -1,
    initial: Graph | None = None,
) -> Graph:
    """Run one member of the PC family and return its pattern estimate.

    With ``initial``, only adjacencies of the initial graph are candidates.
    Removed pairs that never went through the adjacency search (because the
    initial graph left them out) get a separating set looked up on demand
    when they form an unshielded triple.
    """
    skeleton, sepsets = fas(test, variables, depth, variant.stable, initial)
    if initial is not None:
        for x, _, z in unshielded_triples(skeleton):
            if (x, z) not in sepsets:
                s = find_sepset(test, skeleton, x, z, depth)
                if s is not None:
                    sepsets.set(x, z, s)
    conservative = (test, depth) if variant.conservative else None
    g, marks = orient_unshielded(skeleton, sepsets, conservative)
    ambiguous = [t for t, m in marks.items() if m is TripleMark.AMBIGUOUS]
    return meek_closure(g, skip_triples=ambiguous)
