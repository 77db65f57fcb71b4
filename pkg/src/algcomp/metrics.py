"""Graph comparison statistics, their [0, 1] normalizations and the utility."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

from .graphcore import ARROW, Graph, GraphError


class Direction(enum.Enum):
    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else math.nan

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else math.nan

    @property
    def mcc(self) -> float:
        # Python ints: no overflow in the product under the square root
        tp, fp, fn, tn = self.tp, self.fp, self.fn, self.tn
        den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
        if den == 0:
            return 0.0
        return (tp * tn - fp * fn) / math.sqrt(den)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        p = 0.0 if math.isnan(p) else p
        r = 0.0 if math.isnan(r) else r
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _check_nodes(cmp: Graph, est: Graph) -> list[str]:
    if set(cmp.nodes) != set(est.nodes):
        missing = set(cmp.nodes) ^ set(est.nodes)
        raise GraphError(f"graphs are over different nodes: {sorted(missing)}")
    return cmp.nodes


def adjacency_confusion(cmp: Graph, est: Graph) -> ConfusionCounts:
    nodes = _check_nodes(cmp, est)
    a = {frozenset((e.a, e.b)) for e in cmp.edges()}
    b = {frozenset((e.a, e.b)) for e in est.edges()}
    tp = len(a & b)
    fp = len(b - a)
    fn = len(a - b)
    p = len(nodes)
    return ConfusionCounts(tp, fp, fn, p * (p - 1) // 2 - tp - fp - fn)


def _arrowheads(g: Graph) -> set[tuple[str, str]]:
    out = set()
    for e in g.edges():
        if e.end_b is ARROW:
            out.add((e.a, e.b))
        if e.end_a is ARROW:
            out.add((e.b, e.a))
    return out


def arrowhead_confusion(cmp: Graph, est: Graph) -> ConfusionCounts:
    """Counts over ordered pairs (a, b); positive = arrowhead at b on an a-b edge."""
    nodes = _check_nodes(cmp, est)
    a, b = _arrowheads(cmp), _arrowheads(est)
    tp = len(a & b)
    fp = len(b - a)
    fn = len(a - b)
    p = len(nodes)
    return ConfusionCounts(tp, fp, fn, p * (p - 1) - tp - fp - fn)


def shd(cmp: Graph, est: Graph) -> int:
    """Pairs that differ in adjacency, or in endpoint marks when both adjacent."""
    nodes = _check_nodes(cmp, est)
    count = 0
    for i, x in enumerate(nodes):
        for y in nodes[i + 1:]:
            ec, ee = cmp.edge(x, y), est.edge(x, y)
            if (ec is None) != (ee is None):
                count += 1
            elif ec is not None and ec != ee:
                count += 1
    return count


@dataclass(frozen=True)
class StatisticDef:
    abbreviation: str
    description: str
    direction: Direction
    legend_separator: str = " = "

    @property
    def legend(self) -> str:
        return f"{self.abbreviation}{self.legend_separator}{self.description}"


STATISTICS: dict[str, StatisticDef] = {
    s.abbreviation: s
    for s in [
        StatisticDef("AP", "Adjacency Precision", Direction.HIGHER_BETTER),
        StatisticDef("AR", "Adjacency Recall", Direction.HIGHER_BETTER),
        StatisticDef("AHP", "Arrowhead precision", Direction.HIGHER_BETTER),
        StatisticDef("AHR", "Arrowhead recall", Direction.HIGHER_BETTER),
        StatisticDef("McAdj", "Matthew's correlation coefficient for adjacencies", Direction.HIGHER_BETTER),
        StatisticDef("McArrow", "Matthew's correlation coefficient for arrows", Direction.HIGHER_BETTER),
        StatisticDef("F1Adj", "F1 statistic for adjacencies", Direction.HIGHER_BETTER),
        StatisticDef("F1Arrow", "F1 statistic for arrows", Direction.HIGHER_BETTER),
        StatisticDef("SHD", "Structural Hamming Distance", Direction.LOWER_BETTER, "  = "),
        StatisticDef("E", "Elapsed Time in Seconds", Direction.LOWER_BETTER),
    ]
}


class StatisticError(KeyError):
    pass


def stat_value(stat_id: str, cmp: Graph, est: Graph, elapsed_seconds: float = math.nan) -> float:
    if stat_id not in STATISTICS:
        raise StatisticError(f"unregistered statistic {stat_id!r}")
    if stat_id == "E":
        return float(elapsed_seconds)
    if stat_id == "SHD":
        return float(shd(cmp, est))
    if stat_id in ("AP", "AR", "McAdj", "F1Adj"):
        c = adjacency_confusion(cmp, est)
    else:
        c = arrowhead_confusion(cmp, est)
    if stat_id in ("AP", "AHP"):
        return c.precision
    if stat_id in ("AR", "AHR"):
        return c.recall
    if stat_id.startswith("Mc"):
        return c.mcc
    return c.f1


def all_stat_values(cmp: Graph, est: Graph, elapsed_seconds: float, ids) -> dict[str, float]:
    """Evaluate several statistics, computing each confusion table once."""
    adj = arr = None
    out = {}
    for s in ids:
        if s in ("AP", "AR", "McAdj", "F1Adj"):
            adj = adj or adjacency_confusion(cmp, est)
            c = adj
        elif s in ("AHP", "AHR", "McArrow", "F1Arrow"):
            arr = arr or arrowhead_confusion(cmp, est)
            c = arr
        else:
            out[s] = stat_value(s, cmp, est, elapsed_seconds)
            continue
        if s in ("AP", "AHP"):
            out[s] = c.precision
        elif s in ("AR", "AHR"):
            out[s] = c.recall
        elif s.startswith("Mc"):
            out[s] = c.mcc
        else:
            out[s] = c.f1
    return out


def normalize(stat_id: str, value: float, num_nodes: int | None = None) -> float:
    """Map a statistic to [0, 1], higher better; NaN maps to 0.

    SHD needs ``num_nodes`` to scale by the number of node pairs.
    """
    if value is None or math.isnan(value):
        return 0.0
    if stat_id in ("AP", "AR", "AHP", "AHR", "F1Adj", "F1Arrow"):
        return float(value)
    if stat_id in ("McAdj", "McArrow"):
        return (value + 1.0) / 2.0
    if stat_id == "SHD":
        if not num_nodes or num_nodes < 2:
            return 1.0 if value == 0 else 0.0
        pairs = num_nodes * (num_nodes - 1) / 2
        return 1.0 - min(1.0, value / pairs)
    if stat_id == "E":
        return 1.0 / (1.0 + value) if value >= 0 else 0.0
    raise StatisticError(f"unregistered statistic {stat_id!r}")


def utility(weights: Mapping[str, float], normalized: Mapping[str, float]) -> float:
    """Mean of ``weight * f(stat)`` over the statistics with positive weight."""
    active = [(s, w) for s, w in weights.items() if w > 0]
    if not active:
        return 0.0
    total = 0.0
    for s, w in active:
        v = normalized.get(s, 0.0)
        total += w * (0.0 if v is None or math.isnan(v) else v)
    return total / len(active)
