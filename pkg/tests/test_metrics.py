import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algcomp.graphcore import GraphError, graph_from_edges
from algcomp.metrics import (
    STATISTICS,
    ConfusionCounts,
    Direction,
    StatisticError,
    adjacency_confusion,
    arrowhead_confusion,
    normalize,
    shd,
    stat_value,
    utility,
)

from oracles import naive_confusion, naive_f1, naive_mcc, random_pair_graph

# Rows printed in the two worked comparison reports: (alg, sim, AP, AR, AHP, AHR, U)
FILES_TABLE = [
    (4, 3, 0.933, 0.592, 0.971, 0.858, 0.657),
    (4, 2, 0.948, 0.561, 0.987, 0.804, 0.654),
    (2, 3, 0.893, 0.602, 0.940, 0.897, 0.646),
    (2, 2, 0.914, 0.572, 0.966, 0.827, 0.645),
    (4, 1, 0.945, 0.311, 0.999, 0.818, 0.627),
    (2, 1, 0.920, 0.323, 0.998, 0.814, 0.622),
    (3, 3, 0.933, 0.592, 0.761, 0.951, 0.616),
    (3, 2, 0.945, 0.560, 0.778, 0.919, 0.616),
    (1, 2, 0.914, 0.572, 0.799, 0.922, 0.615),
    (1, 3, 0.893, 0.602, 0.765, 0.957, 0.610),
    (1, 1, 0.920, 0.323, 0.889, 0.886, 0.604),
    (3, 1, 0.945, 0.311, 0.844, 0.878, 0.596),
]
SIM_TABLE = [  # (alg, AP, AR, U)
    (6, 0.980, 0.677, 0.659),
    (5, 0.988, 0.633, 0.652),
    (9, 0.956, 0.671, 0.646),
    (12, 0.956, 0.671, 0.646),
    (4, 0.988, 0.598, 0.643),
    (8, 0.965, 0.623, 0.638),
    (11, 0.965, 0.623, 0.638),
    (3, 0.933, 0.685, 0.638),
    (2, 0.947, 0.631, 0.632),
    (7, 0.969, 0.577, 0.629),
    (10, 0.969, 0.577, 0.629),
    (1, 0.944, 0.587, 0.619),
]
FILES_WEIGHTS = {"AP": 1.0, "AR": 0.5, "AHP": 1.0, "AHR": 0.5}
SIM_WEIGHTS = {"AP": 1.0, "AR": 0.5}


def _counts(c):
    return (c.tp, c.fp, c.fn, c.tn)


def test_adjacency_confusion_example():
    cmp = graph_from_edges("ABC", ["A --- B", "B --> C"])
    est = graph_from_edges("ABC", ["A --> B", "A --> C"])
    assert _counts(adjacency_confusion(cmp, est)) == (1, 1, 1, 0)


def test_arrowhead_confusion_examples():
    cmp = graph_from_edges("ABC", ["A --- B", "B --> C"])
    est = graph_from_edges("ABC", ["A --> B", "B --> C"])
    assert _counts(arrowhead_confusion(cmp, est)) == (1, 1, 0, 4)
    assert shd(cmp, est) == 1
    rev = graph_from_edges("ABC", ["C --> B", "A --- B"])
    c = arrowhead_confusion(cmp, rev)
    assert (c.fp, c.fn) == (1, 1)


def test_trivial_cases():
    g = graph_from_edges("ABCD", ["A --> B", "C --> B", "B --- D"])
    for s in ("AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "F1Adj", "F1Arrow"):
        assert stat_value(s, g, g) == 1.0
    assert stat_value("SHD", g, g) == 0
    empty = graph_from_edges("ABCD", [])
    c = adjacency_confusion(g, empty)
    assert _counts(c) == (0, 0, 3, 3)
    assert math.isnan(stat_value("AP", g, empty))
    assert stat_value("AR", g, empty) == 0.0
    assert stat_value("McAdj", g, empty) == 0.0
    assert stat_value("F1Adj", g, empty) == 0.0
    assert stat_value("E", g, g, 2.5) == 2.5


def test_f1_arithmetic():
    c = ConfusionCounts(tp=1, fp=0, fn=1, tn=0)
    assert c.precision == 1.0 and c.recall == 0.5
    assert round(c.f1, 3) == 0.667


def test_mcc_no_overflow_at_scale():
    c = ConfusionCounts(tp=10**9, fp=10**9, fn=10**9, tn=10**12)
    assert -1 <= c.mcc <= 1


def test_node_mismatch_and_unknown_stat():
    a = graph_from_edges("AB", [])
    b = graph_from_edges("AC", [])
    with pytest.raises(GraphError):
        adjacency_confusion(a, b)
    with pytest.raises(StatisticError):
        stat_value("U", a, a)


def test_statistics_registry():
    assert list(STATISTICS) == ["AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "F1Adj", "F1Arrow", "SHD", "E"]
    assert STATISTICS["SHD"].legend == "SHD  = Structural Hamming Distance"
    assert STATISTICS["AP"].legend == "AP = Adjacency Precision"
    assert "U" not in STATISTICS
    assert STATISTICS["E"].direction is Direction.LOWER_BETTER


def test_confusion_matches_brute_force_on_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        n = int(rng.integers(2, 7))
        nodes = [f"V{i}" for i in range(n)]
        cmp = random_pair_graph(rng, nodes, rng.uniform(0.2, 0.9))
        est = random_pair_graph(rng, nodes, rng.uniform(0.2, 0.9))
        adj, arr, d = naive_confusion(cmp, est)
        ca, cr = adjacency_confusion(cmp, est), arrowhead_confusion(cmp, est)
        assert _counts(ca) == adj
        assert _counts(cr) == arr
        assert shd(cmp, est) == d
        assert ca.mcc == pytest.approx(naive_mcc(*adj), abs=1e-12)
        assert cr.mcc == pytest.approx(naive_mcc(*arr), abs=1e-12)
        assert ca.f1 == pytest.approx(naive_f1(*adj[:3]), abs=1e-12)
        assert cr.f1 == pytest.approx(naive_f1(*arr[:3]), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_statistic_bounds(n, seed):
    rng = np.random.default_rng(seed)
    nodes = [f"V{i}" for i in range(n)]
    cmp = random_pair_graph(rng, nodes)
    est = random_pair_graph(rng, nodes)
    for s in ("AP", "AR", "AHP", "AHR", "F1Adj", "F1Arrow"):
        v = stat_value(s, cmp, est)
        assert math.isnan(v) or 0 <= v <= 1
    for s in ("McAdj", "McArrow"):
        assert -1 <= stat_value(s, cmp, est) <= 1
    d = shd(cmp, est)
    assert d >= 0
    assert (d == 0) == (cmp.edge_set() == est.edge_set())
    assert shd(cmp, est) == shd(est, cmp)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(STATISTICS)), st.floats(-1, 200), st.floats(-1, 200))
def test_normalize_is_monotone_in_the_better_direction(stat, a, b):
    if stat in ("AP", "AR", "AHP", "AHR", "F1Adj", "F1Arrow"):
        a, b = (min(max(x / 200, 0), 1) for x in (a, b))
    elif stat.startswith("Mc"):
        a, b = (min(max(x / 100, -1), 1) for x in (a, b))
    else:
        a, b = abs(a), abs(b)
    lo, hi = sorted((a, b))
    f_lo, f_hi = normalize(stat, lo, 20), normalize(stat, hi, 20)
    assert 0 <= f_lo <= 1 and 0 <= f_hi <= 1
    if STATISTICS[stat].direction is Direction.HIGHER_BETTER:
        assert f_lo <= f_hi
    else:
        assert f_lo >= f_hi


def test_normalize_examples():
    assert normalize("AP", 0.933) == 0.933
    assert normalize("McAdj", -1) == 0 and normalize("McAdj", 1) == 1
    assert normalize("SHD", 0, 10) == 1.0
    assert normalize("SHD", 90, 10) == 0.0
    assert normalize("E", 0) == 1.0
    assert normalize("AP", math.nan) == 0.0


def test_utility_examples():
    assert utility(SIM_WEIGHTS, {"AP": 0.980, "AR": 0.677}) == pytest.approx(0.659, abs=5e-4)
    vals = dict(zip(["AP", "AR", "AHP", "AHR"], [0.920, 0.323, 0.998, 0.814]))
    assert utility(FILES_WEIGHTS, vals) == pytest.approx(0.622, abs=5e-4)
    assert utility({"AP": 0.0}, {"AP": 1.0}) == 0.0
    assert utility({"AP": 1.0}, {"AP": math.nan}) == 0.0


# Inputs are printed to 3 decimals, so rounding alone moves U by up to 0.000375
# (weights 1, .5, 1, .5) before U itself is rounded; these rows land 0.000625-0.00075
# from their printed value and cannot meet a 0.0005 tolerance.
_OFF_BY_ROUNDING = {(1, 3), (1, 1)}
_SIM_OFF_BY_ROUNDING = {2}


@pytest.mark.parametrize(
    "row",
    [
        pytest.param(r, marks=pytest.mark.xfail(strict=True, reason="rounded inputs"))
        if r[:2] in _OFF_BY_ROUNDING
        else r
        for r in FILES_TABLE
    ],
    ids=lambda r: f"alg{r[0]}-sim{r[1]}",
)
def test_utility_reproduces_printed_files_rows(row):
    _, _, ap, ar, ahp, ahr, u = row
    vals = {"AP": ap, "AR": ar, "AHP": ahp, "AHR": ahr}
    assert utility(FILES_WEIGHTS, vals) == pytest.approx(u, abs=5e-4)


@pytest.mark.parametrize(
    "row",
    [
        pytest.param(r, marks=pytest.mark.xfail(strict=True, reason="rounded inputs"))
        if r[0] in _SIM_OFF_BY_ROUNDING
        else r
        for r in SIM_TABLE
    ],
    ids=lambda r: f"alg{r[0]}",
)
def test_utility_reproduces_printed_simulation_rows(row):
    _, ap, ar, u = row
    assert utility(SIM_WEIGHTS, {"AP": ap, "AR": ar}) == pytest.approx(u, abs=5e-4)


def test_every_printed_row_within_rounding_bound():
    def bound(weights):
        return 5e-4 * sum(weights.values()) / len(weights) + 5e-4

    for r in FILES_TABLE:
        u = utility(FILES_WEIGHTS, dict(zip(["AP", "AR", "AHP", "AHR"], r[2:6])))
        assert abs(u - r[6]) <= bound(FILES_WEIGHTS)
    for r in SIM_TABLE:
        u = utility(SIM_WEIGHTS, {"AP": r[1], "AR": r[2]})
        assert abs(u - r[3]) <= bound(SIM_WEIGHTS)


def test_sorting_by_utility_reproduces_printed_row_order():
    rows = sorted(FILES_TABLE, key=lambda r: (r[1], r[0]))
    rows.sort(key=lambda r: -utility(FILES_WEIGHTS, dict(zip(["AP", "AR", "AHP", "AHR"], r[2:6]))))
    assert [(r[0], r[1]) for r in rows] == [(r[0], r[1]) for r in FILES_TABLE]
    rows = sorted(SIM_TABLE)
    rows.sort(key=lambda r: -utility(SIM_WEIGHTS, {"AP": r[1], "AR": r[2]}))
    assert [r[0] for r in rows] == [r[0] for r in SIM_TABLE]
