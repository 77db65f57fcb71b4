import math

import numpy as np
import pytest
from scipy import stats

from algcomp.datacore import DataSet, DataType, Variable
from algcomp.graphcore import graph_from_edges
from algcomp.oracle import (
    ChiSquareTest,
    DiscreteBicScore,
    DSepTest,
    FisherZTest,
    OracleError,
    ScoreId,
    ScoreSpec,
    SemBicScore,
    TestId,
    TestSpec,
    chi_square,
    discrete_bic_local,
    dsep_test,
    fisher_z,
    fisher_z_from_r,
    sem_bic_local,
)

from oracles import residual_partial_corr


def _chain_data(n=2000, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    b = 0.8 * a + rng.normal(size=n)
    c = 0.8 * b + rng.normal(size=n)
    return DataSet.continuous(["A", "B", "C"], np.column_stack([a, b, c]))


def _discrete(n=3000, seed=0, k=3):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, k, n)
    b = np.where(rng.random(n) < 0.7, a, rng.integers(0, k, n))
    c = np.where(rng.random(n) < 0.7, b, rng.integers(0, k, n))
    return DataSet([Variable(v, k) for v in "ABC"], np.column_stack([a, b, c]))


def test_fisher_z_matches_hand_computation():
    d = _chain_data()
    r = residual_partial_corr(d.column("A"), d.column("C"), d.column("B"))
    z = math.sqrt(2000 - 1 - 3) * math.atanh(r)
    p = 2 * (1 - stats.norm.cdf(abs(z)))
    res = fisher_z(d, "A", "C", ["B"], alpha=0.01)
    assert res.p_value == pytest.approx(p, abs=1e-9)
    assert res.independent == (p > 0.01)
    assert not fisher_z(d, "A", "C", alpha=0.01).independent


def test_fisher_z_dof_guard():
    with pytest.raises(OracleError):
        fisher_z_from_r(0.1, 5, 2, 0.05)


def test_fisher_z_false_positive_rate_near_alpha():
    rng = np.random.default_rng(11)
    rejects = 0
    trials = 400
    for _ in range(trials):
        d = DataSet.continuous(["X", "Y"], rng.normal(size=(200, 2)))
        rejects += not fisher_z(d, "X", "Y", alpha=0.05).independent
    assert abs(rejects / trials - 0.05) < 0.035


def test_chi_square_matches_scipy_unconditional():
    d = _discrete()
    table = np.zeros((3, 3))
    np.add.at(table, (d.discrete_column("A"), d.discrete_column("B")), 1)
    x2, p, dof, _ = stats.chi2_contingency(table, correction=False)
    res = chi_square(d, "A", "B")
    assert res.statistic == pytest.approx(x2, rel=1e-12)
    assert res.p_value == pytest.approx(p, rel=1e-9, abs=1e-300)
    assert not res.independent


def test_chi_square_stratified_sums_strata():
    d = _discrete(seed=2)
    total, dof = 0.0, 0
    a, b, c = (d.discrete_column(v) for v in "ABC")
    for s in range(3):
        m = b == s
        t = np.zeros((3, 3))
        np.add.at(t, (a[m], c[m]), 1)
        x2, _, df, _ = stats.chi2_contingency(t, correction=False)
        total += x2
        dof += df
    res = chi_square(d, "A", "C", ["B"])
    assert res.statistic == pytest.approx(total, rel=1e-12)
    assert res.p_value == pytest.approx(stats.chi2.sf(total, dof), rel=1e-9)
    assert res.independent  # A _||_ C | B in the chain


def test_chi_square_sparse_strata_are_skipped():
    d = DataSet([Variable("X", 2), Variable("Y", 2)], [[0, 0], [1, 1], [0, 1]])
    res = chi_square(d, "X", "Y")
    assert res.skipped and res.independent and res.p_value == 1.0


def test_dsep_test_is_exact():
    g = graph_from_edges("ABC", ["A --> B", "B --> C"])
    assert dsep_test(g, "A", "C", ["B"]).independent
    assert not dsep_test(g, "A", "C").independent
    t = DSepTest(g)
    t("A", "C")
    t("A", "B", ["C"])
    assert t.num_tests == 2


def test_sem_bic_matches_least_squares():
    d = _chain_data(500, seed=3)
    n = 500
    x = np.column_stack([np.ones(n), d.column("A"), d.column("C")])
    beta, *_ = np.linalg.lstsq(x, d.column("B"), rcond=None)
    resid = d.column("B") - x @ beta
    var = resid @ resid / n
    expected = -n * math.log(var) - 2.0 * 3 * math.log(n)
    assert sem_bic_local(d, "B", ["A", "C"], 2.0) == pytest.approx(expected, rel=1e-10)
    var0 = np.var(d.column("B"))
    assert sem_bic_local(d, "B", []) == pytest.approx(-n * math.log(var0) - math.log(n), rel=1e-10)


def test_sem_bic_prefers_true_parents():
    s = SemBicScore(_chain_data(3000, seed=5))
    assert s.local_score("C", ["B"]) > s.local_score("C", [])
    assert s.local_score("C", ["B"]) > s.local_score("C", ["A", "B"])


def test_sem_bic_rank_deficient_raises():
    rng = np.random.default_rng(0)
    x = rng.normal(size=50)
    d = DataSet.continuous(["A", "B", "C"], np.column_stack([x, 2 * x, rng.normal(size=50)]))
    with pytest.raises(OracleError):
        sem_bic_local(d, "C", ["A", "B"])


def test_discrete_bic_matches_counting_loop():
    d = _discrete(800, seed=4)
    n = 800
    b = d.discrete_column("B")
    a = d.discrete_column("A")
    c = d.discrete_column("C")
    ll = 0.0
    for sa in range(3):
        for sc in range(3):
            m = (a == sa) & (c == sc)
            for v in range(3):
                cnt = int(np.sum(m & (b == v)))
                if cnt:
                    ll += cnt * math.log(cnt / m.sum())
    expected = 2 * ll - 9 * 2 * math.log(n)
    assert discrete_bic_local(d, "B", ["A", "C"]) == pytest.approx(expected, rel=1e-10)


def test_score_graph_is_sum_of_locals():
    d = _chain_data(300)
    s = SemBicScore(d)
    g = graph_from_edges("ABC", ["A --> B", "B --> C"])
    assert s.score_graph(g) == pytest.approx(
        s.local_score("A", []) + s.local_score("B", ["A"]) + s.local_score("C", ["B"])
    )


def test_specs_describe_and_construct():
    fz = TestSpec(TestId.FISHER_Z)
    assert fz.description == "Fisher Z test"
    assert fz.data_type is DataType.CONTINUOUS
    assert fz.parameters == ["alpha"]
    assert isinstance(fz.make(_chain_data(100), 0.05), FisherZTest)
    assert isinstance(TestSpec(TestId.CHI_SQUARE).make(_discrete(100), 0.05), ChiSquareTest)
    assert TestSpec(TestId.D_SEPARATION).data_type is None
    assert ScoreSpec(ScoreId.SEM_BIC).description == "Sem BIC Score"
    assert isinstance(ScoreSpec(ScoreId.DISCRETE_BIC).make(_discrete(100)), DiscreteBicScore)
    with pytest.raises(OracleError):
        SemBicScore(_discrete(100))
