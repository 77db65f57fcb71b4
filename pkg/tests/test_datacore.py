import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from algcomp.datacore import (
    DataError,
    DataSet,
    DataType,
    Variable,
    correlation_matrix,
    cross_tabulate,
    load_tabular,
    partial_correlation,
    save_tabular,
)

from oracles import residual_partial_corr


def _gaussian(n=400, p=5, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(p, p))
    x = rng.normal(size=(n, p)) @ a
    return DataSet.continuous([f"V{i}" for i in range(p)], x)


def test_dataset_types_and_validation():
    d = DataSet([Variable("A", 3), Variable("B", 2)], [[0, 1], [2, 0]])
    assert d.data_type is DataType.DISCRETE
    assert d.discrete_column("A").tolist() == [0, 2]
    mixed = DataSet([Variable("A", 2), Variable("B")], [[0, 1.5]])
    assert mixed.data_type is DataType.MIXED
    with pytest.raises(DataError, match="outside"):
        DataSet([Variable("A", 2)], [[2]])
    with pytest.raises(DataError, match="non-finite"):
        DataSet.continuous(["A"], [[np.nan]])
    with pytest.raises(DataError):
        DataSet.continuous(["A", "A"], [[1, 2]])
    with pytest.raises(ValueError):
        Variable("A", 1)


def test_values_are_read_only():
    d = _gaussian(10, 2)
    with pytest.raises(ValueError):
        d.values[0, 0] = 1.0


def test_correlation_matrix_matches_numpy():
    d = _gaussian()
    c = correlation_matrix(d)
    assert np.allclose(c.values, np.corrcoef(d.values, rowvar=False), atol=1e-12)
    assert c.sample_size == 400
    assert c["V1", "V2"] == c["V2", "V1"]


def test_correlation_matrix_errors():
    with pytest.raises(DataError, match="zero variance"):
        correlation_matrix(DataSet.continuous(["A", "B"], [[1, 2], [1, 3]]))
    with pytest.raises(DataError, match="discrete"):
        correlation_matrix(DataSet([Variable("A", 2)], [[0], [1]]))


def test_partial_correlation_matches_residual_oracle():
    d = _gaussian(600, 6, seed=4)
    c = correlation_matrix(d)
    rng = np.random.default_rng(1)
    for _ in range(30):
        k = int(rng.integers(0, 4))
        x, y, *z = rng.choice(d.names, 2 + k, replace=False)
        zcols = d.values[:, [d.column_index(v) for v in z]] if z else None
        expected = residual_partial_corr(d.column(x), d.column(y), zcols)
        assert partial_correlation(c, x, y, z) == pytest.approx(expected, abs=1e-10)


def test_partial_correlation_is_order_invariant():
    c = correlation_matrix(_gaussian(300, 5, seed=7))
    a = partial_correlation(c, "V0", "V1", ["V2", "V3"])
    assert a == partial_correlation(c, "V1", "V0", ["V3", "V2"])


def test_partial_correlation_singular_raises():
    rng = np.random.default_rng(0)
    x = rng.normal(size=100)
    d = DataSet.continuous(["A", "B", "C"], np.column_stack([x, rng.normal(size=100), x]))
    c = correlation_matrix(d)
    with pytest.raises(DataError, match="singular"):
        partial_correlation(c, "B", "A", ["C"])


def test_cross_tabulate_counts():
    d = DataSet(
        [Variable("X", 2), Variable("Y", 2), Variable("Z", 2)],
        [[0, 0, 0], [0, 1, 0], [1, 1, 1], [1, 1, 1], [0, 0, 1]],
    )
    (key, t), = cross_tabulate(d, "X", "Y")
    assert key == () and t.tolist() == [[2, 1], [0, 2]]
    strata = dict(cross_tabulate(d, "X", "Y", ["Z"]))
    assert strata[(0,)].tolist() == [[1, 1], [0, 0]]
    assert strata[(1,)].tolist() == [[1, 0], [0, 2]]


def test_tabular_roundtrip_is_byte_identical():
    d = _gaussian(20, 3)
    text = save_tabular(d)
    back = load_tabular(text, {n: None for n in d.names})
    assert back == d
    assert save_tabular(back) == text
    disc = DataSet([Variable("A", 3), Variable("B", 3)], [[0, 2], [1, 1], [2, 0]])
    text = save_tabular(disc)
    assert text == "A\tB\n0\t2\n1\t1\n2\t0\n"
    assert load_tabular(text) == disc


def test_load_tabular_errors_name_row_and_column():
    with pytest.raises(DataError, match="row 3"):
        load_tabular("A\tB\n1\t2\n3\n")
    with pytest.raises(DataError, match="column 'B'"):
        load_tabular("A\tB\n1\tx\n")
    with pytest.raises(DataError, match="header"):
        load_tabular("")


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
                  elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_tabular_roundtrip_property(values):
    d = DataSet.continuous([f"C{j}" for j in range(values.shape[1])], values)
    back = load_tabular(save_tabular(d), d.variables)
    assert np.array_equal(back.values, d.values)
