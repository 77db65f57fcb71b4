"""Conditional-independence tests and decomposable BIC scores.

Tests and scores come in two layers: one-shot functions (:func:`fisher_z`,
:func:`chi_square`, :func:`sem_bic_local`, ...) and small stateful objects
built from a :class:`TestSpec` / :class:`ScoreSpec` that cache per-data-set
work and count how many tests they ran.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .datacore import (
    CorrelationMatrix,
    DataSet,
    DataType,
    correlation_matrix,
    cross_tabulate,
    partial_correlation,
)
from .graphcore import Graph, d_separated


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class IndependenceDecision:
    independent: bool
    p_value: float
    statistic: float
    skipped: bool = False


# -- tests ------------------------------------------------------------------------


def fisher_z_from_r(r: float, n: int, cond_size: int, alpha: float) -> IndependenceDecision:
    dof = n - cond_size - 3
    if dof <= 0:
        raise OracleError(f"Fisher Z needs N - |Z| - 3 > 0 (got {dof})")
    r = min(max(r, -1.0 + 1e-15), 1.0 - 1e-15)
    z = math.sqrt(dof) * 0.5 * math.log((1 + r) / (1 - r))
    p = 2.0 * stats.norm.sf(abs(z))
    return IndependenceDecision(p > alpha, float(p), float(z))


def fisher_z(data: DataSet | CorrelationMatrix, x: str, y: str, z: Iterable[str] = (), alpha: float = 0.01):
    """Fisher Z test of ``x _||_ y | z`` on continuous data.

    ``data`` may be a DataSet or a precomputed correlation matrix.
    """
    corr = data if isinstance(data, CorrelationMatrix) else correlation_matrix(data)
    z = list(z)
    r = partial_correlation(corr, x, y, z)
    return fisher_z_from_r(r, corr.sample_size, len(z), alpha)


def _stratum_chi_square(table: np.ndarray) -> tuple[float, int] | None:
    """Pearson X^2 and dof for one stratum, or None when it fails the floor.

    Rows and columns with zero marginals are dropped.  The stratum must have
    at least 5 observations and every expected count must be >= 1.
    """
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    total = table.sum()
    if total < 5 or table.size == 0:
        return None
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    if expected.min() < 1:
        return None
    r, c = table.shape
    dof = (r - 1) * (c - 1)
    x2 = float(((table - expected) ** 2 / expected).sum())
    return x2, dof


def chi_square(data: DataSet, x: str, y: str, z: Sequence[str] = (), alpha: float = 0.01):
    """Stratified Pearson chi-square test on discrete data."""
    x2, dof = 0.0, 0
    for _, table in cross_tabulate(data, x, y, list(z)):
        res = _stratum_chi_square(table)
        if res is None:
            continue
        x2 += res[0]
        dof += res[1]
    if dof == 0:
        return IndependenceDecision(True, 1.0, 0.0, skipped=True)
    p = float(stats.chi2.sf(x2, dof))
    return IndependenceDecision(p > alpha, p, x2)


def dsep_test(graph: Graph, x: str, y: str, z: Iterable[str] = ()) -> IndependenceDecision:
    indep = d_separated(graph, x, y, z)
    return IndependenceDecision(indep, 1.0 if indep else 0.0, 0.0)


class TestId(enum.Enum):
    __test__ = False

    FISHER_Z = "fisher_z"
    CHI_SQUARE = "chi_square"
    D_SEPARATION = "d_separation"


class ScoreId(enum.Enum):
    SEM_BIC = "sem_bic"
    DISCRETE_BIC = "discrete_bic"


_TEST_INFO = {
    TestId.FISHER_Z: ("Fisher Z test", DataType.CONTINUOUS, ["alpha"]),
    TestId.CHI_SQUARE: ("Chi Square test", DataType.DISCRETE, ["alpha"]),
    TestId.D_SEPARATION: ("D-separation Oracle", None, []),
}
_SCORE_INFO = {
    ScoreId.SEM_BIC: ("Sem BIC Score", DataType.CONTINUOUS, ["penaltyDiscount"]),
    ScoreId.DISCRETE_BIC: ("Discrete BIC Score", DataType.DISCRETE, ["penaltyDiscount"]),
}


@dataclass(frozen=True)
class TestSpec:
    """Which test to build; ``alpha`` is bound when a test object is made."""

    __test__ = False

    id: TestId

    @property
    def description(self) -> str:
        return _TEST_INFO[self.id][0]

    @property
    def data_type(self) -> DataType | None:
        """Required data type, or None for the graph oracle."""
        return _TEST_INFO[self.id][1]

    @property
    def parameters(self) -> list[str]:
        return list(_TEST_INFO[self.id][2])

    def make(self, data: DataSet | None, alpha: float = 0.01, true_graph: Graph | None = None):
        if self.id is TestId.D_SEPARATION:
            if true_graph is None:
                raise OracleError("the d-separation test needs the true graph")
            return DSepTest(true_graph)
        if data is None:
            raise OracleError(f"{self.description} needs data")
        if data.data_type is not self.data_type:
            raise OracleError(f"{self.description} needs {self.data_type.value} data")
        if self.id is TestId.FISHER_Z:
            return FisherZTest(data, alpha)
        return ChiSquareTest(data, alpha)


@dataclass(frozen=True)
class ScoreSpec:
    id: ScoreId

    @property
    def description(self) -> str:
        return _SCORE_INFO[self.id][0]

    @property
    def data_type(self) -> DataType:
        return _SCORE_INFO[self.id][1]

    @property
    def parameters(self) -> list[str]:
        return list(_SCORE_INFO[self.id][2])

    def make(self, data: DataSet, penalty_discount: float = 1.0):
        if data.data_type is not self.data_type:
            raise OracleError(f"{self.description} needs {self.data_type.value} data")
        if self.id is ScoreId.SEM_BIC:
            return SemBicScore(data, penalty_discount)
        return DiscreteBicScore(data, penalty_discount)


class _CountingTest:
    def __init__(self, variables: list[str]):
        self.variables = variables
        self.num_tests = 0

    def __call__(self, x: str, y: str, z: Iterable[str] = ()) -> IndependenceDecision:
        self.num_tests += 1
        return self.decide(x, y, tuple(z))

    def decide(self, x, y, z) -> IndependenceDecision:
        raise NotImplementedError

    def is_independent(self, x: str, y: str, z: Iterable[str] = ()) -> bool:
        return self(x, y, z).independent


class FisherZTest(_CountingTest):
    def __init__(self, data: DataSet, alpha: float):
        super().__init__(data.names)
        self.alpha = alpha
        self.corr = correlation_matrix(data)

    def decide(self, x, y, z):
        return fisher_z(self.corr, x, y, z, self.alpha)


class ChiSquareTest(_CountingTest):
    def __init__(self, data: DataSet, alpha: float):
        super().__init__(data.names)
        self.alpha = alpha
        self.data = data

    def decide(self, x, y, z):
        return chi_square(self.data, x, y, z, self.alpha)


class DSepTest(_CountingTest):
    """Answers independence queries by d-separation in the true DAG."""

    def __init__(self, graph: Graph):
        super().__init__(graph.measured)
        self.graph = graph

    def decide(self, x, y, z):
        return dsep_test(self.graph, x, y, z)


# -- scores -----------------------------------------------------------------------


def sem_bic_local(data: DataSet, y: str, parents: Iterable[str], penalty_discount: float = 1.0) -> float:
    """Gaussian BIC of ``y`` regressed on ``parents`` (higher is better).

    ``-N ln(sigma^2) - c (|parents| + 1) ln N`` with ``sigma^2`` the maximum
    likelihood residual variance of the least-squares fit with intercept.
    """
    return SemBicScore(data, penalty_discount).local_score(y, parents)


def discrete_bic_local(data: DataSet, y: str, parents: Iterable[str], penalty_discount: float = 1.0) -> float:
    """Multinomial BIC of ``y`` given ``parents`` (higher is better).

    ``2 sum n ln(n / n_stratum) - c q (k - 1) ln N``, with ``q`` the number
    of parent configurations and ``k`` the categories of ``y``.
    """
    return DiscreteBicScore(data, penalty_discount).local_score(y, parents)


class _CachedScore:
    def __init__(self, data: DataSet, penalty_discount: float):
        if penalty_discount <= 0:
            raise OracleError("penaltyDiscount must be > 0")
        self.data = data
        self.variables = data.names
        self.penalty_discount = penalty_discount
        self.n = data.num_rows
        self._cache: dict[tuple[str, frozenset], float] = {}

    def local_score(self, y: str, parents: Iterable[str]) -> float:
        parents = frozenset(parents)
        if y in parents:
            raise OracleError(f"{y} cannot be its own parent")
        key = (y, parents)
        if key not in self._cache:
            self._cache[key] = self._compute(y, sorted(parents))
        return self._cache[key]

    def _compute(self, y: str, parents: list[str]) -> float:
        raise NotImplementedError

    def score_graph(self, dag: Graph) -> float:
        """Total score of a DAG: the sum of its local scores."""
        return sum(self.local_score(v, dag.parents(v)) for v in dag.nodes)


class SemBicScore(_CachedScore):
    def __init__(self, data: DataSet, penalty_discount: float = 1.0):
        if data.data_type is not DataType.CONTINUOUS:
            raise OracleError("SEM BIC needs continuous data")
        super().__init__(data, penalty_discount)
        centred = data.values - data.values.mean(axis=0)
        self.cov = centred.T @ centred / self.n  # maximum likelihood

    def _compute(self, y, parents):
        iy = self.data.column_index(y)
        var = self.cov[iy, iy]
        if parents:
            ip = [self.data.column_index(p) for p in parents]
            sxx = self.cov[np.ix_(ip, ip)]
            sxy = self.cov[ip, iy]
            if np.linalg.cond(sxx) > 1e12:
                raise OracleError(f"rank-deficient design for {y} | {parents}")
            var = var - sxy @ np.linalg.solve(sxx, sxy)
        if var <= 0:
            raise OracleError(f"non-positive residual variance for {y} | {parents}")
        n = self.n
        return -n * math.log(var) - self.penalty_discount * (len(parents) + 1) * math.log(n)


class DiscreteBicScore(_CachedScore):
    def __init__(self, data: DataSet, penalty_discount: float = 1.0):
        if data.data_type is not DataType.DISCRETE:
            raise OracleError("discrete BIC needs discrete data")
        super().__init__(data, penalty_discount)

    def _compute(self, y, parents):
        k = self.data.variable(y).num_categories
        cy = self.data.discrete_column(y)
        state = np.zeros(self.n, dtype=np.int64)
        q = 1
        for p in parents:
            kp = self.data.variable(p).num_categories
            state = state * kp + self.data.discrete_column(p)
            q *= kp
        counts = np.zeros((q, k), dtype=np.int64) if q <= 10**6 else None
        if counts is None:
            _, state = np.unique(state, return_inverse=True)
            counts = np.zeros((state.max() + 1, k), dtype=np.int64)
        np.add.at(counts, (state, cy), 1)
        totals = counts.sum(axis=1, keepdims=True)
        nz = counts > 0
        ll = float((counts[nz] * np.log(counts[nz] / np.broadcast_to(totals, counts.shape)[nz])).sum())
        return 2.0 * ll - self.penalty_discount * q * (k - 1) * math.log(self.n)
