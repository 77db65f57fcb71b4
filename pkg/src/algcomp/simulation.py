"""Parameter registry, data generators and simulation bundles.

Every run of a simulation gets its own seed, derived from
``(master_seed, sim_index, run_index)`` with :class:`numpy.random.SeedSequence`.
That seed is split once more into a graph stream and a data stream, so a run
can be regenerated on its own without replaying earlier runs.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .datacore import DataError, DataSet, DataType, Variable, load_tabular
from .graphcore import Graph, GraphError, parse_graph_text, random_forward_dag

log = logging.getLogger(__name__)

DEFAULTS: dict[str, Any] = {
    "numMeasures": 100,
    "numLatents": 0,
    "avgDegree": 4,
    "maxDegree": 100,
    "maxIndegree": 100,
    "maxOutdegree": 100,
    "connected": 0,
    "numRuns": 10,
    "varLow": 1,
    "varHigh": 3,
    "coefLow": 0.5,
    "coefHigh": 1.5,
    "sampleSize": 1000,
    "alpha": 0.01,
    "penaltyDiscount": 1.0,
    "depth": -1,
    "numCategories": 3,
}

DESCRIPTIONS: dict[str, str] = {
    "numMeasures": "Number of measured variables",
    "numLatents": "Number of latent variables",
    "avgDegree": "Average degree of the random graph",
    "maxDegree": "Maximum degree of any node",
    "maxIndegree": "Maximum indegree of any node",
    "maxOutdegree": "Maximum outdegree of any node",
    "connected": "1 to require a connected graph (only 0 is supported)",
    "numRuns": "Number of runs (graph and data set pairs) per simulation",
    "varLow": "Lower bound of error variances",
    "varHigh": "Upper bound of error variances",
    "coefLow": "Lower bound of absolute edge coefficients",
    "coefHigh": "Upper bound of absolute edge coefficients",
    "sampleSize": "Number of rows per data set",
    "alpha": "Significance level of independence tests",
    "penaltyDiscount": "Multiplier of the BIC complexity penalty",
    "depth": "Maximum conditioning set size (-1 = unlimited)",
    "numCategories": "Number of categories per discrete variable",
}


class ParameterError(ValueError):
    pass


class Parameters:
    """Named parameters, each with an ordered list of values.

    Unset names fall back to :data:`DEFAULTS`.  Giving a name several values
    makes it a grid axis; see :func:`algcomp.harness.expand_grid`.
    """

    def __init__(self, values: dict[str, Any] | None = None, **kwargs):
        self._values: dict[str, list] = {}
        for name, v in {**(values or {}), **kwargs}.items():
            if isinstance(v, (list, tuple)):
                self.set(name, *v)
            else:
                self.set(name, v)

    def set(self, name: str, *values) -> "Parameters":
        if not values:
            raise ParameterError(f"no value given for {name!r}")
        self._values[name] = list(values)
        return self

    def is_set(self, name: str) -> bool:
        return name in self._values

    def values(self, name: str) -> list:
        if name in self._values:
            return list(self._values[name])
        if name in DEFAULTS:
            return [DEFAULTS[name]]
        raise ParameterError(f"unknown parameter {name!r} and no default")

    def get(self, name: str):
        vals = self.values(name)
        if len(vals) != 1:
            raise ParameterError(f"parameter {name!r} has {len(vals)} values")
        return vals[0]

    def explicit(self) -> list[str]:
        return list(self._values)

    def resolve(self, names: Iterable[str]) -> dict[str, Any]:
        """Single-valued point over ``names``."""
        return {n: self.get(n) for n in names}

    def grid(self, names: Sequence[str]) -> list[dict[str, Any]]:
        """Cross product over ``names``; earlier names vary slowest."""
        axes = [self.values(n) for n in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*axes)]

    def updated(self, other: dict[str, Any]) -> "Parameters":
        p = self.copy()
        for k, v in other.items():
            p.set(k, v)
        return p

    def copy(self) -> "Parameters":
        p = Parameters()
        p._values = {k: list(v) for k, v in self._values.items()}
        return p

    def __eq__(self, other):
        return isinstance(other, Parameters) and self._values == other._values

    def __repr__(self):
        return f"Parameters({self._values})"


def format_value(v) -> str:
    """Render a parameter value; integral numbers print without a fraction."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if math.isfinite(v) and v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def parse_value(text: str):
    text = text.strip()
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        low = text.lower()
        if low in ("true", "false"):
            return low == "true"
        return text


# -- generators -------------------------------------------------------------------


class SimulationStyle(enum.Enum):
    SEM = "sem"
    BAYES_NET = "bayes_net"

    @property
    def description(self) -> str:
        return _STYLE_DESCRIPTIONS[self]

    @property
    def data_type(self) -> DataType:
        return DataType.CONTINUOUS if self is SimulationStyle.SEM else DataType.DISCRETE

    @property
    def parameters(self) -> list[str]:
        return list(_STYLE_PARAMETERS[self])


_GRAPH_PARAMETERS = [
    "numMeasures",
    "numLatents",
    "avgDegree",
    "maxDegree",
    "maxIndegree",
    "maxOutdegree",
    "connected",
    "numRuns",
]
_STYLE_PARAMETERS = {
    SimulationStyle.SEM: _GRAPH_PARAMETERS
    + ["varLow", "varHigh", "coefLow", "coefHigh", "sampleSize"],
    SimulationStyle.BAYES_NET: _GRAPH_PARAMETERS + ["numCategories", "sampleSize"],
}
_STYLE_DESCRIPTIONS = {
    SimulationStyle.SEM: "Linear, Gaussian SEM simulation",
    SimulationStyle.BAYES_NET: "Bayes net simulation",
}


@dataclass
class SemModel:
    """Linear Gaussian SEM: coefficient per edge, error variance per node."""

    graph: Graph
    coefficients: dict[tuple[str, str], float]
    variances: dict[str, float]

    @classmethod
    def draw(cls, graph: Graph, params: dict, rng: np.random.Generator) -> "SemModel":
        lo, hi = params.get("coefLow", DEFAULTS["coefLow"]), params.get("coefHigh", DEFAULTS["coefHigh"])
        vlo, vhi = params.get("varLow", DEFAULTS["varLow"]), params.get("varHigh", DEFAULTS["varHigh"])
        if not 0 <= lo <= hi or not 0 < vlo <= vhi:
            raise ParameterError("need 0 <= coefLow <= coefHigh and 0 < varLow <= varHigh")
        coefs = {}
        for e in graph.edges():
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coefs[(e.a, e.b)] = sign * rng.uniform(lo, hi)
        variances = {n: rng.uniform(vlo, vhi) for n in graph.nodes}
        return cls(graph, coefs, variances)

    def coefficient_matrix(self) -> np.ndarray:
        nodes = self.graph.nodes
        b = np.zeros((len(nodes), len(nodes)))
        for (a, c), v in self.coefficients.items():
            b[nodes.index(a), nodes.index(c)] = v
        return b

    def covariance(self) -> np.ndarray:
        """Implied covariance over all nodes, in graph node order."""
        b = self.coefficient_matrix()
        inv = np.linalg.inv(np.eye(len(b)) - b)
        d = np.diag([self.variances[n] for n in self.graph.nodes])
        return inv.T @ d @ inv

    def sample(self, n: int, rng: np.random.Generator) -> DataSet:
        if n < 1:
            raise ParameterError("sampleSize must be >= 1")
        nodes = self.graph.nodes
        col = {v: j for j, v in enumerate(nodes)}
        x = np.zeros((n, len(nodes)))
        for v in self.graph.topological_order():
            j = col[v]
            x[:, j] = rng.normal(0.0, math.sqrt(self.variances[v]), size=n)
            for p in self.graph.parents(v):
                x[:, j] += self.coefficients[(p, v)] * x[:, col[p]]
        measured = self.graph.measured
        return DataSet.continuous(measured, x[:, [col[m] for m in measured]])


@dataclass
class BayesNetModel:
    """Multinomial Bayes net; one Dirichlet(1) conditional row per parent state."""

    graph: Graph
    num_categories: int
    cpts: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def draw(cls, graph: Graph, params: dict, rng: np.random.Generator) -> "BayesNetModel":
        k = params.get("numCategories", DEFAULTS["numCategories"])
        if k < 2:
            raise ParameterError("numCategories must be >= 2")
        cpts = {}
        for v in graph.nodes:
            rows = k ** len(graph.parents(v))
            cpts[v] = rng.dirichlet(np.ones(k), size=rows)
        return cls(graph, k, cpts)

    def parent_state(self, node: str, values: dict[str, np.ndarray]) -> np.ndarray:
        """Row index into ``cpts[node]``; the first parent is most significant."""
        idx = np.zeros((), dtype=np.int64)
        for p in self.graph.parents(node):
            idx = idx * self.num_categories + values[p]
        return idx

    def sample(self, n: int, rng: np.random.Generator) -> DataSet:
        if n < 1:
            raise ParameterError("sampleSize must be >= 1")
        values: dict[str, np.ndarray] = {}
        for v in self.graph.topological_order():
            state = np.broadcast_to(self.parent_state(v, values), (n,))
            cum = np.cumsum(self.cpts[v], axis=1)[state]
            u = rng.random(n)
            values[v] = np.minimum((u[:, None] >= cum).sum(axis=1), self.num_categories - 1)
        measured = self.graph.measured
        variables = [Variable(m, self.num_categories) for m in measured]
        return DataSet(variables, np.column_stack([values[m] for m in measured]))


def _require_acyclic(g: Graph):
    if not g.is_dag():
        raise GraphError("simulation needs a DAG")


def sem_simulate(g: Graph, params: dict, seed=None) -> DataSet:
    """Draw a linear Gaussian SEM over ``g`` and sample ``sampleSize`` rows.

    Latent columns take part in generation and are dropped from the output.
    """
    _require_acyclic(g)
    rng = np.random.default_rng(seed)
    model = SemModel.draw(g, params, rng)
    return model.sample(int(params.get("sampleSize", DEFAULTS["sampleSize"])), rng)


def bayes_net_simulate(g: Graph, params: dict, seed=None) -> DataSet:
    _require_acyclic(g)
    rng = np.random.default_rng(seed)
    model = BayesNetModel.draw(g, params, rng)
    return model.sample(int(params.get("sampleSize", DEFAULTS["sampleSize"])), rng)


_SIMULATORS = {
    SimulationStyle.SEM: sem_simulate,
    SimulationStyle.BAYES_NET: bayes_net_simulate,
}


def run_seed(master_seed: int, sim_index: int, run_index: int) -> np.random.SeedSequence:
    """Seed for one run; independent of every other (sim, run) cell."""
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, sim_index, run_index])


@dataclass
class SimulationBundle:
    description: str
    data_type: DataType
    runs: list[tuple[Graph, DataSet]]
    parameters: dict[str, Any]
    style: SimulationStyle | None = None

    @property
    def num_runs(self) -> int:
        return len(self.runs)

    def true_graph(self, index: int) -> Graph:
        return self.runs[index][0]

    def data_set(self, index: int) -> DataSet:
        return self.runs[index][1]


def random_graph(params: dict, seed=None) -> Graph:
    p = {**DEFAULTS, **params}
    return random_forward_dag(
        int(p["numMeasures"]),
        int(p["numLatents"]),
        float(p["avgDegree"]),
        int(p["maxDegree"]),
        int(p["maxIndegree"]),
        int(p["maxOutdegree"]),
        int(p["connected"]),
        seed=seed,
    )


def make_simulation(
    style: SimulationStyle,
    params: dict | Parameters,
    master_seed: int,
    sim_index: int = 0,
    graph: Graph | None = None,
) -> SimulationBundle:
    """Build ``numRuns`` (graph, data) pairs for one parameter point.

    With ``graph`` given, every run simulates fresh parameters and data on
    that fixed graph instead of drawing a random one.
    """
    if isinstance(params, Parameters):
        params = params.resolve(style.parameters)
    else:
        params = {n: params.get(n, DEFAULTS[n]) for n in style.parameters}
    runs = []
    for r in range(int(params["numRuns"])):
        graph_ss, data_ss = run_seed(master_seed, sim_index, r).spawn(2)
        g = graph if graph is not None else random_graph(params, graph_ss)
        data = _SIMULATORS[style](g, params, data_ss)
        runs.append((g, data))
    return SimulationBundle(style.description, style.data_type, runs, params, style)


# -- loading saved simulations ----------------------------------------------------

LOADED_PREFIX = "Load data sets and graphs from a directory."


def read_parameters_file(path: Path) -> dict[str, Any]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        m = re.fullmatch(r"\s*([A-Za-z_][\w.]*)\s*=\s*(\S.*?)\s*", line)
        if not m:
            raise ParameterError(f"{path}:{lineno}: cannot parse {line!r}")
        out[m.group(1)] = parse_value(m.group(2))
    return out


def write_parameters_file(path: Path, params: dict[str, Any]) -> None:
    text = "".join(f"{k} = {format_value(v)}\n" for k, v in params.items())
    Path(path).write_text(text, encoding="utf-8")


def _save_dirs(root: Path) -> list[Path]:
    found = []
    for d in root.iterdir() if root.is_dir() else ():
        m = re.fullmatch(r"save(\d+)", d.name)
        if m and d.is_dir():
            found.append((int(m.group(1)), d))
    return [d for _, d in sorted(found)]


def _count_runs(d: Path) -> int:
    n = 0
    while (d / "graph" / f"graph.{n + 1}.txt").exists():
        n += 1
    return n


def load_from_directory(root) -> list[SimulationBundle]:
    """Load every ``save<k>`` directory under ``root``, in index order."""
    root = Path(root)
    bundles = []
    for d in _save_dirs(root):
        params = read_parameters_file(d / "parameters.txt") if (d / "parameters.txt").exists() else {}
        n = int(params.get("numRuns", _count_runs(d)))
        style = SimulationStyle.BAYES_NET if "numCategories" in params else SimulationStyle.SEM
        runs = []
        for i in range(1, n + 1):
            gpath = d / "graph" / f"graph.{i}.txt"
            dpath = d / "data" / f"data.{i}.txt"
            for p in (gpath, dpath):
                if not p.exists():
                    raise FileNotFoundError(f"missing simulation file {p}")
            text = dpath.read_text(encoding="utf-8")
            header = text.split("\n", 1)[0].split("\t")
            if style is SimulationStyle.BAYES_NET:
                k = int(params["numCategories"])
                declared = {name: k for name in header}
                try:
                    data = load_tabular(text, declared)
                except DataError:
                    data = load_tabular(text)
            else:
                data = load_tabular(text, {name: None for name in header})
            g = parse_graph_text(gpath.read_text(encoding="utf-8"))
            measured = set(data.names)
            missing = measured - set(g.nodes)
            if missing:
                raise GraphError(f"{dpath}: columns {sorted(missing)} not in {gpath}")
            g = _with_latents(g, [v for v in g.nodes if v not in measured])
            runs.append((g, data))
        description = f"{LOADED_PREFIX}\n\n{style.description}"
        bundles.append(SimulationBundle(description, style.data_type, runs, params, style))
    return bundles


def _with_latents(g: Graph, latents: list[str]) -> Graph:
    out = Graph(g.nodes, latents)
    for e in g.edges():
        out.add(e)
    return out
