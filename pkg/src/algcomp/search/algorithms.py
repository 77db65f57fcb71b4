"""Algorithm descriptors: what to run, with which test or score and tuning."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from ..datacore import DataSet, DataType
from ..graphcore import Graph, GraphKind, cpdag_of
from ..oracle import ScoreSpec, TestId, TestSpec
from ..simulation import DEFAULTS
from . import external
from .ges import ges_search
from .pc import PcVariant, pc_search


class AlgorithmError(ValueError):
    pass


class AlgorithmId(enum.Enum):
    PC = "pc"
    PC_STABLE = "pc_stable"
    CPC = "cpc"
    CPC_STABLE = "cpc_stable"
    GES = "ges"
    EXTERNAL_NATIVE = "external_native"
    EXTERNAL_MATRIX = "external_matrix"

    @property
    def is_pc_family(self) -> bool:
        return self.value in {v.value for v in PcVariant}

    @property
    def is_external(self) -> bool:
        return self in (AlgorithmId.EXTERNAL_NATIVE, AlgorithmId.EXTERNAL_MATRIX)


ALGORITHM_NAMES = {
    AlgorithmId.PC: 'PC ("Peter and Clark")',
    AlgorithmId.PC_STABLE: 'PC-stable ("Peter and Clark" stable)',
    AlgorithmId.CPC: 'CPC (Conservative "Peter and Clark")',
    AlgorithmId.CPC_STABLE: 'CPC-stable (Conservative "Peter and Clark" stable)',
    AlgorithmId.GES: "GES (Greedy Equivalence Search)",
    AlgorithmId.EXTERNAL_NATIVE: "External results (native graph files)",
    AlgorithmId.EXTERNAL_MATRIX: "External results (adjacency matrix files)",
}


def java_double(v: float) -> str:
    """Format a number the way Java's Double.toString does (1.0E-4, 0.001, 2.5)."""
    v = float(v)
    if v == 0:
        return "0.0"
    if not math.isfinite(v):
        return "NaN" if math.isnan(v) else ("Infinity" if v > 0 else "-Infinity")
    if 1e-3 <= abs(v) < 1e7:
        s = repr(v)
        return s if "." in s or "e" in s else s + ".0"
    for digits in range(1, 18):  # shortest mantissa that round-trips
        cand = f"{v:.{digits - 1}e}"
        if float(cand) == v:
            break
    mant, exp = cand.split("e")
    if "." not in mant:
        mant += ".0"
    return f"{mant}E{int(exp)}"


@dataclass
class AlgorithmVariant:
    """An algorithm bound to its test or score, tuning values and comparison graph.

    ``shown`` lists the tuning parameters echoed in the description (the
    ones that vary across the grid).  External variants read results from
    ``results_root``/``external_dir`` instead of searching.
    """

    id: AlgorithmId
    test: TestSpec | None = None
    score: ScoreSpec | None = None
    tuning: dict[str, Any] = field(default_factory=dict)
    initial: "AlgorithmVariant | None" = None
    comparison_kind: GraphKind = GraphKind.TRUE_CPDAG
    external_dir: str | None = None
    results_root: Path | None = None
    shown: tuple[str, ...] = ()

    def __post_init__(self):
        if self.id.is_pc_family and self.test is None:
            raise AlgorithmError(f"{self.id.value} needs an independence test")
        if self.id is AlgorithmId.GES and self.score is None:
            raise AlgorithmError("ges needs a score")
        if self.id.is_external and not self.external_dir:
            raise AlgorithmError(f"{self.id.value} needs a results directory")

    # -- metadata -----------------------------------------------------------

    def parameters(self) -> list[str]:
        """Names of tuning parameters this variant reads (initial included)."""
        names: list[str] = []
        if self.test is not None:
            names += self.test.parameters
        if self.score is not None:
            names += self.score.parameters
        if self.id.is_pc_family:
            names.append("depth")
        if self.initial is not None:
            names += [n for n in self.initial.parameters() if n not in names]
        return list(dict.fromkeys(names))

    def resolved(self, name: str):
        return self.tuning.get(name, DEFAULTS.get(name))

    @property
    def data_type(self) -> DataType | None:
        """Required data type, or None if the variant runs on anything."""
        types = set()
        if self.test is not None and self.test.data_type is not None:
            types.add(self.test.data_type)
        if self.score is not None:
            types.add(self.score.data_type)
        if self.initial is not None and self.initial.data_type is not None:
            types.add(self.initial.data_type)
        if len(types) > 1:
            raise AlgorithmError("test, score and initial algorithm disagree on data type")
        return types.pop() if types else None

    def accepts(self, data_type: DataType) -> bool:
        need = self.data_type
        return need is None or need is data_type

    def _core_description(self) -> str:
        if self.id.is_external:
            return Path(self.external_dir).name.replace("_", " ")
        base = ALGORITHM_NAMES[self.id]
        spec = self.test if self.test is not None else self.score
        return f"{base} using {spec.description}"

    @property
    def description(self) -> str:
        text = self._core_description()
        if self.initial is not None:
            text += " \n     with initial graph from " + self.initial._core_description()
        if self.shown:
            text += ", " + ", ".join(f"{n} = {java_double(self.resolved(n))}" for n in self.shown)
        return text

    def with_tuning(self, tuning: dict[str, Any], shown=()) -> "AlgorithmVariant":
        init = self.initial.with_tuning(tuning) if self.initial is not None else None
        mine = {n: tuning[n] for n in self.parameters() if n in tuning}
        return replace(self, tuning={**self.tuning, **mine}, initial=init, shown=tuple(shown))

    # -- running ------------------------------------------------------------

    def search(
        self,
        data: DataSet | None,
        true_graph: Graph | None = None,
        sim_index: int = 0,
        run_index: int = 1,
    ) -> Graph:
        """Estimate a graph for one run (``run_index`` is 1-based)."""
        if self.id is AlgorithmId.EXTERNAL_NATIVE:
            return external.load_native(self.results_root, self.external_dir, sim_index, run_index)
        if self.id is AlgorithmId.EXTERNAL_MATRIX:
            return external.load_matrix(self.results_root, self.external_dir, sim_index, run_index)

        if data is not None and not self.accepts(data.data_type):
            raise AlgorithmError(f"{self.description} cannot run on {data.data_type.value} data")
        variables = data.names if data is not None else true_graph.measured
        initial = None
        if self.initial is not None:
            initial = self.initial.search(data, true_graph, sim_index, run_index)

        if self.id.is_pc_family:
            if self.test.id is TestId.D_SEPARATION:
                test = self.test.make(None, true_graph=true_graph)
            else:
                test = self.test.make(data, float(self.resolved("alpha")))
            return pc_search(
                PcVariant(self.id.value), test, variables, int(self.resolved("depth")), initial
            )
        score = self.score.make(data, float(self.resolved("penaltyDiscount")))
        return ges_search(score, variables, initial)

    def elapsed_ms(self, sim_index: int, run_index: int) -> int:
        """Recorded elapsed time of an external run, or -99."""
        return external.elapsed_from_file(self.results_root, self.external_dir, sim_index, run_index)


def comparison_graph_for(
    variant: AlgorithmVariant, true_dag: Graph, override: GraphKind | None = None
) -> Graph:
    """Graph the variant's estimate is scored against.

    Latent nodes are removed first (induced subgraph over measured nodes).
    """
    kind = override or variant.comparison_kind
    measured = true_dag.subgraph(true_dag.measured) if true_dag.latent else true_dag
    if kind is GraphKind.TRUE_DAG:
        return measured
    return cpdag_of(measured)
