"""Comparison engine: grid expansion, execution, aggregation and the report.

A comparison crosses every simulation point with every algorithm variant.
Each (simulation, variant) pair is a *cell*; each cell holds one record per
run.  Cells are aggregated into three tables (mean, sample standard
deviation, minimum) that share the same row order.
"""

from __future__ import annotations

import datetime as _dt
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import metrics
from .datacore import save_tabular
from .graphcore import Graph, GraphKind, parse_graph_text, render_graph_text
from .metrics import STATISTICS
from .oracle import ScoreId, ScoreSpec, TestId, TestSpec
from .search import (
    ALGORITHM_NAMES,
    ELAPSED_UNAVAILABLE,
    AlgorithmId,
    AlgorithmVariant,
    comparison_graph_for,
    java_double,
)
from .simulation import (
    DEFAULTS,
    DESCRIPTIONS,
    Parameters,
    SimulationBundle,
    SimulationStyle,
    format_value,
    load_from_directory,
    make_simulation,
    write_parameters_file,
)

log = logging.getLogger(__name__)

DEFAULT_MASTER_SEED = 20160723

WEIGHT_NOTE = (
    "Note that f for each statistic is a function that maps the statistic to the \n"
    "interval [0, 1], with higher being better."
)
LATENT_NOTE = (
    "Note: latent variables are marginalized by taking the subgraph over measured "
    "variables; this is an approximation of the true marginal structure."
)
TABLE_TITLES = ("AVERAGE STATISTICS", "STANDARD DEVIATIONS", "WORST CASE")


class HarnessError(RuntimeError):
    pass


@dataclass
class ComparisonConfig:
    show_algorithm_indices: bool = True
    show_simulation_indices: bool = True
    sort_by_utility: bool = False
    show_utilities: bool = False
    tab_delimited: bool = False
    comparison_override: GraphKind | None = None
    master_seed: int = DEFAULT_MASTER_SEED


@dataclass(frozen=True)
class ParameterColumn:
    """Report column echoing a parameter value; never part of the utility."""

    name: str

    def __str__(self):
        return f"param:{self.name}"


@dataclass(frozen=True)
class SimSpec:
    """A simulation style plus an optional fixed graph (else random forward)."""

    style: SimulationStyle
    graph_file: str | None = None

    def fixed_graph(self) -> Graph | None:
        if self.graph_file is None:
            return None
        return parse_graph_text(Path(self.graph_file).read_text(encoding="utf-8"))


@dataclass
class RunRecord:
    estimated_graph: Graph | None
    elapsed_seconds: float
    stat_values: dict[str, float]
    error: str | None = None


@dataclass
class Cell:
    sim_index: int  # 1-based
    alg_index: int  # 1-based
    runs: list[RunRecord] = field(default_factory=list)
    skipped: bool = False


@dataclass
class Row:
    sim_index: int
    alg_index: int
    parameter_values: dict[str, Any]
    mean: dict[str, float]
    sd: dict[str, float]
    worst: dict[str, float]
    utility: float


@dataclass
class ReportTables:
    legend: list[str]
    parameters: list[str]
    simulations: list[str]
    algorithms: list[str]
    weighting: list[str]
    columns: list[str | ParameterColumn]
    rows: list[Row]
    show_sim: bool
    show_alg: bool
    show_utility: bool
    cells: list[Cell] = field(default_factory=list)


# -- grid expansion -------------------------------------------------------------


def _tuning_names(variants: Iterable[AlgorithmVariant]) -> list[str]:
    names: list[str] = []
    for v in variants:
        names += [n for n in v.parameters() if n not in names]
    return names


def expand_grid(
    p: Parameters,
    sim_specs: Sequence[SimSpec],
    alg_specs: Sequence[AlgorithmVariant],
) -> tuple[list[tuple[SimSpec, dict[str, Any]]], list[AlgorithmVariant]]:
    """Simulation points and algorithm variants for a parameter grid.

    Multi-valued simulation parameters are crossed in the order they were
    set (earlier ones vary slowest); likewise each algorithm is crossed over
    its own multi-valued tuning parameters.
    """
    points = []
    for spec in sim_specs:
        axes = [n for n in p.explicit() if n in spec.style.parameters]
        base = {n: p.values(n)[0] for n in spec.style.parameters}
        for combo in p.grid(axes):
            points.append((spec, {**base, **combo}))

    variants = []
    for alg in alg_specs:
        names = alg.parameters()
        axes = [n for n in p.explicit() if n in names]
        multi = tuple(n for n in axes if len(p.values(n)) > 1)
        for combo in p.grid(axes):
            variants.append(alg.with_tuning(combo, shown=multi))
    return points, variants


# -- execution ------------------------------------------------------------------


def aggregate(values: Sequence[float]) -> tuple[float, float, float]:
    """(mean, sample sd, minimum), ignoring NaN entries."""
    arr = np.asarray(values, dtype=float)
    arr = arr[~np.isnan(arr)]
    if arr.size == 0:
        return math.nan, math.nan, math.nan
    sd = float(np.std(arr, ddof=1)) if arr.size > 1 else math.nan
    return float(arr.mean()), sd, float(arr.min())


def _nan_stats() -> dict[str, float]:
    return {s: math.nan for s in STATISTICS}


def _bundle_variant(variant: AlgorithmVariant, bundle: SimulationBundle) -> AlgorithmVariant:
    # parameters stored with a simulation take precedence over the grid
    stored = {n: bundle.parameters[n] for n in variant.parameters() if n in bundle.parameters}
    return variant.with_tuning(stored, shown=variant.shown) if stored else variant


def _run_once(variant, bundle, sim_index, r, override) -> RunRecord:
    true_dag = bundle.true_graph(r)
    data = bundle.data_set(r)
    try:
        start = time.perf_counter()
        est = variant.search(data, true_dag, sim_index, r + 1)
        elapsed = time.perf_counter() - start
        if variant.id.is_external:
            ms = variant.elapsed_ms(sim_index, r + 1)
            elapsed = float(ms) if ms == ELAPSED_UNAVAILABLE else ms / 1000.0
        cmp = comparison_graph_for(variant, true_dag, override)
        est = est.with_nodes(cmp.nodes) if set(est.nodes) == set(cmp.nodes) else est
        stats = metrics.all_stat_values(cmp, est, elapsed, STATISTICS)
        return RunRecord(est, elapsed, stats)
    except Exception as exc:  # a failed run must not abort the comparison
        log.warning(
            "simulation %d, run %d, %s failed: %s", sim_index + 1, r + 1, variant.description, exc
        )
        return RunRecord(None, math.nan, _nan_stats(), error=str(exc))


def execute_cells(
    cfg: ComparisonConfig,
    bundles: Sequence[SimulationBundle],
    variants: Sequence[AlgorithmVariant],
) -> list[Cell]:
    if not bundles:
        raise HarnessError("no simulations to compare")
    cells = []
    for si, bundle in enumerate(bundles):
        for ai, variant in enumerate(variants):
            cell = Cell(si + 1, ai + 1)
            if not variant.accepts(bundle.data_type):
                log.info(
                    "skipping %s on simulation %d: needs %s data, got %s",
                    variant.description, si + 1, variant.data_type.value, bundle.data_type.value,
                )
                cell.skipped = True
            else:
                v = _bundle_variant(variant, bundle)
                cell.runs = [
                    _run_once(v, bundle, si, r, cfg.comparison_override) for r in range(bundle.num_runs)
                ]
            cells.append(cell)
    return cells


def _num_measured(bundle: SimulationBundle) -> int:
    return bundle.data_set(0).num_columns if bundle.num_runs else 0


def _row_parameter(name: str, bundle: SimulationBundle, variant: AlgorithmVariant):
    if name in bundle.parameters:
        return bundle.parameters[name]
    if name in variant.parameters():
        return variant.resolved(name)
    return DEFAULTS.get(name, math.nan)


def execute_comparison(
    cfg: ComparisonConfig,
    bundles: Sequence[SimulationBundle],
    variants: Sequence[AlgorithmVariant],
    stats: Sequence[str | ParameterColumn],
    weights: Mapping[str, float],
    parameters: Parameters | None = None,
) -> ReportTables:
    """Run every compatible (simulation, variant) cell and build the tables."""
    _check_stats(stats, weights)
    cells = execute_cells(cfg, bundles, variants)
    rows = []
    for cell in cells:
        if cell.skipped:
            continue
        bundle = bundles[cell.sim_index - 1]
        variant = variants[cell.alg_index - 1]
        mean, sd, worst = {}, {}, {}
        for s in STATISTICS:
            mean[s], sd[s], worst[s] = aggregate([r.stat_values[s] for r in cell.runs])
        p = _num_measured(bundle)
        normalized = {s: metrics.normalize(s, mean[s], p) for s in STATISTICS}
        u = metrics.utility(weights, normalized)
        pvals = {
            c.name: _row_parameter(c.name, bundle, variant) for c in stats if isinstance(c, ParameterColumn)
        }
        rows.append(Row(cell.sim_index, cell.alg_index, pvals, mean, sd, worst, u))
    rows.sort(key=lambda r: (r.sim_index, r.alg_index))
    if cfg.sort_by_utility:
        rows.sort(key=lambda r: -r.utility)  # stable: ties keep (sim, alg) order

    return ReportTables(
        legend=[STATISTICS[s].legend for s in stats if not isinstance(s, ParameterColumn)],
        parameters=_parameter_lines(bundles, variants, parameters),
        simulations=_simulation_lines(bundles),
        algorithms=[f"{i}. {v.description}" for i, v in enumerate(variants, 1)],
        weighting=[f"    {java_double(w)} * f({s})" for s, w in weights.items() if w > 0],
        columns=list(stats),
        rows=rows,
        show_sim=len(bundles) > 1,
        show_alg=cfg.show_algorithm_indices or len(variants) > 1,
        show_utility=cfg.show_utilities,
        cells=cells,
    )


def _check_stats(stats, weights):
    seen = set()
    for s in stats:
        key = str(s)
        if key in seen:
            raise HarnessError(f"statistic {key} listed twice")
        seen.add(key)
        if not isinstance(s, ParameterColumn) and s not in STATISTICS:
            raise HarnessError(f"unregistered statistic {s!r}")
    for s, w in weights.items():
        if s not in STATISTICS:
            raise HarnessError(f"weight given for unregistered statistic {s!r}")
        if not 0 <= w <= 1:
            raise HarnessError(f"weight for {s} must lie in [0, 1], got {w}")


def _parameter_lines(bundles, variants, parameters: Parameters | None) -> list[str]:
    """Values shared by every simulation, then single-valued tuning parameters."""
    out: dict[str, Any] = {}
    first = bundles[0].parameters
    for name, value in first.items():
        if all(b.parameters.get(name) == value for b in bundles[1:]):
            out[name] = value
    p = parameters or Parameters()
    for name in _tuning_names(variants):
        if name not in out and len(p.values(name)) == 1:
            out[name] = p.values(name)[0]
    return [f"{k} = {format_value(v)}" for k, v in out.items()]


def _simulation_lines(bundles) -> list[str]:
    if len(bundles) == 1:
        b = bundles[0]
        lines = b.description.split("\n")
        if b.parameters.get("numLatents", 0):
            lines.append(LATENT_NOTE)
        return lines
    lines = []
    for k, b in enumerate(bundles, 1):
        lines.append(f"Simulation {k}:")
        lines += b.description.split("\n")
        lines += [f"{n} = {format_value(v)}" for n, v in b.parameters.items()]
        if b.parameters.get("numLatents", 0):
            lines.append(LATENT_NOTE)
        lines += ["", ""]
    return lines


# -- rendering ------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "NaN"
    return f"{v:.3f}"


def _table(t: ReportTables, which: str, tab: bool) -> list[str]:
    header = []
    if t.show_alg:
        header.append("Alg")
    if t.show_sim:
        header.append("Sim")
    header += [c.name if isinstance(c, ParameterColumn) else c for c in t.columns]
    if t.show_utility:
        header.append("U")
    body = []
    for r in t.rows:
        vals = getattr(r, which)
        line = []
        if t.show_alg:
            line.append(str(r.alg_index))
        if t.show_sim:
            line.append(str(r.sim_index))
        for c in t.columns:
            if isinstance(c, ParameterColumn):
                line.append(format_value(r.parameter_values[c.name]))
            else:
                line.append(_fmt(vals[c]))
        if t.show_utility:
            line.append(_fmt(r.utility))
        body.append(line)
    if tab:
        return ["\t".join(x) for x in [header] + body]
    widths = [max(len(row[j]) for row in [header] + body) for j in range(len(header))]
    return ["".join("  " + cell.rjust(w) for cell, w in zip(row, widths)) for row in [header] + body]


def timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def render_report(t: ReportTables, cfg: ComparisonConfig, stamp: str | None = None) -> str:
    lines = [stamp or timestamp(), "", "Statistics:", ""]
    lines += t.legend
    lines += ["", "Parameters:", ""] + t.parameters
    lines += ["", "Simulation:", ""] + t.simulations
    lines += ["Algorithms:", ""] + t.algorithms
    lines += ["", "Weighting of statistics:", "", "U = "] + t.weighting
    lines += ["", WEIGHT_NOTE, "", ""]
    for title, which in zip(TABLE_TITLES, ("mean", "sd", "worst")):
        lines += [title, "", "All edges", ""]
        lines += _table(t, which, cfg.tab_delimited)
        lines.append("")
    return "\n".join(lines)


# -- end-to-end routes ----------------------------------------------------------


def make_bundles(
    sim_points: Sequence[tuple[SimSpec, dict[str, Any]]], master_seed: int
) -> list[SimulationBundle]:
    return [
        make_simulation(spec.style, params, master_seed, k, spec.fixed_graph())
        for k, (spec, params) in enumerate(sim_points)
    ]


def save_to_files(root, sim_spec: SimSpec, p: Parameters, master_seed: int = DEFAULT_MASTER_SEED) -> list[Path]:
    """Write ``save<k>/{graph,data,parameters.txt}`` for every grid point."""
    root = Path(root)
    points, _ = expand_grid(p, [sim_spec], [])
    dirs = []
    for k, bundle in enumerate(make_bundles(points, master_seed), 1):
        d = root / f"save{k}"
        (d / "graph").mkdir(parents=True, exist_ok=True)
        (d / "data").mkdir(parents=True, exist_ok=True)
        for i, (g, data) in enumerate(bundle.runs, 1):
            (d / "graph" / f"graph.{i}.txt").write_text(render_graph_text(g), encoding="utf-8")
            (d / "data" / f"data.{i}.txt").write_text(save_tabular(data), encoding="utf-8")
        write_parameters_file(d / "parameters.txt", bundle.parameters)
        dirs.append(d)
    return dirs


def _finish(tables, cfg, out_path: Path | None) -> str:
    text = render_report(tables, cfg)
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
    return text


def compare_from_files(
    root,
    variants: Sequence[AlgorithmVariant],
    stats: Sequence[str | ParameterColumn],
    weights: Mapping[str, float],
    p: Parameters,
    cfg: ComparisonConfig | None = None,
) -> str:
    """Compare algorithms on simulations saved under ``root``; writes ``root/Comparison.txt``."""
    cfg = cfg or ComparisonConfig()
    root = Path(root)
    bundles = load_from_directory(root)
    if not bundles:
        raise HarnessError(f"no save<k> directories under {root}")
    _, expanded = expand_grid(p, [], variants)
    tables = execute_comparison(cfg, bundles, expanded, stats, weights, p)
    return _finish(tables, cfg, root / "Comparison.txt")


def compare_from_simulations(
    out_root,
    sim_specs: Sequence[SimSpec],
    variants: Sequence[AlgorithmVariant],
    stats: Sequence[str | ParameterColumn],
    weights: Mapping[str, float],
    p: Parameters,
    cfg: ComparisonConfig | None = None,
) -> str:
    """Simulate in memory and compare; writes ``out_root/Comparison.txt`` if given."""
    cfg = cfg or ComparisonConfig()
    points, expanded = expand_grid(p, sim_specs, variants)
    bundles = make_bundles(points, cfg.master_seed)
    tables = execute_comparison(cfg, bundles, expanded, stats, weights, p)
    return _finish(tables, cfg, Path(out_root) / "Comparison.txt" if out_root is not None else None)


def compare_external(
    data_root,
    out_root,
    external_variants: Sequence[AlgorithmVariant],
    stats: Sequence[str | ParameterColumn],
    weights: Mapping[str, float],
    p: Parameters,
    cfg: ComparisonConfig | None = None,
) -> str:
    """Score results produced elsewhere against simulations saved under ``data_root``.

    Result and elapsed trees are read from ``out_root`` unless a variant
    names its own ``results_root``; the report goes to ``out_root/Comparison.txt``.
    """
    cfg = cfg or ComparisonConfig()
    out_root = Path(out_root)
    bundles = load_from_directory(data_root)
    if not bundles:
        raise HarnessError(f"no save<k> directories under {data_root}")
    variants = []
    for v in external_variants:
        if not v.id.is_external:
            raise HarnessError(f"{v.description} is not an external algorithm")
        if v.results_root is None:
            v = replace(v, results_root=out_root)
        variants.append(v)
    tables = execute_comparison(cfg, bundles, variants, stats, weights, p)
    return _finish(tables, cfg, out_root / "Comparison.txt")


# -- configuration report -------------------------------------------------------


def _param_lines(names) -> list[str]:
    return [f"    {n} = {format_value(DEFAULTS[n])}  ({DESCRIPTIONS[n]})" for n in names]


def configuration_text() -> str:
    lines = ["Simulations:", ""]
    for style in SimulationStyle:
        lines.append(f"{style.value}: {style.description} ({style.data_type.value} data)")
        lines += _param_lines(style.parameters)
        lines.append("")
    lines += ["Algorithms:", ""]
    for alg in AlgorithmId:
        if alg.is_pc_family:
            needs, params = "an independence test", ["depth"]
        elif alg is AlgorithmId.GES:
            needs, params = "a score", []
        else:
            needs, params = "a results directory", []
        lines.append(f"{alg.value}: {ALGORITHM_NAMES[alg]} (takes {needs})")
        lines += _param_lines(params)
        lines.append("")
    lines += ["Independence tests:", ""]
    for tid in TestId:
        spec = TestSpec(tid)
        dtype = spec.data_type.value if spec.data_type else "any"
        lines.append(f"{tid.value}: {spec.description} ({dtype} data)")
        lines += _param_lines(spec.parameters)
        lines.append("")
    lines += ["Scores:", ""]
    for sid in ScoreId:
        spec = ScoreSpec(sid)
        lines.append(f"{sid.value}: {spec.description} ({spec.data_type.value} data)")
        lines += _param_lines(spec.parameters)
        lines.append("")
    lines += ["Statistics:", ""]
    lines += [s.legend for s in STATISTICS.values()]
    lines.append("")
    return "\n".join(lines)


def configuration_report(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(configuration_text(), encoding="utf-8")
    return path
