"""Results produced outside this package: graphs and elapsed times on disk.

Layout under a results root (run indices are 1-based)::

    results/<algDir>/<simIndex + 1>/graph.<runIndex>.txt
    elapsed/<algDir>/<simIndex + 1>/graph.<runIndex>.txt
"""

from __future__ import annotations

import logging
from pathlib import Path

from ..graphcore import Graph, GraphError, parse_graph_text, render_graph_text

log = logging.getLogger(__name__)

ELAPSED_UNAVAILABLE = -99


class ExternalResultError(FileNotFoundError):
    pass


def result_path(results_root, alg_dir: str, sim_index: int, run_index: int) -> Path:
    return Path(results_root) / "results" / alg_dir / str(sim_index + 1) / f"graph.{run_index}.txt"


def elapsed_path(results_root, alg_dir: str, sim_index: int, run_index: int) -> Path:
    return Path(results_root) / "elapsed" / alg_dir / str(sim_index + 1) / f"graph.{run_index}.txt"


def _read(path: Path) -> str:
    if not path.exists():
        raise ExternalResultError(f"missing external result file {path.resolve()}")
    return path.read_text(encoding="utf-8")


def load_native(results_root, alg_dir: str, sim_index: int, run_index: int) -> Graph:
    """Graph stored in the native text format."""
    return parse_graph_text(_read(result_path(results_root, alg_dir, sim_index, run_index)))


def parse_adjacency_matrix(text: str) -> Graph:
    """Graph from a header of names plus a square 0/1 matrix.

    For each pair with ``g = m[i][j]`` and ``h = m[j][i]``: both 1 gives
    ``i --- j``; ``g = 1, h = 0`` gives ``j --> i``; both 0 gives no edge.
    """
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not lines:
        raise GraphError("empty adjacency matrix file")
    names = lines[0].split()
    rows = [ln.split() for ln in lines[1:]]
    p = len(names)
    if len(rows) != p or any(len(r) != p for r in rows):
        raise GraphError(f"adjacency matrix body must be {p} x {p}")
    m = []
    for i, r in enumerate(rows):
        try:
            vals = [int(v) for v in r]
        except ValueError:
            raise GraphError(f"non-integer entry in matrix row {i + 1}") from None
        if any(v not in (0, 1) for v in vals):
            raise GraphError(f"matrix row {i + 1} has entries outside {{0, 1}}")
        m.append(vals)
    g = Graph(names)
    for i in range(p):
        for j in range(i + 1, p):
            a, b = m[i][j], m[j][i]
            if a and b:
                g.add_undirected(names[i], names[j])
            elif a:
                g.add_directed(names[j], names[i])
            elif b:
                g.add_directed(names[i], names[j])
    return g


def render_adjacency_matrix(g: Graph) -> str:
    """Inverse of :func:`parse_adjacency_matrix` for directed/undirected graphs."""
    nodes = g.nodes
    idx = {n: i for i, n in enumerate(nodes)}
    m = [[0] * len(nodes) for _ in nodes]
    for e in g.edges():
        i, j = idx[e.a], idx[e.b]
        if e.is_undirected:
            m[i][j] = m[j][i] = 1
        elif e.is_directed:  # edges() lists the tail first
            m[j][i] = 1
        else:
            raise GraphError("bidirected edges have no matrix encoding")
    lines = ["\t".join(nodes)] + ["\t".join(map(str, row)) for row in m]
    return "\n".join(lines) + "\n"


def load_matrix(results_root, alg_dir: str, sim_index: int, run_index: int) -> Graph:
    return parse_adjacency_matrix(_read(result_path(results_root, alg_dir, sim_index, run_index)))


def elapsed_from_file(results_root, alg_dir: str, sim_index: int, run_index: int) -> int:
    """Elapsed milliseconds from line 1 of the elapsed file.

    A missing file or an unparseable first line gives -99.
    """
    path = elapsed_path(results_root, alg_dir, sim_index, run_index)
    try:
        with open(path, encoding="utf-8") as fh:
            return int(fh.readline().strip())
    except (OSError, ValueError):
        log.info("elapsed time unavailable at %s", path)
        return ELAPSED_UNAVAILABLE


def write_external_result(
    results_root,
    alg_dir: str,
    sim_index: int,
    run_index: int,
    graph: Graph,
    elapsed_ms: int | None = None,
    matrix: bool = False,
) -> Path:
    """Write one estimated graph (and optionally its elapsed time) in the layout above."""
    path = result_path(results_root, alg_dir, sim_index, run_index)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_adjacency_matrix(graph) if matrix else render_graph_text(graph), encoding="utf-8")
    if elapsed_ms is not None:
        ep = elapsed_path(results_root, alg_dir, sim_index, run_index)
        ep.parent.mkdir(parents=True, exist_ok=True)
        ep.write_text(f"{int(elapsed_ms)}\n", encoding="utf-8")
    return path
