"""Score graphs produced by another package.

Other tools write one estimated graph per run under
``<out>/results/<algorithm dir>/<simulation>/graph.<run>.txt`` and,
optionally, the elapsed milliseconds under ``<out>/elapsed/...``.  Here a
stand-in "external" tool runs PC and writes adjacency matrices, skipping
the timing file for one run so its elapsed time shows the -99 sentinel.
Run with::

    python demos/05_external_results.py
"""

import tempfile
import time
from pathlib import Path

from algcomp.harness import ComparisonConfig, SimSpec, compare_external, save_to_files
from algcomp.oracle import FisherZTest
from algcomp.search import AlgorithmId, AlgorithmVariant, PcVariant, pc_search, write_external_result
from algcomp.simulation import Parameters, SimulationStyle, load_from_directory

work = Path(tempfile.mkdtemp(prefix="external-"))
data_root, out_root = work / "data", work / "output"

save_to_files(data_root, SimSpec(SimulationStyle.SEM),
              Parameters().set("numRuns", 4).set("numMeasures", 15).set("sampleSize", 500))

# ---------------------------------------------------------------------------
# The "other package": run a search per data set and write its outputs
# ---------------------------------------------------------------------------

for sim_index, bundle in enumerate(load_from_directory(data_root)):
    for run in range(1, bundle.num_runs + 1):
        data = bundle.data_set(run - 1)
        start = time.perf_counter()
        est = pc_search(PcVariant.PC, FisherZTest(data, alpha=0.01), data.names)
        ms = (time.perf_counter() - start) * 1000
        write_external_result(out_root, "other_pc_results", sim_index, run, est, matrix=True,
                              elapsed_ms=None if run == 4 else ms)

# ---------------------------------------------------------------------------
# Score the outputs
# ---------------------------------------------------------------------------

external = [AlgorithmVariant(AlgorithmId.EXTERNAL_MATRIX, external_dir="other_pc_results")]
report = compare_external(data_root, out_root, external, ["AP", "AR", "AHP", "AHR", "E"],
                          {"AP": 1.0, "AR": 0.5}, Parameters(), ComparisonConfig())
print(report)
# The sentinel is a value like any other: it shows up as the minimum and
# drags the average down, flagging that some timings are missing.
print("run 4 has no timing file: its elapsed time is -99, visible in WORST CASE and pulling down the E average")
