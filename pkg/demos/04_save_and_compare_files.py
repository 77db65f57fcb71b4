"""Save simulations to disk, then compare algorithms on the saved files.

Saving first fixes the data, so later runs can add algorithms or statistics
and still score them against exactly the same graphs and data sets.
Parameters stored with the saved simulations override the ones passed to
the comparison.  Run with::

    python demos/04_save_and_compare_files.py [directory]
"""

import sys
import tempfile
from pathlib import Path

from algcomp.harness import ComparisonConfig, ParameterColumn, SimSpec, compare_from_files, save_to_files
from algcomp.oracle import TestId, TestSpec
from algcomp.search import AlgorithmId, AlgorithmVariant
from algcomp.simulation import Parameters, SimulationStyle

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="comparison-"))

# ---------------------------------------------------------------------------
# Step 1: three sample sizes, written to save1, save2 and save3
# ---------------------------------------------------------------------------

sim_parameters = Parameters().set("numRuns", 5).set("numMeasures", 30).set("avgDegree", 4)
sim_parameters.set("sampleSize", 100, 500, 1000)
dirs = save_to_files(root, SimSpec(SimulationStyle.SEM), sim_parameters)
print("saved:", ", ".join(d.name for d in dirs), "under", root)
print((dirs[1] / "parameters.txt").read_text(encoding="utf-8"))

# ---------------------------------------------------------------------------
# Step 2: load them back and compare four searches
# ---------------------------------------------------------------------------

fisher_z = TestSpec(TestId.FISHER_Z)
algorithms = [
    AlgorithmVariant(a, test=fisher_z)
    for a in (AlgorithmId.PC, AlgorithmId.CPC, AlgorithmId.PC_STABLE, AlgorithmId.CPC_STABLE)
]
statistics = [ParameterColumn("avgDegree"), ParameterColumn("sampleSize"), "AP", "AR", "AHP", "AHR", "SHD", "E"]
weights = {"AP": 1.0, "AR": 0.5, "AHP": 1.0, "AHR": 0.5}

config = ComparisonConfig(show_algorithm_indices=False, show_simulation_indices=False,
                          sort_by_utility=True, show_utilities=True)
report = compare_from_files(root, algorithms, statistics, weights, Parameters().set("alpha", 1e-4), config)
print(report)
print("report written to", root / "Comparison.txt")
