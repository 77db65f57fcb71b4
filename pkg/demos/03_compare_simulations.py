"""Compare PC-family searches across three significance levels.

Each value of ``alpha`` turns every algorithm into a separate row, so four
algorithms x three alphas give twelve rows.  Rows are ranked by a utility
that weighs adjacency precision fully and adjacency recall by half.
This is a desk-sized version of the 100-variable comparison; raise
``numMeasures`` and ``numRuns`` for the full run.  Run with::

    python demos/03_compare_simulations.py [output-dir]
"""

import sys

from algcomp.harness import ComparisonConfig, SimSpec, compare_from_simulations
from algcomp.oracle import ScoreId, ScoreSpec, TestId, TestSpec
from algcomp.search import AlgorithmId, AlgorithmVariant
from algcomp.simulation import Parameters, SimulationStyle

out = sys.argv[1] if len(sys.argv) > 1 else None

parameters = (
    Parameters()
    .set("numRuns", 5)
    .set("numMeasures", 30)
    .set("avgDegree", 4)
    .set("sampleSize", 500)
    .set("alpha", 1e-4, 1e-3, 1e-2)
)

fisher_z = TestSpec(TestId.FISHER_Z)
algorithms = [
    AlgorithmVariant(AlgorithmId.PC, test=fisher_z),
    # CPC restricted to the adjacencies GES found
    AlgorithmVariant(AlgorithmId.CPC, test=fisher_z, initial=AlgorithmVariant(AlgorithmId.GES, score=ScoreSpec(ScoreId.SEM_BIC))),
    AlgorithmVariant(AlgorithmId.PC_STABLE, test=fisher_z),
    AlgorithmVariant(AlgorithmId.CPC_STABLE, test=fisher_z),
]

statistics = ["AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "F1Adj", "F1Arrow", "SHD", "E"]
weights = {"AP": 1.0, "AR": 0.5}

config = ComparisonConfig(sort_by_utility=True, show_utilities=True)
report = compare_from_simulations(
    out, [SimSpec(SimulationStyle.SEM)], algorithms, statistics, weights, parameters, config
)
print(report)
