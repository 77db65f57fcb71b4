"""Full-scale check against reference comparison tables.

Runs the 100-variable, N = 500, alpha = 1e-4 configuration with the four
PC-family searches and prints adjacency precision and recall next to the
reference averages.  Random graphs are drawn differently here, so the
numbers are not expected to match exactly; within 0.05 is the target.

Arrowhead statistics are printed too, but they are not comparable: here an
arrowhead on a missing or extra edge counts as an error, which caps AHR
near AR, while the reference AHR values exceed their AR.

This takes a few minutes.  Run with::

    python demos/06_full_scale_check.py [numRuns]
"""

import sys

from algcomp.harness import ComparisonConfig, SimSpec, execute_comparison, expand_grid, make_bundles
from algcomp.oracle import TestId, TestSpec
from algcomp.search import AlgorithmId, AlgorithmVariant
from algcomp.simulation import Parameters, SimulationStyle

num_runs = int(sys.argv[1]) if len(sys.argv) > 1 else 10

# Reference averages for sampleSize = 500: (AP, AR)
REFERENCE = {
    "PC": (0.914, 0.572),
    "CPC": (0.914, 0.572),
    "PC-stable": (0.945, 0.560),
    "CPC-stable": (0.948, 0.561),
}

p = Parameters().set("numRuns", num_runs).set("numMeasures", 100).set("avgDegree", 4)
p.set("sampleSize", 500).set("alpha", 1e-4)
fisher_z = TestSpec(TestId.FISHER_Z)
algorithms = [
    AlgorithmVariant(a, test=fisher_z)
    for a in (AlgorithmId.PC, AlgorithmId.CPC, AlgorithmId.PC_STABLE, AlgorithmId.CPC_STABLE)
]

points, variants = expand_grid(p, [SimSpec(SimulationStyle.SEM)], algorithms)
tables = execute_comparison(ComparisonConfig(), make_bundles(points, 20160723), variants, ["AP", "AR"], {})

print(f"{'':>12}{'AP':>8}{'ref':>8}{'AR':>8}{'ref':>8}{'AHP':>8}{'AHR':>8}   within 0.05")
for name, row in zip(REFERENCE, tables.rows):
    ap, ar = row.mean["AP"], row.mean["AR"]
    pap, par = REFERENCE[name]
    ok = abs(ap - pap) <= 0.05 and abs(ar - par) <= 0.05
    print(f"{name:>12}{ap:8.3f}{pap:8.3f}{ar:8.3f}{par:8.3f}{row.mean['AHP']:8.3f}{row.mean['AHR']:8.3f}   {'yes' if ok else 'no'}")
