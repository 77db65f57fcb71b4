"""Simulate causal models, run structure-learning algorithms and compare them.

Modules
-------
graphcore
    Mixed graphs, d-separation, CPDAGs, random DAGs and the graph text format.
datacore
    Data sets, correlation matrices, contingency tables and the tabular format.
simulation
    Parameter registry, SEM and Bayes net simulators, saved-directory loading.
oracle
    Independence tests (Fisher Z, chi square, d-separation) and BIC scores.
search
    PC, PC-stable, CPC, CPC-stable, GES and external-result loaders.
metrics
    Comparison statistics, normalization and utility.
harness
    Grid expansion, execution, aggregation and the text report.
config, cli
    Declarative run configuration and the ``algcomp`` command.
"""

from .graphcore import Graph, GraphKind, cpdag_of, d_separated, random_forward_dag
from .datacore import DataSet, DataType
from .simulation import Parameters, SimulationStyle, make_simulation
from .harness import (
    ComparisonConfig,
    ParameterColumn,
    SimSpec,
    compare_external,
    compare_from_files,
    compare_from_simulations,
    configuration_report,
    save_to_files,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphKind",
    "cpdag_of",
    "d_separated",
    "random_forward_dag",
    "DataSet",
    "DataType",
    "Parameters",
    "SimulationStyle",
    "make_simulation",
    "ComparisonConfig",
    "ParameterColumn",
    "SimSpec",
    "compare_external",
    "compare_from_files",
    "compare_from_simulations",
    "configuration_report",
    "save_to_files",
]
