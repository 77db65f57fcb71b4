"""Graphs, d-separation and Markov equivalence.

A DAG says which variables cause which.  Data can only tell us about the
conditional independencies a DAG implies, and several DAGs can imply the
same independencies.  The pattern (CPDAG) keeps the edges every such DAG
agrees on and leaves the rest undirected.  Run with::

    python demos/01_graphs_and_patterns.py
"""

from algcomp import cpdag_of, d_separated, random_forward_dag
from algcomp.graphcore import consistent_extension, graph_from_edges, render_graph_text

# ---------------------------------------------------------------------------
# A chain and a collider
# ---------------------------------------------------------------------------
# X1 -> X2 -> X3 : X1 and X3 are dependent, but independent given X2.
# X1 -> X2 <- X3 : X1 and X3 are independent, but dependent given X2.

chain = graph_from_edges(["X1", "X2", "X3"], ["X1 --> X2", "X2 --> X3"])
collider = graph_from_edges(["X1", "X2", "X3"], ["X1 --> X2", "X3 --> X2"])

for name, g in [("chain", chain), ("collider", collider)]:
    print(f"{name}:")
    print(f"  X1 _||_ X3        ? {d_separated(g, 'X1', 'X3')}")
    print(f"  X1 _||_ X3 | X2   ? {d_separated(g, 'X1', 'X3', ['X2'])}")

# The chain shares its independencies with X1 <- X2 <- X3 and X1 <- X2 -> X3,
# so its pattern is fully undirected; the collider is the only member of its
# class, so every edge stays directed.
print("\npattern of the chain:   ", sorted(str(e) for e in cpdag_of(chain).edges()))
print("pattern of the collider:", sorted(str(e) for e in cpdag_of(collider).edges()))

# ---------------------------------------------------------------------------
# A random DAG and its pattern
# ---------------------------------------------------------------------------

dag = random_forward_dag(8, avg_degree=2.5, seed=4)
pattern = cpdag_of(dag)
directed = sum(1 for e in pattern.edges() if e.is_directed)
print(f"\nrandom DAG with {dag.num_edges()} edges; its pattern keeps {directed} directed")
print(render_graph_text(pattern))

# Any DAG consistent with the pattern lies in the same equivalence class,
# so it has exactly the same pattern.
member = consistent_extension(pattern)
print("a consistent extension has the same pattern:", cpdag_of(member) == pattern)
