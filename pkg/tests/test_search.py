import numpy as np
import pytest

from algcomp.datacore import DataSet
from algcomp.graphcore import Graph, GraphKind, cpdag_of, graph_from_edges, random_forward_dag, render_graph_text
from algcomp.oracle import DSepTest, ScoreId, ScoreSpec, SemBicScore, TestId, TestSpec
from algcomp.search import (
    ELAPSED_UNAVAILABLE,
    AlgorithmError,
    AlgorithmId,
    AlgorithmVariant,
    PcVariant,
    TripleMark,
    comparison_graph_for,
    elapsed_from_file,
    fas,
    ges_search,
    java_double,
    load_matrix,
    load_native,
    orient_unshielded,
    parse_adjacency_matrix,
    pc_search,
    render_adjacency_matrix,
    unshielded_triples,
    write_external_result,
)
from algcomp.simulation import SemModel, sem_simulate


class TableTest:
    """Independence oracle from an explicit list of (x, y, frozenset(z))."""

    def __init__(self, facts):
        self.facts = {(frozenset((x, y)), frozenset(z)) for x, y, z in facts}

    def __call__(self, x, y, z=()):
        return (frozenset((x, y)), frozenset(z)) in self.facts


@pytest.mark.parametrize("variant", list(PcVariant))
def test_pc_family_recovers_pattern_with_dsep(variant):
    rng = np.random.default_rng(list(PcVariant).index(variant))
    for _ in range(25):
        dag = random_forward_dag(8, avg_degree=2.5, seed=int(rng.integers(1 << 30)))
        est = pc_search(variant, DSepTest(dag), dag.nodes)
        assert est == cpdag_of(dag)


def test_fas_records_sepsets():
    dag = graph_from_edges("ABC", ["A --> B", "B --> C"])
    skel, sepsets = fas(DSepTest(dag), dag.nodes)
    assert skel == graph_from_edges("ABC", ["A --- B", "B --- C"])
    assert sepsets.get("C", "A") == ("B",)
    assert len(sepsets) == 1


def test_fas_depth_limit():
    dag = graph_from_edges("ABC", ["A --> B", "B --> C"])
    skel, _ = fas(DSepTest(dag), dag.nodes, depth=0)
    assert skel.is_adjacent("A", "C")


def test_unshielded_triples_sorted():
    g = graph_from_edges("ABCD", ["A --- B", "C --- B", "D --- B", "A --- D"])
    assert unshielded_triples(g) == [("A", "B", "C"), ("C", "B", "D")]


def test_cpc_marks_disagreeing_evidence_ambiguous():
    # A and C are separated by {} and by {B}: sepsets disagree about B
    skel = graph_from_edges("ABC", ["A --- B", "B --- C"])
    test = TableTest([("A", "C", []), ("A", "C", ["B"])])
    _, marks = orient_unshielded(skel, fas(test, "ABC")[1], conservative=(test, -1))
    assert marks[("A", "B", "C")] is TripleMark.AMBIGUOUS
    est = pc_search(PcVariant.CPC, test, list("ABC"))
    assert est == skel  # nothing oriented
    assert pc_search(PcVariant.PC, test, list("ABC")) == graph_from_edges("ABC", ["A --> B", "C --> B"])


def test_pc_stable_is_order_independent_on_data():
    dag = random_forward_dag(10, avg_degree=3, seed=3)
    data = sem_simulate(dag, {"sampleSize": 300}, seed=4)
    spec = TestSpec(TestId.FISHER_Z)
    ref = pc_search(PcVariant.PC_STABLE, spec.make(data, 0.01), data.names).skeleton()
    rng = np.random.default_rng(0)
    for _ in range(5):
        perm = list(rng.permutation(data.names))
        est = pc_search(PcVariant.PC_STABLE, spec.make(data.select(perm), 0.01), perm)
        assert est.skeleton().edge_set() == ref.edge_set()


def test_pc_with_initial_graph_limits_adjacencies():
    dag = graph_from_edges("ABCD", ["A --> B", "C --> B", "B --> D"])
    initial = graph_from_edges("ABCD", ["A --- B", "C --- B"])
    est = pc_search(PcVariant.PC, DSepTest(dag), dag.nodes, initial=initial)
    assert est == graph_from_edges("ABCD", ["A --> B", "C --> B"])


def _sem_data(dag, n, seed):
    rng = np.random.default_rng(seed)
    coefs = {(e.a, e.b): rng.choice([-1, 1]) * rng.uniform(0.7, 1.2) for e in dag.edges()}
    model = SemModel(dag, coefs, {v: 1.0 for v in dag.nodes})
    return model.sample(n, rng)


def test_ges_recovers_pattern_at_large_sample():
    dag = graph_from_edges("ABCDE", ["A --> C", "B --> C", "C --> D", "D --> E"])
    data = _sem_data(dag, 20000, seed=1)
    trace = []
    est = ges_search(SemBicScore(data), trace=trace)
    assert est == cpdag_of(dag)
    fwd = [s.score for s in trace if s.phase == "forward"]
    assert all(b > a for a, b in zip(fwd, fwd[1:]))
    assert all(s.delta > 0 for s in trace)


def test_ges_scores_never_decrease():
    dag = random_forward_dag(8, avg_degree=2, seed=8)
    data = _sem_data(dag, 2000, seed=2)
    score = SemBicScore(data)
    trace = []
    ges_search(score, trace=trace)
    scores = [score.score_graph(Graph(data.names))] + [s.score for s in trace]
    assert all(b >= a - 1e-9 for a, b in zip(scores, scores[1:]))


def test_ges_initial_graph_without_extension_falls_back():
    data = _sem_data(graph_from_edges("ABCD", ["A --> B"]), 500, 0)
    bad = graph_from_edges("ABCD", ["A --- B", "B --- C", "C --- D", "D --- A"])
    est = ges_search(SemBicScore(data), initial=bad)
    assert est.is_adjacent("A", "B")


def test_matrix_semantics():
    g = parse_adjacency_matrix("X1\tX2\n0\t1\n0\t0\n")
    assert g.is_directed("X2", "X1")
    g = parse_adjacency_matrix("X1 X2\n0 1\n1 0\n")
    assert g.is_undirected("X1", "X2")
    assert parse_adjacency_matrix("A B\n0 0\n0 0\n").num_edges() == 0
    with pytest.raises(ValueError):
        parse_adjacency_matrix("A B\n0 2\n0 0\n")
    with pytest.raises(ValueError):
        parse_adjacency_matrix("A B\n0 1\n")


def test_matrix_render_roundtrip():
    g = graph_from_edges("ABCD", ["A --> B", "C --- B", "D --> A"])
    assert parse_adjacency_matrix(render_adjacency_matrix(g)) == g


def test_external_layout_and_elapsed(tmp_path):
    g = graph_from_edges(["X1", "X2"], ["X1 --> X2"])
    path = write_external_result(tmp_path, "native_pc", 0, 1, g, elapsed_ms=1500)
    assert path == tmp_path / "results" / "native_pc" / "1" / "graph.1.txt"
    assert load_native(tmp_path, "native_pc", 0, 1) == g
    assert elapsed_from_file(tmp_path, "native_pc", 0, 1) == 1500
    assert elapsed_from_file(tmp_path, "native_pc", 0, 2) == ELAPSED_UNAVAILABLE
    write_external_result(tmp_path, "mat", 1, 3, g, matrix=True)
    assert load_matrix(tmp_path, "mat", 1, 3) == g
    with pytest.raises(FileNotFoundError):
        load_native(tmp_path, "native_pc", 0, 9)
    bad = tmp_path / "elapsed" / "native_pc" / "1" / "graph.2.txt"
    bad.parent.mkdir(parents=True, exist_ok=True)
    bad.write_text("n/a\n")
    assert elapsed_from_file(tmp_path, "native_pc", 0, 2) == ELAPSED_UNAVAILABLE


@pytest.mark.parametrize(
    "value, text",
    [(1e-4, "1.0E-4"), (0.001, "0.001"), (0.01, "0.01"), (1.0, "1.0"), (2.5e-5, "2.5E-5"), (1e7, "1.0E7")],
)
def test_java_double(value, text):
    assert java_double(value) == text


def test_variant_descriptions():
    fz = TestSpec(TestId.FISHER_Z)
    pc = AlgorithmVariant(AlgorithmId.PC, test=fz).with_tuning({"alpha": 1e-4}, shown=("alpha",))
    assert pc.description == 'PC ("Peter and Clark") using Fisher Z test, alpha = 1.0E-4'
    hybrid = AlgorithmVariant(
        AlgorithmId.CPC, test=fz, initial=AlgorithmVariant(AlgorithmId.GES, score=ScoreSpec(ScoreId.SEM_BIC))
    ).with_tuning({"alpha": 0.001}, shown=("alpha",))
    assert hybrid.description == (
        'CPC (Conservative "Peter and Clark") using Fisher Z test \n'
        "     with initial graph from GES (Greedy Equivalence Search) using Sem BIC Score, alpha = 0.001"
    )
    assert hybrid.parameters() == ["alpha", "depth", "penaltyDiscount"]
    ext = AlgorithmVariant(AlgorithmId.EXTERNAL_NATIVE, external_dir="pcalg_pc_results")
    assert ext.description == "pcalg pc results"
    assert ext.data_type is None


def test_variant_validation():
    with pytest.raises(AlgorithmError):
        AlgorithmVariant(AlgorithmId.PC)
    with pytest.raises(AlgorithmError):
        AlgorithmVariant(AlgorithmId.GES)
    with pytest.raises(AlgorithmError):
        AlgorithmVariant(AlgorithmId.EXTERNAL_MATRIX)


def test_variant_search_and_type_guard():
    dag = random_forward_dag(6, avg_degree=2, seed=2)
    data = sem_simulate(dag, {"sampleSize": 200}, seed=1)
    v = AlgorithmVariant(AlgorithmId.PC, test=TestSpec(TestId.CHI_SQUARE))
    with pytest.raises(AlgorithmError):
        v.search(data, dag)
    oracle = AlgorithmVariant(AlgorithmId.PC_STABLE, test=TestSpec(TestId.D_SEPARATION))
    assert oracle.search(data, dag) == cpdag_of(dag)


def test_comparison_graph_for_latents_and_override():
    g = Graph(["X1", "X2", "L1"], ["L1"])
    g.add_directed("X1", "X2")
    g.add_directed("L1", "X2")
    v = AlgorithmVariant(AlgorithmId.PC, test=TestSpec(TestId.FISHER_Z))
    cmp = comparison_graph_for(v, g)
    assert cmp.nodes == ["X1", "X2"] and cmp.is_undirected("X1", "X2")
    assert comparison_graph_for(v, g, GraphKind.TRUE_DAG).is_directed("X1", "X2")


def test_data_select_permutes_columns():
    d = DataSet.continuous(["A", "B"], [[1.0, 2.0]])
    assert d.select(["B", "A"]).values.tolist() == [[2.0, 1.0]]
    assert render_graph_text(Graph(["A"])) == "Graph Nodes:\nA\n\nGraph Edges:\n"
