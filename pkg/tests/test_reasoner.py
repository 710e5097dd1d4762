import io

import pytest
from hypothesis import given, strategies as st

import groundkit as gk
from groundkit.gmn import build_gmn
from groundkit.grounding import GrounderParams, full_grounding, ground
from groundkit.reasoner import (
    ScoreError,
    ScoreTable,
    initial_scores,
    propagate,
    read_scores,
    tnorm_eval,
    write_scores,
)


@pytest.mark.parametrize(
    ("kind", "values", "expected"),
    [
        ("product", (0.8, 0.5), 0.4),
        ("goedel", (0.8, 0.5), 0.5),
        ("lukasiewicz", (0.8, 0.5), 0.3),
        ("product", (1.0,), 1.0),
        ("lukasiewicz", (0.4, 0.4), 0.0),
    ],
)
def test_tnorm_values(kind, values, expected):
    assert tnorm_eval(kind, values) == pytest.approx(expected)


def test_tnorm_rejects_out_of_range():
    with pytest.raises(ScoreError):
        tnorm_eval("product", (0.5, 1.2))
    with pytest.raises(ScoreError):
        tnorm_eval("goedel", ())
    with pytest.raises(ScoreError):
        tnorm_eval("nope", (0.5,))


unit = st.floats(0.0, 1.0, allow_nan=False)


@given(a=unit, b=unit, c=unit, kind=st.sampled_from(["product", "goedel", "lukasiewicz"]))
def test_tnorm_axioms(a, b, c, kind):
    # commutative, associative, unit 1, monotone
    assert tnorm_eval(kind, (a, b)) == pytest.approx(tnorm_eval(kind, (b, a)))
    left = tnorm_eval(kind, (tnorm_eval(kind, (a, b)), c))
    right = tnorm_eval(kind, (a, tnorm_eval(kind, (b, c))))
    assert left == pytest.approx(right, abs=1e-12)
    assert tnorm_eval(kind, (a, 1.0)) == pytest.approx(a)
    if b <= c:
        assert tnorm_eval(kind, (a, b)) <= tnorm_eval(kind, (a, c)) + 1e-12


def single_edge_network(body_scores, head_init):
    th = gk.parse_theory("h(X,Y) :- b1(X,Y), b2(X,Y).\n")
    store = gk.load_facts("u\tb1\tv\nu\tb2\tv\n", th)
    h = th.predicates.id_of("h")
    root = (h, th.constants.id_of("u"), th.constants.id_of("v"))
    result = ground(th, store, GrounderParams(0, 1), [root])
    net = build_gmn(result, [root], store, th)
    table = ScoreTable()
    for node in net.nodes:
        if node.atom == root:
            table.set(node.id, head_init, "kge-initial")
        else:
            name = th.predicates.name_of(node.atom[0])
            table.set(node.id, body_scores[name], "kge-initial")
    return net, table, root


def test_single_step_product_update():
    net, init, root = single_edge_network({"b1": 0.9, "b2": 0.8}, 0.1)
    out = propagate(net, init, "product", steps=1)
    assert out.scores[net.node_id(root)] == pytest.approx(0.72)
    assert out.provenance[net.node_id(root)] == "propagated"


def test_zero_steps_is_identity():
    net, init, root = single_edge_network({"b1": 0.9, "b2": 0.8}, 0.1)
    out = propagate(net, init, "product", steps=0)
    assert out.scores == init.scores


def test_propagation_never_degrades_the_input():
    net, init, root = single_edge_network({"b1": 0.3, "b2": 0.2}, 0.9)
    out = propagate(net, init, "product", steps=5)
    assert out.scores[net.node_id(root)] == pytest.approx(0.9)


def test_missing_entry_raises():
    net, init, root = single_edge_network({"b1": 0.9, "b2": 0.8}, 0.1)
    del init.scores[0]
    with pytest.raises(ScoreError):
        propagate(net, init, "product", steps=1)


def test_scores_monotone_per_step_and_bounded(small_corpus):
    for theory, store in small_corpus[:8]:
        result = full_grounding(theory, store)
        roots = sorted(theory.herbrand_base())
        net = build_gmn(result, roots, store, theory)
        table = initial_scores(net, scorer=None, unknown_default=0.25)
        prev = table
        for _ in range(3):
            nxt = propagate(net, prev, "product", steps=1)
            for nid in nxt.scores:
                assert 0.0 <= nxt.scores[nid] <= 1.0
                assert nxt.scores[nid] >= prev.scores[nid] - 1e-12
            prev = nxt


@pytest.mark.parametrize("kind", ["product", "goedel", "lukasiewicz"])
def test_crisp_fixpoint_equals_forward_closure(kind, small_corpus):
    for theory, store in small_corpus[:10]:
        result = full_grounding(theory, store)
        roots = sorted(theory.herbrand_base())
        net = build_gmn(result, roots, store, theory)
        init = initial_scores(net, scorer=None, unknown_default=0.0)
        out = propagate(net, init, kind, steps=None)
        ones = {net.nodes[nid].atom for nid, sc in out.scores.items() if sc == 1.0}
        assert ones - set(store) == gk.forward_closure(theory, store)


def test_aggregation_is_max_over_groundings():
    th = gk.parse_theory("h(X,Z) :- b(X,Y), b(Y,Z).\n")
    store = gk.load_facts("u\tb\tm1\nm1\tb\tv\nu\tb\tm2\nm2\tb\tv\n", th)
    h = th.predicates.id_of("h")
    root = (h, th.constants.id_of("u"), th.constants.id_of("v"))
    result = ground(th, store, GrounderParams(0, 1), [root])
    net = build_gmn(result, [root], store, th)
    m1 = th.constants.id_of("m1")
    table = ScoreTable()
    for node in net.nodes:
        if node.atom == root:
            table.set(node.id, 0.0, "kge-initial")
        elif m1 in node.atom[1:]:
            table.set(node.id, 0.6, "kge-initial")
        else:
            table.set(node.id, 0.8, "kge-initial")
    out = propagate(net, table, "product", steps=1)
    # two groundings, through m1 (0.36) and m2 (0.64); the head takes the best
    assert out.scores[net.node_id(root)] == pytest.approx(0.64)


def test_known_facts_scored_one_and_default_prior():
    th = gk.parse_theory("h(X,Y) :- b(X,Y).\n")
    store = gk.load_facts("u\tb\tv\n", th)
    h = th.predicates.id_of("h")
    root = (h, th.constants.id_of("u"), th.constants.id_of("v"))
    result = ground(th, store, GrounderParams(0, 1), [root])
    net = build_gmn(result, [root], store, th)
    table = initial_scores(net, scorer=None)
    known_node = net.node_id((th.predicates.id_of("b"), 0, 1))
    assert table.scores[known_node] == 1.0
    assert table.provenance[known_node] == "known-fact"
    assert table.scores[net.node_id(root)] == 0.5
    assert table.provenance[net.node_id(root)] == "default-prior"


def test_score_file_round_trip():
    net, init, root = single_edge_network({"b1": 0.9, "b2": 0.8}, 0.1)
    buffer = io.StringIO()
    write_scores(net, init, buffer)
    parsed = read_scores(io.StringIO(buffer.getvalue()))
    assert len(parsed) == 3
    for node in net.nodes:
        assert parsed[net.atom_text(node.atom)] == pytest.approx(init.scores[node.id])
    with pytest.raises(ScoreError):
        read_scores(io.StringIO("h(u,v) 0.5\n"))
