import random

import pytest

import groundkit as gk
from groundkit.grounding import (
    INF,
    BudgetExceededError,
    GrounderParams,
    full_grounding,
    ground,
    herbrand_universe_size,
    provable_set,
)

def chain_world():
    """Facts p(a,b), p(b,c), p(c,d) with the transitivity rule."""
    th = gk.parse_theory("p(X,Z) :- p(X,Y), p(Y,Z).\n")
    store = gk.load_facts("a\tp\tb\nb\tp\tc\nc\tp\td\n", th)
    p = th.predicates.id_of("p")
    ids = {n: th.constants.id_of(n) for n in "abcd"}
    return th, store, p, ids


def test_known_body_single_step():
    th = gk.parse_theory("locIn(X,Z) :- locIn(X,Y), locIn(Y,Z).\n")
    store = gk.load_facts("it\tlocIn\tseu\nseu\tlocIn\teu\n", th)
    loc = th.predicates.id_of("locIn")
    it, eu = th.constants.id_of("it"), th.constants.id_of("eu")
    root = (loc, it, eu)
    result = ground(th, store, GrounderParams(width=0, depth=1), [root])
    assert result.proved == {root}
    assert len(result.instances) == 1
    inst = next(iter(result.instances))
    assert inst.known == (True, True)
    assert inst.head == root


def test_chain_unprovable_at_known_body():
    th, store, p, ids = chain_world()
    root = (p, ids["a"], ids["d"])
    result = ground(th, store, GrounderParams(0, 1), [root])
    assert result.proved == set()
    assert result.instances == set()


def test_chain_proof_at_width_one_depth_two():
    th, store, p, ids = chain_world()
    a, b, c, d = (ids[k] for k in "abcd")
    root = (p, a, d)
    result = ground(th, store, GrounderParams(1, 2), [root], keep_proofs=True)
    assert result.proved == {root}
    expected = {
        ((p, a, d), ((p, a, b), (p, b, d))),
        ((p, b, d), ((p, b, c), (p, c, d))),
        ((p, a, d), ((p, a, c), (p, c, d))),
        ((p, a, c), ((p, a, b), (p, b, c))),
    }
    assert {(i.head, i.body) for i in result.instances} == expected
    assert result.proof_counts[root] == 2
    trees = result.proofs[root]
    assert len(trees) == 2
    assert all(t.depth() == 2 for t in trees)
    assert all(i.unknown_count() <= 1 for i in result.instances)


def test_provable_set_known_facts_not_auto_included():
    th = gk.parse_theory("q(X,Y) :- r(X,Y).\n")
    store = gk.load_facts("a\tq\tb\n", th)
    q = th.predicates.id_of("q")
    root = (q, 0, 1)
    result = ground(th, store, GrounderParams(2, 3), [root])
    assert provable_set(result) == set()


def test_root_in_store_is_provable_when_derivable():
    th = gk.parse_theory("q(X,Y) :- r(X,Y).\n")
    store = gk.load_facts("a\tq\tb\na\tr\tb\n", th)
    q = th.predicates.id_of("q")
    root = (q, th.constants.id_of("a"), th.constants.id_of("b"))
    result = ground(th, store, GrounderParams(0, 1), [root])
    assert provable_set(result) == {root}


def test_uncertain_full_width_depth_one_generates_the_universe():
    th = gk.parse_theory("p(X,Z) :- p(X,Y), p(Y,Z).\n")
    th.constant("u")
    th.constant("v")
    store = gk.FactStore()
    params = GrounderParams(width=INF, depth=1, uncertain=True)
    result = ground(th, store, params, th.herbrand_base())
    assert len(result.instances) == 2 ** 3
    assert result.instances == gk.enumerate_hu(th)


def test_full_grounding_three_variable_rule():
    th = gk.parse_theory("locIn(Y,Z) :- locIn(X,Z), neighOf(X,Y).\n")
    for name in ("it", "fr", "es", "eu"):
        th.constant(name)
    result = full_grounding(th)
    assert len(result.instances) == 4 ** 3


def test_full_grounding_empty_theory():
    th = gk.Theory()
    th.constant("a")
    result = full_grounding(th)
    assert result.instances == set() and result.proved == set()


def test_full_grounding_singleton_domain():
    th = gk.parse_theory("p(X,Z) :- p(X,Y), p(Y,Z).\n")
    th.constant("c")
    result = full_grounding(th)
    assert len(result.instances) == 1
    inst = next(iter(result.instances))
    assert inst.head == (0, 0, 0)
    assert inst.body == ((0, 0, 0), (0, 0, 0))


def test_full_grounding_budget_refusal():
    th = gk.parse_theory("p(X,Z) :- p(X,Y), p(Y,Z).\n")
    for i in range(50):
        th.constant(f"c{i}")
    with pytest.raises(BudgetExceededError) as err:
        full_grounding(th, budget=10_000)
    assert err.value.required == 50 ** 3
    assert herbrand_universe_size(th, 50) == 50 ** 3


def test_enumeration_cap_reports_truncation():
    th = gk.parse_theory("q(X,Z) :- r(X,Y), r(Y,Z).\n")
    for i in range(5):
        th.constant(f"k{i}")
    q = th.predicates.id_of("q")
    params = GrounderParams(width=INF, depth=1, uncertain=True, enumeration_cap=3)
    result = ground(th, gk.FactStore(), params, [(q, 0, 1)])
    assert result.truncations
    event = result.truncations[0]
    assert event.total == 5 and event.emitted == 3
    assert len(result.instances) == 3


def test_infinite_depth_terminates_on_cyclic_theory():
    th = gk.parse_theory("p(X,Z) :- p(X,Y), p(Y,Z).\np(X,Y) :- p(Y,X).\n")
    store = gk.load_facts("a\tp\tb\nb\tp\tc\nc\tp\td\n", th)
    roots = list(th.herbrand_base())
    result = ground(th, store, GrounderParams(INF, INF), roots)
    oracle_inst, oracle_prov = gk.oracle_ground(th, store, th.max_body_len(), INF, roots)
    assert result.proved == oracle_prov
    assert result.instances == oracle_inst
    closure = gk.forward_closure(th, store)
    assert result.proved <= closure | set(store)


def test_depth_one_equals_width_zero_identity(small_corpus):
    for theory, store in small_corpus:
        roots = list(theory.herbrand_base())
        r0 = ground(theory, store, GrounderParams(0, 1), roots)
        r1 = ground(theory, store, GrounderParams(1, 1), roots)
        assert r0.instances == r1.instances
        assert r0.proved == r1.proved


def test_oracle_equivalence_on_small_corpus(small_corpus):
    rng = random.Random(5)
    for theory, store in small_corpus[:20]:
        hu = gk.enumerate_hu(theory, facts=store)
        roots = list(theory.herbrand_base())
        for w in (0, 1, 2, INF):
            for d in (1, 2, rng.choice((3, INF))):
                result = ground(theory, store, GrounderParams(w, d), roots)
                ow = theory.max_body_len() if w == INF else w
                inst, prov = gk.oracle_ground(theory, store, ow, d, roots, hu=hu)
                assert result.instances == inst
                assert result.proved == prov


def test_worker_count_does_not_change_results(small_corpus):
    theory, store = small_corpus[0]
    roots = sorted(theory.herbrand_base())
    lone = ground(theory, store, GrounderParams(1, 2), roots, jobs=1)
    multi = ground(theory, store, GrounderParams(1, 2), roots, jobs=3)
    assert lone.instances == multi.instances
    assert lone.proved == multi.proved
    assert lone.proof_counts == multi.proof_counts


def test_instances_closed_under_sub_proofs(small_corpus):
    for theory, store in small_corpus[:15]:
        roots = list(theory.herbrand_base())
        result = ground(theory, store, GrounderParams(1, 3), roots)
        heads = {i.head for i in result.instances}
        for inst in result.instances:
            for atom, known in zip(inst.body, inst.known):
                if not known:
                    assert atom in heads


def test_params_validation():
    with pytest.raises(ValueError):
        GrounderParams(depth=0)
    with pytest.raises(ValueError):
        GrounderParams(width=-1)


def test_stats_counters_populated():
    th, store, p, ids = chain_world()
    result = ground(th, store, GrounderParams(0, 1), [(p, ids["a"], ids["d"])])
    assert result.stats.roots == 1
    assert result.stats.expansions >= 1
    assert result.stats.wall_time >= 0.0
    assert isinstance(result.stats.to_dict(), dict)
