import numpy as np
import pytest

import groundkit as gk
from groundkit.datasets import make_ablation_world
from groundkit.evaluation import (
    KgeScorer,
    OverlayScorer,
    average_reports,
    build_ablation_split,
    candidate_roots,
    corruption_candidates,
    evaluate,
    rank_query,
)
from groundkit.kge import create_model


@pytest.mark.parametrize(
    ("query", "candidates", "expected"),
    [
        (0.9, [0.95, 0.8, 0.7], 2.0),
        (0.5, [0.5] * 10, 6.0),  # mean of ranks 1..11
        (0.99, [0.5, 0.4], 1.0),
    ],
)
def test_rank_query(query, candidates, expected):
    assert rank_query(query, candidates) == expected


def test_rank_query_empty_candidates():
    with pytest.raises(gk.LogicError):
        rank_query(0.5, [])


class _TableScorer:
    """Deterministic stand-in: scores straight from a dict."""

    def __init__(self, n_entities, n_relations, table, default=0.01):
        self.n_entities = n_entities
        self.n_relations = n_relations
        self.table = table
        self.default = default

    def prob_objects(self, s, r):
        return np.array(
            [self.table.get((r, s, o), self.default) for o in range(self.n_entities)]
        )

    def prob_subjects(self, r, o):
        return np.array(
            [self.table.get((r, s, o), self.default) for s in range(self.n_entities)]
        )


def test_mrr_and_hits_arithmetic():
    # three tail-side queries engineered to rank 1, 2, 4
    table = {
        (0, 0, 1): 0.9,
        (0, 1, 2): 0.8, (0, 1, 0): 0.9,
        (0, 2, 0): 0.5, (0, 2, 1): 0.9, (0, 2, 3): 0.8, (0, 2, 4): 0.7,
    }
    scorer = _TableScorer(5, 1, table)
    queries = [(0, 0, 1), (0, 1, 2), (0, 2, 0)]
    report = evaluate(scorer, queries, sides=("tail",), raw=True)
    assert report.mrr == pytest.approx((1 + 1 / 2 + 1 / 4) / 3)
    assert report.hits[1] == pytest.approx(1 / 3)
    assert report.hits[3] == pytest.approx(2 / 3)
    assert report.hits[10] == pytest.approx(1.0)


def test_perfect_scorer_gives_unit_metrics():
    table = {(0, s, (s + 1) % 4): 0.99 for s in range(4)}
    scorer = _TableScorer(4, 1, table)
    queries = [(0, s, (s + 1) % 4) for s in range(4)]
    report = evaluate(scorer, queries, raw=True)
    assert report.mrr == 1.0
    assert all(v == 1.0 for v in report.hits.values())
    assert report.mrr >= report.hits[1]


def test_filtered_rank_never_worse_than_raw():
    rng = np.random.default_rng(3)
    n = 12
    table = {(0, s, o): float(rng.random()) for s in range(n) for o in range(n)}
    scorer = _TableScorer(n, 1, table)
    queries = [(0, 0, 5), (0, 3, 7), (0, 2, 2)]
    known = [[(0, s, o) for s in range(n) for o in range(n) if (s + o) % 3 == 0]]
    raw = evaluate(scorer, queries, raw=True, with_ranks=True)
    filtered = evaluate(scorer, queries, filter_sets=known, with_ranks=True)
    for (q1, side1, r_raw), (q2, side2, r_filt) in zip(raw.ranks, filtered.ranks):
        assert (q1, side1) == (q2, side2)
        assert r_filt <= r_raw


def test_out_of_vocabulary_queries_are_counted():
    scorer = _TableScorer(4, 1, {})
    report = evaluate(scorer, [(0, 0, 1), (0, 9, 1), (5, 0, 1)], raw=True)
    assert report.skipped == 2
    assert report.n_ranked == 2  # one query, both sides


def test_evaluate_deterministic_with_sampling():
    rng = np.random.default_rng(0)
    table = {(0, s, o): float(rng.random()) for s in range(30) for o in range(30)}
    scorer = _TableScorer(30, 1, table)
    queries = [(0, 1, 2), (0, 4, 9)]
    a = evaluate(scorer, queries, corruptions=10, seed=11, with_ranks=True)
    b = evaluate(scorer, queries, corruptions=10, seed=11, with_ranks=True)
    assert a.ranks == b.ranks
    c = evaluate(scorer, queries, corruptions=10, seed=12, with_ranks=True)
    assert a.mrr != c.mrr or a.ranks != c.ranks


def test_average_reports_flags_runs():
    table = {(0, 0, 1): 0.9}
    scorer = _TableScorer(3, 1, table)
    reports = [evaluate(scorer, [(0, 0, 1)], raw=True, seed=s) for s in range(3)]
    merged = average_reports(reports)
    assert merged.runs_averaged
    assert merged.mrr == pytest.approx(np.mean([r.mrr for r in reports]))


def test_overlay_scorer_prefers_table_entries():
    model = create_model("complex", ["a", "b", "c"], ["r"], 4, seed=0)
    base = KgeScorer(model)
    overlay = OverlayScorer(base, {(0, 0, 1): 1.0})
    assert overlay.prob_objects(0, 0)[1] == 1.0
    assert overlay.prob_subjects(0, 1)[0] == 1.0
    untouched = base.prob_objects(0, 0)[2]
    assert overlay.prob_objects(0, 0)[2] == pytest.approx(untouched)


def test_corruption_candidates_and_roots():
    queries = [(0, 1, 2)]
    cands = corruption_candidates(queries, 5, "all")
    assert list(cands[(queries[0], "tail")]) == [0, 1, 3, 4]
    assert list(cands[(queries[0], "head")]) == [0, 2, 3, 4]
    roots = set(candidate_roots(queries, cands))
    assert (0, 1, 2) in roots
    assert (0, 1, 0) in roots and (0, 4, 2) in roots
    assert len(roots) == 1 + 4 + 4


# -- ablation splits -----------------------------------------------------


def ablation_setup(seed=0):
    ds = make_ablation_world(seed)
    th = gk.parse_theory(ds.rules_text)
    for name in ds.entities:
        th.constant(name)
    tsv = "".join(f"{s}\t{r}\t{o}\n" for s, r, o in ds.train)
    store = gk.load_facts(tsv, th)
    return th, store


def test_invalid_hops_rejected():
    th, store = ablation_setup()
    with pytest.raises(gk.LogicError):
        build_ablation_split(store, th, th.clauses[0], 0, 5)


def test_non_chain_rule_rejected():
    th = gk.parse_theory("p(X,Y) :- q(X,Y).\n")
    with pytest.raises(gk.LogicError):
        build_ablation_split(gk.FactStore(), th, th.clauses[0], 1, 1)


@pytest.mark.parametrize("hops", [1, 2, 3])
def test_split_queries_certified_by_grounder(hops):
    th, store = ablation_setup()
    split = build_ablation_split(store, th, th.clauses[0], hops, 8, seed=1)
    assert len(split.queries) == 8
    reduced = gk.FactStore(split.facts)
    for query in split.queries:
        assert not reduced.contains(query)
        for d in (1, 2, 3):
            result = gk.ground(th, reduced, gk.GrounderParams(1, d), [query])
            assert (query in result.proved) == (d >= hops)


def test_split_removes_shortcuts_when_present():
    th = gk.parse_theory("locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).\n")
    text = "a\tlocatedIn\tb\nb\tlocatedIn\tc\nc\tlocatedIn\td\na\tlocatedIn\tc\n"
    store = gk.load_facts(text, th)
    split = build_ablation_split(store, th, th.clauses[0], 2, 1, seed=0)
    loc = th.predicates.id_of("locatedIn")
    a, c = th.constants.id_of("a"), th.constants.id_of("c")
    assert (loc, a, c) in split.removed
    assert (loc, a, c) not in split.facts


def test_insufficient_chains_raise():
    th = gk.parse_theory("locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).\n")
    store = gk.load_facts("a\tlocatedIn\tb\n", th)
    with pytest.raises(gk.LogicError):
        build_ablation_split(store, th, th.clauses[0], 2, 1)
