"""Ranking-based link prediction and the ablation-split protocol.

Evaluation corrupts each test triple on the head and tail side, filters
corruptions known to be true (the community-standard filtered protocol;
a raw mode exists), and ranks the query among the survivors with mean
tie ranks, which keeps constant scorers at chance level instead of
granting them perfect results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .facts import FactStore
from .kge import EmbeddingModel, score_objects, score_subjects, sigmoid
from .logic import GroundAtom, HornClause, LogicError, Theory, Variable
from .oracle import oracle_provable

HITS_LEVELS = (1, 3, 10)


@dataclass
class RankingReport:
    """Aggregated metrics; ranks pool head- and tail-side queries."""

    mrr: float
    hits: dict[int, float]
    n_ranked: int
    skipped: int
    sides: tuple[str, ...]
    filtered: bool
    runs_averaged: bool = False
    ranks: Optional[list[tuple[GroundAtom, str, float]]] = None

    def to_dict(self) -> dict:
        return {
            "mrr": self.mrr,
            "hits": {str(k): v for k, v in sorted(self.hits.items())},
            "n_ranked": self.n_ranked,
            "skipped": self.skipped,
            "sides": list(self.sides),
            "filtered": self.filtered,
            "runs_averaged": self.runs_averaged,
        }

    def table(self) -> str:
        keys = sorted(self.hits)
        header = ["MRR"] + [f"Hits@{k}" for k in keys] + ["ranked", "skipped"]
        values = [f"{self.mrr:.4f}"] + [f"{self.hits[k]:.4f}" for k in keys]
        values += [str(self.n_ranked), str(self.skipped)]
        widths = [max(len(h), len(v)) for h, v in zip(header, values)]
        top = "  ".join(h.rjust(w) for h, w in zip(header, widths))
        bottom = "  ".join(v.rjust(w) for v, w in zip(values, widths))
        return top + "\n" + bottom


def rank_query(query_score: float, candidate_scores: Sequence[float]) -> float:
    """Mean tie rank: 1 + #{better} + #{equal}/2."""
    if len(candidate_scores) == 0:
        raise LogicError("rank_query needs a non-empty candidate set")
    scores = np.asarray(candidate_scores, dtype=float)
    greater = int((scores > query_score).sum())
    equal = int((scores == query_score).sum())
    return 1.0 + greater + equal / 2.0


class KgeScorer:
    """Probability scorer backed by an embedding model."""

    def __init__(self, model: EmbeddingModel) -> None:
        self.model = model
        self.n_entities = model.n_entities
        self.n_relations = model.n_relations

    def prob_objects(self, s: int, r: int) -> np.ndarray:
        return sigmoid(score_objects(self.model, s, r))

    def prob_subjects(self, r: int, o: int) -> np.ndarray:
        return sigmoid(score_subjects(self.model, r, o))


class OverlayScorer:
    """Base scorer with per-atom score-table overrides.

    Atoms outside the table (outside the grounded network) fall back to
    the base scorer's initial predictions.
    """

    def __init__(self, base: KgeScorer, table: dict[GroundAtom, float]) -> None:
        self.base = base
        self.n_entities = base.n_entities
        self.n_relations = base.n_relations
        self._by_sr: dict[tuple[int, int], list[tuple[int, float]]] = {}
        self._by_ro: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for atom, score in table.items():
            if len(atom) != 3:
                continue
            pred, s, o = atom
            self._by_sr.setdefault((s, pred), []).append((o, score))
            self._by_ro.setdefault((pred, o), []).append((s, score))

    def prob_objects(self, s: int, r: int) -> np.ndarray:
        scores = self.base.prob_objects(s, r)
        for o, value in self._by_sr.get((s, r), ()):
            if o < scores.shape[0]:
                scores[o] = value
        return scores

    def prob_subjects(self, r: int, o: int) -> np.ndarray:
        scores = self.base.prob_subjects(r, o)
        for s, value in self._by_ro.get((r, o), ()):
            if s < scores.shape[0]:
                scores[s] = value
        return scores


def corruption_candidates(
    queries: Sequence[GroundAtom],
    n_entities: int,
    corruptions: object = "all",
    seed: int = 0,
    sides: tuple[str, ...] = ("head", "tail"),
) -> dict[tuple[GroundAtom, str], np.ndarray]:
    """Candidate entity ids per (query, side); shared by grounding roots.

    ``corruptions`` is ``"all"`` or a sample size per query and side.
    Sampling is deterministic for a seed and excludes the true entity.
    """
    out: dict[tuple[GroundAtom, str], np.ndarray] = {}
    rng = np.random.default_rng(seed)
    everyone = np.arange(n_entities)
    for query in queries:
        _, s, o = query
        for side in sides:
            true_id = s if side == "head" else o
            pool = everyone[everyone != true_id]
            if corruptions == "all":
                chosen = pool
            else:
                n = int(corruptions)
                chosen = rng.choice(pool, size=min(n, pool.shape[0]), replace=False)
                chosen = np.sort(chosen)
            out[(query, side)] = chosen
    return out


def candidate_roots(
    queries: Sequence[GroundAtom],
    candidates: dict[tuple[GroundAtom, str], np.ndarray],
) -> Iterable[GroundAtom]:
    """Grounding roots: the queries plus every corruption candidate."""
    for query in queries:
        yield query
        pred, s, o = query
        for e in candidates.get((query, "tail"), ()):
            yield (pred, s, int(e))
        for e in candidates.get((query, "head"), ()):
            yield (pred, int(e), o)


def evaluate(
    scorer,
    queries: Sequence[GroundAtom],
    *,
    filter_sets: Sequence[Iterable[GroundAtom]] = (),
    corruptions: object = "all",
    sides: tuple[str, ...] = ("head", "tail"),
    seed: int = 0,
    raw: bool = False,
    with_ranks: bool = False,
    candidates: Optional[dict[tuple[GroundAtom, str], np.ndarray]] = None,
) -> RankingReport:
    """Rank every query against its corruptions and aggregate MRR/Hits@N.

    Queries with out-of-vocabulary ids are excluded and counted in
    ``skipped``.  Identical inputs and seed give identical reports.
    """
    known: set[GroundAtom] = set()
    for fs in filter_sets:
        known.update(fs)
    if candidates is None:
        in_vocab = [
            q for q in queries
            if q[0] < scorer.n_relations and q[1] < scorer.n_entities and q[2] < scorer.n_entities
        ]
        candidates = corruption_candidates(in_vocab, scorer.n_entities, corruptions, seed, sides)
    ranks: list[tuple[GroundAtom, str, float]] = []
    skipped = 0
    for query in queries:
        pred, s, o = query
        if pred >= scorer.n_relations or s >= scorer.n_entities or o >= scorer.n_entities:
            skipped += 1
            continue
        for side in sides:
            cand = candidates[(query, side)]
            if side == "tail":
                scores = scorer.prob_objects(s, pred)
                query_score = scores[o]
                if not raw:
                    keep = [e for e in cand if (pred, s, int(e)) not in known]
                    cand = np.asarray(keep, dtype=int)
            else:
                scores = scorer.prob_subjects(pred, o)
                query_score = scores[s]
                if not raw:
                    keep = [e for e in cand if (pred, int(e), o) not in known]
                    cand = np.asarray(keep, dtype=int)
            if cand.shape[0] == 0:
                ranks.append((query, side, 1.0))
                continue
            ranks.append((query, side, rank_query(float(query_score), scores[cand])))

    values = np.array([r for _, _, r in ranks]) if ranks else np.array([])
    mrr = float(np.mean(1.0 / values)) if values.size else 0.0
    hits = {
        k: (float(np.mean(values <= k)) if values.size else 0.0) for k in HITS_LEVELS
    }
    return RankingReport(
        mrr=mrr,
        hits=hits,
        n_ranked=len(ranks),
        skipped=skipped,
        sides=sides,
        filtered=not raw,
        ranks=ranks if with_ranks else None,
    )


def average_reports(reports: Sequence[RankingReport]) -> RankingReport:
    """Mean of metrics across runs (e.g. seeds)."""
    if not reports:
        raise LogicError("no reports to average")
    hits = {
        k: float(np.mean([r.hits[k] for r in reports])) for k in reports[0].hits
    }
    return RankingReport(
        mrr=float(np.mean([r.mrr for r in reports])),
        hits=hits,
        n_ranked=sum(r.n_ranked for r in reports),
        skipped=sum(r.skipped for r in reports),
        sides=reports[0].sides,
        filtered=reports[0].filtered,
        runs_averaged=True,
    )


# ---------------------------------------------------------------------------
# Ablation splits: queries solvable by exactly k nested chain-rule steps.
# ---------------------------------------------------------------------------


@dataclass
class AblationSplit:
    facts: list[GroundAtom]
    queries: list[GroundAtom]
    removed: list[GroundAtom]
    hops: int


def _chain_predicate(rule: HornClause) -> int:
    """Validate the x->w->z transitive shape and return its predicate."""
    if len(rule.body) != 2:
        raise LogicError("ablation construction needs a 2-atom chain rule")
    head, first, second = rule.head, rule.body[0], rule.body[1]
    if not (head.predicate == first.predicate == second.predicate):
        raise LogicError("chain rule must use a single predicate")
    if any(len(a.args) != 2 for a in (head, first, second)):
        raise LogicError("chain rule predicate must be binary")
    terms = [head.args[0], head.args[1], first.args[0], first.args[1], second.args[0], second.args[1]]
    if not all(isinstance(t, Variable) for t in terms):
        raise LogicError("chain rule must be variable-only")
    x, z, fx, w, w2, sz = (t.id for t in terms)
    if not (x == fx and z == sz and w == w2 and len({x, w, z}) == 3):
        raise LogicError("rule does not have the x->w, w->z, x->z chain shape")
    return head.predicate


def build_ablation_split(
    store: FactStore,
    theory: Theory,
    rule: HornClause,
    hops: int,
    n_queries: int,
    seed: int = 0,
) -> AblationSplit:
    """Select queries needing exactly ``hops`` nested applications of a
    chain rule, removing facts that would allow shorter derivations.

    Every returned query is certified with the brute-force oracle over
    the query's reachable sub-store: provable at width 1 and depth
    ``hops``, not provable at depth ``hops - 1``.
    """
    if hops < 1:
        raise LogicError("hops must be >= 1")
    pred = _chain_predicate(rule)
    rule_theory = Theory(
        predicates=theory.predicates,
        constants=theory.constants,
        variables=theory.variables,
        arities=theory.arities,
        clauses=[HornClause(rule.head, rule.body, 0)],
    )
    rng = np.random.default_rng(seed)

    facts = set(store)
    removed: set[GroundAtom] = set()
    queries: list[GroundAtom] = []
    used_links: set[GroundAtom] = set()

    def adjacency() -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {}
        for fact in sorted(facts):
            if fact[0] == pred:
                adj.setdefault(fact[1], []).append(fact[2])
        return adj

    def paths_from(adj: dict[int, list[int]], start: int) -> Iterable[list[int]]:
        stack = [[start]]
        while stack:
            path = stack.pop()
            if len(path) == hops + 2:
                yield path
                continue
            for nxt in adj.get(path[-1], ()):
                if nxt not in path:
                    stack.append(path + [nxt])

    def certify(query: GroundAtom) -> bool:
        reach = {query[1]}
        frontier = [query[1]]
        adj = adjacency()
        while frontier:
            node = frontier.pop()
            for nxt in adj.get(node, ()):
                if nxt not in reach:
                    reach.add(nxt)
                    frontier.append(nxt)
        reach.add(query[2])
        local = {f for f in facts if f[0] == pred and f[1] in reach and f[2] in reach}
        consts = sorted(reach)
        at_k = oracle_provable(rule_theory, local, 1, hops, [query], constants=consts)
        if query not in at_k:
            return False
        if hops > 1:
            below = oracle_provable(rule_theory, local, 1, hops - 1, [query], constants=consts)
            if query in below:
                return False
        return True

    adj = adjacency()
    starts = sorted(adj)
    rng.shuffle(starts)
    for start in starts:
        if len(queries) >= n_queries:
            break
        for path in paths_from(adj, start):
            query = (pred, path[0], path[-1])
            if query in queries:
                continue
            links = {(pred, path[i], path[i + 1]) for i in range(len(path) - 1)}
            shortcuts = {
                (pred, path[i], path[j])
                for i in range(len(path))
                for j in range(i + 2, len(path))
            }
            to_remove = {f for f in shortcuts if f in facts}
            if to_remove & used_links:
                continue
            facts -= to_remove
            if certify(query):
                removed |= to_remove
                used_links |= links
                queries.append(query)
                adj = adjacency()
                break
            facts |= to_remove
    if len(queries) < n_queries:
        raise LogicError(
            f"insufficient {hops + 1}-link chains: found {len(queries)} of {n_queries} queries"
        )
    return AblationSplit(
        facts=sorted(facts), queries=queries, removed=sorted(removed), hops=hops
    )
