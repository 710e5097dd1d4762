"""Width/depth-parameterized backward-chaining grounding.

A grounder in the family is fixed by a width ``w`` (how many body atoms
of a ground rule may be missing from the fact store) and a depth ``d``
(how deeply missing atoms may be proved as sub-goals).  Notable members:

* ``w=0, d=1``  -- known-body grounding: every body atom must be a fact.
* ``w=inf, d=n`` -- depth-limited backward chaining.
* ``w=inf, d=inf`` -- classic backward chaining (width capped at the
  longest rule body; termination on cyclic theories via a
  path-repetition guard).
* ``uncertain=True, w=inf, d=1`` -- full grounding: rooted at the whole
  Herbrand base it materializes the entire Herbrand universe.

Proof acceptance follows two regimes: the strict one discards any proof
that still contains unknown atoms, so accepted ground rules bottom out in
known facts; the ``uncertain`` one also accepts instances whose unknown
atoms stay unproven (to be scored downstream), enumerating residual free
variables over the constant domain, subject to ``enumeration_cap``.

An instantiation with more than ``w`` unknown body atoms is rejected
outright, regardless of remaining depth.  Unknown counts are positional:
a body with the same missing atom twice spends two units of width.

Searches from distinct roots are independent; ``ground`` accepts a worker
count and merges per-root results order-independently, so the instance
set, proved set and per-root counts are identical for any ``jobs``.
"""

from __future__ import annotations

import itertools
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .facts import FactStore
from .logic import (
    Atom,
    Constant,
    GroundAtom,
    LogicError,
    Theory,
)

INF = math.inf


class BudgetExceededError(LogicError):
    """A grounding was refused because its size bound was exceeded."""

    def __init__(self, message: str, required: int, budget: int) -> None:
        super().__init__(message)
        self.required = required
        self.budget = budget


@dataclass(frozen=True, slots=True)
class GrounderParams:
    """Knobs of the grounder family.

    ``width``/``depth`` accept non-negative ints or ``math.inf``; an
    infinite width is internally capped at the longest rule body.
    ``enumeration_cap`` bounds, per enumeration site, how many ground
    bindings of residual free variables the uncertain regime will emit;
    exceeding it is reported, never silent.
    """

    width: float = 0
    depth: float = 1
    uncertain: bool = False
    enumeration_cap: Optional[int] = None

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.width < 0:
            raise ValueError("width must be >= 0")
        if self.enumeration_cap is not None and self.enumeration_cap < 0:
            raise ValueError("enumeration_cap must be >= 0")


@dataclass(frozen=True, slots=True)
class GroundRuleInstance:
    """A fully ground rule: the clause under one substitution.

    ``subst`` is sorted by variable id and identifies the instance
    together with ``rule_id``; ``known`` flags store membership per body
    atom at grounding time.
    """

    rule_id: int
    subst: tuple[tuple[int, int], ...]
    head: GroundAtom
    body: tuple[GroundAtom, ...]
    known: tuple[bool, ...]

    def unknown_count(self) -> int:
        return sum(1 for k in self.known if not k)


@dataclass(frozen=True, slots=True)
class ProofTree:
    """One accepted derivation: children prove unknown body atoms."""

    goal: GroundAtom
    instance: GroundRuleInstance
    children: tuple["ProofTree", ...]

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


@dataclass(slots=True)
class TruncationEvent:
    """Residual-variable enumeration hit ``enumeration_cap``."""

    rule_id: int
    pattern: tuple
    total: int
    emitted: int


@dataclass(slots=True)
class GroundingStats:
    """Search diagnostics.

    ``width_rejections`` counts instantiation paths that died on a body
    fact missing with the width budget exhausted; ``depth_rejections``
    counts sub-goals refused because no depth remained.  Counter values
    depend on the worker partitioning (memoization is per worker); the
    semantic outputs of a grounding never do.
    """

    roots: int = 0
    proved_roots: int = 0
    instances: int = 0
    expansions: int = 0
    width_rejections: int = 0
    depth_rejections: int = 0
    memo_hits: int = 0
    truncations: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "roots": self.roots,
            "proved_roots": self.proved_roots,
            "instances": self.instances,
            "expansions": self.expansions,
            "width_rejections": self.width_rejections,
            "depth_rejections": self.depth_rejections,
            "memo_hits": self.memo_hits,
            "truncations": self.truncations,
            "wall_time": self.wall_time,
        }


@dataclass
class GroundingResult:
    """Accepted instances plus provability information for the roots."""

    instances: set[GroundRuleInstance]
    proved: set[GroundAtom]
    proof_counts: dict[GroundAtom, int]
    proofs: dict[GroundAtom, tuple[ProofTree, ...]]
    truncations: list[TruncationEvent]
    stats: GroundingStats
    params: GrounderParams

    def sorted_instances(self) -> list[GroundRuleInstance]:
        return sorted(self.instances, key=lambda i: (i.rule_id, i.subst))


def provable_set(result: GroundingResult) -> set[GroundAtom]:
    """Roots proved by at least one rule application within the bounds."""
    return set(result.proved)


# ---------------------------------------------------------------------------
# Engine internals.  Variables are encoded as negative ints (-(id+1)) so a
# pattern is a flat tuple (pred, slot, slot, ...) with constants >= 0; this
# keeps the join loops allocation-light.
# ---------------------------------------------------------------------------


def _encode_var(vid: int) -> int:
    return -(vid + 1)


def _encode_atom(atom: Atom) -> tuple:
    parts = [atom.predicate]
    for term in atom.args:
        parts.append(term.id if isinstance(term, Constant) else _encode_var(term.id))
    return tuple(parts)


@dataclass(slots=True)
class _ClauseView:
    """A clause instantiated into one search frame.

    ``var_map`` sends runtime (possibly renamed) variable codes back to
    the original clause variable ids for substitution assembly.
    """

    rule_id: int
    head: tuple
    body: tuple[tuple, ...]
    var_map: dict[int, int]


class _AnswerInfo:
    """Accumulated derivations of one ground answer atom."""

    __slots__ = ("complete", "instances", "trees", "_tree_set")

    def __init__(self) -> None:
        self.complete = False
        self.instances: set[GroundRuleInstance] = set()
        self.trees: list[ProofTree] = []
        self._tree_set: set[ProofTree] = set()

    def add_trees(self, trees: Iterable[ProofTree], cap: Optional[int]) -> int:
        added = 0
        for tree in trees:
            if cap is not None and len(self.trees) >= cap:
                break
            if tree not in self._tree_set:
                self._tree_set.add(tree)
                self.trees.append(tree)
                added += 1
        return added


class _Candidate:
    """One fully ground body assignment of a clause."""

    __slots__ = ("theta", "complete", "bundle", "child_trees")

    def __init__(self, theta, complete, bundle, child_trees):
        self.theta = theta
        self.complete = complete
        self.bundle = bundle  # set[GroundRuleInstance] from sub-proofs
        self.child_trees = child_trees  # list of per-occurrence tree tuples




class _Engine:
    def __init__(
        self,
        theory: Theory,
        store: FactStore,
        params: GrounderParams,
        *,
        domain: Optional[Sequence[int]] = None,
        keep_proofs: bool = False,
        max_proofs_per_root: Optional[int] = 64,
    ) -> None:
        self.theory = theory
        self.store = store
        self.params = params
        self.uncertain = params.uncertain
        self.cap = params.enumeration_cap
        self.depth = params.depth
        body_cap = theory.max_body_len()
        self.w_eff = body_cap if params.width == INF else min(int(params.width), body_cap)
        self.domain = tuple(domain) if domain is not None else tuple(range(len(theory.constants)))
        self.keep_proofs = keep_proofs
        self.max_proofs = max_proofs_per_root

        self.clauses_by_pred: dict[int, list[_ClauseView]] = {}
        self._orig_views: dict[int, tuple] = {}
        for clause in theory.clauses:
            head = _encode_atom(clause.head)
            body = tuple(_encode_atom(a) for a in clause.body)
            var_map = {
                _encode_var(vid): vid for vid in clause.variables()
            }
            view = _ClauseView(clause.rule_id, head, body, var_map)
            self.clauses_by_pred.setdefault(clause.head.predicate, []).append(view)

        self._next_fresh = len(theory.variables)
        self._memo: dict[tuple, dict] = {}
        # Infinite-depth tabling: persistent per-goal answers, naive
        # whole-search passes until the table stops growing.
        self._inf_table: dict[tuple, dict[GroundAtom, _AnswerInfo]] = {}
        self._inf_done: set[tuple] = set()
        self._inf_active: set[tuple] = set()
        self._inf_changed = False

        self.instances: set[GroundRuleInstance] = set()
        self.proved: set[GroundAtom] = set()
        self.proof_counts: dict[GroundAtom, int] = {}
        self.proofs: dict[GroundAtom, tuple[ProofTree, ...]] = {}
        self.truncations: list[TruncationEvent] = []
        self.counters = {
            "expansions": 0,
            "width_rejections": 0,
            "depth_rejections": 0,
            "memo_hits": 0,
        }

    # -- small helpers -------------------------------------------------

    def _fresh_var(self) -> int:
        code = _encode_var(self._next_fresh)
        self._next_fresh += 1
        return code

    @staticmethod
    def _chase(theta: dict, value: int) -> int:
        while value < 0:
            nxt = theta.get(value)
            if nxt is None:
                return value
            value = nxt
        return value

    def _subst(self, pattern: tuple, theta: dict) -> tuple:
        out = [pattern[0]]
        for e in pattern[1:]:
            out.append(self._chase(theta, e) if e < 0 else e)
        return tuple(out)

    @staticmethod
    def _is_ground(pattern: tuple) -> bool:
        return all(e >= 0 for e in pattern[1:])

    @staticmethod
    def _canonical(pattern: tuple) -> tuple:
        """Rename free variables to -1, -2, ... by first occurrence."""
        mapping: dict[int, int] = {}
        out = [pattern[0]]
        for e in pattern[1:]:
            if e < 0:
                slot = mapping.get(e)
                if slot is None:
                    slot = -(len(mapping) + 1)
                    mapping[e] = slot
                out.append(slot)
            else:
                out.append(e)
        return tuple(out)

    # -- clause/goal matching -------------------------------------------

    def _match_root(self, view: _ClauseView, root: GroundAtom) -> Optional[dict]:
        theta: dict = {}
        for e, value in zip(view.head[1:], root[1:]):
            if e >= 0:
                if e != value:
                    return None
            else:
                bound = theta.get(e)
                if bound is None:
                    theta[e] = value
                elif bound != value:
                    return None
        return theta

    def _rename_clause(self, clause: _ClauseView) -> _ClauseView:
        renaming: dict[int, int] = {}
        var_map: dict[int, int] = {}
        for code, orig in clause.var_map.items():
            fresh = self._fresh_var()
            renaming[code] = fresh
            var_map[fresh] = orig

        def rn(pattern: tuple) -> tuple:
            return tuple(
                [pattern[0]] + [renaming[e] if e < 0 else e for e in pattern[1:]]
            )

        return _ClauseView(clause.rule_id, rn(clause.head), tuple(rn(b) for b in clause.body), var_map)

    @staticmethod
    def _unify(pattern: tuple, head: tuple, theta: dict) -> bool:
        """Unify two patterns over disjoint variable codes, in place."""
        for a, b in zip(pattern[1:], head[1:]):
            while a < 0 and a in theta:
                a = theta[a]
            while b < 0 and b in theta:
                b = theta[b]
            if a == b:
                continue
            if a < 0:
                theta[a] = b
            elif b < 0:
                theta[b] = a
            else:
                return False
        return True

    # -- body search -----------------------------------------------------

    def _bodies(self, view: _ClauseView, theta0: dict, budget) -> Iterator[_Candidate]:
        """All ground body assignments of ``view`` under ``theta0``.

        Iterates unknown-designation subsets of the body positions within
        the width bound; for each, joins known-designated atoms against
        the store (most selective first) and resolves unknown-designated
        atoms through sub-goals and, in the uncertain regime, residual
        enumeration.
        """
        n = len(view.body)
        max_u = min(self.w_eff, n)
        for size in range(0, max_u + 1):
            for unknown_set in itertools.combinations(range(n), size):
                yield from self._join(
                    view, dict(theta0), set(range(n)) - set(unknown_set), list(unknown_set), budget
                )

    def _join(
        self,
        view: _ClauseView,
        theta: dict,
        remaining: set[int],
        unknown_positions: list[int],
        budget,
    ) -> Iterator[_Candidate]:
        if not remaining:
            yield from self._resolve_unknowns(
                view, theta, list(unknown_positions), budget,
                complete=True, bundle=set(), child_trees=[],
            )
            return
        # Most selective known atom first: fewest candidate facts under
        # the current bindings.
        best_pos = -1
        best_count = None
        for pos in sorted(remaining):
            pattern = self._subst(view.body[pos], theta)
            if self._is_ground(pattern):
                count = 1 if pattern in self.store else 0
            else:
                count = self.store.count(self._wildcard(pattern))
            if best_count is None or count < best_count:
                best_pos, best_count = pos, count
        pattern = self._subst(view.body[best_pos], theta)
        rest = remaining - {best_pos}
        if self._is_ground(pattern):
            if pattern in self.store:
                yield from self._join(view, theta, rest, unknown_positions, budget)
            elif len(unknown_positions) >= min(self.w_eff, len(view.body)):
                self.counters["width_rejections"] += 1
            return
        var_positions = [i for i, e in enumerate(pattern[1:]) if e < 0]
        for fact in self.store.match(self._wildcard(pattern)):
            extension: dict = {}
            ok = True
            for i in var_positions:
                code = self._chase(theta, pattern[1 + i])
                if code >= 0:
                    if code != fact[1 + i]:
                        ok = False
                        break
                    continue
                bound = extension.get(code)
                if bound is None:
                    extension[code] = fact[1 + i]
                elif bound != fact[1 + i]:
                    ok = False
                    break
            if not ok:
                continue
            new_theta = dict(theta)
            new_theta.update(extension)
            yield from self._join(view, new_theta, rest, unknown_positions, budget)

    @staticmethod
    def _wildcard(pattern: tuple) -> tuple:
        return tuple([pattern[0]] + [None if e < 0 else e for e in pattern[1:]])

    def _resolve_unknowns(
        self,
        view: _ClauseView,
        theta: dict,
        remaining: list[int],
        budget,
        complete: bool,
        bundle: set,
        child_trees: list,
    ) -> Iterator[_Candidate]:
        if not remaining:
            yield _Candidate(theta, complete, bundle, child_trees)
            return
        # Most-bound unknown first; position order breaks ties.
        def boundness(pos: int) -> tuple[int, int]:
            pattern = self._subst(view.body[pos], theta)
            return (-sum(1 for e in pattern[1:] if e >= 0), pos)

        pos = min(remaining, key=boundness)
        rest = [p for p in remaining if p != pos]
        pattern = self._subst(view.body[pos], theta)

        if self._is_ground(pattern):
            if pattern in self.store:
                # The designated-unknown atom is actually a fact under the
                # current bindings; it behaves as a known leaf.
                yield from self._resolve_unknowns(
                    view, theta, rest, budget, complete, bundle, child_trees,
                )
                return
            info = None
            if budget > 1:
                answers = self._solve(pattern, budget - 1)
                info = answers.get(pattern)
            else:
                self.counters["depth_rejections"] += 1
            if info is not None:
                yield from self._resolve_unknowns(
                    view, theta, rest, budget,
                    complete and info.complete,
                    bundle | info.instances,
                    child_trees + [(pos, tuple(info.trees))] if self.keep_proofs else child_trees,
                )
            elif self.uncertain:
                yield from self._resolve_unknowns(
                    view, theta, rest, budget, False, bundle, child_trees,
                )
            return

        # Non-ground unknown sub-goal: rule answers bind it; in the
        # uncertain regime residual variables also enumerate the domain.
        produced: set[GroundAtom] = set()
        if budget > 1:
            answers = self._solve(pattern, budget - 1)
            for ans in sorted(answers):
                info = answers[ans]
                extension = self._extract(pattern, ans, theta)
                if extension is None:
                    continue
                produced.add(ans)
                new_theta = dict(theta)
                new_theta.update(extension)
                yield from self._resolve_unknowns(
                    view, new_theta, rest, budget,
                    complete and info.complete,
                    bundle | info.instances,
                    child_trees + [(pos, tuple(info.trees))] if self.keep_proofs else child_trees,
                )
        else:
            self.counters["depth_rejections"] += 1
        if not self.uncertain:
            return
        free = []
        for e in pattern[1:]:
            if e < 0 and e not in free:
                free.append(e)
        total = len(self.domain) ** len(free)
        emitted = 0
        for combo in itertools.product(self.domain, repeat=len(free)):
            if self.cap is not None and emitted >= self.cap:
                self.truncations.append(
                    TruncationEvent(view.rule_id, self._canonical(pattern), total, emitted)
                )
                break
            emitted += 1
            extension = dict(zip(free, combo))
            ground = tuple(
                [pattern[0]] + [extension[e] if e < 0 else e for e in pattern[1:]]
            )
            if ground in self.store:
                yield from self._resolve_unknowns(
                    view, {**theta, **extension}, rest, budget,
                    complete, bundle, child_trees,
                )
            elif ground not in produced:
                yield from self._resolve_unknowns(
                    view, {**theta, **extension}, rest, budget,
                    False, bundle, child_trees,
                )

    def _extract(self, pattern: tuple, answer: GroundAtom, theta: dict) -> Optional[dict]:
        extension: dict = {}
        for e, value in zip(pattern[1:], answer[1:]):
            code = self._chase(theta, e) if e < 0 else e
            if code >= 0:
                if code != value:
                    return None
                continue
            bound = extension.get(code)
            if bound is None:
                extension[code] = value
            elif bound != value:
                return None
        return extension

    # -- sub-goal solving --------------------------------------------------

    def _solve(self, pattern: tuple, budget) -> dict[GroundAtom, _AnswerInfo]:
        """Provable, not-stored ground instances of ``pattern``.

        Answers map each ground atom to its accumulated derivations.  In
        the strict regime every answer has a complete proof; in the
        uncertain regime partially proved derivations also contribute
        instances, with ``complete`` recording whether a full proof
        exists.

        Finite budgets recurse at most ``budget`` deep and memoize per
        (canonical pattern, budget).  At infinite depth every goal owns a
        persistent answer entry: a goal is explored at most once per
        search pass, re-encounters consume the partial answers
        accumulated so far, and ``run`` repeats whole passes until no
        entry grows, which reaches the fixpoint and terminates on cyclic
        theories.
        """
        canon = self._canonical(pattern)
        if budget == INF:
            answers = self._inf_table.get(canon)
            if answers is None:
                answers = self._inf_table[canon] = {}
            if canon in self._inf_done or canon in self._inf_active:
                self.counters["memo_hits"] += 1
                return answers
            self._inf_active.add(canon)
            self._explore(canon, budget, answers)
            self._inf_active.discard(canon)
            self._inf_done.add(canon)
            return answers
        key = (canon, budget)
        cached = self._memo.get(key)
        if cached is not None:
            self.counters["memo_hits"] += 1
            return cached
        answers = {}
        self._explore(canon, budget, answers)
        self._memo[key] = answers
        return answers

    def _explore(self, canon: tuple, budget, answers: dict[GroundAtom, _AnswerInfo]) -> None:
        """One full clause exploration of a canonical goal, merged into
        ``answers``; growth is flagged for the infinite-depth pass loop."""
        slots: list[int] = []
        for e in canon[1:]:
            if e < 0 and e not in slots:
                slots.append(e)
        slot_map = {slot: self._fresh_var() for slot in slots}
        goal = tuple([canon[0]] + [slot_map[e] if e < 0 else e for e in canon[1:]])

        for clause in self.clauses_by_pred.get(goal[0], ()):
            view = self._rename_clause(clause)
            theta: dict = {}
            if not self._unify(goal, view.head, theta):
                continue
            self.counters["expansions"] += 1
            for cand in self._bodies(view, theta, budget):
                ans = self._subst(view.head, cand.theta)
                if not self._is_ground(ans) or ans in self.store:
                    continue
                if not (cand.complete or self.uncertain):
                    continue
                instance = self._make_instance(view, cand)
                info = answers.get(ans)
                if info is None:
                    info = answers[ans] = _AnswerInfo()
                    self._inf_changed = True
                if instance not in info.instances:
                    info.instances.add(instance)
                    self._inf_changed = True
                extra = cand.bundle - info.instances
                if extra:
                    info.instances |= extra
                    self._inf_changed = True
                if cand.complete:
                    if not info.complete:
                        info.complete = True
                        self._inf_changed = True
                    if self.keep_proofs:
                        if info.add_trees(self._build_trees(ans, instance, cand), self.max_proofs):
                            self._inf_changed = True

    def _make_instance(self, view: _ClauseView, cand: _Candidate) -> GroundRuleInstance:
        theta = cand.theta
        subst = []
        for code, orig in view.var_map.items():
            value = self._chase(theta, code)
            assert value >= 0, "accepted candidate must be fully ground"
            subst.append((orig, value))
        subst.sort()
        head = self._subst(view.head, theta)
        body = tuple(self._subst(b, theta) for b in view.body)
        known = tuple(b in self.store for b in body)
        return GroundRuleInstance(view.rule_id, tuple(subst), head, body, known)

    def _build_trees(self, goal: GroundAtom, instance: GroundRuleInstance, cand: _Candidate):
        groups = [trees for _, trees in sorted(cand.child_trees) if trees]
        limit = self.max_proofs if self.max_proofs is not None else None
        out = []
        for combo in itertools.product(*groups) if groups else ((),):
            out.append(ProofTree(goal, instance, tuple(combo)))
            if limit is not None and len(out) >= limit:
                break
        return out

    # -- roots -------------------------------------------------------------

    def expand_root(self, root: GroundAtom) -> None:
        complete_here: set[tuple] = set()
        trees: list[ProofTree] = []
        tree_set: set[ProofTree] = set()
        for clause in self.clauses_by_pred.get(root[0], ()):
            theta0 = self._match_root(clause, root)
            if theta0 is None:
                continue
            self.counters["expansions"] += 1
            for cand in self._bodies(clause, theta0, self.depth):
                accepted = cand.complete or self.uncertain
                if not accepted:
                    continue
                instance = self._make_instance(clause, cand)
                self.instances.add(instance)
                self.instances |= cand.bundle
                if cand.complete:
                    complete_here.add((instance.rule_id, instance.subst))
                    if self.keep_proofs:
                        for tree in self._build_trees(root, instance, cand):
                            if tree not in tree_set:
                                tree_set.add(tree)
                                trees.append(tree)
        if complete_here:
            self.proved.add(root)
            self.proof_counts[root] = len(complete_here)
            if self.keep_proofs:
                limit = self.max_proofs if self.max_proofs is not None else len(trees)
                self.proofs[root] = tuple(trees[:limit])

    def run(self, roots: Iterable[GroundAtom]) -> None:
        if self.depth != INF:
            seen: set[GroundAtom] = set()
            for root in roots:
                if root in seen:
                    continue
                seen.add(root)
                if len(root) - 1 != self.theory.arities.get(root[0]):
                    raise LogicError(f"root arity mismatch for predicate id {root[0]}")
                self.expand_root(root)
            self._seen_roots = len(seen)
            return
        # Infinite depth: whole-search passes against the persistent
        # answer table until nothing grows.
        root_list = []
        seen = set()
        for root in roots:
            if root in seen:
                continue
            seen.add(root)
            if len(root) - 1 != self.theory.arities.get(root[0]):
                raise LogicError(f"root arity mismatch for predicate id {root[0]}")
            root_list.append(root)
        self._seen_roots = len(root_list)
        while True:
            self._inf_changed = False
            self._inf_done = set()
            for root in root_list:
                self.expand_root(root)
            if not self._inf_changed:
                break


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def ground(
    theory: Theory,
    store: FactStore,
    params: GrounderParams,
    roots: Iterable[GroundAtom],
    *,
    jobs: int = 1,
    domain: Optional[Sequence[int]] = None,
    keep_proofs: bool = False,
    max_proofs_per_root: Optional[int] = 64,
) -> GroundingResult:
    """Run the backward-chaining grounder from ``roots``.

    Roots must be ground atoms in compact tuple form.  The result is
    independent of ``jobs`` and of root ordering; instances are
    deduplicated by (rule, substitution) across all proof paths.
    """
    started = time.perf_counter()
    if jobs > 1:
        roots = sorted(set(roots))
    if jobs > 1 and len(roots) > 1:
        chunks = _split(list(roots), jobs)
        result = _ground_parallel(
            theory, store, params, chunks,
            domain=domain, keep_proofs=keep_proofs,
            max_proofs_per_root=max_proofs_per_root,
        )
    else:
        engine = _Engine(
            theory, store, params,
            domain=domain, keep_proofs=keep_proofs,
            max_proofs_per_root=max_proofs_per_root,
        )
        engine.run(roots)
        result = _collect(engine, [engine])
    result.stats.wall_time = time.perf_counter() - started
    return result


def _split(items: list, jobs: int) -> list[list]:
    jobs = max(1, min(jobs, len(items)) if items else 1)
    size = (len(items) + jobs - 1) // jobs
    return [items[i : i + size] for i in range(0, len(items), size)]


def _collect(primary: _Engine, engines: list[_Engine]) -> GroundingResult:
    instances: set[GroundRuleInstance] = set()
    proved: set[GroundAtom] = set()
    proof_counts: dict[GroundAtom, int] = {}
    proofs: dict[GroundAtom, tuple[ProofTree, ...]] = {}
    truncations: list[TruncationEvent] = []
    stats = GroundingStats()
    for engine in engines:
        instances |= engine.instances
        proved |= engine.proved
        proof_counts.update(engine.proof_counts)
        proofs.update(engine.proofs)
        truncations.extend(engine.truncations)
        stats.expansions += engine.counters["expansions"]
        stats.width_rejections += engine.counters["width_rejections"]
        stats.depth_rejections += engine.counters["depth_rejections"]
        stats.memo_hits += engine.counters["memo_hits"]
        stats.roots += getattr(engine, "_seen_roots", 0)
    stats.proved_roots = len(proved)
    stats.instances = len(instances)
    stats.truncations = len(truncations)
    return GroundingResult(
        instances=instances,
        proved=proved,
        proof_counts=proof_counts,
        proofs=proofs,
        truncations=truncations,
        stats=stats,
        params=primary.params,
    )


_FORK_STATE: Optional[tuple] = None


def _run_chunk(chunk: list[GroundAtom]):
    theory, store, params, domain, keep_proofs, max_proofs = _FORK_STATE
    engine = _Engine(
        theory, store, params,
        domain=domain, keep_proofs=keep_proofs, max_proofs_per_root=max_proofs,
    )
    engine.run(chunk)
    return (
        engine.instances,
        engine.proved,
        engine.proof_counts,
        engine.proofs,
        engine.truncations,
        engine.counters,
        engine._seen_roots,
    )


def _ground_parallel(
    theory, store, params, chunks, *, domain, keep_proofs, max_proofs_per_root
) -> GroundingResult:
    global _FORK_STATE
    _FORK_STATE = (theory, store, params, domain, keep_proofs, max_proofs_per_root)
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=len(chunks)) as pool:
            parts = pool.map(_run_chunk, chunks)
    finally:
        _FORK_STATE = None
    instances: set[GroundRuleInstance] = set()
    proved: set[GroundAtom] = set()
    proof_counts: dict[GroundAtom, int] = {}
    proofs: dict[GroundAtom, tuple[ProofTree, ...]] = {}
    truncations: list[TruncationEvent] = []
    stats = GroundingStats()
    for inst, prov, counts, trees, truncs, counters, seen in parts:
        instances |= inst
        proved |= prov
        proof_counts.update(counts)
        proofs.update(trees)
        truncations.extend(truncs)
        stats.expansions += counters["expansions"]
        stats.width_rejections += counters["width_rejections"]
        stats.depth_rejections += counters["depth_rejections"]
        stats.memo_hits += counters["memo_hits"]
        stats.roots += seen
    stats.proved_roots = len(proved)
    stats.instances = len(instances)
    stats.truncations = len(truncations)
    return GroundingResult(
        instances=instances,
        proved=proved,
        proof_counts=proof_counts,
        proofs=proofs,
        truncations=truncations,
        stats=stats,
        params=params,
    )


def herbrand_universe_size(theory: Theory, n_constants: int) -> int:
    """Number of ground instances of the theory's clauses: sum of C^vars."""
    return sum(n_constants ** len(clause.variables()) for clause in theory.clauses)


def full_grounding(
    theory: Theory,
    store: Optional[FactStore] = None,
    n_constants: Optional[int] = None,
    *,
    budget: Optional[int] = 10_000_000,
    enumeration_cap: Optional[int] = None,
    jobs: int = 1,
) -> GroundingResult:
    """Materialize the entire Herbrand universe of the theory.

    Equivalent to the uncertain grounder with infinite width and depth 1,
    rooted at the whole Herbrand base.  Refuses upfront, reporting the
    computed universe size, when it exceeds ``budget``.
    """
    n = len(theory.constants) if n_constants is None else n_constants
    hu_size = herbrand_universe_size(theory, n)
    if budget is not None and hu_size > budget:
        raise BudgetExceededError(
            f"full grounding refused: Herbrand universe has {hu_size} instances, "
            f"budget is {budget}",
            required=hu_size,
            budget=budget,
        )
    params = GrounderParams(width=INF, depth=1, uncertain=True, enumeration_cap=enumeration_cap)
    store = store if store is not None else FactStore()
    return ground(
        theory, store, params, theory.herbrand_base(n),
        jobs=jobs, domain=range(n),
    )
