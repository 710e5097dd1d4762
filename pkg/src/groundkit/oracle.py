"""Brute-force reference implementations for small instances.

Everything here enumerates substitutions by nested products with no
indices and no code shared with the production grounder, so the two
sides have independent failure modes.  Intended for test-scale problems
(a handful of constants); budgets refuse anything larger.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence, Union

from .facts import FactStore
from .grounding import BudgetExceededError, GroundRuleInstance
from .logic import Atom, Constant, GroundAtom, HornClause, Theory

INF = float("inf")

Facts = Union[FactStore, Iterable[GroundAtom]]


def _fact_set(facts: Facts) -> set[GroundAtom]:
    return set(facts)


def _ground_atom(atom: Atom, theta: dict[int, int]) -> GroundAtom:
    parts = [atom.predicate]
    for term in atom.args:
        parts.append(term.id if isinstance(term, Constant) else theta[term.id])
    return tuple(parts)


def _instance(clause: HornClause, theta: dict[int, int], facts: set[GroundAtom]) -> GroundRuleInstance:
    head = _ground_atom(clause.head, theta)
    body = tuple(_ground_atom(b, theta) for b in clause.body)
    known = tuple(b in facts for b in body)
    return GroundRuleInstance(
        clause.rule_id, tuple(sorted(theta.items())), head, body, known
    )


def enumerate_hu(
    theory: Theory,
    constants: Optional[Sequence[int]] = None,
    facts: Facts = (),
    budget: Optional[int] = 1_000_000,
) -> set[GroundRuleInstance]:
    """Every ground instance of every clause, by nested enumeration."""
    consts = tuple(constants) if constants is not None else tuple(range(len(theory.constants)))
    fact_set = _fact_set(facts)
    total = sum(len(consts) ** len(c.variables()) for c in theory.clauses)
    if budget is not None and total > budget:
        raise BudgetExceededError(
            f"universe enumeration refused: {total} instances exceed budget {budget}",
            required=total,
            budget=budget,
        )
    out: set[GroundRuleInstance] = set()
    for clause in theory.clauses:
        variables = clause.variables()
        for combo in itertools.product(consts, repeat=len(variables)):
            theta = dict(zip(variables, combo))
            out.add(_instance(clause, theta, fact_set))
    return out


def _provable_levels(
    hu: set[GroundRuleInstance],
    facts: set[GroundAtom],
    width: float,
    depth: float,
) -> list[set[GroundAtom]]:
    """P[t] = atoms provable with proofs of depth <= t; stops at depth or fixpoint."""
    levels: list[set[GroundAtom]] = [set()]
    while True:
        prev = levels[-1]
        cur: set[GroundAtom] = set()
        for inst in hu:
            unknowns = [b for b in inst.body if b not in facts]
            if len(unknowns) <= width and all(u in prev for u in unknowns):
                cur.add(inst.head)
        if cur == prev or len(levels) - 1 >= depth:
            if cur != prev:
                levels.append(cur)
            return levels
        levels.append(cur)


def oracle_ground(
    theory: Theory,
    facts: Facts,
    width: float,
    depth: float,
    roots: Iterable[GroundAtom],
    constants: Optional[Sequence[int]] = None,
    hu: Optional[set[GroundRuleInstance]] = None,
) -> tuple[set[GroundRuleInstance], set[GroundAtom]]:
    """Exhaustive search over proof trees from the given roots.

    Returns (instances appearing in at least one accepted tree, provable
    roots).  A tree node is an instance whose unknown body atoms (width
    filter applied per node, counted by occurrence) each carry a sub-tree
    within the remaining depth; leaves are known facts.
    """
    fact_set = _fact_set(facts)
    if hu is None:
        hu = enumerate_hu(theory, constants, fact_set)
    else:
        # A precomputed universe may carry known-flags from another fact
        # set; normalize them against ours.
        normalized = set()
        for inst in hu:
            known = tuple(b in fact_set for b in inst.body)
            if known != inst.known:
                inst = GroundRuleInstance(inst.rule_id, inst.subst, inst.head, inst.body, known)
            normalized.add(inst)
        hu = normalized
    levels = _provable_levels(hu, fact_set, width, depth)
    top = len(levels) - 1

    def level(t: float) -> set[GroundAtom]:
        if t == INF:
            return levels[top]
        return levels[min(int(t), top)]

    by_head: dict[GroundAtom, list[GroundRuleInstance]] = {}
    for inst in hu:
        by_head.setdefault(inst.head, []).append(inst)

    root_list = list(roots)
    provable = {r for r in root_list if r in level(depth)}

    instances: set[GroundRuleInstance] = set()
    stack: list[tuple[GroundAtom, float]] = [(r, depth) for r in root_list]
    visited: set[tuple[GroundAtom, float]] = set()
    while stack:
        goal, t = stack.pop()
        if t < 1 or (goal, t) in visited:
            continue
        visited.add((goal, t))
        prev = level(t - 1)
        for inst in by_head.get(goal, ()):
            unknowns = [b for b in inst.body if b not in fact_set]
            if len(unknowns) <= width and all(u in prev for u in unknowns):
                instances.add(inst)
                for u in set(unknowns):
                    stack.append((u, t - 1))
    return instances, provable


def oracle_provable(
    theory: Theory,
    facts: Facts,
    width: float,
    depth: float,
    roots: Iterable[GroundAtom],
    constants: Optional[Sequence[int]] = None,
    hu: Optional[set[GroundRuleInstance]] = None,
) -> set[GroundAtom]:
    """Roots provable under the (width, depth) bounds; see oracle_ground."""
    _, provable = oracle_ground(theory, facts, width, depth, roots, constants, hu)
    return provable


def forward_closure(
    theory: Theory,
    facts: Facts,
    constants: Optional[Sequence[int]] = None,
    budget: Optional[int] = 1_000_000,
) -> set[GroundAtom]:
    """Least fixpoint of rule application; returns derived atoms only.

    Reaches the fixpoint in at most |Herbrand base| rounds; the store's
    own facts are excluded from the returned set.
    """
    consts = tuple(constants) if constants is not None else tuple(range(len(theory.constants)))
    fact_set = _fact_set(facts)
    per_round = sum(len(consts) ** len(c.variables()) for c in theory.clauses)
    if budget is not None and per_round > budget:
        raise BudgetExceededError(
            f"forward closure refused: {per_round} instances per round exceed budget {budget}",
            required=per_round,
            budget=budget,
        )
    state = set(fact_set)
    changed = True
    while changed:
        changed = False
        for clause in theory.clauses:
            variables = clause.variables()
            for combo in itertools.product(consts, repeat=len(variables)):
                theta = dict(zip(variables, combo))
                if all(_ground_atom(b, theta) in state for b in clause.body):
                    head = _ground_atom(clause.head, theta)
                    if head not in state:
                        state.add(head)
                        changed = True
    return state - fact_set
