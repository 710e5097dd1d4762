"""Shared generators for randomized cross-checks against the oracles."""

from __future__ import annotations

import random

import pytest

import groundkit as gk


def random_theory_case(rng: random.Random, max_const: int = 8, max_facts: int = 15):
    """A small random Horn theory plus a fact store over its constants.

    Range-restricted binary clauses with occasional constants in both
    head and body; the shape mirrors the transitivity-style rules the
    grounder is used with, while still covering repeated variables,
    self-referential clauses and multi-clause recursion.
    """
    theory = gk.Theory()
    consts = [theory.constant(f"c{i}") for i in range(rng.randint(2, max_const))]
    preds = [theory.predicate(f"p{i}", 2) for i in range(rng.randint(1, 3))]
    for _ in range(rng.randint(1, 3)):
        body_len = rng.randint(1, 3)
        vids = [theory.variable(f"V{i}") for i in range(rng.randint(1, 4))]

        def term():
            if rng.random() < 0.15:
                return gk.Constant(rng.choice(consts))
            return gk.Variable(rng.choice(vids))

        body = [gk.Atom(rng.choice(preds), (term(), term())) for _ in range(body_len)]
        body_vars = [v for atom in body for v in atom.variables()]

        def head_term():
            if body_vars and rng.random() >= 0.15:
                return gk.Variable(rng.choice(body_vars))
            return gk.Constant(rng.choice(consts))

        theory.add_clause(gk.Atom(rng.choice(preds), (head_term(), head_term())), body)
    facts = set()
    for _ in range(rng.randint(0, max_facts)):
        facts.add((rng.choice(preds), rng.choice(consts), rng.choice(consts)))
    return theory, gk.FactStore(sorted(facts))


@pytest.fixture(scope="session")
def small_corpus():
    """Fifty deterministic random cases for unit-level cross-checks."""
    rng = random.Random(0xC0FFEE)
    return [random_theory_case(rng) for _ in range(50)]
