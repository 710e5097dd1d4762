import random

import pytest

import groundkit as gk
from groundkit.parsing import ParseError, format_clause, format_theory, parse_theory

from conftest import random_theory_case


def test_parse_transitivity_rule():
    th = parse_theory("locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).\n")
    assert len(th.clauses) == 1
    clause = th.clauses[0]
    assert len(clause.body) == 2
    assert clause.head.predicate == th.predicates.id_of("locatedIn")
    assert th.arities[clause.head.predicate] == 2


def test_parse_minimal_self_referential_clause():
    th = parse_theory("p(X) :- p(X).\n")
    assert len(th.clauses) == 1
    assert th.clauses[0].head == th.clauses[0].body[0]


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_theory("p(X :- q(X).\n")
    assert err.value.line == 1
    assert err.value.column > 1


def test_second_line_error_reports_line_two():
    with pytest.raises(ParseError) as err:
        parse_theory("p(X) :- q(X).\np(X) :- .\n")
    assert err.value.line == 2


def test_rule_ids_follow_file_order():
    text = "a(X) :- b(X).\n% comment\n\nc(X) :- a(X), b(X).\n"
    th = parse_theory(text)
    assert [c.rule_id for c in th.clauses] == [0, 1]
    assert len(th.clauses[1].body) == 2


def test_range_restriction_enforced():
    with pytest.raises(ParseError):
        parse_theory("p(X,Y) :- q(X).\n")
    th = parse_theory("p(X,Y) :- q(X).\n", range_restricted=False)
    assert len(th.clauses) == 1


def test_arity_conflict_at_parse():
    with pytest.raises(ParseError):
        parse_theory("p(X) :- q(X).\np(X,Y) :- q(X), q(Y).\n")


def test_constants_allowed_in_rules():
    th = parse_theory('p(X,europe) :- q(X, "southern europe").\n')
    clause = th.clauses[0]
    assert isinstance(clause.head.args[1], gk.Constant)
    assert th.constants.name_of(clause.body[0].args[1].id) == "southern europe"


def test_facts_are_not_clauses():
    with pytest.raises(ParseError):
        parse_theory("p(a).\n")


def test_quoted_names_round_trip():
    text = 'p(X,Y) :- "odd relation"(X,Y), q(Y, "a\\"b").\n'
    th = parse_theory(text)
    assert format_theory(parse_theory(format_theory(th))) == format_theory(th)


def test_underscore_initial_is_a_constant_symbol():
    th = parse_theory("_hypernym(X,Z) :- _hypernym(X,Y), _hypernym(Y,Z).\n")
    assert "_hypernym" in th.predicates


def test_parse_print_parse_fixpoint_on_random_theories():
    rng = random.Random(7)
    for _ in range(25):
        theory, _ = random_theory_case(rng)
        printed = format_theory(theory)
        reparsed = parse_theory(printed)
        assert format_theory(reparsed) == printed
        assert [format_clause(reparsed, c) for c in reparsed.clauses] == [
            format_clause(theory, c) for c in theory.clauses
        ]
