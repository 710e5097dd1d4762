"""Symbolic layer: terms, atoms, Horn clauses, theories and substitutions.

Terms are interned: every constant and variable name maps to a dense
integer id through the owning :class:`Theory`'s symbol tables, and the two
id spaces are kept apart by the term wrapper types.  Ground atoms also
circulate in a compact tuple form ``(predicate_id, const_id, ...)``
(aliased :data:`GroundAtom`), which is what the fact store, the grounder
and the grounded network operate on internally; the converters live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class LogicError(Exception):
    """Base class for errors raised by the symbolic layer."""


class ArityConflictError(LogicError):
    """A predicate was used with two different arities."""


# Compact form of a ground atom: (predicate_id, const_id, const_id, ...).
GroundAtom = tuple[int, ...]

# Partial map variable id -> constant id.
Substitution = dict[int, int]


class SymbolTable:
    """Append-only, injective name <-> dense-id mapping."""

    __slots__ = ("_ids", "_names")

    def __init__(self, names: Iterable[str] = ()) -> None:
        self._ids: dict[str, int] = {}
        self._names: list[str] = []
        for name in names:
            self.intern(name)

    def intern(self, name: str) -> int:
        sym_id = self._ids.get(name)
        if sym_id is None:
            sym_id = len(self._names)
            self._ids[name] = sym_id
            self._names.append(name)
        return sym_id

    def id_of(self, name: str) -> int:
        return self._ids[name]

    def get(self, name: str) -> Optional[int]:
        return self._ids.get(name)

    def name_of(self, sym_id: int) -> str:
        return self._names[sym_id]

    def names(self) -> list[str]:
        return list(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)


@dataclass(frozen=True, slots=True)
class Constant:
    id: int


@dataclass(frozen=True, slots=True)
class Variable:
    id: int


Term = Union[Constant, Variable]


@dataclass(frozen=True, slots=True)
class Atom:
    """An atomic formula ``r(a_1, ..., a_k)`` with ``k = arity(r)``."""

    predicate: int
    args: tuple[Term, ...]

    def is_ground(self) -> bool:
        return all(isinstance(a, Constant) for a in self.args)

    def variables(self) -> list[int]:
        """Variable ids in order of first occurrence."""
        seen: list[int] = []
        for a in self.args:
            if isinstance(a, Variable) and a.id not in seen:
                seen.append(a.id)
        return seen


@dataclass(frozen=True, slots=True)
class HornClause:
    """``body[0] and ... and body[n-1] -> head`` with a non-empty body."""

    head: Atom
    body: tuple[Atom, ...]
    rule_id: int

    def variables(self) -> list[int]:
        seen: list[int] = []
        for atom in (self.head, *self.body):
            for vid in atom.variables():
                if vid not in seen:
                    seen.append(vid)
        return seen


@dataclass
class Theory:
    """A set of Horn clauses plus the symbol tables they are written in.

    Symbol tables are append-only and shared with the fact store, so ids
    stay stable for the program lifetime.  After the loading phase
    (rules parsed, facts interned) a theory is treated as immutable and
    can be shared across workers without synchronization.
    """

    predicates: SymbolTable = field(default_factory=SymbolTable)
    constants: SymbolTable = field(default_factory=SymbolTable)
    variables: SymbolTable = field(default_factory=SymbolTable)
    arities: dict[int, int] = field(default_factory=dict)
    clauses: list[HornClause] = field(default_factory=list)

    def predicate(self, name: str, arity: int) -> int:
        """Intern a predicate, fixing its arity at first use."""
        pid = self.predicates.intern(name)
        known = self.arities.get(pid)
        if known is None:
            self.arities[pid] = arity
        elif known != arity:
            raise ArityConflictError(
                f"predicate {name!r} used with arity {arity}, "
                f"previously declared with arity {known}"
            )
        return pid

    def constant(self, name: str) -> int:
        return self.constants.intern(name)

    def variable(self, name: str) -> int:
        return self.variables.intern(name)

    def add_clause(self, head: Atom, body: Iterable[Atom]) -> HornClause:
        clause = HornClause(head=head, body=tuple(body), rule_id=len(self.clauses))
        if not clause.body:
            raise LogicError("Horn clause body must be non-empty")
        self.clauses.append(clause)
        return clause

    def max_body_len(self) -> int:
        return max((len(c.body) for c in self.clauses), default=0)

    def herbrand_base(self, n_constants: Optional[int] = None) -> Iterator[GroundAtom]:
        """All ground atoms over the first ``n_constants`` constants.

        Yields in (predicate id, lexicographic argument) order, which is
        the canonical enumeration used by the full grounder.
        """
        n = len(self.constants) if n_constants is None else n_constants
        if n > len(self.constants):
            raise LogicError(
                f"herbrand base over {n} constants requested, "
                f"only {len(self.constants)} interned"
            )
        for pid in range(len(self.predicates)):
            arity = self.arities[pid]
            yield from _tuples_over(pid, arity, n)


def _tuples_over(pid: int, arity: int, n: int) -> Iterator[GroundAtom]:
    if arity == 0:
        yield (pid,)
        return
    indices = [0] * arity
    while True:
        yield (pid, *indices)
        pos = arity - 1
        while pos >= 0:
            indices[pos] += 1
            if indices[pos] < n:
                break
            indices[pos] = 0
            pos -= 1
        if pos < 0:
            return


def herbrand_base_size(theory: Theory, n_constants: int) -> int:
    """``sum over predicates r of n_constants ** arity(r)``.

    Exact at any scale; Python integers do not overflow.
    """
    if n_constants < 0:
        raise LogicError("constant count must be non-negative")
    return sum(n_constants ** arity for arity in theory.arities.values())


def apply_substitution(atom: Atom, theta: Substitution) -> Atom:
    """Replace every variable bound in ``theta``; unbound ones stay."""
    args = []
    for term in atom.args:
        if isinstance(term, Variable):
            const = theta.get(term.id)
            args.append(Constant(const) if const is not None else term)
        else:
            args.append(term)
    return Atom(atom.predicate, tuple(args))


def compose(first: Substitution, second: Substitution) -> Substitution:
    """Substitution applying ``first`` then ``second``.

    Ranges are constants, so composition reduces to a union where
    ``first`` wins on shared variables.
    """
    merged = dict(second)
    merged.update(first)
    return merged


def match_head(goal: Atom, head: Atom) -> Optional[Substitution]:
    """Most general ``theta`` with ``theta . head == goal``, or ``None``.

    ``goal`` must be ground.  Constants in the head must equal the goal's
    constants positionally; repeated head variables must match equal
    constants.  Absence of a match is a value, not an error.
    """
    if goal.predicate != head.predicate or len(goal.args) != len(head.args):
        return None
    theta: Substitution = {}
    for goal_term, head_term in zip(goal.args, head.args):
        assert isinstance(goal_term, Constant), "goal must be ground"
        if isinstance(head_term, Constant):
            if head_term.id != goal_term.id:
                return None
        else:
            bound = theta.get(head_term.id)
            if bound is None:
                theta[head_term.id] = goal_term.id
            elif bound != goal_term.id:
                return None
    return theta


def ground_tuple(atom: Atom) -> GroundAtom:
    """Compact tuple form of a ground atom."""
    if not atom.is_ground():
        raise LogicError(f"atom is not ground: {atom}")
    return (atom.predicate, *(t.id for t in atom.args))


def atom_from_ground(ground: GroundAtom) -> Atom:
    return Atom(ground[0], tuple(Constant(c) for c in ground[1:]))
