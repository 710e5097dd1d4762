"""Indexed store of known ground atoms (the knowledge graph).

The store keeps one hash index per (predicate, bound-position mask), so a
grounding join can fetch candidate facts for any partially-bound pattern
in O(1) and enumerate them in ascending atom-id order.  Stores are
immutable after loading and may be read from any number of parallel
grounding workers.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .logic import (
    ArityConflictError,
    Atom,
    Constant,
    GroundAtom,
    LogicError,
    Substitution,
    Theory,
    Variable,
)


class FactFormatError(LogicError):
    """Malformed fact file line, located by line number."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


# A lookup pattern in compact form: None marks a free position.
PartialAtom = tuple


class FactStore:
    """Deduplicated ground atoms with per-(predicate, mask) indices."""

    def __init__(self, facts: Iterable[GroundAtom] = ()) -> None:
        self._atoms: list[GroundAtom] = []
        self._ids: dict[GroundAtom, int] = {}
        # (predicate, bitmask of bound positions) -> bound-args key -> [atom ids]
        self._index: dict[tuple[int, int], dict[tuple, list[int]]] = {}
        self._arity: dict[int, int] = {}
        for fact in facts:
            self._add(fact)

    def _add(self, fact: GroundAtom) -> bool:
        if fact in self._ids:
            return False
        pred = fact[0]
        args = fact[1:]
        arity = len(args)
        known_arity = self._arity.get(pred)
        if known_arity is None:
            self._arity[pred] = arity
        elif known_arity != arity:
            raise ArityConflictError(
                f"fact arity {arity} conflicts with earlier arity {known_arity} "
                f"for predicate id {pred}"
            )
        atom_id = len(self._atoms)
        self._atoms.append(fact)
        self._ids[fact] = atom_id
        for mask in range(1 << arity):
            key = tuple(args[i] for i in range(arity) if mask & (1 << i))
            bucket = self._index.setdefault((pred, mask), {})
            bucket.setdefault(key, []).append(atom_id)
        return True

    # -- membership and iteration ------------------------------------

    def __len__(self) -> int:
        return len(self._atoms)

    def __iter__(self) -> Iterator[GroundAtom]:
        return iter(self._atoms)

    def __contains__(self, fact: GroundAtom) -> bool:
        return fact in self._ids

    def contains(self, fact: GroundAtom) -> bool:
        return fact in self._ids

    def atom(self, atom_id: int) -> GroundAtom:
        return self._atoms[atom_id]

    def atom_id(self, fact: GroundAtom) -> int:
        return self._ids[fact]

    def has_predicate(self, pred: int) -> bool:
        return pred in self._arity

    # -- pattern access ------------------------------------------------

    @staticmethod
    def _mask_key(pattern: PartialAtom) -> tuple[int, tuple]:
        mask = 0
        key = []
        for i, arg in enumerate(pattern[1:]):
            if arg is not None:
                mask |= 1 << i
                key.append(arg)
        return mask, tuple(key)

    def match(self, pattern: PartialAtom) -> list[GroundAtom]:
        """Facts matching a compact pattern with ``None`` as wildcard.

        Results come back in ascending atom-id order.  Repeated-variable
        constraints are the caller's concern; the pattern here is purely
        positional.
        """
        pred = pattern[0]
        if pred not in self._arity:
            return []
        mask, key = self._mask_key(pattern)
        bucket = self._index.get((pred, mask))
        if bucket is None:
            return []
        ids = bucket.get(key, ())
        atoms = self._atoms
        return [atoms[i] for i in ids]

    def count(self, pattern: PartialAtom) -> int:
        """Number of facts matching the pattern; O(1)."""
        pred = pattern[0]
        if pred not in self._arity:
            return 0
        mask, key = self._mask_key(pattern)
        bucket = self._index.get((pred, mask))
        if bucket is None:
            return 0
        return len(bucket.get(key, ()))

    def lookup(self, pattern: Atom) -> Iterator[Substitution]:
        """Substitutions over the pattern's variables hitting the store.

        Yields exactly the thetas with ``theta . pattern`` in the store, in
        ascending atom-id order; a fully ground pattern yields the empty
        substitution once iff the atom is stored.
        """
        compact = tuple(
            [pattern.predicate]
            + [a.id if isinstance(a, Constant) else None for a in pattern.args]
        )
        var_positions: list[tuple[int, int]] = [
            (i, a.id) for i, a in enumerate(pattern.args) if isinstance(a, Variable)
        ]
        for fact in self.match(compact):
            theta: Substitution = {}
            ok = True
            for pos, vid in var_positions:
                value = fact[1 + pos]
                bound = theta.get(vid)
                if bound is None:
                    theta[vid] = value
                elif bound != value:
                    ok = False
                    break
            if ok:
                yield theta

    # -- statistics ----------------------------------------------------

    def entities(self) -> set[int]:
        """Constants appearing in at least one stored fact."""
        present: set[int] = set()
        for fact in self._atoms:
            present.update(fact[1:])
        return present

    def relations(self) -> set[int]:
        return set(self._arity)

    def degree(self) -> float:
        """Mean degree: facts per entity present in the store.

        This is the convention the reference dataset tables follow
        (e.g. 28,356 facts over 104 entities gives 272.7).
        """
        n_entities = len(self.entities())
        return len(self._atoms) / n_entities if n_entities else 0.0

    def stats(self) -> dict:
        return {
            "facts": len(self._atoms),
            "entities": len(self.entities()),
            "relations": len(self._arity),
            "degree": self.degree(),
        }


def parse_triples(text: str) -> Iterator[tuple[int, tuple[str, str, str]]]:
    """Yield (line number, (subject, relation, object)) from TSV text."""
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        columns = line.rstrip("\n").split("\t")
        if len(columns) != 3:
            raise FactFormatError(
                f"expected 3 tab-separated columns, found {len(columns)}", line_no
            )
        yield line_no, (columns[0], columns[1], columns[2])


def intern_triples(text: str, theory: Theory) -> list[GroundAtom]:
    """Intern TSV triples into the theory's tables without storing them.

    Used for validation/test files: their entities and relations must be
    part of the vocabulary even though the triples are queries, not facts.
    """
    triples = []
    for line_no, (s, r, o) in parse_triples(text):
        try:
            pid = theory.predicate(r, 2)
        except ArityConflictError as exc:
            raise FactFormatError(str(exc), line_no) from exc
        triples.append((pid, theory.constant(s), theory.constant(o)))
    return triples


def load_facts(text: str, theory: Theory) -> FactStore:
    """Build a store from TSV triples, interning new symbols into ``theory``.

    One binary ground atom per ``subject TAB relation TAB object`` line,
    duplicates collapsed.  Raises :class:`FactFormatError` on malformed
    lines and on relations whose arity conflicts with the rule file.
    """
    store = FactStore()
    for line_no, (s, r, o) in parse_triples(text):
        try:
            pid = theory.predicate(r, 2)
        except ArityConflictError as exc:
            raise FactFormatError(str(exc), line_no) from exc
        store._add((pid, theory.constant(s), theory.constant(o)))
    return store
