"""Parameter-free fuzzy score propagation over a grounded network.

Messages flow from the body atoms of each hyperedge to its head: a
t-norm combines the body scores into a per-edge value, groundings of the
same rule sharing a head aggregate by max (existential reading over the
body variables), and the head keeps the best of its initial score and
every incoming edge value.  With one grounding per rule and head this is
exactly the single-rule update; iterated, scores are monotone
non-decreasing in every step, so a fixpoint always exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, IO, Optional, Sequence, Union

from .gmn import GroundedNetwork
from .logic import GroundAtom, LogicError

FIXPOINT_EPSILON = 1e-9

KNOWN_FACT = "known-fact"
KGE_INITIAL = "kge-initial"
DEFAULT_PRIOR = "default-prior"
PROPAGATED = "propagated"

# Unknown atoms that no scorer covers sit at the neutral element under
# max/min aggregation.
UNKNOWN_DEFAULT = 0.5


class ScoreError(LogicError):
    """Invalid score value or missing score entry."""


def _check_unit(value: float) -> float:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ScoreError(f"score {value!r} outside [0, 1]")
    return value


def _tnorm_product(values: Sequence[float]) -> float:
    out = 1.0
    for v in values:
        out *= v
    return out


def _tnorm_goedel(values: Sequence[float]) -> float:
    return min(values)


def _tnorm_lukasiewicz(values: Sequence[float]) -> float:
    return max(0.0, sum(values) - (len(values) - 1))


TNORMS: dict[str, Callable[[Sequence[float]], float]] = {
    "product": _tnorm_product,
    "goedel": _tnorm_goedel,
    "lukasiewicz": _tnorm_lukasiewicz,
}


def tnorm_eval(kind: str, values: Sequence[float]) -> float:
    """Evaluate a t-norm over non-empty scores in [0, 1]."""
    try:
        fn = TNORMS[kind]
    except KeyError:
        raise ScoreError(f"unknown t-norm {kind!r}; choose from {sorted(TNORMS)}") from None
    if not values:
        raise ScoreError("t-norm over empty value sequence")
    for v in values:
        _check_unit(v)
    return fn(values)


@dataclass
class ScoreTable:
    """Per-node scores in [0, 1] with provenance tags.

    Known facts always carry score exactly 1.0.
    """

    scores: dict[int, float] = field(default_factory=dict)
    provenance: dict[int, str] = field(default_factory=dict)

    def set(self, node_id: int, score: float, source: str) -> None:
        self.scores[node_id] = _check_unit(score)
        self.provenance[node_id] = source

    def get(self, node_id: int) -> float:
        return self.scores[node_id]

    def copy(self) -> "ScoreTable":
        return ScoreTable(dict(self.scores), dict(self.provenance))


def initial_scores(
    net: GroundedNetwork,
    scorer: Optional[Callable[[GroundAtom], Optional[float]]] = None,
    unknown_default: float = UNKNOWN_DEFAULT,
) -> ScoreTable:
    """Initial table: known facts 1.0, else scorer output, else the prior.

    ``scorer`` maps a ground atom to a score in (0, 1) or ``None`` when
    the atom is outside its vocabulary.
    """
    table = ScoreTable()
    for node in net.nodes:
        if node.known:
            table.set(node.id, 1.0, KNOWN_FACT)
            continue
        score = scorer(node.atom) if scorer is not None else None
        if score is None:
            table.set(node.id, unknown_default, DEFAULT_PRIOR)
        else:
            table.set(node.id, score, KGE_INITIAL)
    return table


def propagate(
    net: GroundedNetwork,
    init: ScoreTable,
    kind: str = "product",
    steps: Optional[int] = None,
    epsilon: float = FIXPOINT_EPSILON,
) -> ScoreTable:
    """Synchronous score propagation; ``steps=None`` iterates to fixpoint.

    Each step updates every head node h to
    ``max(init[h], max over incident edges of tnorm(previous body scores))``
    reading the previous buffer only, so updates within a step are
    independent.  Non-head nodes keep their initial scores; zero steps is
    the identity.  Fixpoint mode stops when no score moves by more than
    ``epsilon`` or after |nodes| steps.
    """
    fn = TNORMS.get(kind)
    if fn is None:
        raise ScoreError(f"unknown t-norm {kind!r}; choose from {sorted(TNORMS)}")
    for node in net.nodes:
        if node.id not in init.scores:
            raise ScoreError(f"missing initial score for node {node.id} ({net.atom_text(node.atom)})")
        _check_unit(init.scores[node.id])

    base = [init.scores[node.id] for node in net.nodes]
    prev = list(base)
    out = init.copy()
    limit = len(net.nodes) if steps is None else steps
    for _ in range(limit):
        cur = list(prev)
        delta = 0.0
        for head, by_rule in net.heads.items():
            best = base[head]
            for edge_ids in by_rule.values():
                for edge_id in edge_ids:
                    edge = net.edges[edge_id]
                    value = fn([prev[b] for b in edge.body])
                    if value > best:
                        best = value
            if best != cur[head]:
                delta = max(delta, abs(best - cur[head]))
                cur[head] = best
        prev = cur
        if steps is None and delta <= epsilon:
            break
    for node in net.nodes:
        if prev[node.id] != base[node.id]:
            out.set(node.id, prev[node.id], PROPAGATED)
    return out


def write_scores(net: GroundedNetwork, table: ScoreTable, sink: Union[str, IO[str]]) -> None:
    """Two-column text: canonical atom form, tab, score."""
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as fh:
            write_scores(net, table, fh)
        return
    for node in net.nodes:
        sink.write(f"{net.atom_text(node.atom)}\t{table.scores[node.id]:.17g}\n")


def read_scores(source: Union[str, IO[str]]) -> dict[str, float]:
    """Parse a two-column score file back into atom-text -> score."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_scores(fh)
    out: dict[str, float] = {}
    for line_no, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ScoreError(f"line {line_no}: expected two tab-separated columns")
        out[parts[0]] = _check_unit(float(parts[1]))
    return out
