"""Grounded network: ground-atom nodes linked by rule-instance hyperedges.

The network stores one hyperedge per accepted ground rule rather than the
pairwise clique edges it induces; message passing consumes hyperedges, and
pairwise edges are derivable when needed.  Serialization is line-delimited
JSON (one record per line), versioned, streamable and diff-friendly, and
is the integration contract for external trainers.  The full field-by-
field layout is documented in ``docs/gmn-format.md``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

from .facts import FactStore
from .grounding import GroundingResult
from .logic import GroundAtom, LogicError, Theory

FORMAT_VERSION = 1


class GmnFormatError(LogicError):
    """Malformed or version-incompatible serialized network."""

    def __init__(self, message: str, record: Optional[int] = None) -> None:
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)
        self.record = record


@dataclass(slots=True)
class GmnNode:
    id: int
    atom: GroundAtom
    known: bool


@dataclass(slots=True)
class GmnEdge:
    rule_id: int
    head: int
    body: tuple[int, ...]


class GroundedNetwork:
    """Immutable after build; safe for shared reads."""

    def __init__(self, pred_names: list[str], pred_arities: list[int], const_names: list[str]) -> None:
        self.pred_names = pred_names
        self.pred_arities = pred_arities
        self.const_names = const_names
        self.nodes: list[GmnNode] = []
        self.edges: list[GmnEdge] = []
        self._node_ids: dict[GroundAtom, int] = {}
        # head node id -> rule id -> indices of incident hyperedges
        self.heads: dict[int, dict[int, list[int]]] = {}

    def _intern_node(self, atom: GroundAtom, known: bool) -> int:
        node_id = self._node_ids.get(atom)
        if node_id is None:
            node_id = len(self.nodes)
            self.nodes.append(GmnNode(node_id, atom, known))
            self._node_ids[atom] = node_id
        return node_id

    def _add_edge(self, rule_id: int, head: int, body: tuple[int, ...]) -> None:
        index = len(self.edges)
        self.edges.append(GmnEdge(rule_id, head, body))
        self.heads.setdefault(head, {}).setdefault(rule_id, []).append(index)

    def node_id(self, atom: GroundAtom) -> Optional[int]:
        return self._node_ids.get(atom)

    def incident(self, node_id: int) -> dict[int, list[int]]:
        """Hyperedges with this head, grouped by rule id."""
        return self.heads.get(node_id, {})

    def in_degree(self, node_id: int) -> int:
        return sum(len(v) for v in self.heads.get(node_id, {}).values())

    def atom_text(self, atom: GroundAtom) -> str:
        args = ",".join(self.const_names[c] for c in atom[1:])
        return f"{self.pred_names[atom[0]]}({args})"

    def structurally_equal(self, other: "GroundedNetwork") -> bool:
        return (
            [(n.atom, n.known) for n in self.nodes] == [(n.atom, n.known) for n in other.nodes]
            and [(e.rule_id, e.head, e.body) for e in self.edges]
            == [(e.rule_id, e.head, e.body) for e in other.edges]
            and self.pred_names == other.pred_names
            and self.pred_arities == other.pred_arities
            and self.const_names == other.const_names
        )


def build_gmn(
    result: GroundingResult,
    roots: Iterable[GroundAtom],
    store: FactStore,
    theory: Theory,
) -> GroundedNetwork:
    """Network over the result's instances plus the given roots.

    Node numbering is deterministic: sorted roots first, then atoms in
    sorted-instance traversal order (head before body).  Roots without
    incident edges are retained as isolated nodes.
    """
    net = GroundedNetwork(
        pred_names=theory.predicates.names(),
        pred_arities=[theory.arities[p] for p in range(len(theory.predicates))],
        const_names=theory.constants.names(),
    )
    for root in sorted(set(roots)):
        net._intern_node(root, root in store)
    for inst in result.sorted_instances():
        head = net._intern_node(inst.head, inst.head in store)
        body = tuple(
            net._intern_node(atom, known)
            for atom, known in zip(inst.body, inst.known)
        )
        net._add_edge(inst.rule_id, head, body)
    return net


def gmn_stats(net: GroundedNetwork) -> dict:
    per_rule: dict[int, int] = {}
    for edge in net.edges:
        per_rule[edge.rule_id] = per_rule.get(edge.rule_id, 0) + 1
    max_in = max((net.in_degree(n.id) for n in net.nodes), default=0)
    return {
        "nodes": len(net.nodes),
        "hyperedges": len(net.edges),
        "per_rule": dict(sorted(per_rule.items())),
        "max_in_degree": max_in,
    }


def export_gmn(net: GroundedNetwork, sink: Union[str, IO[str]]) -> None:
    """Write the network as versioned line-delimited JSON."""
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as fh:
            export_gmn(net, fh)
        return
    header = {
        "format": "gmn",
        "version": FORMAT_VERSION,
        "counts": {
            "predicates": len(net.pred_names),
            "constants": len(net.const_names),
            "nodes": len(net.nodes),
            "edges": len(net.edges),
        },
    }
    sink.write(json.dumps(header, separators=(",", ":")) + "\n")
    for name, arity in zip(net.pred_names, net.pred_arities):
        sink.write(json.dumps({"p": [name, arity]}, separators=(",", ":")) + "\n")
    for name in net.const_names:
        sink.write(json.dumps({"c": name}, separators=(",", ":")) + "\n")
    for node in net.nodes:
        record = {"n": [node.atom[0], list(node.atom[1:]), 1 if node.known else 0]}
        sink.write(json.dumps(record, separators=(",", ":")) + "\n")
    for edge in net.edges:
        record = {"e": [edge.rule_id, edge.head, list(edge.body)]}
        sink.write(json.dumps(record, separators=(",", ":")) + "\n")


def import_gmn(source: Union[str, IO[str]]) -> GroundedNetwork:
    """Read a network written by :func:`export_gmn`; round-trip identity."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return import_gmn(fh)

    def parse(line: str, record: int) -> dict:
        try:
            value = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GmnFormatError(f"invalid JSON: {exc}", record) from exc
        if not isinstance(value, dict):
            raise GmnFormatError("record is not an object", record)
        return value

    iterator = iter(enumerate(source, start=1))
    try:
        record_no, first = next(iterator)
    except StopIteration:
        raise GmnFormatError("empty input, missing header") from None
    header = parse(first, record_no)
    if header.get("format") != "gmn":
        raise GmnFormatError("missing 'gmn' format tag", record_no)
    if header.get("version") != FORMAT_VERSION:
        raise GmnFormatError(
            f"unsupported version {header.get('version')!r}, expected {FORMAT_VERSION}",
            record_no,
        )
    counts = header.get("counts")
    if not isinstance(counts, dict):
        raise GmnFormatError("missing counts", record_no)

    pred_names: list[str] = []
    pred_arities: list[int] = []
    const_names: list[str] = []
    expected = [
        ("p", counts.get("predicates", 0)),
        ("c", counts.get("constants", 0)),
        ("n", counts.get("nodes", 0)),
        ("e", counts.get("edges", 0)),
    ]
    net: Optional[GroundedNetwork] = None
    for kind, count in expected:
        for _ in range(count):
            try:
                record_no, line = next(iterator)
            except StopIteration:
                raise GmnFormatError(f"truncated input, expected {kind!r} record") from None
            record = parse(line, record_no)
            if kind not in record:
                raise GmnFormatError(f"expected {kind!r} record", record_no)
            payload = record[kind]
            try:
                if kind == "p":
                    pred_names.append(str(payload[0]))
                    pred_arities.append(int(payload[1]))
                elif kind == "c":
                    const_names.append(str(payload))
                elif kind == "n":
                    assert net is not None
                    atom = (int(payload[0]), *(int(a) for a in payload[1]))
                    net._intern_node(atom, bool(payload[2]))
                else:
                    assert net is not None
                    net._add_edge(int(payload[0]), int(payload[1]), tuple(int(b) for b in payload[2]))
            except (LookupError, TypeError, ValueError) as exc:
                raise GmnFormatError(f"malformed {kind!r} payload: {exc}", record_no) from exc
        if kind == "c":
            net = GroundedNetwork(pred_names, pred_arities, const_names)
    assert net is not None
    for record_no, line in iterator:
        if line.strip():
            raise GmnFormatError("trailing data after declared records", record_no)
    if len(net.nodes) != counts.get("nodes") or len(net.edges) != counts.get("edges"):
        raise GmnFormatError("record counts disagree with header")
    return net
