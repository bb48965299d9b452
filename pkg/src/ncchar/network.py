"""Directed acyclic coded networks: nodes, edges, validation, canonical JSON.

A network is a DAG whose source nodes each generate one message and whose
terminal nodes each demand one message.  Serialization is canonical: keys
sorted, two-space indent, LF newlines, node and edge lists sorted by id,
so saving the same network twice yields byte-identical files.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

ROLE_SOURCE = "source"
ROLE_INTERMEDIATE = "intermediate"
ROLE_TERMINAL = "terminal"
_ROLES = (ROLE_SOURCE, ROLE_INTERMEDIATE, ROLE_TERMINAL)


class NetworkFormatError(ValueError):
    """Raised when a network document cannot be parsed."""


class CycleError(ValueError):
    """Raised when a topological order is requested for a cyclic graph."""


@dataclass(frozen=True)
class NetNode:
    id: str
    role: str
    generates: str | None = None
    demands: str | None = None


@dataclass(frozen=True)
class NetEdge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


@dataclass(frozen=True)
class UnicastViolation:
    message: str
    kind: str  # "generated" or "demanded"
    count: int


@dataclass(frozen=True)
class UnicastCheck:
    ok: bool
    violations: tuple[UnicastViolation, ...]


@dataclass(frozen=True)
class CodedNetwork:
    """Immutable network; node/edge/message lists are kept sorted by id."""

    name: str
    messages: tuple[str, ...]
    nodes: tuple[NetNode, ...]
    edges: tuple[NetEdge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(sorted(self.messages)))
        object.__setattr__(
            self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id))
        )
        object.__setattr__(
            self, "edges", tuple(sorted(self.edges, key=lambda e: e.id))
        )

    # -- indexed views (computed on demand, cheap at our sizes) ----------

    def node_map(self) -> dict[str, NetNode]:
        return {n.id: n for n in self.nodes}

    def edge_map(self) -> dict[str, NetEdge]:
        return {e.id: e for e in self.edges}

    def in_edges(self, node_id: str) -> list[NetEdge]:
        return [e for e in self.edges if e.head == node_id]

    def out_edges(self, node_id: str) -> list[NetEdge]:
        return [e for e in self.edges if e.tail == node_id]

    def sources(self) -> list[NetNode]:
        return [n for n in self.nodes if n.role == ROLE_SOURCE]

    def terminals(self) -> list[NetNode]:
        return [n for n in self.nodes if n.role == ROLE_TERMINAL]

    def intermediates(self) -> list[NetNode]:
        return [n for n in self.nodes if n.role == ROLE_INTERMEDIATE]


def validate(net: CodedNetwork) -> ValidationReport:
    """Structural checks; violations are returned as data, never raised."""
    out: list[Violation] = []

    seen_nodes: set[str] = set()
    for n in net.nodes:
        if n.id in seen_nodes:
            out.append(Violation("duplicate-id", f"node {n.id!r} declared twice"))
        seen_nodes.add(n.id)
    seen_edges: set[str] = set()
    for e in net.edges:
        if e.id in seen_edges:
            out.append(Violation("duplicate-id", f"edge {e.id!r} declared twice"))
        seen_edges.add(e.id)
    seen_msgs: set[str] = set()
    for m in net.messages:
        if m in seen_msgs:
            out.append(Violation("duplicate-id", f"message {m!r} declared twice"))
        seen_msgs.add(m)
    pairs: set[tuple[str, str]] = set()
    for e in net.edges:
        if (e.tail, e.head) in pairs:
            out.append(
                Violation(
                    "duplicate-id", f"parallel edge {e.tail!r}->{e.head!r}"
                )
            )
        pairs.add((e.tail, e.head))

    msgs = set(net.messages)
    for n in net.nodes:
        if n.role not in _ROLES:
            out.append(Violation("bad-role", f"node {n.id!r} has role {n.role!r}"))
            continue
        if n.role == ROLE_SOURCE:
            if n.generates is None:
                out.append(
                    Violation("source-generates-missing", f"source {n.id!r}")
                )
            elif n.generates not in msgs:
                out.append(
                    Violation(
                        "dangling-message-ref",
                        f"source {n.id!r} generates undeclared {n.generates!r}",
                    )
                )
        elif n.generates is not None:
            out.append(
                Violation("nonsource-generates", f"node {n.id!r} generates a message")
            )
        if n.role == ROLE_TERMINAL:
            if n.demands is None:
                out.append(
                    Violation("terminal-demands-missing", f"terminal {n.id!r}")
                )
            elif n.demands not in msgs:
                out.append(
                    Violation(
                        "dangling-message-ref",
                        f"terminal {n.id!r} demands undeclared {n.demands!r}",
                    )
                )
        elif n.demands is not None:
            out.append(
                Violation("nonterminal-demands", f"node {n.id!r} demands a message")
            )

    for e in net.edges:
        for end, label in ((e.tail, "tail"), (e.head, "head")):
            if end not in seen_nodes:
                out.append(
                    Violation(
                        "dangling-node-ref",
                        f"edge {e.id!r} {label} references unknown node {end!r}",
                    )
                )

    node_by_id = net.node_map()
    for e in net.edges:
        head = node_by_id.get(e.head)
        tail = node_by_id.get(e.tail)
        if head is not None and head.role == ROLE_SOURCE:
            out.append(
                Violation("source-has-in-edge", f"edge {e.id!r} enters source {e.head!r}")
            )
        if tail is not None and tail.role == ROLE_TERMINAL:
            out.append(
                Violation(
                    "terminal-has-out-edge",
                    f"edge {e.id!r} leaves terminal {e.tail!r}",
                )
            )

    try:
        topological_order(net)
    except CycleError as exc:
        out.append(Violation("cycle", str(exc)))

    return ValidationReport(tuple(out))


def topological_order(net: CodedNetwork) -> list[str]:
    """Kahn's algorithm with a heap, so ties break lexicographically."""
    indeg: dict[str, int] = {n.id: 0 for n in net.nodes}
    succ: dict[str, list[str]] = {n.id: [] for n in net.nodes}
    for e in net.edges:
        if e.tail in succ and e.head in indeg:
            succ[e.tail].append(e.head)
            indeg[e.head] += 1
    ready = [nid for nid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        nid = heapq.heappop(ready)
        order.append(nid)
        for nxt in succ[nid]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(net.nodes):
        stuck = sorted(nid for nid, d in indeg.items() if d > 0)
        raise CycleError(f"cycle detected through nodes {stuck}")
    return order


def is_multiple_unicast(net: CodedNetwork) -> UnicastCheck:
    """Each message generated by exactly one source and demanded by
    exactly one terminal."""
    gen_count = {m: 0 for m in net.messages}
    dem_count = {m: 0 for m in net.messages}
    for n in net.nodes:
        if n.role == ROLE_SOURCE and n.generates in gen_count:
            gen_count[n.generates] += 1
        if n.role == ROLE_TERMINAL and n.demands in dem_count:
            dem_count[n.demands] += 1
    bad: list[UnicastViolation] = []
    for m in net.messages:
        if gen_count[m] != 1:
            bad.append(UnicastViolation(m, "generated", gen_count[m]))
        if dem_count[m] != 1:
            bad.append(UnicastViolation(m, "demanded", dem_count[m]))
    return UnicastCheck(not bad, tuple(bad))


# -- canonical JSON ---------------------------------------------------------


def _canonical_bytes(doc: object) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def save(net: CodedNetwork) -> bytes:
    nodes = []
    for n in net.nodes:
        entry: dict[str, object] = {"id": n.id, "role": n.role}
        if n.generates is not None:
            entry["generates"] = n.generates
        if n.demands is not None:
            entry["demands"] = n.demands
        nodes.append(entry)
    doc = {
        "name": net.name,
        "messages": list(net.messages),
        "nodes": nodes,
        "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in net.edges],
    }
    return _canonical_bytes(doc)


def _req(doc: Mapping, key: str, where: str) -> object:
    if key not in doc:
        raise NetworkFormatError(f"{where}: missing field {key!r}")
    return doc[key]


def load(data: bytes | str) -> CodedNetwork:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError("top level must be an object")
    name = _req(doc, "name", "network")
    messages = _req(doc, "messages", "network")
    raw_nodes = _req(doc, "nodes", "network")
    raw_edges = _req(doc, "edges", "network")
    if not isinstance(name, str):
        raise NetworkFormatError("field 'name' must be a string")
    if not isinstance(messages, list) or not all(
        isinstance(m, str) for m in messages
    ):
        raise NetworkFormatError("field 'messages' must be a list of strings")
    nodes: list[NetNode] = []
    for i, entry in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(entry, dict):
            raise NetworkFormatError(f"{where}: must be an object")
        nid = _req(entry, "id", where)
        role = _req(entry, "role", where)
        if not isinstance(nid, str) or not isinstance(role, str):
            raise NetworkFormatError(f"{where}: 'id' and 'role' must be strings")
        if role not in _ROLES:
            raise NetworkFormatError(f"{where}: unknown role {role!r}")
        gen = entry.get("generates")
        dem = entry.get("demands")
        if gen is not None and not isinstance(gen, str):
            raise NetworkFormatError(f"{where}: 'generates' must be a string")
        if dem is not None and not isinstance(dem, str):
            raise NetworkFormatError(f"{where}: 'demands' must be a string")
        nodes.append(NetNode(nid, role, gen, dem))
    edges: list[NetEdge] = []
    for i, entry in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise NetworkFormatError(f"{where}: must be an object")
        eid = _req(entry, "id", where)
        tail = _req(entry, "from", where)
        head = _req(entry, "to", where)
        if not (isinstance(eid, str) and isinstance(tail, str) and isinstance(head, str)):
            raise NetworkFormatError(f"{where}: 'id', 'from', 'to' must be strings")
        edges.append(NetEdge(eid, tail, head))
    return CodedNetwork(name, tuple(messages), tuple(nodes), tuple(edges))
