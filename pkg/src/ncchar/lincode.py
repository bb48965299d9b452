"""(k, n) fractional linear network codes and their verification.

Sources emit blocks of k symbols, edges carry blocks of n symbols.  A
code assigns each edge a rule combining the blocks on its tail's
in-edges (n x n matrices) and/or the message generated at its tail
(n x k matrices), and each terminal a decode rule (k x n matrices over
its in-edges).  ``eval_transfer`` unrolls the rules into global transfer
blocks, one n x k matrix per (edge, message); ``verify`` then checks
that every terminal reconstructs its demand exactly: identity on the
demanded block, zero on every other.

A ``SymbolicCode`` is the characteristic-agnostic form of the same data:
entries are small integers, optionally times a formal inverse of the
construction parameter q.  ``instantiate`` maps it onto GF(p), which
fails precisely when an inverse of q is used but p divides q.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .gf import FieldMatrix, PrimeModulus, as_modulus
from .network import CodedNetwork, topological_order

SRC_PREFIX = "src:"


class CodeError(ValueError):
    """Raised for structurally broken codes (bad refs, bad shapes)."""


class CodeFormatError(ValueError):
    """Raised when a code document cannot be parsed."""


class CharacteristicError(ValueError):
    """Raised when instantiation needs 1/q but the characteristic divides q."""


@dataclass(frozen=True)
class CodeInput:
    """One weighted input of a rule: a parent edge id or ``src:<message>``."""

    ref: str
    matrix: FieldMatrix


def _normalize_rules(code: object, attr: str) -> None:
    """Store each rule's inputs sorted by ref.  Inputs are summed during
    evaluation, so the order carries no meaning; fixing it makes equality
    and serialization agree."""
    rules = getattr(code, attr)
    object.__setattr__(
        code,
        attr,
        {
            key: tuple(sorted(inputs, key=lambda inp: inp.ref))
            for key, inputs in rules.items()
        },
    )


@dataclass(frozen=True)
class FractionalCode:
    k: int
    n: int
    modulus: PrimeModulus
    edge_rules: Mapping[str, tuple[CodeInput, ...]]
    decode_rules: Mapping[str, tuple[CodeInput, ...]]
    q: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1 or self.n < 1:
            raise CodeError("k and n must be positive")
        _normalize_rules(self, "edge_rules")
        _normalize_rules(self, "decode_rules")
        for edge, inputs in self.edge_rules.items():
            for inp in inputs:
                want_cols = self.k if inp.ref.startswith(SRC_PREFIX) else self.n
                if inp.matrix.rows != self.n or inp.matrix.cols != want_cols:
                    raise CodeError(
                        f"rule for edge {edge!r}: input {inp.ref!r} must be "
                        f"{self.n}x{want_cols}, got "
                        f"{inp.matrix.rows}x{inp.matrix.cols}"
                    )
                if inp.matrix.modulus != self.modulus:
                    raise CodeError(f"rule for edge {edge!r}: mixed moduli")
        for term, inputs in self.decode_rules.items():
            for inp in inputs:
                if inp.ref.startswith(SRC_PREFIX):
                    raise CodeError(
                        f"decode rule for {term!r} may not read source "
                        f"messages directly ({inp.ref!r})"
                    )
                if inp.matrix.rows != self.k or inp.matrix.cols != self.n:
                    raise CodeError(
                        f"decode rule for {term!r}: input {inp.ref!r} must be "
                        f"{self.k}x{self.n}, got "
                        f"{inp.matrix.rows}x{inp.matrix.cols}"
                    )
                if inp.matrix.modulus != self.modulus:
                    raise CodeError(f"decode rule for {term!r}: mixed moduli")


SymEntry = tuple[int, bool]  # (coefficient, times 1/q?)


@dataclass(frozen=True)
class SymMatrix:
    """A small-integer matrix whose entries may carry a formal 1/q."""

    rows: int
    cols: int
    entries: tuple[SymEntry, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise CodeError("symbolic entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[SymEntry]]) -> "SymMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[SymEntry] = []
        for r in rows:
            if len(r) != ncols:
                raise CodeError("ragged symbolic rows")
            flat.extend(r)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def scaled_identity(cls, size: int, coeff: int = 1, inv_q: bool = False) -> "SymMatrix":
        flat = [(0, False)] * (size * size)
        for i in range(size):
            flat[i * size + i] = (coeff, inv_q)
        return cls(size, size, tuple(flat))

    @classmethod
    def unit_column(cls, size: int, pos: int, coeff: int = 1) -> "SymMatrix":
        flat = [(0, False)] * size
        flat[pos - 1] = (coeff, False)
        return cls(size, 1, tuple(flat))

    @classmethod
    def unit_row(cls, size: int, pos: int, coeff: int = 1) -> "SymMatrix":
        flat = [(0, False)] * size
        flat[pos - 1] = (coeff, False)
        return cls(1, size, tuple(flat))

    def uses_inv_q(self) -> bool:
        return any(inv for _, inv in self.entries)


@dataclass(frozen=True)
class SymInput:
    ref: str
    matrix: SymMatrix


@dataclass(frozen=True)
class SymbolicCode:
    k: int
    n: int
    q: int
    edge_rules: Mapping[str, tuple[SymInput, ...]]
    decode_rules: Mapping[str, tuple[SymInput, ...]]

    def __post_init__(self) -> None:
        _normalize_rules(self, "edge_rules")
        _normalize_rules(self, "decode_rules")


def instantiate(sym: SymbolicCode, p: PrimeModulus | int) -> FractionalCode:
    """Reduce a symbolic code mod p.  Entries carrying 1/q require q to be
    invertible, i.e. the characteristic must not divide q."""
    mod = as_modulus(p)
    needs_inverse = any(
        inp.matrix.uses_inv_q()
        for rules in (sym.edge_rules, sym.decode_rules)
        for inputs in rules.values()
        for inp in inputs
    )
    q_inv = 1
    if needs_inverse:
        if sym.q % mod.p == 0:
            raise CharacteristicError(
                f"characteristic divides q: no inverse of q={sym.q} in GF({mod.p})"
            )
        q_inv = pow(sym.q % mod.p, -1, mod.p)

    def concrete(matrix: SymMatrix) -> FieldMatrix:
        flat = tuple(
            (coeff * (q_inv if inv else 1)) % mod.p for coeff, inv in matrix.entries
        )
        return FieldMatrix(matrix.rows, matrix.cols, flat, mod)

    def convert(rules: Mapping[str, tuple[SymInput, ...]]) -> dict[str, tuple[CodeInput, ...]]:
        return {
            key: tuple(CodeInput(inp.ref, concrete(inp.matrix)) for inp in inputs)
            for key, inputs in rules.items()
        }

    return FractionalCode(
        sym.k,
        sym.n,
        mod,
        convert(sym.edge_rules),
        convert(sym.decode_rules),
        q=sym.q,
    )


def rate(code: FractionalCode | SymbolicCode) -> Fraction:
    return Fraction(code.k, code.n)


# -- evaluation and verification ---------------------------------------------

TransferMap = dict[str, dict[str, FieldMatrix]]


def eval_transfer(
    net: CodedNetwork,
    code: FractionalCode,
    node_order: Sequence[str] | None = None,
) -> TransferMap:
    """Global transfer blocks: for each edge, an n x k matrix per message.

    The result is a function of the rules alone, so any valid topological
    node order yields the same map.
    """
    node_by_id = net.node_map()
    if node_order is None:
        node_order = topological_order(net)
    else:
        if sorted(node_order) != sorted(node_by_id):
            raise CodeError("node_order must be a permutation of the nodes")
    in_edge_ids: dict[str, set[str]] = {nid: set() for nid in node_by_id}
    for e in net.edges:
        in_edge_ids[e.head].add(e.id)

    zero = FieldMatrix.zeros(code.n, code.k, code.modulus)
    transfer: TransferMap = {}
    edges_from: dict[str, list] = {nid: [] for nid in node_by_id}
    for e in net.edges:
        edges_from[e.tail].append(e)

    for nid in node_order:
        node = node_by_id[nid]
        for e in edges_from[nid]:
            if e.id not in code.edge_rules:
                raise CodeError(f"no rule for edge {e.id!r}")
            blocks = {m: zero for m in net.messages}
            for inp in code.edge_rules[e.id]:
                if inp.ref.startswith(SRC_PREFIX):
                    msg = inp.ref[len(SRC_PREFIX) :]
                    if node.role != "source" or node.generates != msg:
                        raise CodeError(
                            f"rule for edge {e.id!r} reads {inp.ref!r}, but its "
                            f"tail {nid!r} does not generate that message"
                        )
                    blocks[msg] = blocks[msg] + inp.matrix
                else:
                    if inp.ref not in in_edge_ids[nid]:
                        raise CodeError(
                            f"rule for edge {e.id!r} reads {inp.ref!r}, which is "
                            f"not an in-edge of its tail {nid!r}"
                        )
                    parent = transfer[inp.ref]
                    for m in net.messages:
                        if not parent[m].is_zero:
                            blocks[m] = blocks[m] + inp.matrix @ parent[m]
            transfer[e.id] = blocks
    return transfer


@dataclass(frozen=True)
class TerminalReport:
    terminal: str
    demanded: str
    passed: bool
    demanded_block: FieldMatrix
    interferers: tuple[str, ...]


@dataclass(frozen=True)
class VerificationReport:
    terminals: tuple[TerminalReport, ...]

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.terminals)

    def failing(self) -> list[TerminalReport]:
        return [t for t in self.terminals if not t.passed]


def verify(net: CodedNetwork, code: FractionalCode) -> VerificationReport:
    """Exact per-terminal check of the decode rules against the transfers."""
    transfer = eval_transfer(net, code)
    in_edge_ids: dict[str, set[str]] = {n.id: set() for n in net.nodes}
    for e in net.edges:
        in_edge_ids[e.head].add(e.id)
    ident = FieldMatrix.identity(code.k, code.modulus)
    zero = FieldMatrix.zeros(code.k, code.k, code.modulus)

    reports: list[TerminalReport] = []
    for term in net.terminals():
        if term.demands is None:
            raise CodeError(f"terminal {term.id!r} has no demand")
        decoded = {m: zero for m in net.messages}
        for inp in code.decode_rules.get(term.id, ()):
            if inp.ref not in in_edge_ids[term.id]:
                raise CodeError(
                    f"decode rule for {term.id!r} reads {inp.ref!r}, which is "
                    f"not one of its in-edges"
                )
            parent = transfer[inp.ref]
            for m in net.messages:
                if not parent[m].is_zero:
                    decoded[m] = decoded[m] + inp.matrix @ parent[m]
        interferers = tuple(
            m for m in net.messages if m != term.demands and not decoded[m].is_zero
        )
        good = decoded[term.demands] == ident and not interferers
        reports.append(
            TerminalReport(term.id, term.demands, good, decoded[term.demands], interferers)
        )
    return VerificationReport(tuple(sorted(reports, key=lambda r: r.terminal)))


# -- serialization ------------------------------------------------------------

_INV_Q_RE = re.compile(r"^(-?\d+)\*INV_Q$")


def _entry_to_json(entry: SymEntry) -> object:
    coeff, inv = entry
    if not inv:
        return coeff
    if coeff == 1:
        return "INV_Q"
    return f"{coeff}*INV_Q"


def _entry_from_json(value: object, where: str) -> SymEntry:
    if isinstance(value, bool):
        raise CodeFormatError(f"{where}: entry must be an int or INV_Q token")
    if isinstance(value, int):
        return (value, False)
    if isinstance(value, str):
        if value == "INV_Q":
            return (1, True)
        m = _INV_Q_RE.match(value)
        if m:
            return (int(m.group(1)), True)
    raise CodeFormatError(f"{where}: bad entry {value!r}")


def _rules_to_json(rules: Mapping[str, tuple], key_name: str, symbolic: bool) -> list:
    out = []
    for key in sorted(rules):
        inputs = []
        for inp in sorted(rules[key], key=lambda i: i.ref):
            if symbolic:
                mat = [
                    [
                        _entry_to_json(inp.matrix.entries[r * inp.matrix.cols + c])
                        for c in range(inp.matrix.cols)
                    ]
                    for r in range(inp.matrix.rows)
                ]
            else:
                mat = inp.matrix.to_rows()
            inputs.append({"ref": inp.ref, "matrix": mat})
        out.append({key_name: key, "inputs": inputs})
    return out


def save_code(code: FractionalCode | SymbolicCode) -> bytes:
    symbolic = isinstance(code, SymbolicCode)
    doc: dict[str, object] = {
        "k": code.k,
        "n": code.n,
        "edge_rules": _rules_to_json(code.edge_rules, "edge", symbolic),
        "decode_rules": _rules_to_json(code.decode_rules, "terminal", symbolic),
    }
    if symbolic:
        doc["q"] = code.q
    else:
        doc["p"] = code.modulus.p
        if code.q is not None:
            doc["q"] = code.q
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _load_matrix(raw: object, where: str) -> list[list[object]]:
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise CodeFormatError(f"{where}: 'matrix' must be a non-empty list of rows")
    width = len(raw[0])
    for r in raw:
        if len(r) != width:
            raise CodeFormatError(f"{where}: ragged matrix")
    return raw


def load_code(
    data: bytes | str, net: CodedNetwork | None = None
) -> FractionalCode | SymbolicCode:
    """Parse a code document; pass the network to cross-check references."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CodeFormatError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise CodeFormatError("top level must be an object")
    for field_name in ("k", "n", "edge_rules", "decode_rules"):
        if field_name not in doc:
            raise CodeFormatError(f"missing field {field_name!r}")
    k, n = doc["k"], doc["n"]
    if not isinstance(k, int) or not isinstance(n, int) or k < 1 or n < 1:
        raise CodeFormatError("'k' and 'n' must be positive integers")
    symbolic = "p" not in doc
    if symbolic and "q" not in doc:
        raise CodeFormatError("symbolic code needs 'q'")
    mod: PrimeModulus | None = None
    if not symbolic:
        if not isinstance(doc["p"], int):
            raise CodeFormatError("'p' must be an integer")
        try:
            mod = PrimeModulus(doc["p"])
        except ValueError as exc:
            raise CodeFormatError(str(exc)) from exc

    def parse_rules(raw: object, key_name: str, decode: bool):
        if not isinstance(raw, list):
            raise CodeFormatError(f"'{key_name}_rules' must be a list")
        rules: dict[str, tuple] = {}
        for i, entry in enumerate(raw):
            where = f"{key_name}_rules[{i}]"
            if not isinstance(entry, dict):
                raise CodeFormatError(f"{where}: must be an object")
            outer = "terminal" if decode else "edge"
            if outer not in entry or "inputs" not in entry:
                raise CodeFormatError(f"{where}: needs {outer!r} and 'inputs'")
            key = entry[outer]
            if not isinstance(key, str):
                raise CodeFormatError(f"{where}: {outer!r} must be a string")
            if key in rules:
                raise CodeFormatError(f"{where}: duplicate rule for {key!r}")
            inputs = []
            raw_inputs = entry["inputs"]
            if not isinstance(raw_inputs, list):
                raise CodeFormatError(f"{where}: 'inputs' must be a list")
            for j, rin in enumerate(raw_inputs):
                iw = f"{where}.inputs[{j}]"
                if not isinstance(rin, dict) or "ref" not in rin or "matrix" not in rin:
                    raise CodeFormatError(f"{iw}: needs 'ref' and 'matrix'")
                ref = rin["ref"]
                if not isinstance(ref, str):
                    raise CodeFormatError(f"{iw}: 'ref' must be a string")
                rows = _load_matrix(rin["matrix"], iw)
                if decode:
                    want = (k, n)
                elif ref.startswith(SRC_PREFIX):
                    want = (n, k)
                else:
                    want = (n, n)
                if (len(rows), len(rows[0])) != want:
                    raise CodeFormatError(
                        f"{iw}: matrix must be {want[0]}x{want[1]}, got "
                        f"{len(rows)}x{len(rows[0])}"
                    )
                if symbolic:
                    sym_rows = [
                        [_entry_from_json(v, iw) for v in row] for row in rows
                    ]
                    inputs.append(SymInput(ref, SymMatrix.from_rows(sym_rows)))
                else:
                    assert mod is not None
                    for row in rows:
                        for v in row:
                            if not isinstance(v, int) or isinstance(v, bool):
                                raise CodeFormatError(f"{iw}: entry {v!r} not an int")
                            if not (0 <= v < mod.p):
                                raise CodeFormatError(
                                    f"{iw}: entry {v} outside [0, {mod.p})"
                                )
                    inputs.append(CodeInput(ref, FieldMatrix.from_rows(rows, mod)))
            rules[key] = tuple(inputs)
        return rules

    edge_rules = parse_rules(doc["edge_rules"], "edge", decode=False)
    decode_rules = parse_rules(doc["decode_rules"], "decode", decode=True)
    q = doc.get("q")
    if q is not None and (not isinstance(q, int) or q < 1):
        raise CodeFormatError("'q' must be a positive integer")

    if net is not None:
        edge_ids = set(net.edge_map())
        term_ids = {t.id for t in net.terminals()}
        msgs = set(net.messages)
        for eid, inputs in edge_rules.items():
            if eid not in edge_ids:
                raise CodeFormatError(f"rule for unknown edge {eid!r}")
            for inp in inputs:
                if inp.ref.startswith(SRC_PREFIX):
                    if inp.ref[len(SRC_PREFIX) :] not in msgs:
                        raise CodeFormatError(f"rule reads unknown message {inp.ref!r}")
                elif inp.ref not in edge_ids:
                    raise CodeFormatError(f"rule reads unknown edge {inp.ref!r}")
        for tid, inputs in decode_rules.items():
            if tid not in term_ids:
                raise CodeFormatError(f"decode rule for unknown terminal {tid!r}")
            for inp in inputs:
                if inp.ref not in edge_ids:
                    raise CodeFormatError(
                        f"decode rule reads unknown edge {inp.ref!r}"
                    )

    if symbolic:
        return SymbolicCode(k, n, int(doc["q"]), edge_rules, decode_rules)
    assert mod is not None
    try:
        return FractionalCode(k, n, mod, edge_rules, decode_rules, q=q)
    except CodeError as exc:
        raise CodeFormatError(str(exc)) from exc
