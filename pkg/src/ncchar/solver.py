"""Exhaustive search for scalar and fractional linear solvability.

The search assigns edges of the DAG, in a fixed topological order, a
canonical description of what they could carry:

* scalar search: the edge's global coding vector over GF(p)^m, zero or
  normalized so its first nonzero coordinate is 1;
* fractional search: the row space of the edge's global transfer matrix
  (n rows, k columns per message), kept as a reduced-echelon basis.

Each edge is restricted to (the span of) what its parents carry, and
invertible recombinations are factored out, which is exactly the
information any downstream node can use.  A completed assignment where
every terminal can recover its demand is turned back into an explicit
``FractionalCode`` witness; exhausting the canonical space without one
proves unsolvability at that (k, n, p).

Two sound prunings keep the space small: terminals are checked as soon
as their last in-edge is assigned, and explored-and-failed subtrees are
memoized on the values of the edges still visible to the remaining
suffix (the live frontier), so assignments differing only in consumed
edges are never explored twice.
"""

from __future__ import annotations

import heapq
import itertools
import multiprocessing
import os
from dataclasses import dataclass
from typing import Callable, Sequence

from .gf import FieldMatrix, PrimeModulus, as_modulus, solve_right
from .lincode import CodeInput, FractionalCode
from .network import CodedNetwork, topological_order, validate

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
INCONCLUSIVE = "inconclusive"

DEFAULT_BUDGET = 10**9
_MEMO_CAP = 4_000_000  # safety valve: stop growing memo tables past this


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int = DEFAULT_BUDGET
    enable_fractional: bool = False
    k: int = 1
    n: int = 1
    worker_count: int = 1

    def __post_init__(self) -> None:
        if self.node_budget < 1:
            raise ValueError("node_budget must be positive")
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")


@dataclass(frozen=True)
class SearchOutcome:
    status: str
    states_explored: int
    code: FractionalCode | None = None


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    """Search budget, overridable through the NCCHAR_BUDGET variable."""
    raw = os.environ.get("NCCHAR_BUDGET")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"NCCHAR_BUDGET must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("NCCHAR_BUDGET must be positive")
    return value


# -- tuple-based row reduction (hot path, kept free of FieldMatrix) -----------


def _rref_rows(rows: Sequence[tuple[int, ...]], p: int) -> tuple[tuple[int, ...], ...]:
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return ()
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        if r >= len(mat):
            break
        sel = -1
        for i in range(r, len(mat)):
            if mat[i][c]:
                sel = i
                break
        if sel < 0:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = pow(mat[r][c], -1, p)
        if inv != 1:
            mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        r += 1
    return tuple(tuple(row) for row in mat[:r] if any(row))


def _pivot(row: tuple[int, ...]) -> int:
    for i, x in enumerate(row):
        if x:
            return i
    return -1


def _in_span(basis: tuple[tuple[int, ...], ...], v: tuple[int, ...], p: int) -> bool:
    res = list(v)
    for row in basis:
        piv = _pivot(row)
        f = res[piv]
        if f:
            res = [(x - f * y) % p for x, y in zip(res, row)]
    return not any(res)


def _span_vectors(basis: tuple[tuple[int, ...], ...], p: int) -> list[tuple[int, ...]]:
    """All canonical (leading coefficient 1) nonzero vectors of the span."""
    out: list[tuple[int, ...]] = []
    r = len(basis)
    for lead in range(r):
        tail = basis[lead + 1 :]
        for combo in itertools.product(range(p), repeat=len(tail)):
            vv = list(basis[lead])
            for coeff, row in zip(combo, tail):
                if coeff:
                    vv = [(x + coeff * y) % p for x, y in zip(vv, row)]
            out.append(tuple(vv))
    return out


def _subspaces(
    basis: tuple[tuple[int, ...], ...], p: int, maxdim: int
) -> list[tuple[tuple[int, ...], ...]]:
    """All subspaces of the span with 1 <= dim <= maxdim, larger dims first.

    Subspaces are enumerated as reduced-echelon matrices over the basis
    coordinates (one per subspace), then re-reduced in global coordinates
    so equal subspaces reached from different parent sets share one key.
    """
    r = len(basis)
    out: list[tuple[tuple[int, ...], ...]] = []
    for d in range(min(maxdim, r), 0, -1):
        for pivots in itertools.combinations(range(r), d):
            pivot_set = set(pivots)
            free = [
                (i, j)
                for i in range(d)
                for j in range(pivots[i] + 1, r)
                if j not in pivot_set
            ]
            for vals in itertools.product(range(p), repeat=len(free)):
                coord = [[0] * r for _ in range(d)]
                for i in range(d):
                    coord[i][pivots[i]] = 1
                for (i, j), val in zip(free, vals):
                    coord[i][j] = val
                rows = []
                for i in range(d):
                    acc = None
                    for cidx in range(r):
                        coeff = coord[i][cidx]
                        if coeff:
                            term = basis[cidx]
                            if acc is None:
                                acc = [(coeff * y) % p for y in term]
                            else:
                                acc = [
                                    (x + coeff * y) % p for x, y in zip(acc, term)
                                ]
                    rows.append(tuple(acc))
                out.append(_rref_rows(rows, p))
    return out


def decodable(
    vectors: Sequence[Sequence[int]],
    demand: int | str,
    p: PrimeModulus | int,
    messages: Sequence[str] | None = None,
) -> bool:
    """True iff the demand's unit vector lies in the row span of vectors.

    ``demand`` is a coordinate index, or a message id resolved against
    ``messages`` (the coordinate order of the vectors).
    """
    mod = as_modulus(p)
    if isinstance(demand, str):
        if messages is None:
            raise ValueError("resolving a message id needs the messages sequence")
        try:
            demand = list(messages).index(demand)
        except ValueError as exc:
            raise ValueError(f"unknown message {demand!r}") from exc
    vecs = [tuple(int(x) % mod.p for x in v) for v in vectors]
    if not vecs:
        return False
    width = len(vecs[0])
    if any(len(v) != width for v in vecs):
        raise ValueError("vectors must share one length")
    if not (0 <= demand < width):
        raise ValueError("demand index out of range")
    unit = tuple(1 if i == demand else 0 for i in range(width))
    return _in_span(_rref_rows(vecs, mod.p), unit, mod.p)


# -- search planning ----------------------------------------------------------


@dataclass(frozen=True)
class _EdgeInfo:
    edge_id: str
    parents: tuple[int, ...]
    src_msg_index: int | None
    src_msg: str | None
    forced_demand: int | None


@dataclass(frozen=True)
class _Plan:
    messages: tuple[str, ...]
    edges: tuple[_EdgeInfo, ...]
    checks_at: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]
    checks_after: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]
    live_at: tuple[tuple[int, ...], ...]
    terminals: tuple[tuple[str, int, tuple[int, ...]], ...]
    dead_terminal: bool


def _edge_order(net: CodedNetwork) -> list:
    """Topological edge order that pulls chains toward terminals, so
    terminal feasibility is checked as early as possible."""
    node_map = net.node_map()
    out_by: dict[str, list] = {nid: [] for nid in node_map}
    in_deg: dict[str, int] = {nid: 0 for nid in node_map}
    for e in net.edges:
        out_by[e.tail].append(e)
        in_deg[e.head] += 1
    big = len(net.edges) + len(net.nodes) + 1
    dist: dict[str, int] = {}
    for nid in reversed(topological_order(net)):
        node = node_map[nid]
        if node.role == "terminal":
            dist[nid] = 0
        else:
            dist[nid] = min(
                (1 + dist[e.head] for e in out_by[nid]), default=big
            )
    placed_in: dict[str, int] = {nid: 0 for nid in node_map}
    heap = []
    for nid in node_map:
        if in_deg[nid] == 0:
            for e in out_by[nid]:
                heapq.heappush(heap, (dist[e.head], e.id, e))
    order = []
    while heap:
        _, _, e = heapq.heappop(heap)
        order.append(e)
        placed_in[e.head] += 1
        if placed_in[e.head] == in_deg[e.head]:
            for nxt in out_by[e.head]:
                heapq.heappush(heap, (dist[nxt.head], nxt.id, nxt))
    if len(order) != len(net.edges):
        raise ValueError("cyclic network")
    return order


def _build_plan(net: CodedNetwork) -> _Plan:
    node_map = net.node_map()
    order = _edge_order(net)
    pos = {e.id: i for i, e in enumerate(order)}
    in_edges: dict[str, list] = {nid: [] for nid in node_map}
    for e in net.edges:
        in_edges[e.head].append(e)
    msg_index = {m: i for i, m in enumerate(net.messages)}

    infos: list[_EdgeInfo] = []
    for e in order:
        tail = node_map[e.tail]
        head = node_map[e.head]
        parents: tuple[int, ...] = ()
        src_idx = None
        src_msg = None
        if tail.role == "source":
            src_msg = tail.generates
            src_idx = msg_index[src_msg]
        else:
            parents = tuple(sorted(pos[pe.id] for pe in in_edges[e.tail]))
        forced = None
        if head.role == "terminal" and len(in_edges[e.head]) == 1:
            forced = msg_index[head.demands]
        infos.append(_EdgeInfo(e.id, parents, src_idx, src_msg, forced))

    checks: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in order]
    terminals: list[tuple[str, int, tuple[int, ...]]] = []
    dead = False
    for term in net.terminals():
        positions = tuple(sorted(pos[e.id] for e in in_edges[term.id]))
        didx = msg_index[term.demands]
        terminals.append((term.id, didx, positions))
        if not positions:
            dead = True
            continue
        checks[max(positions)].append((didx, positions))

    last_use = list(range(len(order)))
    for i, info in enumerate(infos):
        for par in info.parents:
            last_use[par] = max(last_use[par], i)
    for i, check_list in enumerate(checks):
        for _, positions in check_list:
            for j in positions:
                last_use[j] = max(last_use[j], i)
    live = [
        tuple(j for j in range(i) if last_use[j] >= i) for i in range(len(order))
    ]
    after: list[tuple] = [()] * len(order)
    acc: tuple = ()
    for i in range(len(order) - 1, -1, -1):
        after[i] = acc
        acc = tuple(checks[i]) + acc

    return _Plan(
        net.messages,
        tuple(infos),
        tuple(tuple(c) for c in checks),
        tuple(after),
        tuple(live),
        tuple(sorted(terminals)),
        dead,
    )


# -- the two state algebras ---------------------------------------------------


class _ScalarAlgebra:
    """States are canonical global coding vectors in GF(p)^m."""

    def __init__(self, m: int, p: int):
        self.m = m
        self.p = p
        self.zero = (0,) * m
        self.units = tuple(
            tuple(1 if i == t else 0 for i in range(m)) for t in range(m)
        )
        self._join_cache: dict = {}
        self._enum_cache: dict = {}

    def src_candidates(self, t: int) -> tuple:
        return (self.units[t], self.zero)

    def forced_src(self, src_idx: int, demand_idx: int) -> tuple:
        return (self.units[src_idx],) if src_idx == demand_idx else ()

    def span_of(self, state: tuple[int, ...]) -> tuple:
        return (state,) if any(state) else ()

    def full_src_basis(self, t: int) -> tuple:
        return (self.units[t],)

    def join_bases(self, bases: Sequence[tuple]) -> tuple:
        rows: list = []
        for b in bases:
            rows.extend(b)
        key = tuple(sorted(set(rows)))
        basis = self._join_cache.get(key)
        if basis is None:
            basis = _rref_rows(key, self.p)
            self._join_cache[key] = basis
        return basis

    def join(self, states: Sequence[tuple[int, ...]]) -> tuple:
        return self.join_bases([self.span_of(s) for s in states])

    def enumerate(self, basis: tuple) -> tuple:
        cands = self._enum_cache.get(basis)
        if cands is None:
            cands = tuple(_span_vectors(basis, self.p)) + (self.zero,)
            self._enum_cache[basis] = cands
        return cands

    def forced(self, basis: tuple, demand_idx: int) -> tuple:
        unit = self.units[demand_idx]
        return (unit,) if _in_span(basis, unit, self.p) else ()

    def demand_in(self, basis: tuple, demand_idx: int) -> bool:
        return _in_span(basis, self.units[demand_idx], self.p)

    def decode_ok(self, states: Sequence[tuple[int, ...]], demand_idx: int) -> bool:
        return self.demand_in(self.join(states), demand_idx)


class _FracAlgebra:
    """States are row spaces (echelon bases) of n x (k*m) transfer matrices."""

    def __init__(self, m: int, k: int, n: int, p: int):
        self.m = m
        self.k = k
        self.n = n
        self.p = p
        self.cols = m * k
        self.zero: tuple = ()
        self.unit_rows = tuple(
            tuple(
                tuple(1 if c == t * k + j else 0 for c in range(self.cols))
                for j in range(k)
            )
            for t in range(m)
        )
        self._join_cache: dict = {}
        self._enum_cache: dict = {}
        self._src_cache: dict = {}
        self._decode_cache: dict = {}

    def src_candidates(self, t: int) -> tuple:
        cands = self._src_cache.get(t)
        if cands is None:
            basis = self.unit_rows[t]  # already echelon
            cands = tuple(_subspaces(basis, self.p, min(self.n, self.k))) + (
                self.zero,
            )
            self._src_cache[t] = cands
        return cands

    def forced_src(self, src_idx: int, demand_idx: int) -> tuple:
        if src_idx == demand_idx and self.k <= self.n:
            return (self.unit_rows[demand_idx],)
        return ()

    def span_of(self, state: tuple) -> tuple:
        return state

    def full_src_basis(self, t: int) -> tuple:
        return self.unit_rows[t]

    def join_bases(self, bases: Sequence[tuple]) -> tuple:
        rows: list = []
        for b in bases:
            rows.extend(b)
        key = tuple(sorted(set(rows)))
        basis = self._join_cache.get(key)
        if basis is None:
            basis = _rref_rows(key, self.p)
            self._join_cache[key] = basis
        return basis

    def join(self, states: Sequence[tuple]) -> tuple:
        return self.join_bases(states)

    def enumerate(self, basis: tuple) -> tuple:
        cands = self._enum_cache.get(basis)
        if cands is None:
            cands = tuple(_subspaces(basis, self.p, self.n)) + (self.zero,)
            self._enum_cache[basis] = cands
        return cands

    def forced(self, basis: tuple, demand_idx: int) -> tuple:
        if self.k > self.n:
            return ()
        units = self.unit_rows[demand_idx]
        if all(_in_span(basis, u, self.p) for u in units):
            return (units,)
        return ()

    def demand_in(self, basis: tuple, demand_idx: int) -> bool:
        key = (basis, demand_idx)
        ok = self._decode_cache.get(key)
        if ok is None:
            ok = all(
                _in_span(basis, u, self.p) for u in self.unit_rows[demand_idx]
            )
            self._decode_cache[key] = ok
        return ok

    def decode_ok(self, states: Sequence[tuple], demand_idx: int) -> bool:
        return self.demand_in(self.join(states), demand_idx)


# -- backtracking engine -------------------------------------------------------


class _Engine:
    def __init__(
        self,
        plan: _Plan,
        algebra,
        budget: int,
        first_candidates: tuple | None = None,
        tick: Callable[[int], bool] | None = None,
    ):
        self.plan = plan
        self.alg = algebra
        self.budget = budget
        self.first_candidates = first_candidates
        self.tick = tick  # returns False when the search should stop early
        self.states = 0
        self._memo_full = False

    def _candidates(self, i: int, values: list) -> tuple[tuple, tuple]:
        """Candidate states for position i plus the parent span they live in."""
        info = self.plan.edges[i]
        alg = self.alg
        if info.src_msg_index is not None:
            basis = alg.full_src_basis(info.src_msg_index)
            if info.forced_demand is not None:
                cands = alg.forced_src(info.src_msg_index, info.forced_demand)
            else:
                cands = alg.src_candidates(info.src_msg_index)
        else:
            basis = alg.join_bases([alg.span_of(values[j]) for j in info.parents])
            if info.forced_demand is not None:
                cands = alg.forced(basis, info.forced_demand)
            else:
                cands = alg.enumerate(basis)
        if i == 0 and self.first_candidates is not None:
            cands = tuple(c for c in cands if c in self.first_candidates)
        return cands, basis

    def _optimistic_ok(self, i: int, values: list) -> bool:
        """Can every pending terminal still be covered if all unassigned
        edges were allowed to carry their parents' full (uncapped) span?

        Actual edge states are subspaces of their parents' spans, so this
        forward closure dominates every completion; a terminal that fails
        here fails in all of them, making the prune certificate-safe.
        """
        plan = self.plan
        alg = self.alg
        edges = plan.edges
        spans: list = [None] * len(edges)
        for j in range(i + 1):
            spans[j] = alg.span_of(values[j])
        for j in range(i + 1, len(edges)):
            info = edges[j]
            if info.src_msg_index is not None:
                spans[j] = alg.full_src_basis(info.src_msg_index)
            else:
                spans[j] = alg.join_bases([spans[par] for par in info.parents])
        for didx, positions in plan.checks_after[i]:
            joined = alg.join_bases([spans[pos] for pos in positions])
            if not alg.demand_in(joined, didx):
                return False
        return True

    def run(self) -> tuple[str, list | None]:
        plan = self.plan
        alg = self.alg
        E = len(plan.edges)
        if E == 0:
            return ("sat", [])
        failed: list[set] = [set() for _ in range(E)]
        values: list = [None] * E
        keys: list = [None] * E
        cands: list = [None] * E
        pdims: list = [0] * E
        idxs: list = [0] * E
        checks_at = plan.checks_at
        checks_after = plan.checks_after
        live_at = plan.live_at
        memo_entries = 0

        i = 0
        fresh = True
        while True:
            if fresh:
                if i == E:
                    return ("sat", values)
                key = tuple(values[j] for j in live_at[i])
                if key in failed[i]:
                    i -= 1
                    fresh = False
                    if i < 0:
                        return ("unsat", None)
                    continue
                keys[i] = key
                cands[i], pbasis = self._candidates(i, values)
                pdims[i] = len(pbasis)
                idxs[i] = 0

            advanced = False
            ci = idxs[i]
            cs = cands[i]
            ncs = len(cs)
            pending = checks_after[i]
            pdim = pdims[i]
            while ci < ncs:
                cand = cs[ci]
                ci += 1
                if self.states >= self.budget:
                    return ("budget", None)
                self.states += 1
                if self.tick is not None and not (self.states & 0xFFF):
                    if not self.tick(self.states):
                        return ("stopped", None)
                values[i] = cand
                ok = True
                for didx, positions in checks_at[i]:
                    if not alg.decode_ok([values[j] for j in positions], didx):
                        ok = False
                        break
                if ok and pending and len(alg.span_of(cand)) < pdim:
                    ok = self._optimistic_ok(i, values)
                if ok:
                    idxs[i] = ci
                    i += 1
                    fresh = True
                    advanced = True
                    break
            if advanced:
                continue
            if not self._memo_full:
                failed[i].add(keys[i])
                memo_entries += 1
                if memo_entries > _MEMO_CAP:
                    self._memo_full = True
            values[i] = None
            i -= 1
            fresh = False
            if i < 0:
                return ("unsat", None)


# -- witness reconstruction ----------------------------------------------------


def _scalar_witness(
    plan: _Plan, values: list, mod: PrimeModulus
) -> FractionalCode:
    m = len(plan.messages)
    er: dict[str, tuple[CodeInput, ...]] = {}
    dr: dict[str, tuple[CodeInput, ...]] = {}

    def solve_combo(parent_positions: tuple[int, ...], target: tuple[int, ...]):
        cols = [values[j] for j in parent_positions]
        a = FieldMatrix.from_rows(
            [[col[r] for col in cols] for r in range(m)], mod
        )
        b = FieldMatrix.from_rows([[x] for x in target], mod)
        x = solve_right(a, b)
        assert x is not None, "witness state escaped its parent span"
        return [x.at(idx, 0) for idx in range(len(parent_positions))]

    for i, info in enumerate(plan.edges):
        v = values[i]
        if info.src_msg_index is not None:
            coeff = v[info.src_msg_index]
            inputs = ()
            if coeff:
                inputs = (
                    CodeInput(
                        f"src:{info.src_msg}",
                        FieldMatrix.from_rows([[coeff]], mod),
                    ),
                )
            er[info.edge_id] = inputs
        elif not info.parents:
            er[info.edge_id] = ()
        else:
            coeffs = solve_combo(info.parents, v)
            er[info.edge_id] = tuple(
                CodeInput(
                    plan.edges[j].edge_id, FieldMatrix.from_rows([[c]], mod)
                )
                for j, c in zip(info.parents, coeffs)
                if c
            )
    for term_id, didx, positions in plan.terminals:
        unit = tuple(1 if t == didx else 0 for t in range(m))
        coeffs = solve_combo(positions, unit)
        dr[term_id] = tuple(
            CodeInput(plan.edges[j].edge_id, FieldMatrix.from_rows([[c]], mod))
            for j, c in zip(positions, coeffs)
            if c
        )
    return FractionalCode(1, 1, mod, er, dr)


def _pad_state(state: tuple, n: int, cols: int) -> list[list[int]]:
    rows = [list(r) for r in state]
    while len(rows) < n:
        rows.append([0] * cols)
    return rows


def _frac_witness(
    plan: _Plan, values: list, k: int, n: int, mod: PrimeModulus
) -> FractionalCode:
    m = len(plan.messages)
    cols = m * k
    er: dict[str, tuple[CodeInput, ...]] = {}
    dr: dict[str, tuple[CodeInput, ...]] = {}

    def solve_blocks(parent_positions, target_rows, out_rows):
        """Coefficients X with X . vstack(parents) = target, split per parent."""
        stacked: list[list[int]] = []
        for j in parent_positions:
            stacked.extend(_pad_state(values[j], n, cols))
        a = FieldMatrix.from_rows(
            [[stacked[r][c] for r in range(len(stacked))] for c in range(cols)], mod
        )
        b = FieldMatrix.from_rows(
            [[target_rows[r][c] for r in range(out_rows)] for c in range(cols)], mod
        )
        xt = solve_right(a, b)
        assert xt is not None, "witness state escaped its parent span"
        blocks = []
        for bi in range(len(parent_positions)):
            block = [
                [xt.at(bi * n + r, c) for r in range(n)] for c in range(out_rows)
            ]
            blocks.append(FieldMatrix.from_rows(block, mod))
        return blocks

    for i, info in enumerate(plan.edges):
        state = values[i]
        if info.src_msg_index is not None:
            t = info.src_msg_index
            rows = _pad_state(state, n, cols)
            block = [[rows[r][t * k + j] for j in range(k)] for r in range(n)]
            mat = FieldMatrix.from_rows(block, mod)
            er[info.edge_id] = (
                (CodeInput(f"src:{info.src_msg}", mat),) if not mat.is_zero else ()
            )
        elif not info.parents:
            er[info.edge_id] = ()
        else:
            target = _pad_state(state, n, cols)
            blocks = solve_blocks(info.parents, target, n)
            er[info.edge_id] = tuple(
                CodeInput(plan.edges[j].edge_id, blk)
                for j, blk in zip(info.parents, blocks)
                if not blk.is_zero
            )
    for term_id, didx, positions in plan.terminals:
        target = [
            [1 if c == didx * k + j else 0 for c in range(cols)] for j in range(k)
        ]
        blocks = solve_blocks(positions, target, k)
        dr[term_id] = tuple(
            CodeInput(plan.edges[j].edge_id, blk)
            for j, blk in zip(positions, blocks)
            if not blk.is_zero
        )
    return FractionalCode(k, n, mod, er, dr)


# -- drivers --------------------------------------------------------------------


def _prepare(net: CodedNetwork) -> _Plan:
    report = validate(net)
    if not report.ok:
        raise ValueError(f"network is invalid: {report.violations[0].detail}")
    return _build_plan(net)


def _run_single(plan, algebra, budget, witness) -> SearchOutcome:
    engine = _Engine(plan, algebra, budget)
    status, values = engine.run()
    if status == "sat":
        return SearchOutcome(SOLVABLE, engine.states, witness(values))
    if status == "unsat":
        return SearchOutcome(UNSOLVABLE, engine.states)
    return SearchOutcome(INCONCLUSIVE, engine.states)


def _worker_main(args) -> None:
    (
        idx,
        net,
        p,
        kind,
        k,
        n,
        budget,
        subset,
        queue,
        shared_states,
        stop_flag,
    ) = args
    plan = _build_plan(net)
    if kind == "scalar":
        algebra = _ScalarAlgebra(len(plan.messages), p)
    else:
        algebra = _FracAlgebra(len(plan.messages), k, n, p)
    last_flush = 0

    def tick(states: int) -> bool:
        nonlocal last_flush
        with shared_states.get_lock():
            shared_states.value += states - last_flush
            total = shared_states.value
        last_flush = states
        if stop_flag.value or total > budget:
            return False
        return True

    engine = _Engine(plan, algebra, budget, first_candidates=subset, tick=tick)
    status, values = engine.run()
    with shared_states.get_lock():
        shared_states.value += engine.states - last_flush
    if status == "sat":
        with stop_flag.get_lock():
            stop_flag.value = 1
    queue.put((idx, status, engine.states, values if status == "sat" else None))


def _run_parallel(
    net: CodedNetwork,
    plan: _Plan,
    p: int,
    kind: str,
    k: int,
    n: int,
    budget: int,
    workers: int,
    algebra,
    witness,
) -> SearchOutcome:
    first, _ = _Engine(plan, algebra, budget)._candidates(0, [])
    if not first:
        return SearchOutcome(UNSOLVABLE, 0)
    workers = min(workers, len(first))
    subsets = [tuple(first[w::workers]) for w in range(workers)]
    ctx = multiprocessing.get_context()
    queue = ctx.Queue()
    shared_states = ctx.Value("q", 0)
    stop_flag = ctx.Value("b", 0)
    procs = [
        ctx.Process(
            target=_worker_main,
            args=(
                (w, net, p, kind, k, n, budget, subsets[w], queue, shared_states, stop_flag),
            ),
        )
        for w in range(workers)
    ]
    for proc in procs:
        proc.start()
    results = [queue.get() for _ in procs]
    for proc in procs:
        proc.join()
    total_states = shared_states.value
    sat = sorted(r for r in results if r[1] == "sat")
    if sat:
        return SearchOutcome(SOLVABLE, total_states, witness(sat[0][3]))
    if any(r[1] in ("budget", "stopped") for r in results):
        return SearchOutcome(INCONCLUSIVE, total_states)
    return SearchOutcome(UNSOLVABLE, total_states)


def search_scalar(
    net: CodedNetwork, p: PrimeModulus | int, cfg: SearchConfig | None = None
) -> SearchOutcome:
    """Decide (1, 1) linear solvability over GF(p) by exhaustive search."""
    cfg = cfg or SearchConfig()
    mod = as_modulus(p)
    plan = _prepare(net)
    if plan.dead_terminal:
        return SearchOutcome(UNSOLVABLE, 0)
    algebra = _ScalarAlgebra(len(plan.messages), mod.p)

    def witness(values):
        return _scalar_witness(plan, values, mod)

    if cfg.worker_count == 1:
        return _run_single(plan, algebra, cfg.node_budget, witness)
    return _run_parallel(
        net, plan, mod.p, "scalar", 1, 1, cfg.node_budget, cfg.worker_count,
        algebra, witness,
    )


def search_fractional(
    net: CodedNetwork,
    k: int,
    n: int,
    p: PrimeModulus | int,
    cfg: SearchConfig | None = None,
) -> SearchOutcome:
    """Decide (k, n) linear solvability over GF(p) by subspace search."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    cfg = cfg or SearchConfig()
    mod = as_modulus(p)
    plan = _prepare(net)
    if plan.dead_terminal:
        return SearchOutcome(UNSOLVABLE, 0)
    algebra = _FracAlgebra(len(plan.messages), k, n, mod.p)

    def witness(values):
        return _frac_witness(plan, values, k, n, mod)

    if cfg.worker_count == 1:
        return _run_single(plan, algebra, cfg.node_budget, witness)
    return _run_parallel(
        net, plan, mod.p, "fractional", k, n, cfg.node_budget, cfg.worker_count,
        algebra, witness,
    )
