"""Exact dense matrix arithmetic over prime fields GF(p).

Matrices are immutable and store canonical residues in [0, p).  All
operations are exact, so results can be compared with ``==`` and never
need a tolerance.  Shapes are tiny throughout this package (block sizes
of a few rows), so everything here is plain Python integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class SingularMatrixError(ValueError):
    """Raised when an inverse is requested for a singular matrix."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A validated prime field modulus.

    The bound 2**31 keeps every entry/product comfortably inside native
    integer ranges on any backend.
    """

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"modulus must be an int, got {self.p!r}")
        if self.p >= 1 << 31:
            raise ValueError(f"modulus {self.p} too large (must be < 2**31)")
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def __int__(self) -> int:
        return self.p


def as_modulus(p: "PrimeModulus | int") -> PrimeModulus:
    return p if isinstance(p, PrimeModulus) else PrimeModulus(p)


@dataclass(frozen=True)
class FieldMatrix:
    """An immutable rows x cols matrix over GF(p), row-major entries."""

    rows: int
    cols: int
    entries: tuple[int, ...]
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entry count {len(self.entries)} does not match shape "
                f"{self.rows}x{self.cols}"
            )
        p = self.modulus.p
        for x in self.entries:
            if not isinstance(x, int) or not (0 <= x < p):
                raise ValueError(f"entry {x!r} is not a residue in [0, {p})")

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], p: "PrimeModulus | int"
    ) -> "FieldMatrix":
        mod = as_modulus(p)
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[int] = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(int(x) % mod.p for x in r)
        return cls(nrows, ncols, tuple(flat), mod)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: "PrimeModulus | int") -> "FieldMatrix":
        mod = as_modulus(p)
        return cls(rows, cols, (0,) * (rows * cols), mod)

    @classmethod
    def identity(cls, size: int, p: "PrimeModulus | int") -> "FieldMatrix":
        mod = as_modulus(p)
        flat = [0] * (size * size)
        for i in range(size):
            flat[i * size + i] = 1
        return cls(size, size, tuple(flat), mod)

    # -- element access --------------------------------------------------

    def at(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r},{c}) outside {self.rows}x{self.cols}")
        return self.entries[r * self.cols + c]

    def row(self, r: int) -> tuple[int, ...]:
        return self.entries[r * self.cols : (r + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(r)) for r in range(self.rows)]

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    # -- arithmetic -------------------------------------------------------

    def _require_same_field(self, other: "FieldMatrix") -> None:
        if self.modulus != other.modulus:
            raise ValueError(
                f"mixed moduli {self.modulus.p} and {other.modulus.p}"
            )

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._require_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        p = self.modulus.p
        flat = tuple((a + b) % p for a, b in zip(self.entries, other.entries))
        return FieldMatrix(self.rows, self.cols, flat, self.modulus)

    def __neg__(self) -> "FieldMatrix":
        p = self.modulus.p
        return FieldMatrix(
            self.rows, self.cols, tuple((-a) % p for a in self.entries), self.modulus
        )

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        return self + (-other)

    def scale(self, c: int) -> "FieldMatrix":
        p = self.modulus.p
        c %= p
        return FieldMatrix(
            self.rows, self.cols, tuple((c * a) % p for a in self.entries), self.modulus
        )

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._require_same_field(other)
        if self.cols != other.rows:
            raise ValueError(
                f"shape mismatch in product: {self.rows}x{self.cols} times "
                f"{other.rows}x{other.cols}"
            )
        p = self.modulus.p
        a, b = self.entries, other.entries
        n, m, k = self.rows, self.cols, other.cols
        flat = [0] * (n * k)
        for i in range(n):
            arow = a[i * m : (i + 1) * m]
            base = i * k
            for j in range(k):
                s = 0
                for t in range(m):
                    s += arow[t] * b[t * k + j]
                flat[base + j] = s % p
        return FieldMatrix(n, k, tuple(flat), self.modulus)

    def transpose(self) -> "FieldMatrix":
        flat = tuple(
            self.entries[r * self.cols + c]
            for c in range(self.cols)
            for r in range(self.rows)
        )
        return FieldMatrix(self.cols, self.rows, flat, self.modulus)


# -- elimination core -----------------------------------------------------


def _rref(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns).

    Pivoting picks the first row with a nonzero entry in the current
    column, which makes the reduction fully deterministic.
    """
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        sel = -1
        for i in range(r, len(rows)):
            if rows[i][c] % p != 0:
                sel = i
                break
        if sel < 0:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p != 0:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


# -- public operations ------------------------------------------------------


def mat_add(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    return a + b


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    return a @ b


def rank(a: FieldMatrix) -> int:
    rows = a.to_rows()
    _, pivots = _rref(rows, a.modulus.p)
    return len(pivots)


def inverse(a: FieldMatrix) -> FieldMatrix:
    """Inverse via Gauss-Jordan on [A | I]; raises SingularMatrixError."""
    if a.rows != a.cols:
        raise SingularMatrixError(f"non-square matrix {a.rows}x{a.cols}")
    n = a.rows
    p = a.modulus.p
    aug = [list(a.row(i)) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    aug, pivots = _rref(aug, p)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return FieldMatrix.from_rows([row[n:] for row in aug], a.modulus)


def solve_right(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix | None:
    """One exact solution X of A X = B, or None when inconsistent.

    Free variables are set to zero, so the result is deterministic.
    """
    a._require_same_field(b)
    if a.rows != b.rows:
        raise ValueError("row mismatch between A and B")
    p = a.modulus.p
    na = a.cols
    aug = [list(a.row(i)) + list(b.row(i)) for i in range(a.rows)]
    aug, pivots = _rref(aug, p)
    for c in pivots:
        if c >= na:
            return None
    flat = [0] * (na * b.cols)
    for r, c in enumerate(pivots):
        for j in range(b.cols):
            flat[c * b.cols + j] = aug[r][na + j]
    return FieldMatrix(na, b.cols, tuple(flat), a.modulus)


def block_compose(blocks: Sequence[Sequence[FieldMatrix]]) -> FieldMatrix:
    """Assemble a grid of blocks into one matrix.

    Block heights must agree along each grid row and widths along each
    grid column, and every block must share one modulus.
    """
    if not blocks or not blocks[0]:
        raise ValueError("empty block grid")
    mod = blocks[0][0].modulus
    heights = [row[0].rows for row in blocks]
    widths = [blk.cols for blk in blocks[0]]
    for i, row in enumerate(blocks):
        if len(row) != len(widths):
            raise ValueError("ragged block grid")
        for j, blk in enumerate(row):
            if blk.modulus != mod:
                raise ValueError("mixed moduli in block grid")
            if blk.rows != heights[i] or blk.cols != widths[j]:
                raise ValueError(
                    f"block ({i},{j}) has shape {blk.rows}x{blk.cols}, "
                    f"expected {heights[i]}x{widths[j]}"
                )
    out_rows: list[list[int]] = []
    for i, row in enumerate(blocks):
        for r in range(heights[i]):
            line: list[int] = []
            for blk in row:
                line.extend(blk.row(r))
            out_rows.append(line)
    return FieldMatrix.from_rows(out_rows, mod)


def block_identity_check(
    a_blocks: Sequence[FieldMatrix], b_blocks: Sequence[FieldMatrix]
) -> bool:
    """True iff A_i B_j = I for i = j and A_i B_j = 0 for i != j.

    The A_i must be d x dn and the B_j dn x d with n the number of
    blocks on each side; stacking the A_i over the B_j then yields a
    two-sided identity, so both stacks are invertible.
    """
    if not a_blocks or len(a_blocks) != len(b_blocks):
        raise ValueError("need equally many A and B blocks")
    n = len(a_blocks)
    d = a_blocks[0].rows
    mod = a_blocks[0].modulus
    for blk in a_blocks:
        if blk.modulus != mod or blk.rows != d or blk.cols != d * n:
            raise ValueError("A blocks must all be d x dn over one field")
    for blk in b_blocks:
        if blk.modulus != mod or blk.rows != d * n or blk.cols != d:
            raise ValueError("B blocks must all be dn x d over one field")
    ident = FieldMatrix.identity(d, mod)
    for i, a in enumerate(a_blocks):
        for j, b in enumerate(b_blocks):
            prod = a @ b
            if i == j:
                if prod != ident:
                    return False
            elif not prod.is_zero:
                return False
    return True
