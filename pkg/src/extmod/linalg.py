"""Exact linear algebra over the rationals.

Two pieces live here: a small immutable dense ``Matrix`` used for the
arrow and vertex maps of representations, and ``Echelon``, an incremental
sparse row-echelon engine used for every kernel and rank computation
(Hom spaces, Ext spaces, injectivity checks).  Rows of ``Echelon`` are
dicts ``{column: Fraction}``; the pivot of a row is its leftmost nonzero
column and pivots are normalized to 1, so the reduced form and every
kernel basis derived from it are canonical.
"""

from __future__ import annotations

from fractions import Fraction
from heapq import heapify, heappop, heappush
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def to_field(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ("p/q", "p") into the field."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not field elements")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Canonical string form: gcd-reduced, positive denominator, "p" when q = 1."""
    return str(Fraction(value))


class Matrix:
    """Immutable dense matrix with exact entries; empty shapes are allowed."""

    __slots__ = ("nrows", "ncols", "rows", "_hash", "_col_nz", "_row_nz")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Sequence] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = tuple((ZERO,) * ncols for _ in range(nrows))
        else:
            if len(rows) != nrows or any(len(r) != ncols for r in rows):
                raise ValueError(f"rows do not match shape {nrows}x{ncols}")
            self.rows = tuple(tuple(to_field(x) for x in r) for r in rows)
        self._hash = None
        self._col_nz = None
        self._row_nz = None

    # constructors

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix; block rows must agree in height, block columns in width."""
        if not blocks or not blocks[0]:
            raise ValueError("empty block layout")
        widths = [b.ncols for b in blocks[0]]
        rows: list[list[Fraction]] = []
        for brow in blocks:
            if [b.ncols for b in brow] != widths:
                raise ValueError("block column widths disagree")
            height = brow[0].nrows
            if any(b.nrows != height for b in brow):
                raise ValueError("block row heights disagree")
            for r in range(height):
                line: list[Fraction] = []
                for b in brow:
                    line.extend(b.rows[r])
                rows.append(line)
        return cls(len(rows), sum(widths), rows)

    @classmethod
    def vstack(cls, mats: Sequence["Matrix"]) -> "Matrix":
        return cls.block([[m] for m in mats])

    @classmethod
    def hstack(cls, mats: Sequence["Matrix"]) -> "Matrix":
        return cls.block([list(mats)])

    @classmethod
    def diag(cls, mats: Sequence["Matrix"]) -> "Matrix":
        layout = []
        for i, mi in enumerate(mats):
            layout.append([mi if i == j else cls.zeros(mi.nrows, mj.ncols) for j, mj in enumerate(mats)])
        return cls.block(layout)

    # basic protocol

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        r, c = idx
        return self.rows[r][c]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    # arithmetic

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        cols = other.row_nonzeros()
        for row in self.rows:
            acc = [ZERO] * other.ncols
            for k, a in enumerate(row):
                if a:
                    for j, b in cols[k]:
                        acc[j] += a * b
            out.append(acc)
        return Matrix(self.nrows, other.ncols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix(self.nrows, self.ncols,
                      [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def __rmul__(self, scalar) -> "Matrix":
        s = to_field(scalar)
        return Matrix(self.nrows, self.ncols, [[s * a for a in r] for r in self.rows])

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, [list(c) for c in zip(*self.rows)] if self.nrows else
                      [[] for _ in range(self.ncols)])

    # queries

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def entries(self) -> Iterable[Fraction]:
        for r in self.rows:
            yield from r

    def row_nonzeros(self) -> list[list[tuple[int, Fraction]]]:
        if self._row_nz is None:
            self._row_nz = [[(j, a) for j, a in enumerate(r) if a] for r in self.rows]
        return self._row_nz

    def col_nonzeros(self) -> list[list[tuple[int, Fraction]]]:
        if self._col_nz is None:
            cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.ncols)]
            for i, r in enumerate(self.rows):
                for j, a in enumerate(r):
                    if a:
                        cols[j].append((i, a))
            self._col_nz = cols
        return self._col_nz

    def rank(self) -> int:
        ech = Echelon()
        for r in self.row_nonzeros():
            ech.add_row(dict(r))
        return ech.rank

    def kernel(self) -> list[list[Fraction]]:
        """Canonical basis of the right null space, one vector per free column."""
        ech = Echelon()
        for r in self.row_nonzeros():
            ech.add_row(dict(r))
        return ech.kernel_basis(self.ncols)

    def is_injective(self) -> bool:
        return self.rank() == self.ncols

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.ncols

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("only square matrices have inverses")
        work = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if work[r][col]), None)
            if piv is None:
                raise ValueError("matrix is singular")
            work[col], work[piv] = work[piv], work[col]
            inv = 1 / work[col][col]
            work[col] = [x * inv for x in work[col]]
            for r in range(n):
                if r != col and work[r][col]:
                    f = work[r][col]
                    work[r] = [x - f * y for x, y in zip(work[r], work[col])]
        return Matrix(n, n, [r[n:] for r in work])


class Echelon:
    """Incremental sparse row-echelon form over the rationals.

    ``add_row`` reduces a new row against the stored pivots and keeps it if
    anything survives.  Reduction visits pivot columns in increasing order
    through a heap, which is valid because a stored row only has entries at
    or to the right of its own pivot.
    """

    __slots__ = ("pivots",)

    def __init__(self):
        self.pivots: dict[int, dict[int, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        pivots = self.pivots
        row = {c: v for c, v in row.items() if v}
        heap = [c for c in row if c in pivots]
        heapify(heap)
        while heap:
            c = heappop(heap)
            coef = row.get(c)
            if coef is None:
                continue
            for k, v in pivots[c].items():
                nv = row.get(k, ZERO) - coef * v
                if nv:
                    if k not in row and k in pivots:
                        heappush(heap, k)
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add_row(self, row: dict[int, Fraction]) -> bool:
        """Insert a row; return True if it was independent of the stored rows."""
        row = self.reduce(row)
        if not row:
            return False
        lead = min(row)
        inv = 1 / row[lead]
        if inv != 1:
            row = {c: v * inv for c, v in row.items()}
        self.pivots[lead] = row
        return True

    def rref(self) -> dict[int, dict[int, Fraction]]:
        """Fully reduced rows keyed by pivot column."""
        done: dict[int, dict[int, Fraction]] = {}
        for p in sorted(self.pivots, reverse=True):
            row = dict(self.pivots[p])
            for c in [c for c in row if c != p and c in done]:
                coef = row.pop(c)
                for k, v in done[c].items():
                    if k == c:
                        continue
                    nv = row.get(k, ZERO) - coef * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            done[p] = row
        return done

    def kernel_basis(self, ncols: int) -> list[list[Fraction]]:
        reduced = self.rref()
        free = [c for c in range(ncols) if c not in reduced]
        basis = []
        for f in free:
            vec = [ZERO] * ncols
            vec[f] = ONE
            for p, row in reduced.items():
                v = row.get(f)
                if v:
                    vec[p] = -v
            basis.append(vec)
        return basis

