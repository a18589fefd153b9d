"""Exact scalars and dense exact linear algebra over Q and prime fields.

Matrices are stored as numpy arrays: ``int64`` holding canonical residues in
``[0, p)`` for a prime field, ``object`` holding :class:`fractions.Fraction`
for the rationals.  Row reduction is delegated to FLINT (``nmod_mat`` and
``fmpq_mat``); everything else is plain numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint
import numpy as np

__all__ = [
    "FieldConfig",
    "FieldError",
    "Matrix",
    "AffineSolution",
    "rank",
    "rref",
    "kernel_basis",
    "rowspace_equal",
    "solve_linear",
]

_INT64_MAX = 2**63 - 1
_FLOAT_EXACT = 2**53


class FieldError(ValueError):
    """Invalid field configuration or mixed-field operation."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return flint.fmpz(p).is_prime()


@dataclass(frozen=True)
class FieldConfig:
    """Either the rationals or a prime field ``F_p``."""

    kind: str
    prime: int | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.prime is not None:
                raise FieldError("rational field carries no prime")
        elif self.kind == "prime":
            if self.prime is None or not _is_prime(int(self.prime)):
                raise FieldError(f"{self.prime!r} is not a prime")
            object.__setattr__(self, "prime", int(self.prime))
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> "FieldConfig":
        return cls("rational")

    @classmethod
    def prime_field(cls, p: int) -> "FieldConfig":
        return cls("prime", p)

    @classmethod
    def from_tag(cls, tag: str) -> "FieldConfig":
        """Parse ``q`` or ``p:PRIME``."""
        tag = tag.strip()
        if tag == "q":
            return cls.rational()
        if tag.startswith("p:"):
            try:
                p = int(tag[2:])
            except ValueError:
                raise FieldError(f"malformed field tag {tag!r}") from None
            return cls.prime_field(p)
        raise FieldError(f"malformed field tag {tag!r}")

    @property
    def tag(self) -> str:
        return "q" if self.kind == "rational" else f"p:{self.prime}"

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    @property
    def dtype(self):
        return np.int64 if self.is_prime else object

    def __str__(self) -> str:
        return "Q" if not self.is_prime else f"F_{self.prime}"

    # scalars

    def element(self, x) -> int | Fraction:
        """Canonical representative of ``x`` (an int, Fraction or residue)."""
        if self.is_prime:
            if isinstance(x, Fraction):
                num = x.numerator % self.prime
                den = x.denominator % self.prime
                if den == 0:
                    raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {self.prime}")
                return num * pow(den, -1, self.prime) % self.prime
            return int(x) % self.prime
        if isinstance(x, Fraction):
            return x
        return Fraction(int(x))

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.is_prime:
            return pow(int(x), -1, self.prime)
        return 1 / x

    def format_scalar(self, x) -> str:
        if self.is_prime:
            return str(int(x))
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse_scalar(self, text: str):
        text = text.strip()
        if "/" in text:
            a, b = text.split("/", 1)
            return self.element(Fraction(int(a), int(b)))
        return self.element(int(text))

    # arrays

    def array(self, values) -> np.ndarray:
        """Canonical numpy array from nested sequences of scalars."""
        if self.is_prime:
            arr = np.array(values, dtype=object)
            if arr.size == 0:
                return np.zeros(arr.shape, dtype=np.int64)
            arr = np.vectorize(self.element, otypes=[object])(arr)
            return arr.astype(np.int64)
        arr = np.array(values, dtype=object)
        if arr.size:
            arr = np.vectorize(self.element, otypes=[object])(arr)
        return arr

    def zeros(self, shape) -> np.ndarray:
        if self.is_prime:
            return np.zeros(shape, dtype=np.int64)
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        return arr

    def identity(self, n: int) -> np.ndarray:
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = self.one
        return arr

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.is_prime:
            return np.mod(arr, self.prime)
        return arr

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product of two canonical arrays."""
        if not self.is_prime:
            if a.shape[1] == 0:
                return self.zeros((a.shape[0], b.shape[1]))
            return a.dot(b)
        p = self.prime
        inner = a.shape[1]
        if inner == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        bound = (p - 1) ** 2
        # float64 BLAS is exact while every partial sum stays below 2^53
        fchunk = _FLOAT_EXACT // max(bound, 1)
        if fchunk >= 1:
            af = a.astype(np.float64)
            bf = b.astype(np.float64)
            out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
            for start in range(0, inner, fchunk):
                part = af[:, start:start + fchunk] @ bf[start:start + fchunk]
                out = np.mod(out + np.mod(part.astype(np.int64), p), p)
            return out
        if bound > _INT64_MAX:
            prod = a.astype(object).dot(b.astype(object))
            return np.mod(prod, p).astype(np.int64)
        chunk = max(1, _INT64_MAX // bound)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for start in range(0, inner, chunk):
            out = np.mod(out + np.mod(a[:, start:start + chunk] @ b[start:start + chunk], p), p)
        return out

    def check_hypersurface(self, d: int, n: int) -> None:
        """Reject primes too small for degree-``d`` hypersurface work in ``n+2`` variables."""
        if self.is_prime and self.prime <= 2 * (d - 1) * (n + 2):
            raise FieldError(
                f"prime {self.prime} must exceed 2(d-1)(n+2) = {2 * (d - 1) * (n + 2)}"
            )


# --- FLINT bridge -----------------------------------------------------------


def _to_flint(arr: np.ndarray, field: FieldConfig):
    r, c = arr.shape
    if field.is_prime:
        return flint.nmod_mat(r, c, arr.ravel().tolist(), field.prime)
    return flint.fmpq_mat(r, c, [flint.fmpq(x.numerator, x.denominator) for x in arr.ravel()])


def _from_flint(mat, field: FieldConfig, nrows: int | None = None) -> np.ndarray:
    r, c = mat.nrows(), mat.ncols()
    entries = mat.entries()
    if nrows is not None:
        entries = entries[: nrows * c]
        r = nrows
    if field.is_prime:
        return np.fromiter(map(int, entries), dtype=np.int64, count=r * c).reshape(r, c)
    out = np.empty(r * c, dtype=object)
    out[:] = [Fraction(int(x.p), int(x.q)) for x in entries]
    return out.reshape(r, c)


def _rref_flint(arr: np.ndarray, field: FieldConfig) -> tuple[np.ndarray, tuple[int, ...]]:
    c = arr.shape[1]
    red, rk = _to_flint(arr, field).rref()
    rk = int(rk)
    if rk == 0:
        return field.zeros((0, c)), ()
    out = _from_flint(red, field, nrows=rk)
    nz = out != 0
    pivots = tuple(int(np.argmax(nz[i])) for i in range(rk))
    return out, pivots


def _rref_blocked(arr: np.ndarray, field: FieldConfig, chunk: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Row-reduce a tall matrix chunk by chunk against the running echelon basis.

    Rows already in the span reduce to zero with one matrix product, so only
    rows carrying new pivots reach the exact elimination.
    """
    c = arr.shape[1]
    basis, pivots = field.zeros((0, c)), []
    for start in range(0, arr.shape[0], chunk):
        block = arr[start:start + chunk]
        if pivots:
            block = field.reduce(block - field.matmul(block[:, pivots], basis))
        block = block[np.any(block != 0, axis=1)]
        if block.shape[0] == 0:
            continue
        new, new_piv = _rref_flint(block, field)
        if pivots:
            basis = field.reduce(basis - field.matmul(basis[:, list(new_piv)], new))
        basis = np.vstack([basis, new])
        pivots = pivots + list(new_piv)
        order = np.argsort(pivots, kind="stable")
        basis = basis[order]
        pivots = [pivots[i] for i in order]
        if len(pivots) == c:
            break
    return basis, tuple(pivots)


def rref_array(arr: np.ndarray, field: FieldConfig) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form, zero rows dropped, with pivot columns.

    Pivots are the first nonzero column of each row, so the result depends
    only on the row space of ``arr``.
    """
    r, c = arr.shape
    if r == 0 or c == 0:
        return field.zeros((0, c)), ()
    chunk = c // 4 + 32
    if field.is_prime and r > chunk:
        return _rref_blocked(arr, field, chunk)
    return _rref_flint(arr, field)


def rank_array(arr: np.ndarray, field: FieldConfig) -> int:
    r, c = arr.shape
    if r == 0 or c == 0:
        return 0
    return int(_to_flint(arr, field).rank())


def kernel_array(arr: np.ndarray, field: FieldConfig) -> np.ndarray:
    """Rows spanning ``{v : arr @ v = 0}``, in reduced echelon form."""
    c = arr.shape[1]
    red, pivots = rref_array(arr, field)
    free = [j for j in range(c) if j not in set(pivots)]
    basis = field.zeros((len(free), c))
    for row, j in enumerate(free):
        basis[row, j] = field.one
        for i, pc in enumerate(pivots):
            if red[i, j] != 0:
                basis[row, pc] = field.reduce(-red[i, j]) if field.is_prime else -red[i, j]
    if len(free) == 0:
        return basis
    out, _ = rref_array(basis, field)
    return out


# --- public matrix type ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Matrix:
    """Immutable dense matrix over a single field."""

    entries: np.ndarray
    field: FieldConfig

    def __post_init__(self):
        arr = self.entries
        if arr.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        if self.field.is_prime and arr.dtype != np.int64:
            arr = self.field.array(arr.tolist()) if arr.size else np.zeros(arr.shape, np.int64)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: FieldConfig, cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(field.zeros((0, cols or 0)), field)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        if cols is not None and cols != width:
            raise ValueError(f"expected {cols} columns, got {width}")
        return cls(field.array(rows), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldConfig) -> "Matrix":
        return cls(field.zeros((rows, cols)), field)

    @classmethod
    def identity(cls, n: int, field: FieldConfig) -> "Matrix":
        return cls(field.identity(n), field)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def tolist(self) -> list[list]:
        return [[self.field.element(x) for x in row] for row in self.entries]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.entries.T, self.field)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _same_field(self, other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.field.matmul(self.entries, other.entries), self.field)

    def scale(self, c) -> "Matrix":
        c = self.field.element(c)
        return Matrix(self.field.reduce(self.entries * c), self.field)

    def vstack(self, other: "Matrix") -> "Matrix":
        _same_field(self, other)
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return Matrix(np.vstack([self.entries, other.entries]) if self.rows + other.rows else self.entries, self.field)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.field, self.shape, tuple(map(tuple, self.tolist()))))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols} over {self.field})"


def _same_field(a: Matrix, b: Matrix) -> None:
    if a.field != b.field:
        raise FieldError(f"field mismatch: {a.field} vs {b.field}")


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    red, pivots = rref_array(m.entries, m.field)
    return Matrix(red, m.field), pivots


def rank(m: Matrix) -> int:
    return rank_array(m.entries, m.field)


def kernel_basis(m: Matrix) -> Matrix:
    """Right null space of ``m`` as rows in reduced echelon form."""
    return Matrix(kernel_array(m.entries, m.field), m.field)


def rowspace_equal(m1: Matrix, m2: Matrix) -> bool:
    _same_field(m1, m2)
    if m1.cols != m2.cols:
        raise ValueError(f"column mismatch: {m1.cols} vs {m2.cols}")
    r1, r2 = rank(m1), rank(m2)
    return r1 == r2 and rank(m1.vstack(m2)) == r1


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(basis)``; empty when ``particular`` is None."""

    particular: tuple | None
    basis: Matrix

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    @property
    def dimension(self) -> int:
        return -1 if self.is_empty else self.basis.rows


def solve_linear(m: Matrix, rhs: Iterable | None = None) -> Matrix | AffineSolution:
    """Solve ``m @ v = 0`` (basis returned) or ``m @ v = rhs`` (affine set returned).

    An inconsistent affine system gives an empty :class:`AffineSolution`.
    """
    if rhs is None:
        return kernel_basis(m)
    field = m.field
    b = [field.element(x) for x in rhs]
    if len(b) != m.rows:
        raise ValueError(f"rhs has length {len(b)}, expected {m.rows}")
    basis = kernel_basis(m)
    aug = np.hstack([m.entries, field.array([[x] for x in b]) if b else field.zeros((0, 1))])
    red, pivots = rref_array(aug, field)
    if m.cols in pivots:
        return AffineSolution(None, Matrix.zeros(0, m.cols, field))
    v = [field.zero] * m.cols
    for i, pc in enumerate(pivots):
        v[pc] = field.element(red[i, m.cols])
    return AffineSolution(tuple(v), basis)
