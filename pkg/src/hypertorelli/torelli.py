"""Reconstruction of a hypersurface from the degree-d part of its Jacobian ideal.

``encode`` maps f to ``W = I_d(f)``.  ``decode`` inverts it by two linear
solves in fixed coordinates::

    P = {p in S^(d-1) : x_j p in W for all j}      (recover_partials)
    F = {g in S^d     : dg/dx_j in P for all j}    (integrate)

followed by a validation step that re-encodes a candidate of ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .exact_arith import FieldConfig, FieldError, Matrix, kernel_array, rref_array
from .jacobian import DomainError, is_smooth, jacobian_ring
from .polyring import (
    HypersurfaceSpec,
    Polynomial,
    derivative_array,
    monomial_basis,
    monomial_count,
    multiplication_array,
)

__all__ = [
    "Ambiguity",
    "DecodeResult",
    "EncodedHypersurface",
    "HypothesisReport",
    "WFormatError",
    "encode",
    "recover_partials",
    "integrate",
    "decode",
    "jacobian_equivalent",
    "hypothesis_check",
    "write_w",
    "read_w",
    "format_w",
    "parse_w",
]

W_MAGIC = "TORELLI-W v1"


class Ambiguity(str, Enum):
    UNIQUE = "Unique"
    POSITIVE_DIMENSIONAL_FIBER = "PositiveDimensionalFiber"
    NO_VALID_CANDIDATE = "NoValidCandidate"


def _canonical(arr: np.ndarray, field: FieldConfig, cols: int) -> Matrix:
    if arr.shape[0] == 0:
        return Matrix(field.zeros((0, cols)), field)
    red, _ = rref_array(arr, field)
    return Matrix(red, field)


@dataclass(frozen=True, eq=False)
class EncodedHypersurface:
    """A degree-d subspace of S^d, stored as its reduced echelon basis."""

    d: int
    n: int
    field: FieldConfig
    W: Matrix

    def __post_init__(self):
        cols = monomial_count(self.n + 2, self.d)
        if self.W.cols != cols:
            raise ValueError(f"W must have {cols} columns, got {self.W.cols}")
        if self.W.field != self.field:
            raise FieldError("W lives over a different field")
        object.__setattr__(self, "W", _canonical(self.W.entries, self.field, cols))

    @property
    def nvars(self) -> int:
        return self.n + 2

    @property
    def dim(self) -> int:
        return self.W.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedHypersurface):
            return NotImplemented
        return (self.d, self.n, self.field) == (other.d, other.n, other.field) and self.W == other.W

    def __hash__(self) -> int:
        return hash((self.d, self.n, self.field, self.W))


@dataclass(frozen=True, eq=False)
class DecodeResult:
    partials_space: Matrix
    candidate_space: Matrix
    representative: Polynomial | None
    ambiguity: Ambiguity
    attempts: int = 0

    @property
    def validated(self) -> bool:
        return self.representative is not None


def encode(spec: HypersurfaceSpec) -> EncodedHypersurface:
    if not is_smooth(spec):
        raise DomainError("hypersurface is singular")
    W = jacobian_ring(spec).ideal_basis(spec.d)
    return EncodedHypersurface(spec.d, spec.n, spec.field, W)


def _quotient_map(basis: Matrix) -> np.ndarray:
    """Matrix whose kernel is exactly the row span of an echelon ``basis``."""
    field = basis.field
    red, pivots = rref_array(basis.entries, field) if basis.rows else (basis.entries, ())
    cols = basis.cols
    free = [j for j in range(cols) if j not in set(pivots)]
    out = field.zeros((len(free), cols))
    for r, j in enumerate(free):
        out[r, j] = field.one
    if pivots:
        block = red[:, free].T
        out[:, list(pivots)] = field.reduce(-block) if field.is_prime else -block
    return out


def recover_partials(enc: EncodedHypersurface) -> Matrix:
    field, nv, d = enc.field, enc.nvars, enc.d
    quot = _quotient_map(enc.W)
    cols = monomial_count(nv, d - 1)
    if quot.shape[0] == 0:
        return Matrix(field.identity(cols), field)
    blocks = []
    for j in range(nv):
        e = [0] * nv
        e[j] = 1
        xj = Polynomial.from_terms({tuple(e): 1}, nv, field, degree=1)
        blocks.append(field.matmul(quot, multiplication_array(xj, d - 1)))
    return _canonical(kernel_array(np.vstack(blocks), field), field, cols)


def integrate(P: Matrix, nvars: int, d: int) -> Matrix:
    """All degree-d forms whose partial derivatives lie in the row span of P."""
    field = P.field
    cols = monomial_count(nvars, d)
    if P.cols != monomial_count(nvars, d - 1):
        raise ValueError("P must be a subspace of S^(d-1)")
    quot = _quotient_map(P)
    if quot.shape[0] == 0:
        return Matrix(field.identity(cols), field)
    blocks = [field.matmul(quot, derivative_array(nvars, d, j, field)) for j in range(nvars)]
    return _canonical(kernel_array(np.vstack(blocks), field), field, cols)


def _validate(enc: EncodedHypersurface, g: Polynomial) -> bool:
    if g.is_zero():
        return False
    try:
        spec = HypersurfaceSpec(enc.n, enc.d, g, strict=False)
    except (ValueError, FieldError):
        return False
    if not is_smooth(spec):
        return False
    return encode(spec) == enc


def _random_combination(F: Matrix, rng: np.random.Generator) -> np.ndarray:
    field = F.field
    k = F.rows
    if field.is_prime:
        coeffs = field.array([int(x) for x in rng.integers(0, field.prime, size=k)])
    else:
        coeffs = field.array([int(x) for x in rng.integers(-10, 11, size=k)])
    return field.matmul(coeffs.reshape(1, -1), F.entries).ravel()


def decode(
    enc: EncodedHypersurface,
    rng: np.random.Generator | None = None,
    attempts: int = 64,
) -> DecodeResult:
    """Recover a defining equation; never raises on bad input, see ``ambiguity``."""
    P = recover_partials(enc)
    F = integrate(P, enc.nvars, enc.d)
    field = enc.field

    def poly(vec):
        return Polynomial.from_vector(vec, enc.nvars, enc.d, field)

    if F.rows == 0:
        return DecodeResult(P, F, None, Ambiguity.NO_VALID_CANDIDATE)
    if F.rows == 1:
        g = poly(F.entries[0])
        ok = _validate(enc, g)
        return DecodeResult(P, F, g if ok else None,
                            Ambiguity.UNIQUE if ok else Ambiguity.NO_VALID_CANDIDATE, 1)
    rng = rng if rng is not None else np.random.default_rng(0)
    for t in range(1, attempts + 1):
        g = poly(_random_combination(F, rng))
        if _validate(enc, g):
            return DecodeResult(P, F, g, Ambiguity.POSITIVE_DIMENSIONAL_FIBER, t)
    return DecodeResult(P, F, None, Ambiguity.NO_VALID_CANDIDATE, attempts)


def jacobian_equivalent(spec1: HypersurfaceSpec, spec2: HypersurfaceSpec) -> bool:
    """Fixed-coordinate test: equal degree-d Jacobian ideal components."""
    if (spec1.d, spec1.n, spec1.field) != (spec2.d, spec2.n, spec2.field):
        raise FieldError("specs live in different (d, n, field) contexts")
    return encode(spec1) == encode(spec2)


@dataclass(frozen=True)
class HypothesisReport:
    fano: bool
    eligible: bool
    reason: str


def hypothesis_check(d: int, n: int) -> HypothesisReport:
    fano = 1 <= d < n + 2
    if not fano:
        return HypothesisReport(False, False, "not Fano: need d < n + 2")
    if d >= 4:
        return HypothesisReport(True, True, "d >= 4")
    if d == 3 and n > 3:
        return HypothesisReport(True, True, "d = 3 and n > 3")
    if d == 3 and n == 3:
        return HypothesisReport(True, False, "cubic threefold case excluded")
    if d == 3:
        return HypothesisReport(True, False, "d = 3 needs n > 3")
    return HypothesisReport(True, False, "degree below 3")


# --- TORELLI-W v1 files -------------------------------------------------------


class WFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_w(enc: EncodedHypersurface) -> str:
    field = enc.field
    lines = [f"{W_MAGIC} d={enc.d} n={enc.n} field={field.tag}", f"{enc.W.rows} {enc.W.cols}"]
    for row in enc.W.entries:
        lines.append(" ".join(field.format_scalar(x) for x in row))
    return "\n".join(lines) + "\n"


def _header_value(token: str, key: str, line: int) -> str:
    prefix = key + "="
    if not token.startswith(prefix):
        raise WFormatError(f"expected '{prefix}...', got {token!r}", line)
    return token[len(prefix):]


def parse_w(text: str) -> EncodedHypersurface:
    lines = text.splitlines()
    if not lines:
        raise WFormatError("empty file", 1)
    head = lines[0].split()
    if len(head) != 5 or " ".join(head[:2]) != W_MAGIC:
        raise WFormatError(f"header must start with '{W_MAGIC}' and give d, n, field", 1)
    try:
        d = int(_header_value(head[2], "d", 1))
        n = int(_header_value(head[3], "n", 1))
    except ValueError as exc:
        if isinstance(exc, WFormatError):
            raise
        raise WFormatError("d and n must be integers", 1) from None
    try:
        field = FieldConfig.from_tag(_header_value(head[4], "field", 1))
    except FieldError as exc:
        raise WFormatError(str(exc), 1) from None
    if d < 1 or n < 0:
        raise WFormatError("need d >= 1 and n >= 0", 1)
    if len(lines) < 2:
        raise WFormatError("missing '<rows> <cols>' line", 2)
    try:
        rows, cols = (int(t) for t in lines[1].split())
    except ValueError:
        raise WFormatError("expected '<rows> <cols>'", 2) from None
    expected = monomial_count(n + 2, d)
    if cols != expected:
        raise WFormatError(f"cols must be {expected} for d={d}, n={n}", 2)
    body = lines[2:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != rows:
        raise WFormatError(f"expected {rows} matrix rows, found {len(body)}", 3 + min(rows, len(body)))
    values = []
    for i, line in enumerate(body):
        lineno = i + 3
        tokens = line.split()
        if len(tokens) != cols:
            raise WFormatError(f"expected {cols} entries, found {len(tokens)}", lineno)
        row = []
        for tok in tokens:
            if field.is_prime and not (tok.isdigit() and int(tok) < field.prime):
                raise WFormatError(f"entry {tok!r} is not a residue in [0, {field.prime})", lineno)
            try:
                row.append(field.parse_scalar(tok))
            except (ValueError, ZeroDivisionError):
                raise WFormatError(f"bad entry {tok!r}", lineno) from None
        values.append(row)
    W = Matrix(field.array(values).reshape(rows, cols), field)
    return EncodedHypersurface(d, n, field, W)


def write_w(enc: EncodedHypersurface, path: str | Path) -> None:
    Path(path).write_text(format_w(enc))


def read_w(path: str | Path) -> EncodedHypersurface:
    return parse_w(Path(path).read_text())


def encoded_monomials(enc: EncodedHypersurface) -> tuple[tuple[int, ...], ...]:
    """Column labels of W."""
    return monomial_basis(enc.nvars, enc.d)
