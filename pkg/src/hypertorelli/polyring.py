"""Graded polynomial ring in ``nvars`` variables with dense homogeneous components.

Every matrix in the package indexes its columns by :func:`monomial_basis`:
degree-``k`` exponent vectors in descending lexicographic order, so
``x0^k`` comes first and ``x_{nvars-1}^k`` last.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .exact_arith import FieldConfig, FieldError, Matrix

__all__ = [
    "PolyParseError",
    "Polynomial",
    "HypersurfaceSpec",
    "monomial_basis",
    "monomial_count",
    "monomial_index",
    "parse_poly",
    "format_poly",
    "partial_derivative",
    "multiplication_matrix",
    "derivative_matrix",
    "fermat",
]


class PolyParseError(ValueError):
    """Polynomial text could not be parsed; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def monomial_count(nvars: int, k: int) -> int:
    if k < 0:
        return 0
    return comb(k + nvars - 1, nvars - 1)


@lru_cache(maxsize=None)
def monomial_basis(nvars: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree ``k``, x0 highest, lex descending."""
    if nvars < 1:
        raise ValueError("nvars must be positive")
    if k < 0:
        return ()

    def rec(nv: int, deg: int):
        if nv == 1:
            yield (deg,)
            return
        for e in range(deg, -1, -1):
            for rest in rec(nv - 1, deg - e):
                yield (e,) + rest

    return tuple(rec(nvars, k))


@lru_cache(maxsize=None)
def _index_map(nvars: int, k: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomial_basis(nvars, k))}


@lru_cache(maxsize=None)
def _exponent_array(nvars: int, k: int) -> np.ndarray:
    arr = np.array(monomial_basis(nvars, k), dtype=np.int64).reshape(-1, nvars)
    arr.setflags(write=False)
    return arr


def monomial_index(exps: tuple[int, ...]) -> int:
    return _index_map(len(exps), sum(exps))[tuple(exps)]


@lru_cache(maxsize=None)
def _shift_index(nvars: int, k: int, j: int) -> np.ndarray:
    """Index of x_j * m in degree k+1 for each degree-k monomial m."""
    target = _index_map(nvars, k + 1)
    out = np.empty(monomial_count(nvars, k), dtype=np.int64)
    for i, m in enumerate(monomial_basis(nvars, k)):
        mm = list(m)
        mm[j] += 1
        out[i] = target[tuple(mm)]
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Polynomial:
    """A homogeneous polynomial stored as a dense coefficient tuple."""

    nvars: int
    degree: int
    coeffs: tuple
    field: FieldConfig

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        if len(self.coeffs) != monomial_count(self.nvars, self.degree):
            raise ValueError(
                f"expected {monomial_count(self.nvars, self.degree)} coefficients, got {len(self.coeffs)}"
            )
        object.__setattr__(self, "coeffs", tuple(self.field.element(c) for c in self.coeffs))

    @classmethod
    def zero(cls, nvars: int, degree: int, field: FieldConfig) -> "Polynomial":
        return cls(nvars, degree, (field.zero,) * monomial_count(nvars, degree), field)

    @classmethod
    def from_terms(cls, terms: dict, nvars: int, field: FieldConfig, degree: int | None = None) -> "Polynomial":
        """Build from ``{exponent tuple: coefficient}``."""
        degs = {sum(e) for e in terms}
        if degree is None:
            if len(degs) != 1:
                raise ValueError("cannot infer degree" if not degs else "terms are not homogeneous")
            degree = degs.pop()
        elif degs - {degree}:
            raise ValueError("terms are not homogeneous of the requested degree")
        coeffs = [field.zero] * monomial_count(nvars, degree)
        idx = _index_map(nvars, degree)
        for e, c in terms.items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length")
            coeffs[idx[tuple(e)]] = field.element(coeffs[idx[tuple(e)]] + field.element(c))
        return cls(nvars, degree, tuple(coeffs), field)

    @classmethod
    def from_vector(cls, vec, nvars: int, degree: int, field: FieldConfig) -> "Polynomial":
        return cls(nvars, degree, tuple(field.element(c) for c in vec), field)

    def vector(self) -> np.ndarray:
        return self.field.array(list(self.coeffs)) if self.coeffs else self.field.zeros((0,))

    def terms(self) -> dict[tuple[int, ...], object]:
        basis = monomial_basis(self.nvars, self.degree)
        return {basis[i]: c for i, c in enumerate(self.coeffs) if c != 0}

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _check(self, other: "Polynomial") -> None:
        if self.field != other.field:
            raise FieldError(f"field mismatch: {self.field} vs {other.field}")
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add polynomials of different degrees")
        return Polynomial(self.nvars, self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.field)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = self.field.element(c)
        return Polynomial(self.nvars, self.degree, tuple(c * a for a in self.coeffs), self.field)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out: dict[tuple[int, ...], object] = {}
        for e1, c1 in self.terms().items():
            for e2, c2 in other.terms().items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial.from_terms(out, self.nvars, self.field, degree=self.degree + other.degree)

    def permute(self, perm: tuple[int, ...]) -> "Polynomial":
        """Substitute x_i -> x_{perm[i]}."""
        out = {}
        for e, c in self.terms().items():
            new = [0] * self.nvars
            for i, ei in enumerate(e):
                new[perm[i]] += ei
            out[tuple(new)] = c
        return Polynomial.from_terms(out, self.nvars, self.field, degree=self.degree)

    def __str__(self) -> str:
        return format_poly(self)


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < p.nvars:
        raise IndexError(f"variable index {i} out of range")
    if p.degree == 0:
        return Polynomial.zero(p.nvars, 0, p.field)
    out = {}
    for e, c in p.terms().items():
        if e[i]:
            ee = list(e)
            ee[i] -= 1
            out[tuple(ee)] = c * e[i]
    return Polynomial.from_terms(out, p.nvars, p.field, degree=p.degree - 1)


def multiplication_matrix(g: Polynomial, k: int) -> Matrix:
    """Matrix of ``h -> g*h`` from degree ``k`` to degree ``k + deg g``."""
    return Matrix(multiplication_array(g, k), g.field)


def multiplication_array(g: Polynomial, k: int) -> np.ndarray:
    field = g.field
    nvars = g.nvars
    rows = monomial_count(nvars, k + g.degree)
    cols = monomial_count(nvars, k)
    out = field.zeros((rows, cols))
    if cols == 0:
        return out
    src = _exponent_array(nvars, k)
    target = _index_map(nvars, k + g.degree)
    col_idx = np.arange(cols)
    for e, c in g.terms().items():
        shifted = src + np.array(e, dtype=np.int64)
        row_idx = np.fromiter((target[tuple(r)] for r in shifted.tolist()), dtype=np.int64, count=cols)
        if field.is_prime:
            out[row_idx, col_idx] = (out[row_idx, col_idx] + int(c)) % field.prime
        else:
            out[row_idx, col_idx] = out[row_idx, col_idx] + c
    return out


def derivative_array(nvars: int, k: int, i: int, field: FieldConfig) -> np.ndarray:
    """Matrix of d/dx_i from degree ``k`` to degree ``k - 1``."""
    out = field.zeros((monomial_count(nvars, k - 1), monomial_count(nvars, k)))
    if k == 0:
        return out
    target = _index_map(nvars, k - 1)
    for col, e in enumerate(monomial_basis(nvars, k)):
        if e[i]:
            ee = list(e)
            ee[i] -= 1
            out[target[tuple(ee)], col] = field.element(e[i])
    return out


def derivative_matrix(nvars: int, k: int, i: int, field: FieldConfig) -> Matrix:
    return Matrix(derivative_array(nvars, k, i, field), field)


def fermat(nvars: int, d: int, field: FieldConfig, weights=None) -> Polynomial:
    """sum_i w_i x_i^d (all weights 1 by default)."""
    weights = weights or [1] * nvars
    terms = {}
    for i, w in enumerate(weights):
        e = [0] * nvars
        e[i] = d
        terms[tuple(e)] = w
    return Polynomial.from_terms(terms, nvars, field, degree=d)


# --- text format --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<var>x(?P<idx>\d+)(?:\s*\^\s*(?P<exp>\d+))?)|(?P<op>[-+*−]))")


def parse_poly(text: str, nvars: int, field: FieldConfig, degree: int | None = None) -> Polynomial:
    """Parse e.g. ``"x0^2*x1 - 3/2*x2^3"``; terms must share one degree."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolyParseError(f"unexpected character {text[start]!r}", start)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("num") is not None:
            tokens.append(("num", m.group("num").replace(" ", ""), start))
        elif m.group("var") is not None:
            tokens.append(("var", (int(m.group("idx")), int(m.group("exp") or 1)), start))
        else:
            op = m.group("op")
            tokens.append(("op", "-" if op == "−" else op, start))
        pos = m.end()

    terms: dict[tuple[int, ...], object] = {}
    term_degrees: list[tuple[int, int]] = []
    i = 0
    if not tokens:
        raise PolyParseError("empty polynomial", 0)
    while i < len(tokens):
        sign = 1
        term_pos = tokens[i][2]
        if tokens[i][0] == "op" and tokens[i][1] in "+-":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif term_degrees:
            raise PolyParseError("expected '+' or '-'", tokens[i][2])
        if i >= len(tokens):
            raise PolyParseError("dangling sign", len(text))
        coeff = Fraction(sign)
        exps = [0] * nvars
        expect_factor = True
        seen_factor = False
        while i < len(tokens) and expect_factor:
            kind, val, tpos = tokens[i]
            if kind == "num":
                if "/" in val:
                    a, b = val.split("/")
                    if int(b) == 0:
                        raise PolyParseError("zero denominator", tpos)
                    coeff *= Fraction(int(a), int(b))
                else:
                    coeff *= int(val)
            elif kind == "var":
                idx, e = val
                if idx >= nvars:
                    raise PolyParseError(f"unknown variable x{idx}", tpos)
                exps[idx] += e
            else:
                raise PolyParseError(f"unexpected {val!r}", tpos)
            seen_factor = True
            i += 1
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if i >= len(tokens):
                    raise PolyParseError("dangling '*'", len(text))
            else:
                expect_factor = False
        if not seen_factor:
            raise PolyParseError("missing term", term_pos)
        key = tuple(exps)
        term_degrees.append((sum(exps), term_pos))
        try:
            c = field.element(coeff)
        except ZeroDivisionError as exc:
            raise PolyParseError(str(exc), term_pos) from None
        terms[key] = field.element(terms.get(key, field.zero) + c)

    degs = {dd for dd, _ in term_degrees}
    if len(degs) > 1:
        first = term_degrees[0][0]
        bad = next(p for dd, p in term_degrees if dd != first)
        raise PolyParseError("polynomial is not homogeneous", bad)
    inferred = degs.pop()
    if all(c == 0 for c in terms.values()) and list(terms) == [(0,) * nvars]:
        # a bare "0": the degree must come from the caller
        if degree is None:
            raise PolyParseError("zero polynomial needs an explicit degree", 0)
        return Polynomial.zero(nvars, degree, field)
    if degree is not None and degree != inferred:
        raise PolyParseError(f"expected degree {degree}, found {inferred}", 0)
    return Polynomial.from_terms(terms, nvars, field, degree=inferred)


def format_poly(p: Polynomial) -> str:
    parts = []
    for e, c in p.terms().items():
        mono = "*".join(f"x{i}" if a == 1 else f"x{i}^{a}" for i, a in enumerate(e) if a)
        neg = False
        if not p.field.is_prime and c < 0:
            neg, c = True, -c
        cs = p.field.format_scalar(c)
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if parts:
            parts.append(("- " if neg else "+ ") + body)
        else:
            parts.append(("-" if neg else "") + body)
    return " ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HypersurfaceSpec:
    """A degree-``d`` hypersurface ``f = 0`` in projective space of dimension ``n+1``.

    ``strict`` enforces the prime-size invariant of :meth:`FieldConfig.check_hypersurface`;
    relaxed specs still require the characteristic not to divide ``d``.
    """

    n: int
    d: int
    f: Polynomial
    strict: bool = True

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree must be at least 1")
        if self.n < 0:
            raise ValueError("dimension must be nonnegative")
        if self.f.nvars != self.n + 2:
            raise ValueError(f"expected {self.n + 2} variables, got {self.f.nvars}")
        if self.f.degree != self.d:
            raise ValueError(f"polynomial has degree {self.f.degree}, expected {self.d}")
        if self.strict:
            self.field.check_hypersurface(self.d, self.n)
        elif self.field.is_prime and self.d % self.field.prime == 0:
            raise FieldError(f"characteristic {self.field.prime} divides the degree {self.d}")

    @property
    def field(self) -> FieldConfig:
        return self.f.field

    @property
    def nvars(self) -> int:
        return self.n + 2

    @property
    def fano(self) -> bool:
        return self.d < self.n + 2

    @classmethod
    def parse(cls, text: str, n: int, d: int | None, field: FieldConfig, strict: bool = True) -> "HypersurfaceSpec":
        f = parse_poly(text, n + 2, field, degree=d)
        return cls(n, f.degree, f, strict=strict)

    @classmethod
    def fermat(cls, n: int, d: int, field: FieldConfig, weights=None) -> "HypersurfaceSpec":
        return cls(n, d, fermat(n + 2, d, field, weights))
