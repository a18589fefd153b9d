"""K-theoretic calculus of Fourier-Mukai kernels on X x X.

Kernels are integer combinations of two kinds of symbol::

    Box(a, b)  = O_X(a) (x) O_X(b)
    Diag(k)    = Delta_* O_X(k)

Convolution follows functor order: ``convolve(K1, K2)`` is the kernel of
"apply K1, then K2", so ``apply_kernel(convolve(K1, K2), F) ==
apply_kernel(K2, apply_kernel(K1, F))``.  With this convention the left
projection onto the orthogonal of ``O_X, ..., O_X(m)`` is
``R_m * ... * R_1 * R_0`` (convolution, leftmost applied first) where
``R_j = Diag(0) - Box(-j, j)`` is the left mutation through ``O_X(j)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from .cohomology import chi_OX, chi_polyvector

__all__ = [
    "ContextError",
    "Box",
    "Diag",
    "KClass",
    "SheafKClass",
    "box",
    "diag",
    "convolve",
    "q_class",
    "p_class",
    "beilinson_truncation_class",
    "linkage_class",
    "euler_pairing",
    "apply_kernel",
    "normalize_diag",
    "test_family",
]


class ContextError(ValueError):
    """Raised when classes from different (d, n) contexts are combined."""


@dataclass(frozen=True, order=True)
class Box:
    a: int
    b: int

    def __str__(self) -> str:
        return f"Box({self.a},{self.b})"


@dataclass(frozen=True, order=True)
class Diag:
    k: int

    def __str__(self) -> str:
        return f"Diag({self.k})"


Symbol = Box | Diag


def _sort_key(sym: Symbol) -> tuple:
    return (0, sym.a, sym.b) if isinstance(sym, Box) else (1, sym.k)


def _clean(terms: Mapping) -> dict:
    return {s: c for s, c in terms.items() if c}


def _accumulate(pairs: Iterable[tuple[object, int]]) -> dict:
    out: dict = defaultdict(int)
    for s, c in pairs:
        out[s] += c
    return _clean(out)


@dataclass(frozen=True)
class KClass:
    """Integer combination of Box/Diag symbols in a fixed (d, n) context."""

    d: int
    n: int
    terms: Mapping[Symbol, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    @property
    def context(self) -> tuple[int, int]:
        return (self.d, self.n)

    @classmethod
    def zero(cls, d: int, n: int) -> "KClass":
        return cls(d, n, {})

    def _check(self, other: "KClass") -> None:
        if not isinstance(other, KClass):
            raise TypeError("expected a KClass")
        if self.context != other.context:
            raise ContextError(f"context mismatch: {self.context} vs {other.context}")

    def __add__(self, other: "KClass") -> "KClass":
        self._check(other)
        return KClass(self.d, self.n, _accumulate([*self.terms.items(), *other.terms.items()]))

    def __neg__(self) -> "KClass":
        return KClass(self.d, self.n, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __rmul__(self, c: int) -> "KClass":
        return KClass(self.d, self.n, {s: c * v for s, v in self.terms.items()})

    def __matmul__(self, other: "KClass") -> "KClass":
        return convolve(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KClass):
            return NotImplemented
        return self.context == other.context and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.d, self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Symbol, int]]:
        return sorted(self.terms.items(), key=lambda t: _sort_key(t[0]))

    def is_pure_box(self) -> bool:
        return all(isinstance(s, Box) for s in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}·{s}" for s, c in self.sorted_terms())

    def to_json(self) -> list[list]:
        return [
            ["Box", s.a, s.b, c] if isinstance(s, Box) else ["Diag", s.k, c]
            for s, c in self.sorted_terms()
        ]


@dataclass(frozen=True)
class SheafKClass:
    """Integer combination of line bundle classes [O_X(a)]."""

    d: int
    n: int
    terms: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    @classmethod
    def line_bundle(cls, d: int, n: int, a: int) -> "SheafKClass":
        return cls(d, n, {a: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SheafKClass):
            return NotImplemented
        return (self.d, self.n) == (other.d, other.n) and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.d, self.n, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}·[O({a})]" for a, c in sorted(self.terms.items()))


def box(d: int, n: int, a: int, b: int, c: int = 1) -> KClass:
    return KClass(d, n, {Box(a, b): c})


def diag(d: int, n: int, k: int, c: int = 1) -> KClass:
    return KClass(d, n, {Diag(k): c})


def _convolve_symbols(d: int, n: int, s: Symbol, t: Symbol) -> tuple[Symbol, int]:
    if isinstance(s, Diag):
        if isinstance(t, Diag):
            return Diag(s.k + t.k), 1
        return Box(t.a + s.k, t.b), 1
    if isinstance(t, Diag):
        return Box(s.a, s.b + t.k), 1
    return Box(s.a, t.b), chi_OX(d, n, s.b + t.a)


def convolve(K1: KClass, K2: KClass) -> KClass:
    """Kernel of the composite functor: K1 applied first, then K2."""
    K1._check(K2)
    d, n = K1.context
    pairs = []
    for s, c in K1.terms.items():
        for t, e in K2.terms.items():
            sym, w = _convolve_symbols(d, n, s, t)
            pairs.append((sym, c * e * w))
    return KClass(d, n, _accumulate(pairs))


@lru_cache(maxsize=None)
def q_class(d: int, n: int, i: int) -> KClass:
    """Q_0 = Diag(0) - Box(0,0); Q_i = Q_{i-1} * Diag(1) * Q_0."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    q0 = diag(d, n, 0) - box(d, n, 0, 0)
    if i == 0:
        return q0
    return q_class(d, n, i - 1) @ diag(d, n, 1) @ q0


def _require_fano(d: int, n: int) -> int:
    m = n - d + 1
    if m < 0:
        raise ContextError("p_class needs a Fano context (d < n + 2)")
    return m


@lru_cache(maxsize=None)
def p_class(d: int, n: int, i: int) -> KClass:
    """P_0 = R_m * ... * R_0 with R_j = Diag(0) - Box(-j, j); P_i = P_{i-1} * Diag(1) * P_0."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    m = _require_fano(d, n)
    if i == 0:
        out = diag(d, n, 0)
        for j in range(m, -1, -1):
            out = convolve(out, diag(d, n, 0) - box(d, n, -j, j))
        return out
    return p_class(d, n, i - 1) @ diag(d, n, 1) @ p_class(d, n, 0)


def _omega_expansion(n: int, j: int) -> list[tuple[int, int]]:
    """[Omega^j_P(j)|_X] = sum_l (-1)^l C(n+2, j-l) [O_X(l)] as (l, coeff) pairs."""
    return [(l, (-1) ** l * comb(n + 2, j - l)) for l in range(j + 1)]


def _beilinson_terms(n: int, k: int, top: int) -> list[tuple[Symbol, int]]:
    pairs = []
    for j in range(top + 1):
        for l, c in _omega_expansion(n, j):
            pairs.append((Box(k - j, l), (-1) ** j * c))
    return pairs


def beilinson_truncation_class(d: int, n: int, i: int) -> KClass:
    """s_{>=-i} of the Beilinson resolution, restricted and twisted by O(i) (x) O."""
    if not 0 <= i <= n + 1:
        raise ValueError("need 0 <= i <= n + 1")
    return KClass(d, n, _accumulate(_beilinson_terms(n, i, i)))


def linkage_class(d: int, n: int, k: int) -> KClass:
    """Full restricted Beilinson class twisted by O(k) (x) O, so Diag(k) = Diag(k-d) + this."""
    return KClass(d, n, _accumulate(_beilinson_terms(n, k, n + 1)))


def _pair_symbols(d: int, n: int, s: Symbol, t: Symbol) -> int:
    if isinstance(s, Box):
        if isinstance(t, Box):
            return chi_OX(d, n, t.a - s.a) * chi_OX(d, n, t.b - s.b)
        return chi_OX(d, n, t.k - s.a - s.b)
    if isinstance(t, Box):
        return chi_OX(d, n, s.k + 2 * (d - n - 2) - t.a - t.b)
    return _diag_pairing(d, n, t.k - s.k)


@lru_cache(maxsize=None)
def _diag_pairing(d: int, n: int, r: int) -> int:
    return sum((-1) ** q * chi_polyvector(d, n, q, r) for q in range(n + 1))


def euler_pairing(K1: KClass, K2: KClass) -> int:
    """chi(K1, K2) = sum_i (-1)^i dim Ext^i(K1, K2) on X x X."""
    K1._check(K2)
    d, n = K1.context
    return sum(
        c * e * _pair_symbols(d, n, s, t) for s, c in K1.terms.items() for t, e in K2.terms.items()
    )


def apply_kernel(K: KClass, F: SheafKClass) -> SheafKClass:
    if K.context != (F.d, F.n):
        raise ContextError("context mismatch")
    d, n = K.context
    pairs = []
    for s, c in K.terms.items():
        for a, e in F.terms.items():
            if isinstance(s, Diag):
                pairs.append((a + s.k, c * e))
            else:
                pairs.append((s.b, c * e * chi_OX(d, n, s.a + a)))
    return SheafKClass(d, n, _accumulate(pairs))


def _koszul_reduce(n: int, a: int) -> dict[int, int]:
    """Express [O_X(a)] in the window [0, n+1] via sum_i (-1)^i C(n+2,i) [O(a-i)] = 0."""
    r = n + 2
    vec = {a: 1}
    while True:
        out_of_window = [x for x in vec if x < 0 or x > n + 1]
        if not out_of_window:
            return _clean(vec)
        # push the extreme index inward so the loop terminates
        hi = max(vec)
        x = hi if hi > n + 1 else min(vec)
        c = vec.pop(x)
        if x > n + 1:
            for i in range(1, r + 1):
                y = x - i
                vec[y] = vec.get(y, 0) - c * (-1) ** i * comb(r, i)
        else:
            top = x + r
            sign = (-1) ** r
            for i in range(r):
                y = top - i
                vec[y] = vec.get(y, 0) - c * sign * (-1) ** i * comb(r, i)
        vec = _clean(vec)


def normalize_diag(K: KClass) -> KClass:
    """Canonical form: Diag twists in [0, d), Box indices in [0, n+1]."""
    d, n = K.context
    work: dict = defaultdict(int, K.terms)
    while True:
        bad = [s for s in work if isinstance(s, Diag) and not 0 <= s.k < d and work[s]]
        if not bad:
            break
        s = bad[0]
        c = work.pop(s)
        if s.k >= d:
            work[Diag(s.k - d)] += c
            for t, e in _beilinson_terms(n, s.k, n + 1):
                work[t] += c * e
        else:
            work[Diag(s.k + d)] += c
            for t, e in _beilinson_terms(n, s.k + d, n + 1):
                work[t] -= c * e
    out: dict = defaultdict(int)
    for s, c in work.items():
        if not c:
            continue
        if isinstance(s, Diag):
            out[s] += c
            continue
        ra = _koszul_reduce(n, s.a)
        rb = _koszul_reduce(n, s.b)
        for a, ca in ra.items():
            for b, cb in rb.items():
                out[Box(a, b)] += c * ca * cb
    return KClass(d, n, _clean(out))


def test_family(d: int, n: int) -> list[KClass]:
    """{Box(a,b) : 0 <= a,b <= n+1} together with {Diag(r) : 0 <= r < d}."""
    fam = [box(d, n, a, b) for a in range(n + 2) for b in range(n + 2)]
    fam += [diag(d, n, r) for r in range(d)]
    return fam


test_family.__test__ = False  # keep pytest from collecting it
