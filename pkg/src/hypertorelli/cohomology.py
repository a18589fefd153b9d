"""Sheaf cohomology and Euler characteristics on projective space and on X.

All binomials go through :func:`binom`, which extends ``C(a, r)`` polynomially
in ``a`` so that Hilbert-polynomial identities hold for every twist.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .exact_arith import rank_array
from .jacobian import DomainError, is_smooth
from .polyring import HypersurfaceSpec, monomial_count, multiplication_array, partial_derivative

__all__ = [
    "CohomologyTable",
    "binom",
    "chi_OX",
    "h0_line_bundle_X",
    "line_bundle_cohomology_X",
    "bott",
    "chi_omega_P",
    "chi_omega_X",
    "chi_polyvector",
    "h1_tangent",
    "TangentCohomology",
]


@lru_cache(maxsize=None)
def binom(a: int, r: int) -> int:
    """C(a, r) = a(a-1)...(a-r+1)/r! for any integer a; zero for r < 0."""
    if r < 0:
        return 0
    if a >= 0:
        return comb(a, r)
    num = 1
    for i in range(r):
        num *= a - i
    return num // factorial(r)


@dataclass(frozen=True)
class CohomologyTable:
    """Nonzero cohomology dimensions as sorted ``(q, h^q)`` pairs."""

    entries: tuple[tuple[int, int], ...]

    @classmethod
    def from_dict(cls, dims: dict[int, int]) -> "CohomologyTable":
        return cls(tuple(sorted((q, h) for q, h in dims.items() if h)))

    def h(self, q: int) -> int:
        return dict(self.entries).get(q, 0)

    @property
    def euler(self) -> int:
        return sum((-1) ** q * h for q, h in self.entries)


def chi_OP(m_ambient: int, k: int) -> int:
    """chi(P^m, O(k))."""
    return binom(k + m_ambient, m_ambient)


def chi_OX(d: int, n: int, m: int) -> int:
    """chi(X, O_X(m)) for a degree-d hypersurface X of dimension n (Koszul)."""
    return binom(m + n + 1, n + 1) - binom(m - d + n + 1, n + 1)


def h0_line_bundle_X(d: int, n: int, m: int) -> int:
    """h^0(X, O_X(m)) = dim S^m - dim S^(m-d), m >= 0."""
    if m < 0:
        raise ValueError("twist must be nonnegative")
    return monomial_count(n + 2, m) - monomial_count(n + 2, m - d)


def line_bundle_cohomology_X(d: int, n: int, m: int) -> CohomologyTable:
    """All H^q(X, O_X(m)) for n >= 1: only q = 0 and q = n can be nonzero."""
    if n < 1:
        raise ValueError("needs n >= 1")
    dims = {}
    if m >= 0:
        dims[0] = h0_line_bundle_X(d, n, m)
    dual = d - n - 2 - m
    if dual >= 0:
        dims[n] = dims.get(n, 0) + h0_line_bundle_X(d, n, dual)
    return CohomologyTable.from_dict(dims)


def bott(m_ambient: int, p: int, k: int) -> CohomologyTable:
    """H^q(P^m, Omega^p(k)) by the Bott formula."""
    m = m_ambient
    if not 0 <= p <= m:
        raise ValueError("need 0 <= p <= m")
    dims = {}
    if k == 0:
        dims[p] = 1
    elif k > p:
        dims[0] = comb(k + m - p, k) * comb(k - 1, p)
    elif k < p - m:
        dims[m] = comb(-k + p, -k) * comb(-k - 1, m - p)
    return CohomologyTable.from_dict(dims)


def chi_omega_P(m_ambient: int, p: int, k: int) -> int:
    """chi(P^m, Omega^p(k)) from the wedge powers of the Euler sequence."""
    if not 0 <= p <= m_ambient:
        raise ValueError("need 0 <= p <= m")
    return sum(
        (-1) ** i * comb(m_ambient + 1, p - i) * chi_OP(m_ambient, k - p + i) for i in range(p + 1)
    )


@lru_cache(maxsize=None)
def chi_omega_X(d: int, n: int, p: int, m: int) -> int:
    """chi(X, Omega^p_X(m)) by the conormal-sequence recursion in p."""
    if not 0 <= p <= n:
        raise ValueError("need 0 <= p <= n")
    if p == 0:
        return chi_OX(d, n, m)
    restricted = chi_omega_P(n + 1, p, m) - chi_omega_P(n + 1, p, m - d)
    return restricted - chi_omega_X(d, n, p - 1, m - d)


def chi_polyvector(d: int, n: int, q: int, m: int) -> int:
    """chi(X, Lambda^q T_X (m)), using Lambda^q T_X = Omega^(n-q)_X (n + 2 - d)."""
    if not 0 <= q <= n:
        raise ValueError("need 0 <= q <= n")
    return chi_omega_X(d, n, n - q, m + n + 2 - d)


@dataclass(frozen=True)
class TangentCohomology:
    h0_TX: int
    h1_TX: int
    h0_TP_X: int
    h0_OX_d: int
    map_rank: int

    def __iter__(self):
        return iter((self.h0_TX, self.h1_TX))


def _h1_TP_restricted_bound(d: int, n: int) -> int:
    """Upper bound for h^1(T_P|_X) from the restricted Euler sequence."""
    h1_twist = line_bundle_cohomology_X(d, n, 1).h(1) if n >= 1 else 0
    h2_O = line_bundle_cohomology_X(d, n, 0).h(2) if n >= 2 else 0
    return (n + 2) * h1_twist + h2_O


def _h0_TP_restricted(d: int, n: int) -> int:
    """h^0(T_P|_X) = (n+2) h^0(O_X(1)) - h^0(O_X), valid when h^1(O_X) = 0."""
    h1_O = line_bundle_cohomology_X(d, n, 0).h(1) if n >= 1 else 0
    if h1_O:
        raise DomainError("h^1(O_X) != 0; restricted Euler sequence does not split on H^0")
    return (n + 2) * h0_line_bundle_X(d, n, 1) - 1


def h1_tangent(spec: HypersurfaceSpec) -> TangentCohomology:
    """(h^0(T_X), h^1(T_X)) from the normal-bundle sequence.

    Builds the matrix of ``V^ (x) V -> S^d``, ``x_i (x) e_j -> x_i * df/dx_j``
    and reads off kernel and cokernel of the induced map
    ``V^ (x) V / <id> -> S^d / <f>``.
    """
    if spec.n < 1:
        raise DomainError("needs n >= 1")
    if not is_smooth(spec):
        raise DomainError("hypersurface is singular")
    d, n, field = spec.d, spec.n, spec.field
    if _h1_TP_restricted_bound(d, n):
        raise DomainError("H^1(T_P|_X) may be nonzero for this (d, n)")
    nv = spec.nvars
    cols = []
    for j in range(nv):
        block = multiplication_array(partial_derivative(spec.f, j), 1)  # S^d x V^
        cols.append(block)
    A = np.hstack(cols)  # columns: (j, i) pairs = x_i (x) e_j
    fcol = spec.f.vector().reshape(-1, 1)
    with_f = rank_array(np.hstack([A, fcol]), field)
    # image of the induced map is (im A + <f>) / <f>; id_V maps to d*f
    induced = with_f - 1
    source = nv * nv - 1
    target = monomial_count(nv, d) - 1
    h0_TP = _h0_TP_restricted(d, n)
    h0_O = h0_line_bundle_X(d, n, d)
    if source != h0_TP or target != h0_O:
        raise AssertionError("cohomology bookkeeping mismatch")
    return TangentCohomology(source - induced, target - induced, h0_TP, h0_O, induced)
