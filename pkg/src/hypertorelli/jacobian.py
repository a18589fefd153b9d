"""Jacobian ideal and Jacobian ring of a homogeneous polynomial.

The ring is built one degree at a time.  For each degree ``k`` we keep the
*standard monomials* (the monomials that are not leading terms of the ideal
in the column order of :func:`~hypertorelli.polyring.monomial_basis`, i.e. the
non-pivot columns of the reduced echelon basis of the ideal) and the
normal-form matrix ``NF_k`` expressing every degree-``k`` monomial in that
basis.  Since ``I_{k+1} = S_1 * I_k`` above degree ``d - 1``, the next degree
only needs the quotient of ``S_1 (x) J^k`` by the syzygies
``x_a (x) m/x_a - x_b (x) m/x_b``, so the large ideal components
are never row-reduced directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache

import numpy as np

from .exact_arith import FieldConfig, Matrix, rref_array
from .polyring import (
    HypersurfaceSpec,
    Polynomial,
    _index_map,
    _shift_index,
    monomial_basis,
    monomial_count,
    multiplication_array,
    partial_derivative,
)

__all__ = [
    "DomainError",
    "JacobianComponent",
    "JacobianRing",
    "jacobian_ring",
    "ideal_component",
    "ideal_generators_array",
    "hilbert_oracle",
    "hilbert_series",
    "socle_degree",
    "is_smooth",
    "pairing_rank",
    "hh_action_witness",
]


class DomainError(ValueError):
    """An operation was called outside its mathematical domain (e.g. singular input)."""


def socle_degree(d: int, n: int) -> int:
    if d < 2:
        raise ValueError("socle degree needs d >= 2")
    return (d - 2) * (n + 2)


@lru_cache(maxsize=None)
def hilbert_series(d: int, n: int) -> tuple[int, ...]:
    """Coefficients of ((1 - t^(d-1)) / (1 - t))^(n+2), constant term first."""
    if d < 2:
        raise ValueError("Hilbert oracle needs d >= 2")
    base = [1] * (d - 1)
    out = [1]
    for _ in range(n + 2):
        nxt = [0] * (len(out) + len(base) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(base):
                nxt[i + j] += a * b
        out = nxt
    return tuple(out)


def hilbert_oracle(d: int, n: int, k: int) -> int:
    """dim J^k for a smooth degree-``d`` hypersurface of dimension ``n``."""
    series = hilbert_series(d, n)
    return series[k] if 0 <= k < len(series) else 0


def ideal_generators_array(spec: HypersurfaceSpec, k: int) -> np.ndarray:
    """Rows ``m * df/dx_i`` for all degree-(k-d+1) monomials ``m``: spans I_k."""
    field = spec.field
    nv = spec.nvars
    shift = k - spec.d + 1
    if shift < 0:
        return field.zeros((0, monomial_count(nv, k)))
    blocks = [multiplication_array(partial_derivative(spec.f, i), shift).T for i in range(nv)]
    return np.vstack(blocks)


@dataclass(frozen=True)
class _Degree:
    std: np.ndarray   # standard monomial indices, increasing
    nf: np.ndarray    # len(std) x dim S^k, columns = monomials; nf[:, std] = identity


class JacobianRing:
    """Graded pieces of ``S / (df/dx_0, ..., df/dx_{n+1})`` computed on demand."""

    def __init__(self, spec: HypersurfaceSpec):
        self.spec = spec
        self.field: FieldConfig = spec.field
        self.nvars = spec.nvars
        self._degrees: list[_Degree] = []

    def _identity_degree(self, k: int) -> _Degree:
        n = monomial_count(self.nvars, k)
        return _Degree(np.arange(n), self.field.identity(n))

    def _first_ideal_degree(self) -> _Degree:
        k = self.spec.d - 1
        gens = ideal_generators_array(self.spec, k)
        red, pivots = rref_array(gens, self.field)
        ncols = gens.shape[1]
        pivset = set(pivots)
        std = np.array([j for j in range(ncols) if j not in pivset], dtype=np.int64)
        nf = self.field.zeros((len(std), ncols))
        nf[:, std] = self.field.identity(len(std))
        if pivots:
            nf[:, list(pivots)] = self.field.reduce(-red[:, std].T) if len(std) else nf[:, list(pivots)]
        return _Degree(std, nf)

    def _next_degree(self, prev: _Degree, k: int) -> _Degree:
        """Degree k+1 from degree k (valid once k >= d - 1)."""
        field = self.field
        nv = self.nvars
        nxt_count = monomial_count(nv, k + 1)
        nstd = len(prev.std)
        if nstd == 0:
            return _Degree(np.zeros(0, dtype=np.int64), field.zeros((0, nxt_count)))

        # candidate monomials x_j * b for standard b
        shifts = [_shift_index(nv, k, j) for j in range(nv)]
        cand = np.unique(np.concatenate([s[prev.std] for s in shifts]))
        cpos = np.full(nxt_count, -1, dtype=np.int64)
        cpos[cand] = np.arange(len(cand))
        ncand = len(cand)

        # v_j(m) = x_j (x) NF(m / x_j), laid out in candidate coordinates
        def lift(j: int) -> tuple[np.ndarray, np.ndarray]:
            """Columns m divisible by x_j and their lifted vectors."""
            targets = shifts[j]  # degree-k index -> degree-(k+1) index
            vec = field.zeros((ncand, len(targets)))
            rows = cpos[targets[prev.std]]
            vec[rows, :] = prev.nf
            return targets, vec

        is_std_prev = np.zeros(monomial_count(nv, k), dtype=bool)
        is_std_prev[prev.std] = True

        # representative factorization: prefer j with m/x_j standard, else the first j
        rep = np.full(nxt_count, -1, dtype=np.int64)
        rep_quot_std = np.zeros(nxt_count, dtype=bool)
        for j in range(nv):
            targets = shifts[j]
            fresh = rep[targets] == -1
            rep[targets[fresh]] = j
            upgrade = is_std_prev & ~rep_quot_std[targets]
            rep[targets[upgrade]] = j
            rep_quot_std[targets[upgrade]] = True

        V = field.zeros((ncand, nxt_count))
        lifts = []
        for j in range(nv):
            targets, vec = lift(j)
            lifts.append((targets, vec))
            mine = rep[targets] == j
            V[:, targets[mine]] = vec[:, mine]

        rel_blocks = []
        for j, (targets, vec) in enumerate(lifts):
            other = rep[targets] != j
            if not other.any():
                continue
            diff = field.reduce(vec[:, other] - V[:, targets[other]]) if field.is_prime else vec[:, other] - V[:, targets[other]]
            keep = np.any(diff != 0, axis=0)
            if keep.any():
                rel_blocks.append(diff[:, keep].T)
        if rel_blocks:
            rel = np.vstack(rel_blocks)
            red, pivots = rref_array(rel, field)
        else:
            red, pivots = field.zeros((0, ncand)), ()
        pivset = set(pivots)
        free = np.array([c for c in range(ncand) if c not in pivset], dtype=np.int64)
        if len(free) == 0:
            return _Degree(np.zeros(0, dtype=np.int64), field.zeros((0, nxt_count)))
        nf = V[free, :]
        if pivots:
            correction = field.matmul(red[:, free].T.copy(), V[list(pivots), :])
            nf = field.reduce(nf - correction) if field.is_prime else nf - correction
        return _Degree(cand[free], nf)

    def _degree(self, k: int) -> _Degree:
        if k < 0:
            raise ValueError("degree must be nonnegative")
        d = self.spec.d
        while len(self._degrees) <= k:
            j = len(self._degrees)
            if j < d - 1:
                self._degrees.append(self._identity_degree(j))
            elif j == d - 1:
                self._degrees.append(self._first_ideal_degree())
            else:
                self._degrees.append(self._next_degree(self._degrees[j - 1], j - 1))
        return self._degrees[k]

    def dim(self, k: int) -> int:
        """dim J^k."""
        if k < 0:
            return 0
        return len(self._degree(k).std)

    def dims(self, upto: int) -> list[int]:
        return [self.dim(k) for k in range(upto + 1)]

    def standard_monomials(self, k: int) -> list[tuple[int, ...]]:
        basis = monomial_basis(self.nvars, k)
        return [basis[i] for i in self._degree(k).std]

    def normal_form(self, p: Polynomial) -> np.ndarray:
        """Coordinates of the class of ``p`` in the standard-monomial basis of J^deg(p)."""
        deg = self._degree(p.degree)
        return self.field.matmul(deg.nf, p.vector().reshape(-1, 1)).ravel()

    def normal_form_matrix(self, k: int) -> Matrix:
        return Matrix(self._degree(k).nf, self.field)

    def ideal_basis(self, k: int) -> Matrix:
        """Reduced echelon basis of I_k, read off the normal form."""
        deg = self._degree(k)
        field = self.field
        count = monomial_count(self.nvars, k)
        stdset = set(deg.std.tolist())
        nonstd = [m for m in range(count) if m not in stdset]
        out = field.zeros((len(nonstd), count))
        for r, m in enumerate(nonstd):
            out[r, m] = field.one
            col = deg.nf[:, m]
            out[r, deg.std] = field.reduce(-col) if field.is_prime else -col
        return Matrix(out, field)

    def first_mismatch(self, upto: int) -> int | None:
        """First degree k <= upto with dim J^k != hilbert_oracle, or None."""
        for k in range(upto + 1):
            if self.dim(k) != hilbert_oracle(self.spec.d, self.spec.n, k):
                return k
        return None


@lru_cache(maxsize=128)
def jacobian_ring(spec: HypersurfaceSpec) -> JacobianRing:
    return JacobianRing(spec)


@dataclass(frozen=True, eq=False)
class JacobianComponent:
    """Degree-``k`` piece of the Jacobian ideal; ``ideal_basis`` is built lazily."""

    degree: int
    ring_dim: int
    _ring: JacobianRing = dc_field(repr=False)

    @cached_property
    def ideal_basis(self) -> Matrix:
        return self._ring.ideal_basis(self.degree)

    @property
    def ideal_dim(self) -> int:
        return monomial_count(self._ring.nvars, self.degree) - self.ring_dim


def ideal_component(spec: HypersurfaceSpec, k: int) -> JacobianComponent:
    if k < 0:
        raise ValueError("degree must be nonnegative")
    ring = jacobian_ring(spec)
    return JacobianComponent(k, ring.dim(k), ring)


def is_smooth(spec: HypersurfaceSpec, early_exit: bool = True) -> bool:
    """Whether the partials have no common projective zero (J Artinian).

    Decided by ``dim J^(sigma+1) == 0``; with ``early_exit`` the degrees are
    scanned upward and the first disagreement with the complete-intersection
    Hilbert function stops the scan (that already proves singularity).
    """
    if spec.d == 1:
        return not spec.f.is_zero()
    ring = jacobian_ring(spec)
    top = socle_degree(spec.d, spec.n) + 1
    if early_exit:
        return ring.first_mismatch(top) is None
    return ring.dim(top) == 0


def _require_gorenstein(spec: HypersurfaceSpec) -> tuple[JacobianRing, int]:
    if not is_smooth(spec):
        raise DomainError("hypersurface is singular: J^sigma is not one-dimensional")
    ring = jacobian_ring(spec)
    sigma = socle_degree(spec.d, spec.n)
    if ring.dim(sigma) != 1:
        raise DomainError("pairing target J^sigma is not one-dimensional")
    return ring, sigma


def _product_table(ring: JacobianRing, k: int, sigma: int) -> np.ndarray:
    """Matrix of the pairing J^k x J^(sigma-k) -> J^sigma on standard monomials."""
    nv = ring.nvars
    left = ring.standard_monomials(k)
    right = ring.standard_monomials(sigma - k)
    top = ring._degree(sigma).nf[0]
    idx = _index_map(nv, sigma)
    table = ring.field.zeros((len(left), len(right)))
    for a, ea in enumerate(left):
        for b, eb in enumerate(right):
            table[a, b] = top[idx[tuple(x + y for x, y in zip(ea, eb))]]
    return table


def pairing_rank(spec: HypersurfaceSpec, k: int) -> int:
    """Rank of multiplication J^k x J^(sigma-k) -> J^sigma."""
    ring, sigma = _require_gorenstein(spec)
    if not 0 <= k <= sigma:
        raise ValueError(f"k must lie in [0, {sigma}]")
    from .exact_arith import rank_array

    return rank_array(_product_table(ring, k, sigma), ring.field)


def hh_action_witness(spec: HypersurfaceSpec, xi: Polynomial) -> tuple[Polynomial, object]:
    """A monomial ``eta`` of degree sigma - d with ``xi * eta`` nonzero in J^sigma.

    Returns ``(eta, c)`` where ``c`` is the coordinate of ``xi * eta`` on the
    standard monomial spanning J^sigma.
    """
    ring, sigma = _require_gorenstein(spec)
    if xi.degree != spec.d or xi.nvars != spec.nvars or xi.field != spec.field:
        raise ValueError("xi must be a degree-d form in the same ring")
    if not np.any(ring.normal_form(xi) != 0):
        raise DomainError("class is zero in J^d")
    k = sigma - spec.d
    if k < 0:
        raise DomainError(f"socle degree {sigma} is below d = {spec.d}")
    for e in ring.standard_monomials(k):
        eta = Polynomial.from_terms({e: 1}, spec.nvars, spec.field, degree=k)
        c = ring.normal_form(xi * eta)[0]
        if c != 0:
            return eta, spec.field.element(c)
    raise DomainError("no complementary class found; the pairing is degenerate")
