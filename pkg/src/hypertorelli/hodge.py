"""Hodge numbers of smooth hypersurfaces and Hochschild homology tables.

Primitive middle Hodge numbers come from the Jacobian ring via Griffiths'
residue description ``h^{p,n-p}_prim = dim J^{t_p}``; the remaining Hodge
numbers of a hypersurface are those of projective space (Lefschetz).  Over a
prime field the same Jacobian dimensions are reported, flagged with
``surrogate=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jacobian import DomainError, is_smooth, jacobian_ring, socle_degree
from .polyring import HypersurfaceSpec

__all__ = [
    "HodgeReport",
    "HHTable",
    "t_degree",
    "primitive_hodge",
    "full_diamond",
    "nondiagonal_predicate",
    "hochschild_homology",
    "kuznetsov_hochschild",
]


def t_degree(p: int, d: int, n: int) -> int:
    """Jacobian degree carrying h^{p,n-p}_prim."""
    return (n - p + 1) * d - (n + 2)


@dataclass(frozen=True)
class HodgeReport:
    n: int
    d: int
    primitive_middle: tuple[int, ...]
    full_middle: tuple[int, ...]
    nondiagonal: bool
    surrogate: bool = False

    def h(self, p: int, q: int) -> int:
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            return 0
        if p + q == self.n:
            return self.full_middle[p]
        return 1 if p == q else 0

    def diamond(self) -> list[list[int]]:
        """h^{p,q} as a matrix indexed [p][q]."""
        return [[self.h(p, q) for q in range(self.n + 1)] for p in range(self.n + 1)]


@dataclass(frozen=True)
class HHTable:
    """dims[a] = dim HH_a for a in [-n, n]."""

    n: int
    dims: dict[int, int]
    component: str  # "WholeVariety" | "KuznetsovComponent"
    k_exceptional: int

    def as_list(self) -> list[int]:
        return [self.dims[a] for a in range(-self.n, self.n + 1)]

    @property
    def euler(self) -> int:
        return sum((-1) ** a * h for a, h in self.dims.items())


def _require_smooth(spec: HypersurfaceSpec) -> None:
    if not is_smooth(spec):
        raise DomainError("hypersurface is singular")


def primitive_hodge(spec: HypersurfaceSpec) -> tuple[int, ...]:
    _require_smooth(spec)
    ring = jacobian_ring(spec)
    sigma = socle_degree(spec.d, spec.n)
    # smooth f: J vanishes outside [0, sigma]
    return tuple(
        ring.dim(t) if 0 <= t <= sigma else 0
        for t in (t_degree(p, spec.d, spec.n) for p in range(spec.n + 1))
    )


def full_diamond(spec: HypersurfaceSpec) -> HodgeReport:
    prim = primitive_hodge(spec)
    n = spec.n
    full = list(prim)
    if n % 2 == 0:
        full[n // 2] += 1
    nondiag = any(full[p] for p in range(n + 1) if 2 * p != n)
    return HodgeReport(n, spec.d, prim, tuple(full), nondiag, surrogate=spec.field.is_prime)


def nondiagonal_predicate(d: int, n: int) -> bool:
    """Whether some p != n/2 has t_p inside the nonzero range [0, (d-2)(n+2)]."""
    if d < 2 or d >= n + 2:
        raise ValueError("needs 2 <= d < n + 2")
    sigma = socle_degree(d, n)
    return any(0 <= t_degree(p, d, n) <= sigma for p in range(n + 1) if 2 * p != n)


def hochschild_homology(spec: HypersurfaceSpec) -> HHTable:
    """HKR: HH_a = sum over p - q = a of h^{p,q}."""
    report = full_diamond(spec)
    n = spec.n
    dims = {a: sum(report.h(q + a, q) for q in range(n + 1)) for a in range(-n, n + 1)}
    return HHTable(n, dims, "WholeVariety", 0)


def kuznetsov_hochschild(spec: HypersurfaceSpec) -> HHTable:
    """Remove one HH_*(pt) per exceptional object O, O(1), ..., O(n-d+1)."""
    k = spec.n - spec.d + 2
    if k <= 0:
        raise DomainError("not Fano: the exceptional collection is empty")
    whole = hochschild_homology(spec)
    dims = dict(whole.dims)
    dims[0] -= k
    return HHTable(spec.n, dims, "KuznetsovComponent", k)
