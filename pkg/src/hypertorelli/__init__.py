"""Exact Jacobian-ring, Hodge and kernel K-class calculus for Fano hypersurfaces."""

__version__ = "0.1.0"
