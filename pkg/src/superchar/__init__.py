"""Truncated q/y-series arithmetic, elliptic and Jacobi special functions,
the topological N=2 mode algebra, GL(1|1) supermatrix actions, and
supertrace characters of SUSY lattice vertex algebras."""

__version__ = "0.1.0"
