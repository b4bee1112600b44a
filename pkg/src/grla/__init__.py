"""Exact computations for type I gradings of classical Lie algebras.

Grading data, fundamental semi-invariants, b-functions and their duality,
a brute-force Bernstein-Sato check, component group orbits and the labels of
the resulting character sheaves.
"""
from .grading import Family, GradingError, GradingSpec, OutOfScopeError, build_grading

__all__ = ["Family", "GradingError", "GradingSpec", "OutOfScopeError", "build_grading"]
__version__ = "0.1.0"
