"""Exact algebraic arithmetic and certified ball evaluation of p(z, e^z)."""

from fractions import Fraction

from ..errors import DomainError
from .algebraic import AlgebraicNumber, as_algebraic, is_exact_zero
from .balls import (
    DEFAULT_CAP_BITS,
    DEFAULT_START_BITS,
    ComplexBall,
    precision_ladder,
    to_acb,
    workprec,
)
from .bivariate import BivariatePoly, DeclaredConstant, derivative_exp_poly, eval_exp_poly

Rational = Fraction


def alg_arith(op, a, b=None):
    """Exact ``add``/``mul``/``neg``/``inv`` on algebraic numbers."""
    a = AlgebraicNumber.coerce(a)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if b is None:
        raise DomainError(f"{op} needs two operands")
    b = AlgebraicNumber.coerce(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise DomainError(f"unknown operation {op!r}")


def alg_to_ball(a, precision_bits):
    """Ball containing ``a`` with radius <= 2**(2 - bits) * max(1, |center|)."""
    if precision_bits < 16:
        raise DomainError("precision_bits must be at least 16")
    return AlgebraicNumber.coerce(a).to_ball(precision_bits)


__all__ = [
    "AlgebraicNumber",
    "BivariatePoly",
    "ComplexBall",
    "DeclaredConstant",
    "DEFAULT_CAP_BITS",
    "DEFAULT_START_BITS",
    "Rational",
    "alg_arith",
    "alg_to_ball",
    "as_algebraic",
    "derivative_exp_poly",
    "eval_exp_poly",
    "is_exact_zero",
    "precision_ladder",
    "to_acb",
    "workprec",
]
