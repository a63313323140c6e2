"""Bivariate polynomials p(X, Y) and rigorous evaluation of f(z) = p(z, e^z)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable

from flint import acb

from ..errors import InputError
from .algebraic import AlgebraicNumber
from .balls import ComplexBall, to_acb, workprec


@dataclass(frozen=True)
class DeclaredConstant:
    """A non-algebraic constant known only through a ball evaluator.

    ``evaluator(prec)`` must return an ``acb`` enclosing the constant at
    ``prec`` bits. Used for coefficients such as 2*log(2).
    """

    label: str
    evaluator: Callable = field(compare=False)
    scale: Fraction = Fraction(1)

    def to_ball(self, prec):
        with workprec(prec):
            v = self.evaluator(prec)
            if self.scale != 1:
                v = v * to_acb(self.scale, prec)
        return ComplexBall(v, prec)

    def __mul__(self, k):
        if not isinstance(k, (int, Rational)):
            return NotImplemented
        return DeclaredConstant(self.label, self.evaluator, self.scale * Fraction(k))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def is_zero(self):
        return self.scale == 0


def _is_zero_coeff(c):
    if isinstance(c, (int, Rational)):
        return c == 0
    if isinstance(c, (AlgebraicNumber, DeclaredConstant)):
        return c.is_zero()
    return False


def _scale(c, k):
    if isinstance(c, (int, Rational)):
        return Fraction(c) * k
    return c * k


@dataclass(frozen=True)
class BivariatePoly:
    """p(X, Y) = sum of c_ij X^i Y^j with exact or declared coefficients.

    ``terms`` is a sorted tuple of ((i, j), coefficient); zero coefficients
    are dropped on construction.
    """

    terms: tuple

    def __init__(self, coeffs):
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = coeffs
        merged = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise InputError("exponents must be nonnegative")
            if isinstance(c, int):
                c = Fraction(c)
            key = (int(i), int(j))
            if key in merged:
                prev = merged[key]
                if isinstance(prev, Fraction) and isinstance(c, Fraction):
                    c = prev + c
                elif isinstance(prev, (Fraction, AlgebraicNumber)) and isinstance(c, (Fraction, AlgebraicNumber)):
                    c = AlgebraicNumber.coerce(prev) + AlgebraicNumber.coerce(c)
                else:
                    raise InputError("cannot merge declared constants; pass each monomial once")
            merged[key] = c
        terms = tuple(sorted((k, v) for k, v in merged.items() if not _is_zero_coeff(v)))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_string(cls, text):
        """Parse an expression in X and Y with rational coefficients."""
        import sympy

        X, Y = sympy.symbols("X Y")
        expr = sympy.sympify(text.replace("^", "**"), locals={"X": X, "Y": Y, "x": X, "y": Y})
        poly = sympy.Poly(sympy.expand(expr), X, Y)
        coeffs = {}
        for (i, j), c in poly.terms():
            if not c.is_Rational:
                raise InputError(f"coefficient {c} is not rational")
            coeffs[(i, j)] = Fraction(int(c.p), int(c.q))
        return cls(coeffs)

    @property
    def coeffs(self):
        return dict(self.terms)

    @property
    def deg_x(self):
        return max((i for (i, _), _ in self.terms), default=0)

    @property
    def deg_y(self):
        return max((j for (_, j), _ in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def both_variables_appear(self):
        return self.deg_x >= 1 and self.deg_y >= 1

    def rows(self):
        """{j: {i: coefficient}} so that p = sum_j p_j(X) Y^j."""
        out = {}
        for (i, j), c in self.terms:
            out.setdefault(j, {})[i] = c
        return out

    def index_set(self):
        """I = {j : p_j != 0}."""
        return sorted(self.rows())

    def partial_x(self):
        return BivariatePoly({(i - 1, j): _scale(c, i) for (i, j), c in self.terms if i > 0})

    def partial_y(self):
        return BivariatePoly({(i, j - 1): _scale(c, j) for (i, j), c in self.terms if j > 0})

    @lru_cache(maxsize=64)
    def _coeff_balls(self, prec):
        return tuple(((i, j), to_acb(c, prec)) for (i, j), c in self.terms)

    def eval_acb(self, z, prec, ez=None):
        """Enclosure of p(z, e^z) for an ``acb`` argument at ``prec`` bits."""
        with workprec(prec):
            if ez is None:
                ez = z.exp()
            total = acb(0)
            zpow = {0: acb(1)}
            epow = {0: acb(1)}
            for (i, j), c in self._coeff_balls(prec):
                if i not in zpow:
                    zpow[i] = z**i
                if j not in epow:
                    epow[j] = ez**j
                total += c * zpow[i] * epow[j]
            return total

    def total_derivative(self):
        """q with q(z, e^z) = d/dz p(z, e^z), namely p_X + Y p_Y."""
        px, py = derivative_exp_poly(self)
        return BivariatePoly(list(px.terms) + [((i, j + 1), c) for (i, j), c in py.terms])

    def eval_with_derivative(self, z, prec):
        """(f(z), f'(z)) with f'(z) = p_X(z, e^z) + e^z p_Y(z, e^z).

        On a wide ball a second-order centered form is used as well; near a
        multiple zero it is far tighter than direct evaluation.
        """
        d1 = _total_derivative(self)
        if d1 is None:
            px, py = derivative_exp_poly(self)
            with workprec(prec):
                ez = z.exp()
                return self.eval_acb(z, prec, ez), px.eval_acb(z, prec, ez) + ez * py.eval_acb(z, prec, ez)
        d2 = _total_derivative(d1)
        with workprec(prec):
            ez = z.exp()
            f = self.eval_acb(z, prec, ez)
            df = d1.eval_acb(z, prec, ez)
            if z.rad() == 0 or d2 is None:
                return f, df
            m = acb(z.real.mid(), z.imag.mid())
            h = z - m
            em = m.exp()
            d2 = d2.eval_acb(z, prec, ez)
            fc = self.eval_acb(m, prec, em) + d1.eval_acb(m, prec, em) * h + d2 * h * h / 2
            dfc = d1.eval_acb(m, prec, em) + d2 * h
            if fc.rad() < f.rad():
                f = fc
            if dfc.rad() < df.rad():
                df = dfc
        return f, df

    def __repr__(self):
        parts = []
        for (i, j), c in self.terms:
            parts.append(f"({c})*X^{i}*Y^{j}")
        return "BivariatePoly(" + " + ".join(parts or ["0"]) + ")"


@lru_cache(maxsize=256)
def _total_derivative(p):
    # None when declared constants would have to be merged
    try:
        return p.total_derivative()
    except InputError:
        return None


@lru_cache(maxsize=256)
def derivative_exp_poly(p):
    """Exact partial derivatives (p_X, p_Y)."""
    return p.partial_x(), p.partial_y()


def eval_exp_poly(p, z, precision_bits):
    """Ball containing p(w, e^w) for every w in the ball ``z``."""
    prec = int(precision_bits)
    zb = to_acb(z, prec)
    return ComplexBall(p.eval_acb(zb, prec), prec)
