"""Rigorous complex ball arithmetic on top of Arb (python-flint).

Every value carries its own working precision; operations run inside a
scoped precision context so no ambient precision leaks between calls.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
from flint import acb, arb, ctx, fmpq

DEFAULT_START_BITS = 64
DEFAULT_CAP_BITS = 1 << 16


@contextmanager
def workprec(bits):
    """Run the enclosed flint operations at ``bits`` of precision."""
    old = ctx.prec
    ctx.prec = int(bits)
    try:
        yield
    finally:
        ctx.prec = old


def precision_ladder(start=DEFAULT_START_BITS, cap=DEFAULT_CAP_BITS):
    """Geometric doubling from ``start`` up to and including ``cap``."""
    bits = max(16, int(start))
    while bits < cap:
        yield bits
        bits *= 2
    yield int(cap)


def arb_from_fraction(q):
    q = Fraction(q)
    return arb(fmpq(q.numerator, q.denominator))


def fraction_from_arb_mid(x):
    man, exp = x.mid().man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man) * Fraction(2) ** exp


def fraction_from_arb_rad(x):
    man, exp = x.rad().man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man) * Fraction(2) ** exp


def arb_to_mpf(x):
    # exact conversion; mpf((man, exp)) would round to mpmath's working precision
    man, exp = x.mid().man_exp()
    return mpmath.mp.make_mpf(mpmath.libmp.from_man_exp(int(man), int(exp)))


def to_acb(x, prec):
    """Enclose an exact or ball-like value in an ``acb`` at ``prec`` bits.

    Accepts ints, rationals, ``ComplexBall``, raw ``acb``/``arb`` and any
    object exposing ``to_ball(prec)`` (algebraic numbers, declared
    constants).
    """
    with workprec(prec):
        if isinstance(x, ComplexBall):
            return x.value
        if isinstance(x, acb):
            return x
        if isinstance(x, arb):
            return acb(x)
        if isinstance(x, bool):
            return acb(int(x))
        if isinstance(x, int):
            return acb(x)
        if isinstance(x, Rational):
            return acb(arb_from_fraction(x))
        if hasattr(x, "to_ball"):
            return x.to_ball(prec).value
        if isinstance(x, complex):
            return acb(x.real, x.imag)
        if isinstance(x, float):
            return acb(x)
    raise TypeError(f"cannot enclose {type(x).__name__} in a ball")


@dataclass(frozen=True)
class ComplexBall:
    """A complex ball: a midpoint with a rigorous error radius.

    ``value`` is an Arb ``acb`` (rectangular enclosure); ``radius`` reports
    an upper bound for the circumscribed disk.
    """

    value: acb
    prec: int

    @classmethod
    def exact(cls, x, prec=DEFAULT_START_BITS):
        return cls(to_acb(x, prec), prec)

    @classmethod
    def from_decimal(cls, re, im="0", prec=DEFAULT_START_BITS, rad=None):
        """Ball from decimal strings; ``rad`` defaults to one ulp at ``prec``."""
        with workprec(prec):
            r = arb(str(re))
            i = arb(str(im))
            v = acb(r, i)
            if rad is not None:
                v = v + acb(arb(0, arb(str(rad))), arb(0, arb(str(rad))))
        return cls(v, prec)

    @property
    def center(self):
        with workprec(self.prec):
            re, im = arb_to_mpf(self.value.real), arb_to_mpf(self.value.imag)
            return mpmath.mp.make_mpc((re._mpf_, im._mpf_))

    @property
    def radius(self):
        with workprec(self.prec):
            return arb_to_mpf(arb(self.value.rad().upper()))

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def contains_zero(self):
        return self.value.contains(0)

    def contains(self, other):
        return self.value.contains(to_acb(other, self.prec))

    def overlaps(self, other):
        return self.value.overlaps(to_acb(other, self.prec))

    def accuracy_bits(self):
        return self.value.rel_accuracy_bits()

    def _binop(self, other, op):
        prec = self.prec
        if isinstance(other, ComplexBall):
            prec = max(prec, other.prec)
        with workprec(prec):
            v = op(self.value, to_acb(other, prec))
        return ComplexBall(v, prec)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __neg__(self):
        return ComplexBall(-self.value, self.prec)

    def __pow__(self, n):
        with workprec(self.prec):
            return ComplexBall(self.value ** int(n), self.prec)

    def exp(self):
        with workprec(self.prec):
            return ComplexBall(self.value.exp(), self.prec)

    def log(self):
        with workprec(self.prec):
            return ComplexBall(self.value.log(), self.prec)

    def abs_upper(self):
        with workprec(self.prec):
            return self.value.abs_upper()

    def to_json(self, digits=None):
        if digits is None:
            digits = max(5, int(self.prec * 0.30103))
        c = self.center
        return {
            "center_re": mpmath.nstr(c.real, digits, strip_zeros=False),
            "center_im": mpmath.nstr(c.imag, digits, strip_zeros=False),
            "radius": mpmath.nstr(self.radius, 5),
        }

    def __repr__(self):
        with workprec(self.prec):
            return f"ComplexBall({self.value.str(radius=True)}, prec={self.prec})"


def pi_i(prec):
    with workprec(prec):
        return acb(0, arb.pi())


def two_pi_i(prec):
    with workprec(prec):
        return acb(0, 2 * arb.pi())
