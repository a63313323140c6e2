"""Exact algebraic numbers: integer minimal polynomial plus isolating box.

Sums and products are found as roots of resultants, computed by
evaluation at integer points and exact interpolation, then factored over
the integers; the right irreducible factor and root are selected by ball
containment, escalating precision until the choice is unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

from flint import acb, arb, fmpz_poly

from ..errors import DomainError, InputError, PrecisionError
from .balls import (
    DEFAULT_CAP_BITS,
    ComplexBall,
    arb_from_fraction,
    fraction_from_arb_mid,
    fraction_from_arb_rad,
    precision_ladder,
    workprec,
)

Box = tuple  # (re_lo, re_hi, im_lo, im_hi) as Fractions


def _normalize(poly):
    """Primitive part with positive leading coefficient, as fmpz_poly."""
    poly = fmpz_poly([int(c) for c in poly]) if not isinstance(poly, fmpz_poly) else poly
    if poly.is_zero():
        raise DomainError("zero polynomial has no roots")
    c = poly.content()
    if poly.leading_coefficient() < 0:
        c = -c
    return fmpz_poly([int(x) // int(c) for x in poly.coeffs()])


@lru_cache(maxsize=4096)
def _roots(coeffs, prec):
    """Isolated root balls of an irreducible (hence squarefree) polynomial."""
    poly = fmpz_poly(list(coeffs))
    if poly.degree() == 1:
        a0, a1 = int(coeffs[0]), int(coeffs[1])
        with workprec(prec):
            return (acb(arb_from_fraction(Fraction(-a0, a1))),)
    with workprec(prec):
        return tuple(r for r, _ in poly.complex_roots())


def _irreducible_factors(poly):
    _, facs = fmpz_poly(poly).factor()
    return [_normalize(f) for f, _ in facs]


def _ball_box(ball, prec):
    """Rational rectangle enclosing ``ball`` with nonempty interior."""
    eps = Fraction(1, 1 << min(prec, 4096))
    rm, rr = fraction_from_arb_mid(ball.real), fraction_from_arb_rad(ball.real)
    im, ir = fraction_from_arb_mid(ball.imag), fraction_from_arb_rad(ball.imag)
    return (rm - rr - eps, rm + rr + eps, im - ir - eps, im + ir + eps)


def _box_acb(box, prec):
    with workprec(prec):
        re = arb_from_fraction((box[0] + box[1]) / 2)
        im = arb_from_fraction((box[2] + box[3]) / 2)
        rr = arb_from_fraction((box[1] - box[0]) / 2)
        ri = arb_from_fraction((box[3] - box[2]) / 2)
        return acb(re + arb(0, rr), im + arb(0, ri))


def _ball_inside_box(ball, box):
    rm, rr = fraction_from_arb_mid(ball.real), fraction_from_arb_rad(ball.real)
    im, ir = fraction_from_arb_mid(ball.imag), fraction_from_arb_rad(ball.imag)
    return box[0] < rm - rr and rm + rr < box[1] and box[2] < im - ir and im + ir < box[3]


def _ball_outside_box(ball, box):
    rm, rr = fraction_from_arb_mid(ball.real), fraction_from_arb_rad(ball.real)
    im, ir = fraction_from_arb_mid(ball.imag), fraction_from_arb_rad(ball.imag)
    return rm + rr < box[0] or rm - rr > box[1] or im + ir < box[2] or im - ir > box[3]


def count_roots_in_box(minpoly, box, cap=DEFAULT_CAP_BITS):
    """Exact number of roots of the squarefree ``minpoly`` inside ``box``."""
    coeffs = tuple(int(c) for c in minpoly)
    for prec in precision_ladder(64, cap):
        roots = _roots(coeffs, prec)
        inside = outside = 0
        for r in roots:
            if _ball_inside_box(r, box):
                inside += 1
            elif _ball_outside_box(r, box):
                outside += 1
        if inside + outside == len(roots):
            return inside
    raise PrecisionError("cannot decide root count for box")


def _interpolate(xs, ys):
    """Exact Newton interpolation; returns integer coefficients low-to-high."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    poly[0] = coef[n - 1]
    # Horner on the Newton form
    for k in range(n - 2, -1, -1):
        new = [Fraction(0)] * n
        for i in range(n - 1):
            new[i + 1] += poly[i]
            new[i] -= xs[k] * poly[i]
        new[0] += coef[k]
        poly = new
    den = 1
    for c in poly:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in poly]


def _sum_resultant(f, g):
    """Polynomial vanishing at every alpha + beta (f(alpha) = g(beta) = 0)."""
    deg = f.degree() * g.degree()
    xs = list(range(deg + 1))
    ys = [int(f(fmpz_poly([x0, -1])).resultant(g)) for x0 in xs]
    return fmpz_poly(_interpolate(xs, ys))


def _product_resultant(f, g):
    """Polynomial vanishing at every alpha * beta (both nonzero)."""
    m = f.degree()
    fc = [int(c) for c in f.coeffs()]
    deg = m * g.degree()
    xs = list(range(1, deg + 2))
    ys = []
    for x0 in xs:
        h = [0] * (m + 1)
        for i, c in enumerate(fc):
            h[m - i] = c * x0**i
        ys.append(int(fmpz_poly(h).resultant(g)))
    return fmpz_poly(_interpolate(xs, ys))


def _select_root(poly, enclosure, cap=DEFAULT_CAP_BITS):
    """The unique root of ``poly`` compatible with ``enclosure(prec)``.

    Returns (irreducible factor, root ball, precision used).
    """
    factors = _irreducible_factors(poly)
    for prec in precision_ladder(64, cap):
        enc = enclosure(prec)
        hits = []
        for fac in factors:
            coeffs = tuple(int(c) for c in fac.coeffs())
            for r in _roots(coeffs, prec):
                if r.overlaps(enc):
                    hits.append((coeffs, r))
        if len(hits) == 1:
            return hits[0][0], hits[0][1], prec
        if not hits:
            raise PrecisionError("no root of the candidate polynomial matches the enclosure")
    raise PrecisionError("root selection did not converge below the precision cap")


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """An algebraic number given by its minimal polynomial and an isolating box.

    ``minpoly`` is a tuple of integer coefficients, low degree first,
    irreducible with content 1 and positive leading coefficient. ``box`` is
    ``(re_lo, re_hi, im_lo, im_hi)`` with rational corners and contains
    exactly one root of ``minpoly``.
    """

    minpoly: tuple
    box: tuple

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rational(cls, q):
        q = Fraction(q)
        w = Fraction(1, 1 << 20)
        return cls((-q.numerator, q.denominator), (q - w, q + w, -w, w))

    @classmethod
    def _from_root(cls, coeffs, ball, prec):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) == 2:
            return cls.from_rational(Fraction(-coeffs[0], coeffs[1]))
        while True:
            roots = _roots(coeffs, prec)
            mine = [i for i, r in enumerate(roots) if r.overlaps(ball)]
            if len(mine) == 1:
                ball = roots[mine[0]]
                box = _ball_box(ball, prec)
                if all(_ball_outside_box(r, box) for i, r in enumerate(roots) if i != mine[0]):
                    return cls(coeffs, box)
            prec *= 2
            if prec > DEFAULT_CAP_BITS:
                raise PrecisionError("cannot isolate root")

    @classmethod
    def from_enclosure(cls, poly, enclosure, cap=DEFAULT_CAP_BITS):
        """Root of integer polynomial ``poly`` selected by ``enclosure(prec) -> acb``."""
        coeffs, ball, prec = _select_root(fmpz_poly([int(c) for c in poly]), enclosure, cap)
        return cls._from_root(coeffs, ball, prec)

    @classmethod
    def from_poly(cls, poly, approx):
        """Root of ``poly`` (integer coefficients, low first) nearest ``approx``."""
        approx = complex(approx)
        best = None
        for fac in _irreducible_factors(fmpz_poly([int(c) for c in poly])):
            coeffs = tuple(int(c) for c in fac.coeffs())
            for r in _roots(coeffs, 128):
                z = complex(float(r.real.mid()), float(r.imag.mid()))
                d = abs(z - approx)
                if best is None or d < best[0]:
                    best = (d, coeffs, r)
        if best is None:
            raise DomainError("polynomial has no roots")
        return cls._from_root(best[1], best[2], 128)

    @classmethod
    def root_of_unity(cls, k, n):
        """exp(2*pi*i*k/n)."""
        if n <= 0:
            raise DomainError("order must be positive")
        k %= n
        g = gcd(k, n)
        order = n // g
        if order == 1:
            return cls.from_rational(1)
        if order == 2:
            return cls.from_rational(-1)

        def enc(prec):
            with workprec(prec):
                return acb(0, 2 * arb.pi() * arb_from_fraction(Fraction(k, n))).exp()

        coeffs = tuple(int(c) for c in fmpz_poly.cyclotomic(order).coeffs())
        return cls.from_enclosure(coeffs, enc)

    @classmethod
    def real_root(cls, q, n):
        """The positive real n-th root of a positive rational ``q``."""
        q = Fraction(q)
        if q <= 0:
            raise DomainError("real_root needs a positive rational")
        poly = [-q.numerator] + [0] * (n - 1) + [q.denominator]

        def enc(prec):
            with workprec(prec):
                return acb(arb_from_fraction(q).root(n))

        return cls.from_enclosure(poly, enc)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, AlgebraicNumber):
            return x
        if isinstance(x, (int, Rational)):
            return cls.from_rational(x)
        raise TypeError(f"cannot interpret {type(x).__name__} as an algebraic number")

    # -- basic views ---------------------------------------------------------

    @property
    def degree(self):
        return len(self.minpoly) - 1

    def is_zero(self):
        return self.minpoly == (0, 1)

    def is_one(self):
        return self.minpoly == (-1, 1)

    def is_rational(self):
        return self.degree == 1

    def as_fraction(self):
        if not self.is_rational():
            raise DomainError("not a rational number")
        return Fraction(-self.minpoly[0], self.minpoly[1])

    def _root_index(self, prec):
        roots = _roots(self.minpoly, prec)
        hits = [i for i, r in enumerate(roots) if not _ball_outside_box(r, self.box)]
        if len(hits) == 1:
            return hits[0]
        return None

    def to_ball(self, prec):
        """Rigorous enclosure with radius <= 2**(2 - prec) * max(1, |center|)."""
        return ComplexBall(_algebraic_ball(self.minpoly, self.box, int(prec)), int(prec))

    def __hash__(self):
        return hash(self.minpoly)

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = AlgebraicNumber.from_rational(other)
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        if self.is_rational():
            return True
        for prec in precision_ladder(64):
            i, j = self._root_index(prec), other._root_index(prec)
            if i is not None and j is not None:
                return i == j
        raise PrecisionError("cannot compare algebraic numbers")

    # -- arithmetic ------------------------------------------------------------

    def __neg__(self):
        coeffs = tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.minpoly))
        coeffs = tuple(int(c) for c in _normalize(coeffs).coeffs())
        b = self.box
        return AlgebraicNumber(coeffs, (-b[1], -b[0], -b[3], -b[2]))

    def conjugate(self):
        b = self.box
        return AlgebraicNumber(self.minpoly, (b[0], b[1], -b[3], -b[2]))

    def inverse(self):
        if self.is_zero():
            raise DomainError("inversion of zero")
        if self.is_rational():
            return AlgebraicNumber.from_rational(1 / self.as_fraction())
        coeffs = tuple(reversed(self.minpoly))

        def enc(prec):
            with workprec(prec):
                return 1 / self.to_ball(prec).value

        return AlgebraicNumber.from_enclosure(coeffs, enc)

    def __add__(self, other):
        try:
            other = AlgebraicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_rational() and other.is_rational():
            return AlgebraicNumber.from_rational(self.as_fraction() + other.as_fraction())
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        poly = _sum_resultant(fmpz_poly(list(self.minpoly)), fmpz_poly(list(other.minpoly)))

        def enc(prec):
            with workprec(prec):
                return self.to_ball(prec).value + other.to_ball(prec).value

        return AlgebraicNumber.from_enclosure(poly.coeffs(), enc)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = AlgebraicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return AlgebraicNumber.coerce(other) + (-self)

    def __mul__(self, other):
        try:
            other = AlgebraicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return AlgebraicNumber.from_rational(0)
        if self.is_rational() and other.is_rational():
            return AlgebraicNumber.from_rational(self.as_fraction() * other.as_fraction())
        poly = _product_resultant(fmpz_poly(list(self.minpoly)), fmpz_poly(list(other.minpoly)))

        def enc(prec):
            with workprec(prec):
                return self.to_ball(prec).value * other.to_ball(prec).value

        return AlgebraicNumber.from_enclosure(poly.coeffs(), enc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * AlgebraicNumber.coerce(other).inverse()

    def __rtruediv__(self, other):
        return AlgebraicNumber.coerce(other) * self.inverse()

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_rational():
            return AlgebraicNumber.from_rational(self.as_fraction() ** n)
        result = AlgebraicNumber.from_rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self):
        if self.is_rational():
            return f"AlgebraicNumber({self.as_fraction()})"
        c = self.to_ball(64).center
        return f"AlgebraicNumber(minpoly={list(self.minpoly)}, ~{complex(c):.10g})"


@lru_cache(maxsize=8192)
def _algebraic_ball(minpoly, box, prec):
    if len(minpoly) == 2:
        with workprec(prec):
            return acb(arb_from_fraction(Fraction(-minpoly[0], minpoly[1])))
    target = Fraction(1, 1 << max(prec - 2, 0))
    work = prec + 16
    while work <= DEFAULT_CAP_BITS * 2:
        roots = _roots(minpoly, work)
        hits = [r for r in roots if not _ball_outside_box(r, box)]
        if len(hits) == 1:
            r = hits[0]
            mag = max(Fraction(1), abs(fraction_from_arb_mid(r.real)) + abs(fraction_from_arb_mid(r.imag)))
            rad = fraction_from_arb_rad(r.real) + fraction_from_arb_rad(r.imag)
            if rad <= target * mag:
                return r
        work *= 2
    raise PrecisionError("cannot refine algebraic number to requested precision")


def as_algebraic(x):
    return AlgebraicNumber.coerce(x)


def is_exact_zero(x):
    if isinstance(x, AlgebraicNumber):
        return x.is_zero()
    if isinstance(x, (int, Rational)):
        return x == 0
    if hasattr(x, "is_zero"):
        return x.is_zero()
    raise TypeError(f"no exact zero test for {type(x).__name__}")


def validate_box(minpoly, box):
    """Raise InputError unless ``box`` isolates exactly one root of ``minpoly``."""
    if not (box[0] < box[1] and box[2] < box[3]):
        raise InputError("box corners out of order")
    n = count_roots_in_box(minpoly, box)
    if n != 1:
        raise InputError(f"box contains {n} roots of the minimal polynomial, expected 1")
