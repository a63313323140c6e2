"""JSON formats shared by every module.

* Rational: ``"num/den"`` string (plain integers and decimals are accepted
  on input).
* AlgebraicNumber: ``{"minpoly": [c0, c1, ...], "box": [re_lo, re_hi,
  im_lo, im_hi]}`` with integer coefficients low-to-high and decimal-string
  corners.
* BivariatePoly: either an expression string in X, Y with rational
  coefficients, or a list of ``{"x": i, "y": j, "coeff": <number>}``.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational

from ..errors import InputError
from .algebraic import AlgebraicNumber, _roots, _ball_outside_box, validate_box
from .bivariate import BivariatePoly


def rational_to_json(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_json(s):
    if isinstance(s, bool):
        raise InputError("boolean is not a rational")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {s!r}") from exc
    raise InputError(f"bad rational {s!r}")


def _decimal_round(q, digits, up):
    """Round rational ``q`` to ``digits`` decimals, outward in direction ``up``."""
    scale = 10**digits
    n = q * scale
    k = n.numerator // n.denominator
    if up and k != n:
        k += 1
    return Fraction(k, scale)


def _decimal_str(q, digits):
    return str(Decimal(q.numerator * 10**digits // q.denominator).scaleb(-digits)) if q.denominator != 1 else str(q.numerator)


def algebraic_to_json(a):
    """Serialize with decimal corners, rounded outward and re-checked for isolation."""
    box = a.box
    width = min(box[1] - box[0], box[3] - box[2])
    digits = 1
    while Fraction(1, 10**digits) > width / 4:
        digits += 1
    while True:
        outer = (
            _decimal_round(box[0], digits, False),
            _decimal_round(box[1], digits, True),
            _decimal_round(box[2], digits, False),
            _decimal_round(box[3], digits, True),
        )
        ok = True
        if a.degree > 1:
            roots = _roots(a.minpoly, 128)
            hits = [r for r in roots if not _ball_outside_box(r, outer)]
            ok = len(hits) == 1
        if ok:
            break
        digits += 4
    return {
        "minpoly": [int(c) for c in a.minpoly],
        "box": [_decimal_str(c, digits) for c in outer],
    }


def algebraic_from_json(obj):
    if isinstance(obj, (int, str)):
        return AlgebraicNumber.from_rational(rational_from_json(obj))
    try:
        minpoly = [int(c) for c in obj["minpoly"]]
        box = tuple(Fraction(str(c)) for c in obj["box"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad algebraic number {obj!r}") from exc
    if len(box) != 4 or len(minpoly) < 2:
        raise InputError("algebraic number needs a 4-corner box and a nonconstant minpoly")
    from .algebraic import _normalize

    poly = _normalize(minpoly)
    _, facs = poly.factor()
    if len(facs) != 1 or facs[0][1] != 1:
        raise InputError("minpoly is not irreducible")
    coeffs = tuple(int(c) for c in poly.coeffs())
    if len(coeffs) == 2:
        return AlgebraicNumber.from_rational(Fraction(-coeffs[0], coeffs[1]))
    validate_box(coeffs, box)
    return AlgebraicNumber(coeffs, box)


def number_to_json(x):
    if isinstance(x, (int, Rational)):
        return rational_to_json(x)
    if isinstance(x, AlgebraicNumber):
        if x.is_rational():
            return rational_to_json(x.as_fraction())
        return algebraic_to_json(x)
    raise InputError(f"cannot serialize {type(x).__name__}")


def number_from_json(obj):
    if isinstance(obj, (int, str)):
        return rational_from_json(obj)
    a = algebraic_from_json(obj)
    return a.as_fraction() if a.is_rational() else a


def poly_from_json(obj):
    if isinstance(obj, str):
        return BivariatePoly.from_string(obj)
    if not isinstance(obj, list):
        raise InputError("poly must be a string or a list of terms")
    coeffs = {}
    for term in obj:
        try:
            key = (int(term["x"]), int(term["y"]))
            coeffs[key] = number_from_json(term["coeff"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad term {term!r}") from exc
    return BivariatePoly(coeffs)


def poly_to_json(p):
    return [{"x": i, "y": j, "coeff": number_to_json(c)} for (i, j), c in p.terms]


def box_to_json(box):
    return [rational_to_json(c) for c in box]


def box_from_json(obj):
    if len(obj) != 4:
        raise InputError("box needs four corners")
    return tuple(rational_from_json(c) if not isinstance(c, float) else Fraction(c) for c in obj)
