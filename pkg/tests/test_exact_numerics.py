import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from flint import acb, arb
from hypothesis import given
from hypothesis import strategies as st

from expcurves.errors import DomainError
from expcurves.exact_numerics import (
    AlgebraicNumber,
    BivariatePoly,
    ComplexBall,
    alg_arith,
    alg_to_ball,
    derivative_exp_poly,
    eval_exp_poly,
    workprec,
)
from expcurves.exact_numerics.serialize import (
    algebraic_from_json,
    algebraic_to_json,
    poly_from_json,
    rational_from_json,
    rational_to_json,
)

SQRT2 = AlgebraicNumber.real_root(2, 2)
SQRT3 = AlgebraicNumber.real_root(3, 2)
I = AlgebraicNumber.root_of_unity(1, 4)


def _mp(ball):
    c = ball.center
    return mpmath.mpc(c.real, c.imag)


# alg_arith


def test_sqrt2_squared_is_two():
    out = alg_arith("mul", SQRT2, SQRT2)
    assert out.minpoly == (-2, 1)
    assert out.is_rational() and out.as_fraction() == 2


def test_sqrt2_plus_sqrt3():
    out = alg_arith("add", SQRT2, SQRT3)
    x = sympy.Symbol("x")
    oracle = sympy.Poly(sympy.minimal_polynomial(sympy.sqrt(2) + sympy.sqrt(3), x), x)
    assert out.minpoly == tuple(int(c) for c in reversed(oracle.all_coeffs()))
    assert out.minpoly == (1, 0, -10, 0, 1)
    with mpmath.workdps(60):
        assert abs(_mp(out.to_ball(200)) - (mpmath.sqrt(2) + mpmath.sqrt(3))) < mpmath.mpf(10) ** -50


def test_inverse_of_i_is_minus_i():
    out = alg_arith("inv", I)
    assert out.minpoly == (1, 0, 1)
    assert out.to_ball(64).center.imag < 0
    assert out == -I


def test_inverse_of_zero_is_a_domain_error():
    with pytest.raises(DomainError):
        alg_arith("inv", AlgebraicNumber.from_rational(0))


FIXED = [SQRT2, SQRT3, I, AlgebraicNumber.from_rational(Fraction(1, 2)), AlgebraicNumber.root_of_unity(1, 3)]


@pytest.mark.parametrize("a,b", [(FIXED[i], FIXED[j]) for i in range(5) for j in range(i + 1, 5)])
def test_commutativity(a, b):
    assert a + b == b + a
    assert a * b == b * a


@pytest.mark.parametrize("a,b,c", [(FIXED[0], FIXED[1], FIXED[2]), (FIXED[3], FIXED[4], FIXED[0])])
def test_associativity(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("a", FIXED)
def test_times_inverse_is_one(a):
    assert (a * a.inverse()).is_one()


# alg_to_ball


def test_sqrt2_ball():
    b = alg_to_ball(SQRT2, 64)
    assert b.radius <= mpmath.mpf(2) ** -62 * 2
    with mpmath.workdps(40):
        assert abs(b.center - mpmath.sqrt(2)) <= b.radius + mpmath.mpf(2) ** -60


def test_rational_ball_is_exact():
    b = alg_to_ball(Fraction(3, 4), 64)
    assert b.radius == 0
    assert b.center == mpmath.mpf(0.75)


def test_i_ball():
    b = alg_to_ball(I, 32)
    assert b.radius <= mpmath.mpf(2) ** -30
    assert abs(b.center - 1j) < 1e-8


def test_low_precision_is_rejected():
    with pytest.raises(DomainError):
        alg_to_ball(SQRT2, 8)


@pytest.mark.parametrize("a", FIXED)
@pytest.mark.parametrize("bits", [32, 100, 257])
def test_ball_refinement_nests(a, bits):
    b1 = a.to_ball(bits)
    b2 = a.to_ball(2 * bits)
    assert b1.overlaps(b2)
    with workprec(2 * bits):
        r = b1.value.rad()
        grown = b1.value + acb(arb(0, r), arb(0, r))
    assert grown.contains(b2.value)


# eval_exp_poly


def test_eval_y_minus_x_at_zero():
    p = BivariatePoly.from_string("Y - X")
    assert eval_exp_poly(p, ComplexBall.exact(0), 64).value.contains(1)


def test_eval_euler_identity():
    p = BivariatePoly.from_string("X*Y - 1")
    with workprec(64):
        z = acb(0, arb.pi())
    out = eval_exp_poly(p, ComplexBall(z, 64), 64)
    with workprec(64):
        expected = -acb(0, arb.pi()) - 1
    assert out.value.overlaps(expected)
    assert out.radius < 1e-15


def test_eval_near_fixed_point_of_exp():
    # independent oracle: Newton on e^z - z in mpmath
    with mpmath.workdps(40):
        z = mpmath.mpc("0.3181315052", "1.3372357014")
        for _ in range(30):
            z = z - (mpmath.exp(z) - z) / (mpmath.exp(z) - 1)
        assert abs(z - mpmath.mpc("0.3181315052", "1.3372357014")) < 1e-9
        re_s, im_s = mpmath.nstr(z.real, 35), mpmath.nstr(z.imag, 35)
    p = BivariatePoly.from_string("Y - X")
    ball = ComplexBall.from_decimal(re_s, im_s, 128, rad="1e-30")
    out = eval_exp_poly(p, ball, 128)
    assert out.contains_zero()
    assert out.radius < 1e-25


def test_derivatives():
    assert derivative_exp_poly(BivariatePoly.from_string("X*Y - 1")) == (
        BivariatePoly.from_string("Y"),
        BivariatePoly.from_string("X"),
    )
    assert derivative_exp_poly(BivariatePoly.from_string("Y - X")) == (
        BivariatePoly.from_string("-1"),
        BivariatePoly.from_string("1"),
    )
    assert derivative_exp_poly(BivariatePoly.from_string("X^2*Y^3 + 2*X")) == (
        BivariatePoly.from_string("2*X*Y^3 + 2"),
        BivariatePoly.from_string("3*X^2*Y^2"),
    )


def _random_poly(rng):
    terms = {}
    for _ in range(rng.randint(1, 5)):
        terms[(rng.randint(0, 3), rng.randint(0, 3))] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return terms


def _mp_eval(terms, w, dps):
    with mpmath.workdps(dps):
        z = mpmath.mpc(mpmath.mpf(w.real.numerator) / w.real.denominator, mpmath.mpf(w.imag.numerator) / w.imag.denominator)
        ez = mpmath.exp(z)
        return sum(
            (mpmath.mpf(c.numerator) / c.denominator * z**i * ez**j for (i, j), c in terms.items()),
            mpmath.mpc(0),
        )


class _Q:
    def __init__(self, re, im):
        self.real, self.imag = re, im


def test_containment_random_points():
    # 10^4 random (p, w); the 4x-precision value comes from mpmath, not flint
    rng = random.Random(7)
    base = 64
    for _ in range(10_000):
        terms = _random_poly(rng)
        p = BivariatePoly(terms)
        re = Fraction(rng.randint(-400, 400), rng.randint(1, 64))
        im = Fraction(rng.randint(-400, 400), rng.randint(1, 64))
        with workprec(base):
            z = acb(arb(re.numerator) / re.denominator, arb(im.numerator) / im.denominator)
        ball = p.eval_acb(z, base)
        exact = _mp_eval(terms, _Q(re, im), int(4 * base * 0.30103) + 10)
        with workprec(4 * base):
            pt = acb(arb(mpmath.nstr(exact.real, 90)), arb(mpmath.nstr(exact.imag, 90)))
        # pt carries a 90-digit decimal rounding; compare against the ball widened by that much
        scale = max(1, abs(exact))
        with workprec(base):
            slack = arb(10) ** -85 * arb(str(float(scale)))
            widened = ball + acb(arb(0, slack), arb(0, slack))
        assert widened.overlaps(pt), (terms, re, im)


@given(
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-20, 20), min_size=1, max_size=6
    ),
    st.fractions(min_value=-5, max_value=5, max_denominator=16),
    st.fractions(min_value=-20, max_value=20, max_denominator=16),
)
def test_refinement_does_not_blow_up(terms, re, im):
    p = BivariatePoly({k: Fraction(v) for k, v in terms.items()})
    radii = []
    for bits in (64, 128):
        with workprec(bits):
            z = acb(arb(re.numerator) / re.denominator, arb(im.numerator) / im.denominator)
        v = p.eval_acb(z, bits)
        radii.append((v.rad(), v))
    (r1, v1), (r2, v2) = radii
    with workprec(128):
        bound = r1 + arb(2) ** (-(64 - 4)) * (v1.abs_upper() + 1)
    assert r2 <= bound
    assert v1.overlaps(v2)


# serialization


def test_rational_json_round_trip():
    assert rational_to_json(Fraction(-3, 6)) == "-1/2"
    assert rational_from_json("-1/2") == Fraction(-1, 2)
    assert rational_from_json(5) == 5


@pytest.mark.parametrize("a", FIXED)
def test_algebraic_json_round_trip(a):
    obj = algebraic_to_json(a)
    assert obj["minpoly"] == list(a.minpoly)
    assert all(isinstance(c, str) for c in obj["box"])
    assert algebraic_from_json(obj) == a


def test_poly_json_forms_agree():
    p1 = poly_from_json("X*Y - 2")
    p2 = poly_from_json([{"x": 1, "y": 1, "coeff": "1"}, {"x": 0, "y": 0, "coeff": "-2/1"}])
    assert p1 == p2
    assert p1.index_set() == [0, 1]
    assert p1.both_variables_appear()
