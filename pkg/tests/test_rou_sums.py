from fractions import Fraction
from itertools import combinations, product
from math import gcd

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from expcurves.errors import CapError
from expcurves.exact_numerics import AlgebraicNumber
from expcurves.rou_sums import (
    CyclotomicElement,
    RootOfUnitySum,
    cyc_sum_is_zero,
    dz_admissible,
    dz_order_bound,
    enumerate_vanishing_sums,
    normalize_gcd,
)

# independent oracles


def dz_oracle(k, delta, search=3000):
    """Largest Q <= search meeting both displayed conditions for some delta' <= delta (sympy factorization)."""
    return max(_dz_oracle_single(k, d, search) for d in range(1, delta + 1))


def _dz_oracle_single(k, delta, search):
    best = 1
    for q in range(1, search + 1):
        ok = True
        total = 0
        for p, a in sympy.factorint(q).items():
            if a >= 2 and (2 * delta) % p ** (a - 1):
                ok = False
                break
            if a == 1:
                total += (p - 1) // gcd(delta, p - 1) - 1
        if ok and total <= k - 1:
            best = q
    return best


_PHI = {}


def _phi_coeffs(q):
    if q not in _PHI:
        x = sympy.Symbol("x")
        _PHI[q] = [int(c) for c in sympy.Poly(sympy.cyclotomic_poly(q, x), x).all_coeffs()]
    return _PHI[q]


def vanishes(q, terms):
    """Exact test: reduce sum c x^e modulo the q-th cyclotomic polynomial (plain long division)."""
    phi = _phi_coeffs(q)  # high to low, monic
    deg = len(phi) - 1
    poly = [Fraction(0)] * q
    for c, e in terms:
        poly[e % q] += Fraction(c)
    for top in range(q - 1, deg - 1, -1):
        lead = poly[top]
        if lead:
            for i, pc in enumerate(phi):
                poly[top - i] -= lead * pc
    return not any(poly[:deg])


def brute_force(k, q_max, coeffs):
    out = set()
    for q in range(1, q_max + 1):
        for rest in combinations(range(1, q), k):
            exps = (0,) + rest
            g = q
            for e in exps:
                g = gcd(g, e)
            if g != 1:
                continue
            for cs in product(coeffs, repeat=k + 1):
                terms = list(zip(cs, exps))
                if not vanishes(q, terms):
                    continue
                if any(
                    vanishes(q, [terms[i] for i in sub])
                    for r in range(1, k + 1)
                    for sub in combinations(range(k + 1), r)
                ):
                    continue
                out.add((q, tuple(sorted((e, Fraction(c)) for c, e in terms))))
    return out


def as_keys(sums):
    return {(s.order, tuple(sorted((e, c) for c, e in s.terms))) for s in sums}


# cyc_sum_is_zero


def test_cube_roots_sum_to_zero():
    assert cyc_sum_is_zero(RootOfUnitySum(3, [(1, 0), (1, 1), (1, 2)]))


def test_two_cos_sixty():
    assert cyc_sum_is_zero(RootOfUnitySum(6, [(1, 1), (1, 5), (-1, 0)]))


def test_one_plus_zeta5():
    assert not cyc_sum_is_zero(RootOfUnitySum(5, [(1, 0), (1, 1)]))


def test_algebraic_coefficients():
    # sqrt(2) * zeta_8 + sqrt(2) * zeta_8^7 = 2
    s2 = AlgebraicNumber.real_root(2, 2)
    assert cyc_sum_is_zero(RootOfUnitySum(8, [(s2, 1), (s2, 7), (-2, 0)]))
    assert not cyc_sum_is_zero(RootOfUnitySum(8, [(s2, 1), (s2, 7), (-1, 0)]))


def test_order_cap():
    with pytest.raises(CapError):
        cyc_sum_is_zero(RootOfUnitySum(11, [(1, 0)]), cap=10)


@settings(max_examples=200)
@given(
    st.integers(1, 40),
    st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 80)), min_size=1, max_size=6),
)
def test_zero_test_matches_oracle(q, terms):
    assert cyc_sum_is_zero(RootOfUnitySum(q, terms)) == vanishes(q, terms)


# normalize_gcd


@pytest.mark.parametrize(
    "q,exps,nq,nexps",
    [(6, (0, 2, 4), 3, (0, 1, 2)), (6, (0, 1), 6, (0, 1)), (12, (0, 3), 4, (0, 1))],
)
def test_normalize_examples(q, exps, nq, nexps):
    out = normalize_gcd(RootOfUnitySum(q, [(1, e) for e in exps]))
    assert out.order == nq and out.exponents == nexps


@settings(max_examples=200)
@given(
    st.integers(1, 60),
    st.integers(1, 5),
    st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 30)), min_size=1, max_size=5),
)
def test_normalize_preserves_vanishing(q, g, terms):
    s = RootOfUnitySum(q * g, [(c, e * g) for c, e in terms])
    n = normalize_gcd(s)
    assert cyc_sum_is_zero(n) == cyc_sum_is_zero(s)
    assert n.to_ball(64).overlaps(s.to_ball(64))


# dz_order_bound


def test_dz_k1():
    assert dz_order_bound(1, 1) == 4
    assert [q for q in range(1, 50) if dz_admissible(q, 1, 1)] == [1, 2, 4]


def test_dz_k2():
    assert dz_order_bound(2, 1) == 12


def test_dz_k2_delta2():
    assert dz_order_bound(2, 2) >= 12


@pytest.mark.parametrize("k,delta", [(k, d) for k in range(1, 5) for d in range(1, 4)])
def test_dz_matches_oracle(k, delta):
    bound = dz_order_bound(k, delta)
    assert bound <= 3000
    assert bound == dz_oracle(k, delta)


def test_dz_monotone():
    table = {(k, d): dz_order_bound(k, d) for k in range(1, 7) for d in range(1, 7)}
    for (k, d), v in table.items():
        if k > 1:
            assert table[k - 1, d] <= v
        if d > 1:
            assert table[k, d - 1] <= v


# cyclotomic arithmetic


@pytest.mark.parametrize("q", range(1, 201))
def test_zeta_identities(q):
    z = CyclotomicElement.zeta(q)
    assert z**q == 1
    acc = CyclotomicElement.from_rational(q, 0)
    for c in _phi_coeffs(q):
        acc = acc * z + c
    assert acc.is_zero()


# enumeration


def test_enumeration_examples():
    sums = enumerate_vanishing_sums(2, 12)
    keys = as_keys(sums)
    assert (6, ((0, Fraction(-1)), (1, Fraction(1)), (5, Fraction(1)))) in keys
    assert (3, ((0, Fraction(1)), (1, Fraction(1)), (2, Fraction(1)))) in keys
    assert all(cyc_sum_is_zero(s) for s in sums)


def test_k1_only_rational_roots():
    coeffs = [Fraction(a, b) for a in range(-3, 4) if a for b in (1, 2, 3)]
    sums = enumerate_vanishing_sums(1, 60, coefficients=coeffs)
    assert sums and {s.order for s in sums} <= {1, 2}


def test_orders_within_bound():
    sums = enumerate_vanishing_sums(2, 40, coefficients=[1, -1, 2, -2])
    assert all(s.order <= dz_order_bound(2, 1) for s in sums)


@pytest.mark.parametrize("k,q_max,coeffs", [(1, 12, (1, -1, 2)), (2, 12, (1, -1)), (2, 10, (1, -1, 2, -3)), (3, 10, (1, -1))])
def test_enumeration_matches_brute_force(k, q_max, coeffs):
    assert as_keys(enumerate_vanishing_sums(k, q_max, coefficients=coeffs)) == brute_force(k, q_max, coeffs)


def test_up_to_symmetry_is_a_subset():
    full = as_keys(enumerate_vanishing_sums(2, 12))
    reps = as_keys(enumerate_vanishing_sums(2, 12, up_to_symmetry=True))
    assert reps <= full and 0 < len(reps) < len(full)


def test_enumeration_cap():
    with pytest.raises(CapError):
        enumerate_vanishing_sums(5, 10)
