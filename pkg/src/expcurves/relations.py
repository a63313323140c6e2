"""Integer relations, algebraic dependence and multiplicative relation lattices.

Numeric relation finding embeds the values in a lattice with scaled real
and imaginary columns and LLL-reduces it. Multiplicative relations among
rationals are computed exactly from prime valuations; among algebraic
numbers they are found on logarithms (with an extra 2*pi*i generator for
the branch) and then checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm, log2
from numbers import Rational

from flint import acb, arb, fmpz

from .errors import DomainError, InconsistencyError, PrecisionError
from .exact_numerics import AlgebraicNumber, ComplexBall, workprec
from .exact_numerics.balls import to_acb
from .lattice import (
    IntegerMatrix,
    hnf,
    integer_kernel,
    lll_reduce,
    normalize_sign,
    primitive,
    reduced_basis,
)

GUARD_BITS = 32


@dataclass(frozen=True)
class RelationLattice:
    """Integer lattice of relations among ``dim`` numbers.

    ``certificate`` is "exact" when every basis vector was verified in exact
    arithmetic and the lattice is provably complete, "verified" when the
    vectors were verified exactly but completeness rests on a bounded
    search, and "bounded-search" when nothing exact is known.
    """

    basis: IntegerMatrix
    kind: str
    certified: bool
    dim: int
    certificate: str = "bounded-search"

    @property
    def rank(self):
        return self.basis.rows

    def is_empty(self):
        return self.basis.rows == 0

    def is_full(self):
        return self.basis.rows == self.dim

    def vectors(self):
        return [tuple(r) for r in self.basis]

    def to_json(self):
        return {
            "kind": self.kind,
            "basis": self.basis.tolist(),
            "certified": self.certified,
            "certificate": self.certificate,
        }


def _balls(values, prec=None):
    out = []
    for v in values:
        if isinstance(v, ComplexBall):
            out.append(v)
        else:
            p = prec or 256
            out.append(ComplexBall(to_acb(v, p), p))
    return out


def _effective_bits(balls):
    bits = []
    for b in balls:
        with workprec(b.prec):
            r = b.value.rad()
            if r == 0:
                bits.append(b.prec)
            else:
                man, exp = r.man_exp()
                bits.append(min(b.prec, -(int(exp) + int(man).bit_length()) - 1))
    return min(bits)


def required_bits(n, max_coeff, guard=GUARD_BITS):
    return int(2 * n * log2(max(2, int(max_coeff))) + guard)


def _relation_candidates(balls, scale_bits, prec):
    """LLL-reduced rows of the scaled embedding, as (coeffs, numeric residual)."""
    n = len(balls)
    with workprec(prec):
        scale = arb(2) ** scale_bits
        re_col, im_col = [], []
        use_im = any(not b.value.imag.contains(0) or b.value.imag.rad() > 0 for b in balls)
        for b in balls:
            re_col.append(int((b.value.real.mid() * scale).floor().unique_fmpz()))
            im_col.append(int((b.value.imag.mid() * scale).floor().unique_fmpz()))
    rows = []
    for i in range(n):
        row = [int(i == j) for j in range(n)] + [re_col[i]]
        if use_im:
            row.append(im_col[i])
        rows.append(row)
    red = lll_reduce(rows)
    return [tuple(r[:n]) for r in red]


def _combination(balls, coeffs, prec):
    with workprec(prec):
        s = acb(0)
        for c, b in zip(coeffs, balls):
            if c:
                s += c * b.value
        return s


def _accept(balls, coeffs, max_coeff, prec):
    if not any(coeffs) or max(abs(c) for c in coeffs) > max_coeff:
        return False
    s = _combination(balls, coeffs, prec)
    return s.contains(0)


def integer_relation(values, max_coeff, precision_bits=None, guard_bits=GUARD_BITS):
    """Short integer vector m with sum m_i v_i = 0 numerically, or None.

    None is a heuristic certificate: no relation with |m_i| <= max_coeff is
    visible at the available precision.
    """
    balls = _balls(values, precision_bits)
    n = len(balls)
    if n == 0:
        return None
    need = required_bits(n, max_coeff, guard_bits)
    have = _effective_bits(balls)
    if have < need:
        raise PrecisionError(
            f"need about {need} bits for {n} values with coefficients up to {max_coeff}, have {have}",
            need,
        )
    prec = max(b.prec for b in balls) + 16
    for coeffs in _relation_candidates(balls, have - 4, prec):
        if _accept(balls, coeffs, max_coeff, prec):
            return normalize_sign(primitive(coeffs))
    return None


def algdep(value, max_degree, max_height, precision_bits=None):
    """Integer polynomial (coefficients low to high) vanishing at ``value``, or None.

    The result is primitive with positive leading coefficient and has the
    smallest degree found.
    """
    if isinstance(value, (int, Rational)):
        q = Fraction(value)
        return (-q.numerator, q.denominator)
    if isinstance(value, AlgebraicNumber):
        if value.degree <= max_degree and max(abs(c) for c in value.minpoly) <= max_height:
            return tuple(int(c) for c in value.minpoly)
        value = value.to_ball(precision_bits or 512)
    (ball,) = _balls([value], precision_bits)
    prec = ball.prec
    for deg in range(1, int(max_degree) + 1):
        with workprec(prec):
            powers = [ComplexBall(ball.value**k, prec) for k in range(deg + 1)]
        rel = integer_relation(powers, max_height)
        if rel is None or rel[-1] == 0:
            continue
        if rel[-1] < 0:
            rel = tuple(-c for c in rel)
        return rel
    return None


# multiplicative relations


def _factor_int(n):
    return {int(p): int(e) for p, e in fmpz(n).factor()}


def _valuations(q):
    q = Fraction(q)
    v = dict(_factor_int(abs(q.numerator))) if abs(q.numerator) > 1 else {}
    if q.denominator > 1:
        for p, e in _factor_int(q.denominator).items():
            v[p] = v.get(p, 0) - e
    return v


def _rational_relations(qs, modulo_sign=False):
    """Exact lattice {m : prod q_i^m_i = 1} for nonzero rationals."""
    vals = [_valuations(q) for q in qs]
    primes = sorted(set().union(*vals)) if vals else []
    matrix = [[v.get(p, 0) for v in vals] for p in primes]
    kern = integer_kernel(matrix, ncols=len(qs)).entries
    if modulo_sign:
        return kern
    signs = [1 if Fraction(q) < 0 else 0 for q in qs]
    odd = [r for r in kern if sum(a * s for a, s in zip(r, signs)) % 2]
    if not odd:
        return kern
    pivot = odd[0]
    out = []
    for r in kern:
        if r is pivot:
            out.append(tuple(2 * x for x in r))
        elif sum(a * s for a, s in zip(r, signs)) % 2:
            out.append(tuple(x - y for x, y in zip(r, pivot)))
        else:
            out.append(r)
    return out


def _as_exact(x):
    if isinstance(x, bool):
        raise TypeError
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, AlgebraicNumber):
        return x.as_fraction() if x.is_rational() else x
    return None


def exact_product(numbers, exponents):
    """prod numbers_i ** exponents_i in exact arithmetic."""
    out = AlgebraicNumber.from_rational(1)
    rat = Fraction(1)
    for g, m in zip(numbers, exponents):
        if not m:
            continue
        if isinstance(g, Fraction):
            rat *= g**m
        else:
            out = out * (g**m)
    return out * rat if rat != 1 else out


def _numeric_relations(balls, max_exponent, prec):
    """Small relations among logs of ``balls`` and 2*pi*i (coefficients of logs only)."""
    with workprec(prec):
        logs = [ComplexBall(b.value.log(), prec) for b in balls]
        logs.append(ComplexBall(acb(0, 2 * arb.pi()), prec))
    n = len(logs)
    have = _effective_bits(logs)
    need = required_bits(n, max_exponent)
    if have < need:
        raise PrecisionError(f"need about {need} bits for multiplicative relations", need)
    found = []
    for coeffs in _relation_candidates(logs, have - 4, prec + 16):
        if _accept(logs, coeffs, max_exponent * n, prec + 16):
            m = coeffs[:-1]
            if any(m) and max(abs(c) for c in m) <= max_exponent:
                found.append(m)
    return found


def mul_relation_lattice(numbers, max_exponent=200, precision_bits=None):
    """Lattice of m with prod g_i^m_i = 1.

    Rational inputs give an exact, complete answer. Algebraic inputs are
    searched numerically and every basis vector is verified exactly (a
    failed verification raises InconsistencyError). Pure ball inputs give
    an uncertified heuristic lattice.
    """
    numbers = list(numbers)
    n = len(numbers)
    exact = []
    for g in numbers:
        try:
            exact.append(_as_exact(g))
        except TypeError:
            exact.append(None)
    for g in exact:
        if g is not None and (g == 0 if isinstance(g, Fraction) else g.is_zero()):
            raise DomainError("multiplicative relations need nonzero numbers")
    if n == 0:
        return RelationLattice(IntegerMatrix([]), "multiplicative", True, 0, "exact")
    if all(isinstance(g, Fraction) for g in exact):
        rows = _rational_relations(exact)
        return RelationLattice(reduced_basis(rows) if rows else IntegerMatrix([]), "multiplicative", True, n, "exact")

    all_exact = all(g is not None for g in exact)
    prec = precision_bits or max(256, 4 * required_bits(n + 1, max_exponent))
    balls = []
    for g, raw in zip(exact, numbers):
        if isinstance(g, Fraction) or isinstance(g, AlgebraicNumber):
            balls.append(ComplexBall(to_acb(g, prec), prec))
        else:
            b = raw if isinstance(raw, ComplexBall) else ComplexBall(to_acb(raw, prec), prec)
            if b.contains_zero():
                raise DomainError("number is not certified nonzero")
            balls.append(b)
    found = _numeric_relations(balls, max_exponent, max(b.prec for b in balls))
    if not found:
        return RelationLattice(IntegerMatrix([]), "multiplicative", all_exact, n, "bounded-search")
    basis = reduced_basis(found)
    if all_exact:
        for m in basis:
            if not exact_product(exact, m).is_one():
                raise InconsistencyError(f"numeric relation {m} fails exact verification")
        return RelationLattice(basis, "multiplicative", True, n, "verified")
    return RelationLattice(basis, "multiplicative", False, n, "bounded-search")


def multiplicative_rank(numbers, max_exponent=200):
    lat = mul_relation_lattice(numbers, max_exponent)
    return len(numbers) - lat.rank


# radical membership


def _torsion_order_bound(degree):
    """lcm of all W with phi(W) <= degree: every root of unity of that degree has order dividing it."""
    from sympy import totient

    out = 1
    w = 1
    while w <= 4 * degree * degree + 6:
        if int(totient(w)) <= degree:
            out = lcm(out, w)
        w += 1
    return out


def _order_of_power(e, order):
    """(e', o') with exp(2 pi i e/order) = exp(2 pi i e'/o') in lowest terms."""
    e %= order
    g = gcd(e, order)
    return (e // g, order // g) if order > 1 else (0, 1)


def radical_membership(g, group, n_cap=8, exponent_cap=40):
    """Smallest n with g^n = zeta * prod d_i^m_i, zeta in the group's torsion.

    Returns (n, (e, order), m) where zeta = exp(2 pi i e/order), or None
    when no witness exists within the caps. ``group`` needs attributes
    ``torsion_order`` (None for all roots of unity) and ``free_generators``.
    """
    gens = list(group.free_generators)
    items = [_as_exact(g)] + [_as_exact(d) for d in gens]
    if any(x is None for x in items):
        raise DomainError("radical membership needs exact inputs")
    if any((x == 0) if isinstance(x, Fraction) else x.is_zero() for x in items):
        raise DomainError("radical membership needs nonzero inputs")
    if all(isinstance(x, Fraction) for x in items):
        w = 2
        omega = Fraction(-1)
    else:
        deg = 1
        for x in items:
            if isinstance(x, AlgebraicNumber):
                deg *= x.degree
        w = _torsion_order_bound(deg)
        omega = AlgebraicNumber.root_of_unity(1, w)
    if isinstance(omega, Fraction):
        basis = _rational_relations(items + [omega])
        lat = reduced_basis(basis) if basis else IntegerMatrix([])
    else:
        lat = mul_relation_lattice(items + [omega], max_exponent=max(exponent_cap * n_cap, w)).basis
    rows = [r for r in hnf(lat).entries]
    lead = [r for r in rows if r[0] != 0]
    if not lead:
        return None
    r = lead[0]
    n = r[0]
    if n < 0:
        r = tuple(-x for x in r)
        n = -n
    # g^n * prod d^r_i * omega^c = 1
    m = [-x for x in r[1:-1]]
    e, o = _order_of_power(-r[-1], w)
    q = group.torsion_order
    k = 1
    if q is not None:
        while (o // gcd(o, k)) and q % (o // gcd(o, k)):
            k += 1
    n *= k
    m = [k * x for x in m]
    e, o = _order_of_power(e * k, o)
    if n > n_cap or any(abs(x) > exponent_cap for x in m):
        return None
    return n, (e, o), tuple(m)
