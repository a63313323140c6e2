"""Exact cyclotomic arithmetic and vanishing sums of roots of unity.

Also hosts the order bound for roots of unity appearing in nondegenerate
vanishing sums with coefficients in a field F, plus a brute-force
enumerator of such sums that serves as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from numbers import Rational

import numpy as np
from flint import acb, arb, fmpq, fmpq_poly, fmpz_mat, fmpz_poly

from .errors import CapError, DomainError
from .exact_numerics import AlgebraicNumber, workprec
from .exact_numerics.balls import to_acb

DEFAULT_Q_CAP = 10**6


@lru_cache(maxsize=512)
def cyclotomic_poly(q):
    return fmpz_poly.cyclotomic(q)


@lru_cache(maxsize=512)
def _phi_q(q):
    return fmpq_poly(cyclotomic_poly(q))


def euler_phi(q):
    return cyclotomic_poly(q).degree()


def _divisors(n):
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class CyclotomicElement:
    """Element of Q(zeta_Q) in the power basis 1, zeta, ..., zeta^(phi(Q)-1)."""

    __slots__ = ("order", "_poly")

    def __init__(self, order, poly):
        self.order = int(order)
        if not isinstance(poly, fmpq_poly):
            poly = fmpq_poly([fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in poly])
        self._poly = poly % _phi_q(self.order)

    @classmethod
    def zeta(cls, order, e=1):
        order = int(order)
        e = int(e) % order
        x = fmpq_poly([0, 1])
        return cls(order, x**e)

    @classmethod
    def from_rational(cls, order, q):
        q = Fraction(q)
        return cls(order, fmpq_poly([fmpq(q.numerator, q.denominator)]))

    @property
    def coords(self):
        n = euler_phi(self.order)
        cs = [Fraction(int(c.p), int(c.q)) for c in self._poly.coeffs()]
        return tuple(cs + [Fraction(0)] * (n - len(cs)))

    def is_zero(self):
        return self._poly.is_zero()

    def _check(self, other):
        if isinstance(other, (int, Rational)):
            return CyclotomicElement.from_rational(self.order, other)
        if other.order != self.order:
            raise DomainError("cyclotomic elements of different orders")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.order, self._poly + other._poly)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.order, self._poly - other._poly)

    def __neg__(self):
        return CyclotomicElement(self.order, -self._poly)

    def __mul__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.order, self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            raise DomainError("negative powers are not supported")
        out = CyclotomicElement.from_rational(self.order, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = CyclotomicElement.from_rational(self.order, other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        return self.order == other.order and (self._poly - other._poly).is_zero()

    def __hash__(self):
        return hash((self.order, self.coords))

    def to_ball(self, prec):
        from .exact_numerics import ComplexBall

        with workprec(prec):
            z = acb(0, 2 * arb.pi() / self.order).exp()
            total = acb(0)
            for k, c in enumerate(self.coords):
                if c:
                    total += to_acb(c, prec) * z**k
        return ComplexBall(total, prec)

    def __repr__(self):
        return f"CyclotomicElement({self.order}, {list(self.coords)})"


@dataclass(frozen=True)
class RootOfUnitySum:
    """sum of c * zeta_Q^e over ``terms`` = ((c, e), ...).

    Equal exponents are merged and zero coefficients dropped on
    construction; terms are sorted by exponent.
    """

    order: int
    terms: tuple

    def __init__(self, order, terms):
        order = int(order)
        if order < 1:
            raise DomainError("order must be positive")
        merged = {}
        for c, e in terms:
            e = int(e) % order
            if isinstance(c, int):
                c = Fraction(c)
            if e in merged:
                prev = merged[e]
                if isinstance(prev, Fraction) and isinstance(c, Fraction):
                    c = prev + c
                else:
                    c = AlgebraicNumber.coerce(prev) + AlgebraicNumber.coerce(c)
            merged[e] = c
        kept = []
        for e in sorted(merged):
            c = merged[e]
            if isinstance(c, AlgebraicNumber) and c.is_rational():
                c = c.as_fraction()
            if (c == 0) if isinstance(c, Fraction) else c.is_zero():
                continue
            kept.append((c, e))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "terms", tuple(kept))

    @property
    def exponents(self):
        return tuple(e for _, e in self.terms)

    @property
    def coefficients(self):
        return tuple(c for c, _ in self.terms)

    def is_rational(self):
        return all(isinstance(c, Fraction) for c, _ in self.terms)

    def subsum(self, indices):
        return RootOfUnitySum(self.order, [self.terms[i] for i in indices])

    def to_cyclotomic(self):
        if not self.is_rational():
            raise DomainError("coefficients are not rational")
        q = self.order
        coeffs = [Fraction(0)] * q
        for c, e in self.terms:
            coeffs[e] += c
        return CyclotomicElement(q, coeffs)

    def to_ball(self, prec):
        from .exact_numerics import ComplexBall

        with workprec(prec):
            z = acb(0, 2 * arb.pi() / self.order).exp()
            total = acb(0)
            for c, e in self.terms:
                total += to_acb(c, prec) * z**e
        return ComplexBall(total, prec)

    def __repr__(self):
        body = " + ".join(f"({c})*z^{e}" for c, e in self.terms) or "0"
        return f"RootOfUnitySum(Q={self.order}: {body})"


def cyc_sum_is_zero(s, cap=DEFAULT_Q_CAP):
    """Exact zero test for a sum of roots of unity."""
    if s.order > cap:
        raise CapError(f"order {s.order} exceeds cap {cap}")
    if not s.terms:
        return True
    if s.is_rational():
        return s.to_cyclotomic().is_zero()
    # algebraic coefficients: cheap numeric exclusion, then exact arithmetic
    if not s.to_ball(128).contains_zero():
        return False
    total = AlgebraicNumber.from_rational(0)
    for c, e in s.terms:
        total = total + AlgebraicNumber.coerce(c) * AlgebraicNumber.root_of_unity(e, s.order)
    return total.is_zero()


def normalize_gcd(s):
    """Rewrite over zeta_(Q/g), g = gcd(Q, exponents), so the exponents are coprime to the order."""
    g = s.order
    for e in s.exponents:
        g = gcd(g, e)
    if g <= 1:
        return s
    return RootOfUnitySum(s.order // g, [(c, e // g) for c, e in s.terms])


def dz_order_bound(k, delta):
    """Largest Q meeting both necessary conditions for some delta' <= delta.

    Condition A: if p^(n+1) | Q then p^n | 2 delta'.
    Condition B: sum over primes p exactly dividing Q of
    ((p-1)/gcd(delta', p-1) - 1) is at most k - 1.

    delta is an upper bound for the degree actually met, and the raw
    maximum for a single delta' is not monotone, hence the max over
    delta' <= delta.
    """
    k, delta = int(k), int(delta)
    if k < 1 or delta < 1:
        raise DomainError("k and delta must be positive")
    return max(_dz_single(k, d) for d in range(1, delta + 1))


@lru_cache(maxsize=1024)
def _dz_single(k, delta):
    two_delta = 2 * delta
    q = 1
    # primes dividing 2 delta may occur squared; taking the full allowed power costs nothing
    for p in _prime_factors(two_delta):
        q *= p ** (_valuation(two_delta, p) + 1)
    budget = k - 1
    # other primes occur at most once, with cost (p-1)/gcd(delta,p-1) - 1 <= budget
    best = [1] * (budget + 1)
    limit = (budget + 1) * delta + 1
    for p in range(3, limit + 1):
        if two_delta % p == 0 or any(p % r == 0 for r in range(2, int(p**0.5) + 1)):
            continue
        cost = (p - 1) // gcd(delta, p - 1) - 1
        if cost > budget:
            continue
        for b in range(budget, cost - 1, -1):
            cand = best[b - cost] * p
            if cand > best[b]:
                best[b] = cand
    return q * best[budget]


def dz_admissible(q, k, delta):
    """True if Q meets both conditions for some delta' <= delta."""
    return any(_admissible_single(q, k, d) for d in range(1, int(delta) + 1))


def _admissible_single(q, k, delta):
    two_delta = 2 * delta
    total = 0
    for p in _prime_factors(q):
        a = _valuation(q, p)
        if a >= 2 and two_delta % p ** (a - 1):
            return False
        if a == 1:
            total += (p - 1) // gcd(delta, p - 1) - 1
    return total <= k - 1


# enumeration of vanishing sums

_MOD = 1048573  # prime


@lru_cache(maxsize=256)
def _power_coords(q):
    """Integer coordinates of zeta^e, e = 0..q-1, as a (q, phi(q)) array."""
    n = euler_phi(q)
    phi = [int(c) for c in cyclotomic_poly(q).coeffs()]
    rows = []
    cur = [1] + [0] * (n - 1)
    for _ in range(q):
        rows.append(cur)
        # multiply by x and reduce with the monic cyclotomic polynomial
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            nxt = [a - top * b for a, b in zip(nxt, phi[:-1])]
        cur = nxt
    return rows


@lru_cache(maxsize=256)
def _projections(q, dim, seed):
    coords = np.array(_power_coords(q), dtype=object)
    rng = np.random.default_rng(seed + 7919 * q + dim)
    n = coords.shape[1]
    proj = rng.integers(0, _MOD, size=(n, dim)).astype(object)
    w = coords.dot(proj)
    return np.array([[int(x) % _MOD for x in row] for row in w], dtype=np.int64)


def _det_mod(m):
    m = [[x % _MOD for x in row] for row in m]
    n = len(m)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c] % _MOD
        inv = pow(m[c][c], _MOD - 2, _MOD)
        for r in range(c + 1, n):
            f = m[r][c] * inv % _MOD
            if f:
                m[r] = [(a - f * b) % _MOD for a, b in zip(m[r], m[c])]
    return det % _MOD


def _pair_form(fixed, dim):
    """Antisymmetric M with x^T M y = det[fixed..., x, y] (mod p)."""
    m = np.zeros((dim, dim), dtype=np.int64)
    for i in range(dim):
        for j in range(i + 1, dim):
            ei = [int(a == i) for a in range(dim)]
            ej = [int(a == j) for a in range(dim)]
            d = _det_mod([list(map(int, f)) for f in fixed] + [ei, ej])
            m[i, j] = d
            m[j, i] = (-d) % _MOD
    return m


def _batched_det(m):
    """Determinants mod p of a stack of small square matrices (shape (N, d, d))."""
    d = m.shape[1]
    if d == 1:
        return m[:, 0, 0] % _MOD
    if d == 2:
        return (m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]) % _MOD
    total = np.zeros(m.shape[0], dtype=np.int64)
    cols = list(range(d))
    for j in cols:
        minor = m[:, 1:, [c for c in cols if c != j]]
        term = m[:, 0, j] * _batched_det(minor) % _MOD
        total = (total + term) % _MOD if j % 2 == 0 else (total - term) % _MOD
    return total


def _raw_hits(q, k, seed):
    """Exponent tuples (0, g, ...) with g | q whose projected determinant vanishes."""
    dim = k + 1
    w = _projections(q, dim, seed)
    divs = [g for g in _divisors(q) if g < q]
    out = []
    if k == 2:
        m = _pair_form([w[0]], dim)
        big = (w.dot(m) % _MOD).dot(w.T) % _MOD
        for g in divs:
            for a in np.nonzero(big[g] == 0)[0]:
                a = int(a)
                if a not in (0, g):
                    out.append((0, g, a))
        return out
    for g in divs:
        others = [e for e in range(1, q) if e != g]
        for mids in combinations(others, k - 3):
            fixed = [w[0], w[g]] + [w[e] for e in mids]
            m = _pair_form(fixed, dim)
            lo = mids[-1] if mids else 0
            rest = np.array([e for e in others if e > lo], dtype=np.int64)
            if len(rest) < 2:
                continue
            sub = w[rest]
            big = (sub.dot(m) % _MOD).dot(sub.T) % _MOD
            ii, jj = np.nonzero(np.triu(big == 0, 1))
            head = (0, g) + tuple(mids)
            out.extend(head + (int(rest[i]), int(rest[j])) for i, j in zip(ii, jj))
    return out


def _support_filter(q, k, hits, seed):
    """Drop sets whose rational relations provably all have a zero coefficient.

    For each set the cofactors of a random k-dimensional projection form
    lambda * kappa, with kappa the primitive kernel vector when the rank is
    k. A mixed zero/nonzero pattern therefore means kappa itself has a zero
    entry, unless p divides an entry of kappa; the Hadamard bound on the
    minors rules that out before anything is discarded.
    """
    if not hits:
        return hits
    coords = _power_coords(q)
    bound = max(abs(x) for row in coords for x in row)
    if (k ** (k / 2)) * bound**k >= _MOD:
        return hits
    w = _projections(q, k, seed + 1)
    arr = np.array(hits, dtype=np.int64)
    vecs = w[arr]  # (N, k+1, k)
    cof = np.stack(
        [_batched_det(np.delete(vecs, i, axis=1)) for i in range(k + 1)], axis=1
    )
    zero = cof == 0
    mixed = zero.any(axis=1) & ~zero.all(axis=1)
    return [h for h, drop in zip(hits, mixed) if not drop]


def _candidate_sets(q, k, seed=0):
    """Exponent sets {0, g, ...} (g | q) that may carry a nondegenerate relation."""
    if k == 1:
        return [(0, g) for g in _divisors(q) if g < q]
    return _support_filter(q, k, _raw_hits(q, k, seed), seed)


def _rational_kernel(q, exps):
    coords = _power_coords(q)
    n = len(coords[0])
    mat = fmpz_mat([[coords[e][r] for e in exps] for r in range(n)])
    null, nullity = mat.nullspace()
    basis = []
    for c in range(int(nullity)):
        v = [Fraction(int(null[r, c])) for r in range(len(exps))]
        basis.append(v)
    return basis


def _rref(vectors):
    rows = [list(v) for v in vectors]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _scaled_set(coeff_set):
    den = 1
    for c in coeff_set:
        den = den * c.denominator // gcd(den, c.denominator)
    return den, {int(c * den) for c in coeff_set}


def _coefficient_vectors(rows, coeff_set, scaled, one_per_direction=False):
    """Vectors in the row span with every coordinate in ``coeff_set``.

    ``rows`` is a reduced echelon basis, so the pivot coordinates equal the
    free values; a float prefilter discards combinations before exact
    confirmation. With ``one_per_direction`` only the first vector on each
    line through the origin is produced.
    """
    den, members = scaled
    r = len(rows)
    vals = np.array([float(c) for c in coeff_set])
    grids = np.meshgrid(*([vals] * r), indexing="ij")
    free = np.stack([g.ravel() for g in grids], axis=1)
    basis = np.array([[float(x) for x in row] for row in rows])
    combo = free.dot(basis) * den
    near = np.rint(combo)
    ok = np.all(np.abs(combo - near) < 1e-6, axis=1)
    member_arr = np.array(sorted(members), dtype=np.float64)
    ok &= np.all(np.isin(near, member_arr), axis=1)
    idx = np.nonzero(ok)[0]
    if one_per_direction and len(idx):
        sel = near[idx]
        ratios = np.round(sel / sel[:, :1], 9)
        _, first = np.unique(ratios, axis=0, return_index=True)
        idx = idx[np.sort(first)]
    n = len(coeff_set)
    for flat in idx:
        picks = np.unravel_index(flat, (n,) * r)
        xs = [coeff_set[i] for i in picks]
        vec = [sum(x * row[i] for x, row in zip(xs, rows)) for i in range(len(rows[0]))]
        if all(v != 0 and (v * den).denominator == 1 and int(v * den) in members for v in vec):
            yield vec


def _degenerate_walls(q, exps, rows):
    """Subspaces of free values whose relation has a vanishing proper subsum.

    Returns None when some subsum vanishes identically on the whole kernel.
    A one-dimensional kernel needs no walls: a vanishing subsum and its
    complement would give two independent relations.
    """
    r = len(rows)
    if r == 1:
        return []
    coords = _power_coords(q)
    n = len(exps)
    walls = []
    for size in range(2, n - 1):
        for sub in combinations(range(n), size):
            cols = []
            for row in rows:
                tot = [Fraction(0)] * len(coords[0])
                for i in sub:
                    if row[i]:
                        for j, x in enumerate(coords[exps[i]]):
                            if x:
                                tot[j] += row[i] * x
                cols.append(tot)
            den = 1
            for col in cols:
                for v in col:
                    den = den * v.denominator // gcd(den, v.denominator)
            mat = fmpz_mat([[int(cols[c][j] * den) for c in range(r)] for j in range(len(coords[0]))])
            null, nullity = mat.nullspace()
            nullity = int(nullity)
            if nullity == r:
                return None
            if nullity:
                walls.append([[Fraction(int(null[i, c])) for i in range(r)] for c in range(nullity)])
    return walls


def _in_span(x, basis):
    """Is x in the rational span of ``basis`` (a short list of vectors)?"""
    rows, _ = _rref(basis + [list(x)])
    return len(rows) == len(basis)


def _orbit(q, exps, coeffs):
    """All (exponents, coefficients) obtained by rotating to put some term at 0 and applying units."""
    units = [u for u in range(1, q) if gcd(u, q) == 1] or [1]
    out = set()
    for shift in exps:
        for u in units:
            pairs = sorted(((u * (e - shift)) % q, c) for e, c in zip(exps, coeffs))
            out.add(tuple(pairs))
    return out


def enumerate_vanishing_sums(
    k,
    q_max,
    coefficients=(1, -1),
    q_min=1,
    up_to_symmetry=False,
    q_values=None,
):
    """All nondegenerate vanishing sums a_0 + a_1 z^n_1 + ... + a_k z^n_k.

    Exponents are distinct, include 0, and are coprime to Q as a set.
    Coefficients run over the finite set ``coefficients``. With
    ``up_to_symmetry`` one representative is returned per orbit under
    rotation, Galois action and common rescaling of the coefficients.
    """
    k, q_max = int(k), int(q_max)
    if k < 1 or k > 4 or q_max > 1000:
        raise CapError("enumeration is limited to 1 <= k <= 4 and Q <= 1000")
    coeff_set = sorted({Fraction(c) for c in coefficients if Fraction(c) != 0})
    scaled = _scaled_set(coeff_set)
    found = {}
    qs = q_values if q_values is not None else range(max(1, q_min), q_max + 1)
    for q in qs:
        if q < k + 1:
            continue
        seen_sets = set()
        for exps in _candidate_sets(q, k):
            key = frozenset(exps)
            if key in seen_sets or len(key) != k + 1:
                continue
            seen_sets.add(key)
            g = q
            for e in exps:
                g = gcd(g, e)
            if g != 1:
                continue
            exps = tuple(sorted(exps))
            kern = _rational_kernel(q, exps)
            if not kern:
                continue
            rows, pivots = _rref(kern)
            walls = _degenerate_walls(q, exps, rows)
            if walls is None:
                continue
            for vec in _coefficient_vectors(rows, coeff_set, scaled, up_to_symmetry):
                x = [vec[c] for c in pivots]
                if any(_in_span(x, wall) for wall in walls):
                    continue
                orbit = _orbit(q, exps, vec)
                if up_to_symmetry:
                    canon = min(orbit)
                    found[(q, canon)] = canon
                else:
                    for rep in orbit:
                        found[(q, rep)] = rep
    out = []
    for (q, rep) in sorted(found, key=lambda t: (t[0], [(e, c) for e, c in t[1]])):
        out.append(RootOfUnitySum(q, [(c, e) for e, c in rep]))
    return out
