"""Bounded exponential-Diophantine equations and unit equations.

An instance sum_j Q_j(m) prod_i a_ji^m_i = 0 is solved by exhaustive scan
over the box |m|_inf <= N, with exact verification of every solution and
of every vanishing proper subsum. Unit equations sum_i lambda_i x_i = 1
are solved over groups U_Q * <d_1, ..., d_t>.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm
from numbers import Rational

import mpmath

from .errors import CapError, DomainError, HypothesisError, InputError
from .exact_numerics import AlgebraicNumber, workprec
from .exact_numerics.balls import to_acb
from .lattice import IntegerMatrix, integer_kernel, reduced_basis
from .relations import RelationLattice, mul_relation_lattice
from .rou_sums import RootOfUnitySum, cyc_sum_is_zero, dz_admissible, dz_order_bound

DEFAULT_MAX_LATTICE_POINTS = 2_000_000
DEFAULT_N = 100


def _exact(x):
    if isinstance(x, bool):
        raise InputError("booleans are not numbers")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, AlgebraicNumber):
        return x.as_fraction() if x.is_rational() else x
    raise InputError(f"expected an exact number, got {type(x).__name__}")


def _is_zero(x):
    return x == 0 if isinstance(x, Fraction) else x.is_zero()


def _pow(x, m):
    return x**m


def _mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return AlgebraicNumber.coerce(a) * AlgebraicNumber.coerce(b)


def _add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    out = AlgebraicNumber.coerce(a) + AlgebraicNumber.coerce(b)
    return out.as_fraction() if out.is_rational() else out


@dataclass(frozen=True)
class FinRankMulGroup:
    """U_Q * <d_1, ..., d_t>; ``torsion_order`` None stands for all roots of unity."""

    torsion_order: int | None = 1
    free_generators: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "free_generators", tuple(_exact(d) for d in self.free_generators))
        if self.torsion_order is not None and int(self.torsion_order) < 1:
            raise DomainError("torsion order must be positive")
        for d in self.free_generators:
            if _is_zero(d):
                raise DomainError("generators must be nonzero")

    @property
    def rank(self):
        return len(self.free_generators)

    def independence(self, max_exponent=200):
        """Relation lattice of the generators; empty means independent (within caps)."""
        return mul_relation_lattice(self.free_generators, max_exponent)

    def element(self, torsion, exponents):
        """Exact value of zeta_order^e * prod d_i^m_i for torsion = (e, order)."""
        e, order = torsion
        val = Fraction(1)
        for d, m in zip(self.free_generators, exponents):
            if m:
                val = _mul(val, _pow(d, m))
        if e % order:
            val = _mul(val, AlgebraicNumber.root_of_unity(e, order))
        return val


@dataclass(frozen=True)
class ExpDiophInstance:
    """sum_j Q_j(m) prod_i bases[j][i]^m_i = 0.

    ``q_polys[j]`` is a tuple of (exponent tuple, coefficient) pairs.
    """

    q_polys: tuple
    bases: tuple

    def __init__(self, q_polys, bases):
        bases = tuple(tuple(_exact(a) for a in row) for row in bases)
        if not bases:
            raise InputError("need at least one term")
        t = len(bases[0])
        if any(len(row) != t for row in bases):
            raise InputError("bases must form an r x t matrix")
        for row in bases:
            for a in row:
                if _is_zero(a):
                    raise DomainError("bases must be nonzero")
        polys = tuple(parse_qpoly(p, t) for p in q_polys)
        if len(polys) != len(bases):
            raise InputError("need one polynomial per row of bases")
        object.__setattr__(self, "q_polys", polys)
        object.__setattr__(self, "bases", bases)

    @property
    def r(self):
        return len(self.bases)

    @property
    def t(self):
        return len(self.bases[0])

    def is_rational(self):
        return all(isinstance(a, Fraction) for row in self.bases for a in row) and all(
            isinstance(c, Fraction) for p in self.q_polys for _, c in p
        )

    def term(self, j, m):
        """Exact value of Q_j(m) prod_i a_ji^m_i."""
        coeff = eval_qpoly(self.q_polys[j], m)
        if _is_zero(coeff):
            return Fraction(0)
        val = coeff
        for a, e in zip(self.bases[j], m):
            if e:
                val = _mul(val, _pow(a, e))
        return val


def parse_qpoly(p, t):
    """Polynomial in m_1..m_t as a tuple of (exponents, coefficient).

    Accepts a number, a dict {exponent tuple: coefficient}, a list of such
    pairs, or a string in m1..mt (``m`` is accepted when t = 1).
    """
    if isinstance(p, tuple) and all(isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], tuple) for x in p):
        items = p
    elif isinstance(p, dict):
        items = p.items()
    elif isinstance(p, list):
        items = [(tuple(e), c) for e, c in p]
    elif isinstance(p, str):
        import sympy

        names = [f"m{i + 1}" for i in range(t)]
        syms = sympy.symbols(names) if t else ()
        local = dict(zip(names, syms))
        if t == 1:
            local["m"] = syms[0]
        expr = sympy.sympify(p.replace("^", "**"), locals=local)
        if t == 0:
            if not expr.is_Rational:
                raise InputError(f"constant polynomial {p!r} is not rational")
            items = [((), Fraction(int(expr.p), int(expr.q)))]
        else:
            poly = sympy.Poly(sympy.expand(expr), *syms)
            items = []
            for mono, c in poly.terms():
                if not c.is_Rational:
                    raise InputError(f"coefficient {c} is not rational")
                items.append((tuple(int(x) for x in mono), Fraction(int(c.p), int(c.q))))
    else:
        items = [((0,) * t, p)]
    out = {}
    for e, c in items:
        e = tuple(int(x) for x in e)
        if len(e) != t or any(x < 0 for x in e):
            raise InputError("bad monomial exponent")
        c = _exact(c)
        out[e] = _add(out[e], c) if e in out else c
    return tuple(sorted((e, c) for e, c in out.items() if not _is_zero(c)))


def eval_qpoly(poly, m):
    total = Fraction(0)
    for e, c in poly:
        mono = 1
        for x, k in zip(m, e):
            mono *= x**k
        if mono:
            total = _add(total, _mul(c, Fraction(mono)))
    return total


def _intersect(a, b, dim):
    """Intersection of two integer lattices given by row bases."""
    if not a or not b:
        return []
    # x = u A = v B  <=>  (u, -v) in the kernel of [A; -B]^T
    stacked = [list(r) for r in a] + [[-x for x in r] for r in b]
    cols = [[stacked[i][j] for i in range(len(stacked))] for j in range(dim)]
    kern = integer_kernel(cols, ncols=len(stacked)).entries
    out = []
    for k in kern:
        u = k[: len(a)]
        out.append([sum(ui * a[i][j] for i, ui in enumerate(u)) for j in range(dim)])
    return [r for r in reduced_basis(out)] if out else []


def h_subgroup(inst):
    """{m : prod a_ji^m_i equal for all rows j}, as a relation lattice."""
    t = inst.t
    if t == 0:
        return RelationLattice(IntegerMatrix([]), "multiplicative", True, 0, "exact")
    full = [[int(i == j) for j in range(t)] for i in range(t)]
    current = full
    certified, certificate = True, "exact"
    for j in range(1, inst.r):
        ratios = []
        for a0, aj in zip(inst.bases[0], inst.bases[j]):
            if isinstance(a0, Fraction) and isinstance(aj, Fraction):
                ratios.append(aj / a0)
            else:
                ratios.append(AlgebraicNumber.coerce(aj) / AlgebraicNumber.coerce(a0))
        lat = mul_relation_lattice(ratios)
        certified &= lat.certified
        if lat.certificate != "exact":
            certificate = lat.certificate if certificate == "exact" else certificate
        current = _intersect(current, [list(r) for r in lat.basis], t)
        if not current:
            break
    basis = reduced_basis(current) if current else IntegerMatrix([])
    return RelationLattice(basis, "multiplicative", certified, t, certificate)


def _to_mpf(x):
    if isinstance(x, float):
        return mpmath.mpf(x)
    q = Fraction(x)
    return mpmath.mpf(q.numerator) / q.denominator


def norm_bound(delta, eta):
    """Smallest N such that every integer x >= N violates x <= delta*ln(x) + eta.

    Always at least 2: the scan starts at x = 1 and N = max(1, largest
    solution) + 1.
    """
    with mpmath.workdps(60):
        d, h = _to_mpf(delta), _to_mpf(eta)
        if d < 0 or not mpmath.isfinite(d) or not mpmath.isfinite(h):
            raise DomainError("delta must be finite and nonnegative, eta finite")

        def ok(x):
            return x <= d * mpmath.log(x) + h

        # g(x) = x - d ln x - eta is convex with minimum at x = d
        start = max(1, int(mpmath.floor(d)))
        cands = [x for x in (start, start + 1) if ok(x)]
        if not cands:
            return 2
        lo = max(cands)
        hi = lo + 1
        while ok(hi):
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return max(lo, 1) + 1


def _subset_sum_zero(values):
    total = Fraction(0)
    for v in values:
        total = _add(total, v)
    return _is_zero(total)


def _ball_excludes_zero(values, prec=96):
    with workprec(prec):
        s = sum((to_acb(v, prec) for v in values), to_acb(0, prec))
    return not s.contains(0)


def vanishing_subsets(values):
    """Proper nonempty index subsets whose values sum to exactly zero."""
    r = len(values)
    out = []
    for size in range(1, r):
        for sub in combinations(range(r), size):
            vs = [values[i] for i in sub]
            if not all(isinstance(v, Fraction) for v in vs) and _ball_excludes_zero(vs):
                continue
            if _subset_sum_zero(vs):
                out.append(sub)
    return out


def _scan_box(t, n):
    return product(range(-n, n + 1), repeat=t)


class _BallScreen:
    """Cheap numeric test that the full sum is nonzero at m (exact work is skipped then)."""

    def __init__(self, inst, prec=128):
        self.prec = prec
        self.polys = [[(e, to_acb(c, prec)) for e, c in p] for p in inst.q_polys]
        self.bases = [[to_acb(a, prec) for a in row] for row in inst.bases]

    def excludes_zero(self, m):
        with workprec(self.prec):
            total = to_acb(0, self.prec)
            for poly, row in zip(self.polys, self.bases):
                q = to_acb(0, self.prec)
                for e, c in poly:
                    mono = 1
                    for x, k in zip(m, e):
                        mono *= x**k
                    if mono:
                        q += c * mono
                for a, x in zip(row, m):
                    if x:
                        q *= a**x
                total += q
            return not total.contains(0)


def solve_bounded(inst, N, max_lattice_points=DEFAULT_MAX_LATTICE_POINTS, check_h=True):
    """All m with |m|_inf <= N solving the instance, with vanishing proper subsets.

    Returns a list of (m, subsets) sorted by m; subsets are 0-based index
    tuples, empty for a nondegenerate solution.
    """
    N = int(N)
    if N < 0:
        raise DomainError("N must be nonnegative")
    if check_h:
        h = h_subgroup(inst)
        if not h.is_empty():
            raise HypothesisError(f"H is nontrivial (rank {h.rank}); the bound does not apply")
    t = inst.t
    if (2 * N + 1) ** t > max_lattice_points:
        raise CapError(f"(2N+1)^t = {(2 * N + 1) ** t} exceeds max_lattice_points={max_lattice_points}")
    rational = inst.is_rational()
    screen = None if rational else _BallScreen(inst)
    out = []
    for m in _scan_box(t, N):
        if screen is not None and screen.excludes_zero(m):
            continue
        terms = [inst.term(j, m) for j in range(inst.r)]
        if rational:
            if sum(terms) != 0:
                continue
        else:
            nonzero = [v for v in terms if not (isinstance(v, Fraction) and v == 0)]
            if nonzero and not all(isinstance(v, Fraction) for v in nonzero) and _ball_excludes_zero(nonzero):
                continue
            if not _subset_sum_zero(terms):
                continue
        out.append((tuple(m), vanishing_subsets(terms)))
    return out


@dataclass(frozen=True)
class UnitEquationInstance:
    lambdas: tuple
    group: FinRankMulGroup

    def __init__(self, lambdas, group):
        lam = tuple(_exact(x) for x in lambdas)
        if not lam:
            raise InputError("need at least one coefficient")
        if any(_is_zero(x) for x in lam):
            raise DomainError("coefficients must be nonzero")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "group", group)

    @property
    def k(self):
        return len(self.lambdas)


@dataclass(frozen=True)
class GroupElement:
    """zeta^(e/order) * prod d_i^m_i, torsion in lowest terms."""

    torsion: tuple
    exponents: tuple

    def to_json(self):
        return {"torsion": {"e": self.torsion[0], "order": self.torsion[1]}, "exponents": list(self.exponents)}


def _reduce_torsion(e, q):
    e %= q
    g = gcd(e, q)
    return (e // g, q // g) if e else (0, 1)


def field_degree(numbers):
    """Upper bound for [Q(numbers) : Q] (product of degrees)."""
    deg = 1
    for x in numbers:
        if isinstance(x, AlgebraicNumber):
            deg *= x.degree
    return deg


def torsion_search_order(k, delta):
    """lcm of all orders Q <= dz_order_bound(k, delta) passing both necessary conditions."""
    top = dz_order_bound(k, delta)
    out = 1
    for q in range(1, top + 1):
        if dz_admissible(q, k, delta):
            out = lcm(out, q)
    return out


def solve_unit_equation(inst, exponent_bound, delta=None, max_points=DEFAULT_MAX_LATTICE_POINTS):
    """Nondegenerate solutions of sum lambda_i x_i = 1 with x_i in the group.

    Torsion parts range over U_Q with Q the group's torsion order, or, for a
    group with all roots of unity, the order bound for k terms and
    coefficient-field degree ``delta`` (computed from the data if omitted).
    Returns a sorted list of tuples of GroupElement.
    """
    grp = inst.group
    k = inst.k
    n = int(exponent_bound)
    t = grp.rank
    if grp.torsion_order is not None:
        q = int(grp.torsion_order)
    else:
        if delta is None:
            delta = field_degree(list(inst.lambdas) + list(grp.free_generators))
        q = torsion_search_order(k, delta)
    per_coord = q * (2 * n + 1) ** t
    if per_coord**k > max_points:
        raise CapError(f"search space {per_coord}^{k} exceeds max_points={max_points}")
    choices = [(e, m) for e in range(q) for m in _scan_box(t, n)]
    # free parts of each candidate coordinate, computed once
    free_part = {}
    for _, m in choices:
        if m not in free_part:
            val = Fraction(1)
            for d, x in zip(grp.free_generators, m):
                if x:
                    val = _mul(val, _pow(d, x))
            free_part[m] = val
    out = []
    for combo in product(choices, repeat=k):
        terms = [(_mul(lam, free_part[m]), e) for lam, (e, m) in zip(inst.lambdas, combo)]
        s = RootOfUnitySum(q, terms + [(Fraction(-1), 0)])
        if not cyc_sum_is_zero(s):
            continue
        degenerate = False
        for size in range(1, k):
            for sub in combinations(range(k), size):
                if cyc_sum_is_zero(RootOfUnitySum(q, [terms[i] for i in sub])):
                    degenerate = True
                    break
            if degenerate:
                break
        if degenerate:
            continue
        out.append(tuple(GroupElement(_reduce_torsion(e, q), tuple(m)) for e, m in combo))
    out = sorted(set(out), key=lambda sol: [(g.torsion[1], g.torsion[0], g.exponents) for g in sol])
    return out


def unit_solution_values(inst, solution):
    """Exact coordinate values of a solution."""
    grp = inst.group
    return tuple(grp.element(g.torsion, g.exponents) for g in solution)
