"""Candidate zeros of p(z, e^z) inside a field with declared logarithms.

A candidate has the shape z = 2*pi*i*(k/n + l) + sum m_j c_j with
gcd(k, n) = 1, where the c_j are user-declared logarithms of algebraic
numbers d_j. Writing s = 2*pi*i and treating s, c_1..c_t as independent
indeterminates, z is a zero exactly when

    F = sum_{j in I} p_j(z) * zeta_n^(k j) * (d^m)^j

vanishes as a polynomial in (s, c). The search runs in three stages:

1. the order n is bounded through ``rou_sums.dz_order_bound``;
2. for each (n, k) the s-free part of F is an exponential-Diophantine
   equation in m, solved in a sup-norm box by ``expdioph.solve_bounded``;
3. for each surviving (n, k, m) the remaining condition is a univariate
   polynomial in l whose integer roots are found exactly.

Polynomial identities in (s, c) are tested through specialization maps
with an invertible image matrix on the relevant monomials, so each test
reduces to finitely many exact evaluations in Q-bar.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd

import numpy as np
from flint import acb, arb

from .errors import (
    CapError,
    DomainError,
    HypothesisError,
    InconsistencyError,
    InputError,
    PartialResultError,
    PrecisionError,
    SearchExhaustedError,
    BoundaryZeroError,
)
from .exact_numerics import AlgebraicNumber, BivariatePoly, ComplexBall, to_acb, workprec
from .exact_numerics.balls import two_pi_i, pi_i
from .exact_numerics.serialize import number_from_json, number_to_json
from .expdioph import ExpDiophInstance, field_degree, h_subgroup, norm_bound, solve_bounded
from .relations import algdep, integer_relation
from .rou_sums import CyclotomicElement, RootOfUnitySum, cyc_sum_is_zero, dz_order_bound
from .specialize import (
    AlgebraPresentation,
    MPoly,
    add,
    build_specializations,
    inv,
    is_zero,
    mul,
)
from .zero_finder import Box, ZeroFinderConfig, isolate_zeros, refine_zero, winding_count

log = logging.getLogger(__name__)


# declared data


@dataclass(frozen=True)
class LogGenerator:
    """A declared logarithm c: a decimal enclosure or log(a) for exact a."""

    label: str
    re: str = "0"
    im: str = "0"
    digits: int | None = None
    log_of: object = None

    def ball(self, prec):
        with workprec(prec):
            if self.log_of is not None:
                return to_acb(self.log_of, prec + 16).log()
            rad = arb(10) ** (-self.digits) if self.digits is not None else arb(0)
            v = acb(arb(self.re), arb(self.im))
            return v + acb(arb(0, rad), arb(0, rad))

    @property
    def accuracy_bits(self):
        if self.log_of is not None:
            return None
        return int(self.digits * 3.3219) if self.digits is not None else None

    def describe(self):
        if self.log_of is not None:
            return {"log": number_to_json(self.log_of)}
        return {"value": self.re if self.im == "0" else [self.re, self.im], "digits": self.digits}


def _decimal_digits(s):
    s = s.strip().lower().split("e")[0]
    return len(s.split(".")[1]) if "." in s else 0


def parse_log_generator(obj, label, precision=None):
    if isinstance(obj, str):
        return LogGenerator(label, re=obj, digits=precision or _decimal_digits(obj))
    if isinstance(obj, dict):
        if "log" in obj:
            return LogGenerator(label, log_of=number_from_json(obj["log"]))
        val = obj.get("value")
        digits = obj.get("precision", obj.get("digits", precision))
        if isinstance(val, list):
            re, im = str(val[0]), str(val[1])
        else:
            re, im = str(val), str(obj.get("imag", "0"))
        if digits is None:
            digits = min(_decimal_digits(re), _decimal_digits(im) if im != "0" else 10**6)
        return LogGenerator(label, re=re, im=im, digits=int(digits))
    raise InputError(f"cannot parse log generator {obj!r}")


class FieldFunction:
    """f(z) = p(z, e^z) for p with coefficients polynomial in declared c's.

    Provides ``eval_acb`` and ``eval_with_derivative`` so the zero finder
    can use it directly.
    """

    def __init__(self, poly, generators):
        self.poly = poly
        self.generators = tuple(generators)
        self.px = poly.diff(0)
        self.py = poly.diff(1)
        self._cache = {}

    def _coeffs(self, mp, prec):
        key = (id(mp), prec)
        if key not in self._cache:
            cs = [g.ball(prec) for g in self.generators]
            out = {}
            with workprec(prec):
                for e, c in mp.terms.items():
                    v = to_acb(c, prec)
                    for ci, k in zip(cs, e[2:]):
                        if k:
                            v = v * ci**k
                    out[(e[0], e[1])] = out.get((e[0], e[1]), acb(0)) + v
            self._cache[key] = (mp, out)
        return self._cache[key][1]

    def _eval(self, mp, z, ez, prec):
        with workprec(prec):
            total = acb(0)
            for (i, j), c in self._coeffs(mp, prec).items():
                total += c * z**i * ez**j
            return total

    def eval_acb(self, z, prec, ez=None):
        with workprec(prec):
            if ez is None:
                ez = z.exp()
            return self._eval(self.poly, z, ez, prec)

    def eval_with_derivative(self, z, prec):
        with workprec(prec):
            ez = z.exp()
            f = self._eval(self.poly, z, ez, prec)
            df = self._eval(self.px, z, ez, prec) + ez * self._eval(self.py, z, ez, prec)
        return f, df


def _poly_from_string(text, names):
    import sympy

    X, Y = sympy.symbols("X Y")
    csyms = sympy.symbols(list(names)) if names else ()
    if len(names) == 1 and not isinstance(csyms, (list, tuple)):
        csyms = (csyms,)
    local = {"X": X, "Y": Y, "x": X, "y": Y}
    local.update(dict(zip(names, csyms)))
    expr = sympy.sympify(text.replace("^", "**"), locals=local)
    gens = [X, Y] + list(csyms)
    poly = sympy.Poly(sympy.expand(expr), *gens)
    terms = {}
    for mono, c in poly.terms():
        if not c.is_Rational:
            raise InputError(f"coefficient {c} is not rational")
        terms[tuple(int(e) for e in mono)] = Fraction(int(c.p), int(c.q))
    return MPoly(2 + len(names), terms)


def _poly_from_bivariate(p, t):
    terms = {}
    for (i, j), c in p.terms:
        if not isinstance(c, (Fraction, AlgebraicNumber)):
            raise InputError("declared constants belong in log_generators")
        terms[(i, j) + (0,) * t] = c
    return MPoly(2 + t, terms)


@dataclass
class ExpFieldData:
    """p with coefficients in Q-bar[c_1..c_t], the c_j and d_j = exp(c_j)."""

    poly: MPoly
    log_generators: tuple
    exp_values: tuple
    names: tuple = ()
    includes_2pi_i: bool = True
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        self.log_generators = tuple(self.log_generators)
        self.exp_values = tuple(AlgebraicNumber.coerce(d) if not isinstance(d, Fraction) else d for d in self.exp_values)
        self.exp_values = tuple(d.as_fraction() if isinstance(d, AlgebraicNumber) and d.is_rational() else d for d in self.exp_values)
        t = len(self.log_generators)
        if len(self.exp_values) != t:
            raise InputError("need one exp value per log generator")
        if not self.names:
            self.names = tuple(g.label for g in self.log_generators)
        if self.poly.nvars != 2 + t:
            raise InputError("polynomial ring does not match the declared generators")
        if any(is_zero(d) for d in self.exp_values):
            raise InputError("exp values must be nonzero")
        if self.poly.is_zero():
            raise InputError("p must be nonzero")
        self._check_consistency()

    @property
    def t(self):
        return len(self.log_generators)

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "poly" not in obj:
            raise InputError("expected an object with a 'poly' field")
        gens_raw = obj.get("log_generators", [])
        names = obj.get("names") or [f"c{i + 1}" for i in range(len(gens_raw))]
        if len(names) != len(gens_raw):
            raise InputError("names and log_generators differ in length")
        prec = obj.get("precision")
        gens = [parse_log_generator(g, n, prec) for g, n in zip(gens_raw, names)]
        exps = [number_from_json(d) for d in obj.get("exp_values", [])]
        p = obj["poly"]
        if isinstance(p, str):
            poly = _poly_from_string(p, names)
        else:
            from .exact_numerics.serialize import poly_from_json

            poly = _poly_from_bivariate(poly_from_json(p), len(names))
        return cls(poly, gens, exps, tuple(names))

    def rows(self):
        """{j: p_j as MPoly in (X, c_1..c_t)}."""
        out = {}
        for e, c in self.poly.terms.items():
            key = (e[0],) + e[2:]
            out.setdefault(e[1], {})[key] = c
        return {j: MPoly(1 + self.t, terms) for j, terms in sorted(out.items())}

    def index_set(self):
        return sorted({e[1] for e in self.poly.terms})

    def check_hypothesis(self):
        """Both variables appear and p has at least two rows."""
        degx = max((e[0] for e in self.poly.terms), default=0)
        degy = max((e[1] for e in self.poly.terms), default=0)
        if degx < 1 or degy < 1:
            raise InputError("both X and Y must appear in p")
        if len(self.index_set()) < 2:
            raise InputError("p = p_j(X) Y^j is reducible; need at least two rows")

    def function(self):
        return FieldFunction(self.poly, self.log_generators)

    def coefficient_numbers(self):
        return [c for c in self.poly.terms.values() if isinstance(c, AlgebraicNumber)]

    def _check_consistency(self, prec=256):
        bits = [g.accuracy_bits for g in self.log_generators if g.accuracy_bits is not None]
        work = min([prec] + [b + 16 for b in bits])
        for g, d in zip(self.log_generators, self.exp_values):
            with workprec(work):
                diff = g.ball(work).exp() - to_acb(d, work)
            if not diff.contains(0):
                raise InputError(f"exp({g.label}) does not match its declared value")
        self.checks["exp_consistency"] = f"certified at {work} bits"
        if not self.log_generators:
            self.checks["independence_with_pi_i"] = "trivial"
            return
        vals = [ComplexBall(g.ball(work), work) for g in self.log_generators]
        vals.append(ComplexBall(pi_i(work), work))
        try:
            rel = integer_relation(vals, 100)
        except PrecisionError:
            self.checks["independence_with_pi_i"] = "unchecked (insufficient precision)"
            return
        if rel is not None:
            raise InputError(f"declared logarithms satisfy the relation {rel} with pi*i")
        self.checks["independence_with_pi_i"] = "no relation with coefficients <= 100 (heuristic)"


@dataclass(frozen=True, order=True)
class CandidateZero:
    """z = 2*pi*i*(k/n + l) + sum m_j c_j."""

    n: int
    k: int
    l: int
    m: tuple

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.k < self.n or gcd(self.k, self.n) != 1:
            raise DomainError("need 0 <= k < n and gcd(k, n) = 1")

    def ball(self, data, prec):
        with workprec(prec):
            w = to_acb(Fraction(self.k, self.n) + self.l, prec)
            z = two_pi_i(prec) * w
            for mj, g in zip(self.m, data.log_generators):
                if mj:
                    z += mj * g.ball(prec)
        return z

    def to_json(self):
        return {"n": self.n, "k": self.k, "l": self.l, "m": list(self.m)}


@dataclass
class PipelineConfig:
    N_rou_override: int | None = None
    N_lat: int | None = None
    delta: float | None = None
    eta: float | None = None
    torsion_cap: int = 1000
    max_lattice_points: int = 2_000_000
    l_bound_cap: int = 10**6
    specialization_budget: int = 20000

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj or {})
        known = {k: obj[k] for k in cls.__dataclass_fields__ if k in obj}
        return cls(**known)


DEFAULT_N_LAT = 50


class CandidateSet(list):
    """List of CandidateZero with the bounds and certificates that produced it."""

    def __init__(self, items=(), bounds_used=None, certificates=None, excluded=None, notes=None):
        super().__init__(items)
        self.bounds_used = bounds_used or {}
        self.certificates = certificates or {}
        self.excluded = excluded or []
        self.notes = notes or {}


# exact helpers


def _zeta_power(e, n):
    z = AlgebraicNumber.root_of_unity(e % n, n)
    return z.as_fraction() if z.is_rational() else z


def _power(x, e):
    if isinstance(x, Fraction):
        return x**e
    if e >= 0:
        return x**e
    return inv(x) ** (-e)


def _monomials(nvars, deg):
    return sorted(e for e in product(range(deg + 1), repeat=nvars) if sum(e) <= deg)


def _univariate_rows(rows, point):
    """p_j with c substituted: {j: {i: value}}."""
    out = {}
    for j, mp in rows.items():
        coeffs = {}
        for e, c in mp.terms.items():
            v = c
            for g, k in zip(point, e[1:]):
                if k:
                    v = mul(v, _power(g, k))
            coeffs[e[0]] = add(coeffs.get(e[0], Fraction(0)), v)
        out[j] = {i: v for i, v in coeffs.items() if not is_zero(v)}
    return out


def _poly_in_linear(coeffs, linear, nvars):
    """sum_i a_i L^i as MPoly, L a linear form given by its coefficient list."""
    lin = MPoly(nvars, {tuple(int(u == v) for v in range(nvars)): g for u, g in enumerate(linear)})
    out = MPoly(nvars)
    power = MPoly.constant(nvars, 1)
    for i in range(max(coeffs, default=0) + 1):
        if i in coeffs:
            out = out + power * coeffs[i]
        power = power * lin
    return out


def _shifted(coeffs, sigma, x0):
    """Coefficients in l of sum_i a_i (sigma*l + x0)^i, low to high."""
    deg = max(coeffs, default=0)
    out = [Fraction(0)] * (deg + 1)
    for i, a in coeffs.items():
        for e in range(i + 1):
            c = Fraction(comb(i, e)) * sigma**e * x0 ** (i - e)
            if c:
                out[e] = add(out[e], mul(a, c))
    return out


def _integer_roots(coeffs, cap):
    """Integer roots of sum coeffs[e] l^e; None when identically zero."""
    nz = [e for e, c in enumerate(coeffs) if not is_zero(c)]
    if not nz:
        return None
    deg = nz[-1]
    if deg == 0:
        return set()
    prec = 128
    with workprec(prec):
        lead = to_acb(coeffs[deg], prec)
        big = arb(0)
        for e in range(deg):
            if not is_zero(coeffs[e]):
                big = big.max((to_acb(coeffs[e], prec) / lead).abs_upper())
        bound = 1 + big
        B = int(bound.upper().floor().unique_fmpz()) + 1
    if B > cap:
        raise CapError(f"integer root bound {B} exceeds l_bound_cap={cap}")
    roots = set()
    balls = [to_acb(c, prec) for c in coeffs]
    for l in range(-B, B + 1):
        with workprec(prec):
            v = acb(0)
            for c in reversed(balls):
                v = v * l + c
        if not v.contains(0):
            continue
        total = Fraction(0)
        for e, c in enumerate(coeffs):
            if not is_zero(c) and (l or e == 0):
                total = add(total, mul(c, Fraction(l) ** e))
        if is_zero(total):
            roots.add(l)
    return roots


def _torsion_order_bound(index, delta):
    """max over subsets T of I (|T| >= 2) of dz(|T|-1, delta) * gcd of differences in T."""
    best = 1
    for size in range(2, len(index) + 1):
        for T in combinations(index, size):
            g = 0
            for j in T[1:]:
                g = gcd(g, j - T[0])
            best = max(best, dz_order_bound(size - 1, delta) * g)
    return best


class _Engine:
    """Specialization maps and row data shared by all stages."""

    def __init__(self, data, config):
        self.data = data
        self.config = config
        self.rows = data.rows()
        self.index = data.index_set()
        t = data.t
        self.t = t
        # total degree of p in (X, c) bounds the degree of F in (s, c)
        self.degree = max(e[0] + sum(e[2:]) for e in data.poly.terms)
        names = tuple(data.names)
        pres_c = AlgebraPresentation(names)
        b_c = [MPoly(t, {e: 1}) for e in _monomials(t, self.degree)]
        self.maps_c, _ = build_specializations(pres_c, b_c, budget=config.specialization_budget)
        pres_sc = AlgebraPresentation(("s",) + names)
        b_sc = [MPoly(t + 1, {e: 1}) for e in _monomials(t + 1, self.degree)]
        self.maps_sc, _ = build_specializations(pres_sc, b_sc, budget=config.specialization_budget)
        self.rows_c = [_univariate_rows(self.rows, phi.values) for phi in self.maps_c]
        self.rows_sc = [(phi.values[0], phi.values[1:], _univariate_rows(self.rows, phi.values[1:])) for phi in self.maps_sc]

    def d_power(self, m):
        v = Fraction(1)
        for d, e in zip(self.data.exp_values, m):
            if e:
                v = mul(v, _power(d, e))
        return v

    def stage2_instance(self, rows_phi, gamma, n, k):
        qs, bases = [], []
        for j in self.index:
            q = _poly_in_linear(rows_phi.get(j, {}), list(gamma), self.t)
            z = _zeta_power(k * j, n)
            q = q * z
            qs.append(dict(q.terms) if q.terms else {(0,) * self.t: 0})
            bases.append([_power(d, j) for d in self.data.exp_values])
        return ExpDiophInstance(qs, bases)

    def stage2_value(self, rows_phi, gamma, n, k, m):
        x = sum((Fraction(g) * mi for g, mi in zip(gamma, m)), Fraction(0))
        total = Fraction(0)
        dm = self.d_power(m)
        for j in self.index:
            v = Fraction(0)
            for i, a in rows_phi.get(j, {}).items():
                v = add(v, mul(a, x**i))
            if is_zero(v):
                continue
            total = add(total, mul(mul(v, _zeta_power(k * j, n)), _power(dm, j)))
        return total

    def l_polynomial(self, sigma, gamma, rows_phi, n, k, m):
        x0 = Fraction(k, n) * sigma + sum((Fraction(g) * mi for g, mi in zip(gamma, m)), Fraction(0))
        dm = self.d_power(m)
        out = []
        for j in self.index:
            alpha = mul(_zeta_power(k * j, n), _power(dm, j))
            part = _shifted(rows_phi.get(j, {}), Fraction(sigma), x0)
            for e, c in enumerate(part):
                if e >= len(out):
                    out.append(Fraction(0))
                if not is_zero(c):
                    out[e] = add(out[e], mul(c, alpha))
        return out

    def row_images(self, sigma, gamma, rows_phi, cand):
        """Exact phi(p_j(z)) * (d^m)^j for each j in I."""
        x = Fraction(cand.k, cand.n) * sigma + cand.l * sigma
        x += sum((Fraction(g) * mi for g, mi in zip(gamma, cand.m)), Fraction(0))
        dm = self.d_power(cand.m)
        out = []
        for j in self.index:
            v = Fraction(0)
            for i, a in rows_phi.get(j, {}).items():
                v = add(v, mul(a, x**i))
            out.append((j, v, mul(v, _power(dm, j))))
        return out


def _delta_f(data):
    return field_degree(data.coefficient_numbers() + list(data.exp_values))


def candidate_set(data, config=None):
    """Finite candidate set within the configured caps, with certificates."""
    config = config or PipelineConfig()
    data.check_hypothesis()
    stages = {}
    try:
        eng = _Engine(data, config)
    except SearchExhaustedError as exc:
        raise PartialResultError(str(exc), {"specialization": "search exhausted"}) from exc
    delta = _delta_f(data)
    index = eng.index
    n_rou = config.N_rou_override if config.N_rou_override is not None else _torsion_order_bound(index, delta)
    stages["stage1_order_bound"] = {
        "delta_F": delta,
        "index_set": index,
        "N_rou": n_rou,
        "source": "override" if config.N_rou_override is not None else "dz_order_bound",
    }
    if n_rou > config.torsion_cap:
        raise PartialResultError(f"N_rou = {n_rou} exceeds torsion_cap = {config.torsion_cap}", dict(stages))
    if config.N_lat is not None:
        n_lat, lat_source = int(config.N_lat), "config"
    elif config.delta is not None and config.eta is not None:
        n_lat, lat_source = norm_bound(config.delta, config.eta), "norm_bound"
    else:
        n_lat, lat_source = DEFAULT_N_LAT, "default"
    if eng.t == 0:
        n_lat = 0
    # stage 2: the s-free part of F
    survivors = []
    stage2 = {"N_lat": n_lat, "source": lat_source, "maps": [list(map(str, phi.values)) for phi in eng.maps_c], "solutions": []}
    if eng.t:
        try:
            h = h_subgroup(ExpDiophInstance([1] * len(index), [[_power(d, j) for d in data.exp_values] for j in index]))
            stage2["h_subgroup_trivial"] = h.is_empty()
        except HypothesisError:
            stage2["h_subgroup_trivial"] = False
    try:
        for n in range(1, n_rou + 1):
            for k in range(n):
                if gcd(k, n) != 1:
                    continue
                sols = _stage2(eng, n, k, n_lat, config)
                for m, subsets in sols:
                    survivors.append((n, k, m))
                    stage2["solutions"].append({"n": n, "k": k, "m": list(m), "degenerate_subsets": [list(s) for s in subsets]})
    except CapError as exc:
        stages["stage2_expdioph"] = stage2
        raise PartialResultError(str(exc), dict(stages)) from exc
    stages["stage2_expdioph"] = stage2
    # stage 3: integer l
    found, excluded, stage3 = [], [], []
    max_l_degree = 0
    try:
        for n, k, m in survivors:
            common = None
            for sigma, gamma, rows_phi in eng.rows_sc:
                poly = eng.l_polynomial(sigma, gamma, rows_phi, n, k, m)
                roots = _integer_roots(poly, config.l_bound_cap)
                if roots is None:
                    continue
                max_l_degree = max(max_l_degree, max(e for e, c in enumerate(poly) if not is_zero(c)))
                common = roots if common is None else common & roots
                if not common:
                    break
            if common is None:
                excluded.append({"n": n, "k": k, "m": list(m), "reason": "vanishes for every l (infinite family)"})
                continue
            stage3.append({"n": n, "k": k, "m": list(m), "l_roots": sorted(common)})
            for l in sorted(common):
                found.append(CandidateZero(n, k, l, tuple(m)))
    except CapError as exc:
        stages["stage3_l_roots"] = stage3
        raise PartialResultError(str(exc), dict(stages)) from exc
    stages["stage3_l_roots"] = stage3
    # root-of-unity certificates for (*) and the exclusion list
    chains = []
    for cand in found:
        chain = _star_certificate(eng, cand)
        chains.append({"candidate": cand.to_json(), **chain})
        for j in chain["vanishing_rows"]:
            excluded.append({**cand.to_json(), "reason": f"p_{j}(z) = 0 (outside W)"})
    stages["star_sums"] = chains
    bounds = {
        "N_rou": n_rou,
        "N_lat": n_lat,
        "N_lat_source": lat_source,
        "l_degree_max": max_l_degree,
        "delta_F": delta,
        "scope": "bound-supplied" if lat_source == "norm_bound" else "certified-within-caps",
    }
    notes = {
        "field": "L is taken as the field generated by the declared data and the coefficients of p",
        "model": "s = 2*pi*i and the declared logarithms are treated as algebraically independent",
        "checks": dict(data.checks),
    }
    return CandidateSet(sorted(found), bounds, stages, excluded, notes)


def _stage2(eng, n, k, n_lat, config):
    """m with the s-free part of F vanishing under every c-specialization."""
    # order maps so that one with a nonzero instance goes first
    order = list(range(len(eng.maps_c)))
    insts = {}
    for i in order:
        inst = eng.stage2_instance(eng.rows_c[i], eng.maps_c[i].values, n, k)
        insts[i] = inst
    nontrivial = [i for i in order if any(p for p in insts[i].q_polys)]
    if not nontrivial:
        first = order[0]
    else:
        first = nontrivial[0]
    sols = solve_bounded(insts[first], n_lat, config.max_lattice_points, check_h=False)
    out = []
    for m, subsets in sols:
        ok = True
        for i in order:
            if i == first:
                continue
            if not is_zero(eng.stage2_value(eng.rows_c[i], eng.maps_c[i].values, n, k, m)):
                ok = False
                break
        if ok:
            out.append((m, subsets))
    return out


def _star_certificate(eng, cand):
    """Recheck (*) under every (s, c)-map; rational images go through rou_sums."""
    checks = []
    per_row_zero = {j: True for j in eng.index}
    for sigma, gamma, rows_phi in eng.rows_sc:
        imgs = eng.row_images(sigma, gamma, rows_phi, cand)
        for j, v, _ in imgs:
            if not is_zero(v):
                per_row_zero[j] = False
        terms = [(w, cand.k * j) for j, _, w in imgs]
        if all(isinstance(w, Fraction) for w, _ in terms):
            ok = cyc_sum_is_zero(RootOfUnitySum(cand.n, terms))
            method = "rou_sums"
        else:
            total = Fraction(0)
            for w, e in terms:
                total = add(total, mul(w, _zeta_power(e, cand.n)))
            ok = is_zero(total)
            method = "algebraic"
        if not ok:
            raise InconsistencyError(f"candidate {cand} fails the root-of-unity recheck")
        checks.append(method)
    return {"methods": checks, "vanishing_rows": [j for j, z in per_row_zero.items() if z]}


def is_candidate(data, n, k, l, m, engine=None, config=None):
    """Exact test whether z(n, k, l, m) makes F vanish identically in (s, c)."""
    eng = engine or _Engine(data, config or PipelineConfig())
    for sigma, gamma, rows_phi in eng.rows_sc:
        poly = eng.l_polynomial(sigma, gamma, rows_phi, n, k, tuple(m))
        total = Fraction(0)
        for e, c in enumerate(poly):
            if not is_zero(c):
                total = add(total, mul(c, Fraction(l) ** e))
        if not is_zero(total):
            return False
    return True


# verification


@dataclass
class CandidateVerdict:
    candidate: CandidateZero
    status: str
    residual: str
    precision_bits: int
    winding: int | None = None

    def to_json(self):
        return {
            **self.candidate.to_json(),
            "status": self.status,
            "residual": self.residual,
            "precision_bits": self.precision_bits,
            "winding": self.winding,
        }


def _mag_str(x):
    with workprec(64):
        return x.str(5, radius=False) if x != 0 else "0"


def verify_candidates(data, candidates, start_bits=256, cap_bits=4096):
    """Classify each candidate as zero / nonzero / undecided by ball evaluation."""
    f = data.function()
    out = []
    for cand in candidates:
        prec = start_bits
        verdict = None
        while prec <= cap_bits:
            z = cand.ball(data, prec)
            with workprec(prec):
                val = f.eval_acb(z, prec)
                res = val.abs_upper()
            if not val.contains(0):
                with workprec(prec):
                    low = val.abs_lower()
                verdict = CandidateVerdict(cand, "nonzero", _mag_str(low), prec)
                break
            zrad = max(z.real.rad(), z.imag.rad())
            with workprec(prec):
                h = max(arb(2) ** (-40), 4 * zrad)
                hq = Fraction(int((h * arb(2) ** 64).ceil().unique_fmpz()), 1 << 64)
                cre = Fraction(int((z.real.mid() * arb(2) ** 80).floor().unique_fmpz()), 1 << 80)
                cim = Fraction(int((z.imag.mid() * arb(2) ** 80).floor().unique_fmpz()), 1 << 80)
            box = Box(cre - hq, cre + hq, cim - hq, cim + hq)
            try:
                w = winding_count(f, box, precision_bits=prec)
            except (BoundaryZeroError, PrecisionError):
                prec *= 2
                continue
            status = "zero" if w == 1 else "undecided"
            verdict = CandidateVerdict(cand, status, _mag_str(res), prec, w)
            break
        if verdict is None:
            verdict = CandidateVerdict(cand, "undecided", "n/a", cap_bits)
        out.append(verdict)
    return out


def kzeros(data, config=None):
    """Full report: candidates, verification, exclusions, bounds, certificates."""
    cands = candidate_set(data, config)
    verdicts = verify_candidates(data, cands)
    return {
        "candidates": [c.to_json() for c in cands],
        "verified": [v.to_json() for v in verdicts],
        "excluded": cands.excluded,
        "bounds_used": cands.bounds_used,
        "certificates": cands.certificates,
        "notes": cands.notes,
    }


# independence report


def _check_irreducible(p):
    if not all(isinstance(c, Fraction) for _, c in p.terms):
        return "not checked (algebraic coefficients)"
    import sympy

    X, Y = sympy.symbols("X Y")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i * Y**j for (i, j), c in p.terms)
    _, factors = sympy.factor_list(expr)
    if sum(e for f, e in factors if f.free_symbols) > 1:
        raise InputError("p is reducible; pass an irreducible polynomial")
    return "irreducible over Q"


def _monomial_values(balls, exps, prec):
    out = []
    with workprec(prec):
        for e in exps:
            v = acb(1)
            for b, k in zip(balls, e):
                if k:
                    v = v * b.value**k
            out.append(ComplexBall(v, prec))
    return out


def _relation_holds(values, coeffs, prec):
    with workprec(prec):
        s = acb(0)
        for c, v in zip(coeffs, values):
            if c:
                s += c * v.value
    return s.contains(0)


def independence_report(p, region, max_degree, max_height, precision, max_zeros=None, triple_degree=1, config=None):
    """Zeros in ``region`` and the algebraic relations visible among them.

    Relations are searched with algdep per zero, integer relations among
    monomials of pairs (total degree <= max_degree) and of triples
    (degree <= triple_degree). Every reported relation re-verifies with
    the zeros recomputed at twice the precision.
    """
    if isinstance(p, str):
        p = BivariatePoly.from_string(p)
    if not isinstance(region, Box):
        region = Box(*region)
    irreducible = _check_irreducible(p)
    prec = int(precision)
    cfg = config or ZeroFinderConfig(target_bits=prec)
    cfg.target_bits = prec
    zeros = isolate_zeros(p, region, cfg)
    simple = [z for z in zeros if z.multiplicity == 1]
    if max_zeros is not None:
        simple = simple[: int(max_zeros)]
    balls = [z.approx for z in simple]
    fine = None

    def fine_balls():
        nonlocal fine
        if fine is None:
            fine = [refine_zero(p, z.box, target_bits=2 * prec).approx for z in simple]
        return fine

    relations, rejected = [], []
    algebraic = set()
    for i, b in enumerate(balls):
        try:
            rel = algdep(b, max_degree, max_height)
        except PrecisionError as exc:
            rejected.append({"zeros": [i], "kind": "algdep", "error": str(exc)})
            continue
        if rel is None:
            continue
        powers = _monomial_values([fine_balls()[i]], [(e,) for e in range(len(rel))], 2 * prec + 32)
        entry = {"zeros": [i], "kind": "algdep", "coefficients": list(rel)}
        if _relation_holds(powers, rel, 2 * prec + 32):
            entry["verification"] = "2x precision"
            if len(rel) == 2 and rel[0] == 0 and _exact_value_at_origin(p) == 0:
                entry["verification"] = "exact (zero at the origin)"
            relations.append(entry)
            algebraic.add(i)
        else:
            rejected.append(entry)
    free = [i for i in range(len(balls)) if i not in algebraic]
    groups = [(2, max_degree), (3, triple_degree)]
    for size, top in groups:
        for combo in combinations(free, size):
            # lowest degree first, so a relation is reported at its own degree
            for deg in range(1, top + 1):
                exps = _monomials(size, deg)
                vals = _monomial_values([balls[i] for i in combo], exps, prec)
                try:
                    rel = integer_relation(vals, max_height)
                except PrecisionError as exc:
                    rejected.append({"zeros": list(combo), "kind": f"{size}-monomials", "degree": deg, "error": str(exc)})
                    break
                if rel is None:
                    continue
                entry = {
                    "zeros": list(combo),
                    "kind": f"{size}-monomials",
                    "degree": deg,
                    "monomials": [list(e) for e in exps],
                    "coefficients": list(rel),
                }
                fvals = _monomial_values([fine_balls()[i] for i in combo], exps, 2 * prec + 32)
                if _relation_holds(fvals, rel, 2 * prec + 32):
                    entry["verification"] = "2x precision"
                    relations.append(entry)
                else:
                    rejected.append(entry)
                break
    zeros_json = []
    for z in simple:
        c = z.approx.center
        zeros_json.append({"center_re": mpmath_str(c.real, prec), "center_im": mpmath_str(c.imag, prec), "box": [str(x) for x in z.box.to_list()]})
    return {
        "zeros": zeros_json,
        "relations": relations,
        "rejected": rejected,
        "heuristic_certificate": None
        if relations
        else {
            "statement": "no relation found",
            "max_degree": max_degree,
            "triple_degree": triple_degree,
            "max_height": max_height,
            "precision_bits": prec,
        },
        "input_check": irreducible,
        "clusters": [{"box": [str(x) for x in z.box.to_list()], "multiplicity": z.multiplicity} for z in zeros if z.multiplicity > 1],
    }


def _exact_value_at_origin(p):
    """p(0, 1) exactly (e^0 = 1)."""
    total = Fraction(0)
    for (i, _), c in p.terms:
        if i == 0:
            total = add(total, c)
    return 0 if is_zero(total) else total


def mpmath_str(x, prec):
    import mpmath

    digits = max(15, int(prec * 0.30103))
    return mpmath.nstr(x, digits)


# subsums


def _term_values(terms, order=None):
    if order is not None:
        q = int(order)
        vals = []
        for c, e in terms:
            c = Fraction(c) if isinstance(c, int) else c
            if isinstance(c, Fraction):
                coeffs = [Fraction(0)] * q
                coeffs[int(e) % q] = c
                vals.append(CyclotomicElement(q, coeffs))
            else:
                vals.append(mul(c, _zeta_power(int(e), q)))
        return vals
    return [x if isinstance(x, (CyclotomicElement, AlgebraicNumber)) else Fraction(x) for x in terms]


def _exact_sum(vals):
    if vals and all(isinstance(v, CyclotomicElement) for v in vals):
        total = vals[0]
        for v in vals[1:]:
            total = total + v
        return total.is_zero()
    total = Fraction(0)
    for v in vals:
        if isinstance(v, CyclotomicElement):
            v = _cyc_to_alg(v)
        total = add(total, v)
    return is_zero(total)


def _cyc_to_alg(v):
    total = Fraction(0)
    for e, c in enumerate(v.coords):
        if c:
            total = add(total, mul(Fraction(c), _zeta_power(e, v.order)))
    return total


def _approx(v):
    if isinstance(v, Fraction):
        return complex(float(v))
    b = v.to_ball(64)
    c = b.center
    return complex(float(c.real), float(c.imag))


def subsum_recursion(terms, order=None, k_cap=20):
    """Partition a vanishing sum into minimal vanishing blocks (0-based index tuples).

    ``terms`` are exact numbers, or (coefficient, exponent) pairs standing
    for c * zeta_order^e when ``order`` is given. At each step the
    lexicographically least minimal vanishing subset of the remaining
    indices is split off.
    """
    vals = _term_values(terms, order)
    k = len(vals)
    if k > k_cap:
        raise CapError(f"{k} terms exceed the cap {k_cap}")
    if k == 0:
        return []
    if not _exact_sum(vals):
        raise DomainError("the terms do not sum to zero")
    approx = np.array([_approx(v) for v in vals], dtype=complex)
    remaining = list(range(k))
    blocks = []
    while remaining:
        block = _least_minimal(remaining, vals, approx)
        blocks.append(block)
        remaining = [i for i in remaining if i not in block]
    return blocks


def _least_minimal(indices, vals, approx):
    r = len(indices)
    sub = approx[indices]
    sums = np.zeros(1, dtype=complex)
    for v in sub:
        sums = np.concatenate([sums, sums + v])
    scale = float(np.abs(sub).sum()) + 1.0
    # double rounding over at most 20 terms stays far below this tolerance
    hits = np.nonzero(np.abs(sums) <= 1e-9 * scale)[0]
    hits = sorted((int(h) for h in hits if h), key=lambda h: (bin(h).count("1"), h))
    minimal = []
    for h in hits:
        if any((h & m) == m for m in minimal):
            continue
        members = [indices[i] for i in range(r) if h >> i & 1]
        if _exact_sum([vals[i] for i in members]):
            minimal.append(h)
    if not minimal:
        raise InconsistencyError("no vanishing subset found in a vanishing sum")
    blocks = [tuple(indices[i] for i in range(r) if h >> i & 1) for h in minimal]
    return min(blocks)
