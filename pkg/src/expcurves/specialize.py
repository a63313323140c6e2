"""Specialization homomorphisms from finitely generated algebras to Q-bar.

An algebra is Q-bar[x_1..x_r][1/s_1, ..., 1/s_u] with the x_i declared
algebraically independent. A specialization assigns exact values to the
x_i keeping every inverted element nonzero. Families of maps are built so
that the matrix (phi_i(b_j)) is invertible, which makes every nonzero
linear combination of the b_j survive under at least one map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from numbers import Rational

from .errors import DomainError, InputError, SearchExhaustedError
from .exact_numerics import AlgebraicNumber


def _exact(x):
    if isinstance(x, bool):
        raise InputError("booleans are not numbers")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, AlgebraicNumber):
        return x.as_fraction() if x.is_rational() else x
    raise InputError(f"expected an exact number, got {type(x).__name__}")


def is_zero(x):
    return x == 0 if isinstance(x, Fraction) else x.is_zero()


def add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    out = AlgebraicNumber.coerce(a) + AlgebraicNumber.coerce(b)
    return out.as_fraction() if out.is_rational() else out


def mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if (isinstance(a, Fraction) and a == 0) or (isinstance(b, Fraction) and b == 0):
        return Fraction(0)
    out = AlgebraicNumber.coerce(a) * AlgebraicNumber.coerce(b)
    return out.as_fraction() if out.is_rational() else out


def neg(a):
    return -a


def inv(a):
    if isinstance(a, Fraction):
        return 1 / a
    return a.inverse()


class MPoly:
    """Sparse polynomial in ``nvars`` variables with exact coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for e, c in (terms.items() if isinstance(terms, dict) else (terms or ())):
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars:
                raise InputError("monomial length does not match variable count")
            c = _exact(c)
            clean[e] = add(clean[e], c) if e in clean else c
        self.terms = {e: c for e, c in clean.items() if not is_zero(c)}

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = add(out[e], c) if e in out else c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = mul(c1, c2)
                out[e] = add(out[e], c) if e in out else c
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = MPoly.constant(self.nvars, 1)
        for _ in range(int(n)):
            out = out * self
        return out

    def _lift(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise InputError("polynomials in different rings")
            return other
        return MPoly.constant(self.nvars, other)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            other = self._lift(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.terms)))

    def evaluate(self, point):
        """Exact value at ``point`` (sequence of exact numbers)."""
        total = Fraction(0)
        powers = {}
        for e, c in self.terms.items():
            val = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = _exact(point[i]) ** k
                    val = mul(val, powers[key])
            total = add(total, val)
        return total

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = mul(c, Fraction(e[i]))
        return MPoly(self.nvars, out)

    def coefficient_vector(self, monomials):
        return [self.terms.get(m, Fraction(0)) for m in monomials]

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        return "MPoly(" + " + ".join(f"({c})*{e}" for e, c in sorted(self.terms.items())) + ")"


@dataclass(frozen=True)
class Element:
    """num / den with num, den polynomials; den is a product of inverted elements."""

    num: MPoly
    den: MPoly

    def is_zero(self):
        return self.num.is_zero()


@dataclass
class AlgebraPresentation:
    """Q-bar[x_1..x_r] with named algebraic constants and inverted elements."""

    transcendental_generators: tuple
    algebraic_constants: dict = field(default_factory=dict)
    inverted_elements: tuple = ()

    def __post_init__(self):
        self.transcendental_generators = tuple(str(g) for g in self.transcendental_generators)
        self.algebraic_constants = {str(k): _exact(v) for k, v in dict(self.algebraic_constants).items()}
        inv_elems = []
        for s in self.inverted_elements:
            el = self.element(s) if not isinstance(s, MPoly) else Element(s, MPoly.constant(self.nvars, 1))
            if el.is_zero():
                raise InputError("inverted elements must be nonzero polynomials")
            inv_elems.append(el.num)
        self.inverted_elements = tuple(inv_elems)

    @property
    def nvars(self):
        return len(self.transcendental_generators)

    def variable(self, name):
        return MPoly.variable(self.nvars, self.transcendental_generators.index(name))

    def element(self, expr):
        """Parse an expression (string, number, MPoly or Element)."""
        if isinstance(expr, Element):
            return expr
        if isinstance(expr, MPoly):
            return Element(expr, MPoly.constant(self.nvars, 1))
        if isinstance(expr, (int, Rational, AlgebraicNumber)):
            return Element(MPoly.constant(self.nvars, expr), MPoly.constant(self.nvars, 1))
        if not isinstance(expr, str):
            raise InputError(f"cannot parse {expr!r}")
        import sympy

        gens = sympy.symbols(self.transcendental_generators) if self.nvars else ()
        if self.nvars == 1 and not isinstance(gens, (tuple, list)):
            gens = (gens,)
        consts = {name: sympy.Symbol(name) for name in self.algebraic_constants}
        local = dict(zip(self.transcendental_generators, gens))
        local.update(consts)
        expr = sympy.sympify(expr.replace("^", "**"), locals=local)
        num, den = sympy.fraction(sympy.together(expr))
        return Element(self._to_mpoly(num, gens, consts), self._to_mpoly(den, gens, consts))

    def _to_mpoly(self, expr, gens, consts):
        import sympy

        csyms = list(consts.values())
        allsyms = list(gens) + csyms
        poly = sympy.Poly(sympy.expand(expr), *allsyms) if allsyms else None
        terms = {}
        if poly is None:
            terms[()] = _sym_rational(expr)
            return MPoly(0, terms)
        n = self.nvars
        for mono, c in poly.terms():
            val = _sym_rational(c)
            for name, k in zip(consts, mono[n:]):
                if k:
                    val = mul(val, self.algebraic_constants[name] ** k)
            e = tuple(mono[:n])
            terms[e] = add(terms[e], val) if e in terms else val
        return MPoly(n, terms)


def _sym_rational(c):
    if not c.is_Rational:
        raise InputError(f"coefficient {c} is not rational")
    return Fraction(int(c.p), int(c.q))


@dataclass(frozen=True)
class SpecializationMap:
    """Assignment x_i -> exact value, with the expressions certified nonzero under it."""

    generators: tuple
    values: tuple
    avoided: tuple = ()

    @property
    def assignment(self):
        return dict(zip(self.generators, self.values))

    def to_json(self):
        from .exact_numerics.serialize import number_to_json

        return {
            "assignment": {g: number_to_json(v) for g, v in zip(self.generators, self.values)},
            "avoided": [str(a) for a in self.avoided],
        }


def apply_map(phi, element, presentation=None):
    """Exact image of ``element`` (Element, MPoly, or string with ``presentation``)."""
    if isinstance(element, str):
        if presentation is None:
            raise InputError("parsing a string needs the presentation")
        element = presentation.element(element)
    if isinstance(element, MPoly):
        return element.evaluate(phi.values)
    d = element.den.evaluate(phi.values)
    if is_zero(d):
        raise DomainError("denominator vanishes under this specialization")
    n = element.num.evaluate(phi.values)
    return mul(n, inv(d))


def candidate_values():
    """0, 1, -1, 2, -2, ... interleaved with halves, thirds... deterministically.

    Integers come first within each height: height h contributes h, -h,
    then the fractions a/b with max(|a|, b) = h, b > 1, in increasing b.
    """
    yield Fraction(0)
    for h in count(1):
        yield Fraction(h)
        yield Fraction(-h)
        for b in range(2, h + 1):
            for a in (h,) if b < h else range(1, h):
                if Fraction(a, b).denominator == b:
                    yield Fraction(a, b)
                    yield Fraction(-a, b)


def candidate_points(nvars):
    """Tuples of candidate values in Cantor (diagonal) order."""
    vals = []
    gen = candidate_values()

    def val(i):
        while len(vals) <= i:
            vals.append(next(gen))
        return vals[i]

    if nvars == 0:
        yield ()
        return
    for total in count(0):
        for idx in _compositions(total, nvars):
            yield tuple(val(i) for i in idx)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _rank_and_independent(vectors):
    """Indices of a greedy maximal independent subset (exact Gaussian elimination)."""
    basis = []  # list of (pivot, reduced vector)
    keep = []
    for idx, v in enumerate(vectors):
        w = list(v)
        for piv, b in basis:
            if not is_zero(w[piv]):
                f = mul(w[piv], inv(b[piv]))
                w = [add(x, neg(mul(f, y))) for x, y in zip(w, b)]
        piv = next((i for i, x in enumerate(w) if not is_zero(x)), None)
        if piv is not None:
            basis.append((piv, w))
            keep.append(idx)
    return keep


def independent_subset(presentation, elements):
    """Indices of a maximal Q-bar-linearly independent subset of ``elements``."""
    els = [presentation.element(e) for e in elements]
    # clear denominators with the product of all of them
    nums = []
    for i, el in enumerate(els):
        p = el.num
        for j, other in enumerate(els):
            if j != i:
                p = p * other.den
        nums.append(p)
    monos = sorted(set().union(*[set(p.terms) for p in nums])) if nums else []
    vecs = [p.coefficient_vector(monos) for p in nums]
    return _rank_and_independent(vecs)


def det(matrix):
    """Exact determinant by fraction-free elimination over exact numbers."""
    m = [list(r) for r in matrix]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not is_zero(m[r][c])), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        out = mul(out, p)
        pinv = inv(p)
        for r in range(c + 1, n):
            if not is_zero(m[r][c]):
                f = mul(m[r][c], pinv)
                m[r] = [add(x, neg(mul(f, y))) for x, y in zip(m[r], m[c])]
    return out if sign > 0 else neg(out)


def _cofactors(rows, size):
    """beta_j for the last row of a size x size determinant with ``rows`` fixed above."""
    out = []
    for j in range(size):
        minor = [[r[c] for c in range(size) if c != j] for r in rows]
        d = det(minor) if minor else Fraction(1)
        out.append(d if (size - 1 + j) % 2 == 0 else neg(d))
    return out


def _image_row(els, point):
    row = []
    for el in els:
        d = el.den.evaluate(point)
        if is_zero(d):
            return None
        row.append(mul(el.num.evaluate(point), inv(d)))
    return row


def _point_ok(presentation, point, extra_nonzero=()):
    for s in presentation.inverted_elements:
        if is_zero(s.evaluate(point)):
            return False
    for el in extra_nonzero:
        if is_zero(el.evaluate(point)):
            return False
    return True


def build_specializations(presentation, b, budget=20000, group_generators=None, max_exponent=200):
    """Maps phi_1..phi_q' with det(phi_i(b_j)) != 0 over an independent subset of b.

    Returns (maps, kept_indices). With ``group_generators`` every map must
    also send those elements to multiplicatively independent values.
    """
    kept = independent_subset(presentation, b)
    els = [presentation.element(b[i]) for i in kept]
    gens = [presentation.element(g) for g in (group_generators or [])]
    maps, rows = [], []
    q = len(els)
    used = set()
    for step in range(q):
        beta = _cofactors(rows, step + 1)
        found = None
        for tries, point in enumerate(candidate_points(presentation.nvars)):
            if tries >= budget:
                raise SearchExhaustedError(f"no admissible point for map {step + 1} within {budget} candidates")
            if point in used and q > 1:
                continue
            if not _point_ok(presentation, point):
                continue
            row = _image_row(els, point)
            if row is None:
                continue
            d = Fraction(0)
            for bj, rj in zip(beta, row):
                d = add(d, mul(bj, rj))
            if is_zero(d):
                continue
            if gens and not _injective_on_group(gens, point, max_exponent):
                continue
            found = (point, row)
            break
        point, row = found
        used.add(point)
        rows.append(row)
        avoided = ["det"] + (["group"] if gens else [])
        maps.append(SpecializationMap(presentation.transcendental_generators, point, tuple(avoided)))
    return maps, kept


def _injective_on_group(gens, point, max_exponent):
    from .relations import mul_relation_lattice

    images = []
    for g in gens:
        d = g.den.evaluate(point)
        n = g.num.evaluate(point)
        if is_zero(d) or is_zero(n):
            return False
        images.append(mul(n, inv(d)))
    lat = mul_relation_lattice(images, max_exponent)
    return lat.is_empty()


def build_injective_on_group(presentation, group_generators, b, budget=20000, max_exponent=200):
    """As build_specializations, each map also injective on the group generated by ``group_generators``."""
    for g in group_generators:
        if presentation.element(g).is_zero():
            raise DomainError("group generators must be nonzero")
    return build_specializations(presentation, b, budget, group_generators, max_exponent)


def image_matrix(presentation, maps, b, kept=None):
    """Exact matrix (phi_i(b_j)) over the kept elements."""
    idx = kept if kept is not None else range(len(b))
    els = [presentation.element(b[i]) for i in idx]
    return [[apply_map(phi, el) for el in els] for phi in maps]
