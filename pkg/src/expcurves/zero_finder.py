"""Certified counting, isolation and refinement of zeros of f(z) = p(z, e^z).

Counting uses the argument principle: the contour integral of f'/f around
a box is computed edge by edge with Arb's adaptive Gauss-Legendre
integrator, which carries rigorous remainder bounds. Refinement uses the
Krawczyk operator, whose success certifies existence and uniqueness of a
zero inside a rectangle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from flint import acb, arb

from .errors import BoundaryZeroError, HypothesisError, PrecisionError
from .exact_numerics import ComplexBall, DEFAULT_CAP_BITS, workprec
from .exact_numerics.balls import (
    arb_from_fraction,
    arb_to_mpf,
    fraction_from_arb_mid,
    fraction_from_arb_rad,
)


def _dyadic(q, bits, up):
    scale = 1 << bits
    n = q * scale
    k = n.numerator // n.denominator
    if up and k != n:
        k += 1
    return Fraction(k, scale)


@dataclass(frozen=True, order=True)
class Box:
    """Axis-aligned rectangle [re_lo, re_hi] x [im_lo, im_hi] with rational corners."""

    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    def __post_init__(self):
        for name in ("re_lo", "re_hi", "im_lo", "im_hi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (self.re_lo < self.re_hi and self.im_lo < self.im_hi):
            raise ValueError("box needs re_lo < re_hi and im_lo < im_hi")

    @property
    def width(self):
        return self.re_hi - self.re_lo

    @property
    def height(self):
        return self.im_hi - self.im_lo

    def corners(self):
        return (
            (self.re_lo, self.im_lo),
            (self.re_hi, self.im_lo),
            (self.re_hi, self.im_hi),
            (self.re_lo, self.im_hi),
        )

    def as_acb(self, prec):
        with workprec(prec):
            re = arb_from_fraction((self.re_lo + self.re_hi) / 2)
            im = arb_from_fraction((self.im_lo + self.im_hi) / 2)
            return acb(
                re + arb(0, arb_from_fraction(self.width / 2)),
                im + arb(0, arb_from_fraction(self.height / 2)),
            )

    @classmethod
    def from_acb(cls, ball):
        rm, rr = fraction_from_arb_mid(ball.real), fraction_from_arb_rad(ball.real)
        im, ir = fraction_from_arb_mid(ball.imag), fraction_from_arb_rad(ball.imag)
        return cls(rm - rr, rm + rr, im - ir, im + ir)

    def dyadic(self, bits):
        """Smallest enclosing box with corners on the 2**-bits grid."""
        return Box(
            _dyadic(self.re_lo, bits, False),
            _dyadic(self.re_hi, bits, True),
            _dyadic(self.im_lo, bits, False),
            _dyadic(self.im_hi, bits, True),
        )

    def contains_point(self, re, im):
        return self.re_lo <= re <= self.re_hi and self.im_lo <= im <= self.im_hi

    def split(self, sx, sy):
        """Four children cut at re = sx, im = sy (ordered by (im, re))."""
        return [
            Box(self.re_lo, sx, self.im_lo, sy),
            Box(sx, self.re_hi, self.im_lo, sy),
            Box(self.re_lo, sx, sy, self.im_hi),
            Box(sx, self.re_hi, sy, self.im_hi),
        ]

    def to_list(self):
        return [self.re_lo, self.re_hi, self.im_lo, self.im_hi]


@dataclass(frozen=True)
class CertifiedZero:
    approx: ComplexBall
    residual_bound: mpmath.mpf
    box: Box
    multiplicity: int = 1

    @property
    def center(self):
        return self.approx.center

    def sort_key(self):
        c = self.approx.center
        return (c.imag, c.real)


@dataclass
class ZeroFinderConfig:
    working_bits: int = 128
    target_bits: int = 256
    cap_bits: int = DEFAULT_CAP_BITS
    jitter_retries: int = 8
    seed: int = 0
    max_depth: int = 64
    # boxes narrower than this with count > 1 are reported as clusters
    cluster_width: Fraction = Fraction(1, 1 << 40)
    record_tree: bool = False
    tree: list = field(default_factory=list)


def _edge_integral(p, a, b, prec):
    def integrand(z, analytic):
        f, df = p.eval_with_derivative(z, prec)
        return df / f

    with workprec(prec):
        tol = arb(2) ** -12
        return acb.integral(
            integrand,
            a,
            b,
            abs_tol=tol,
            rel_tol=tol,
            eval_limit=20000 + 50 * prec,
            depth_limit=4 * prec,
        )


def _edge_hits_zero(p, a, b, prec, pieces=256, depth=40):
    """True if a sub-ball of [a, b] of relative width 2**-depth still has an f-image containing 0.

    Suspicious pieces are bisected, so a zero merely close to the edge is
    told apart from one on it.
    """
    with workprec(prec):
        stack = [(arb(k) / pieces, arb(k + 1) / pieces, 0) for k in range(pieces)]
        while stack:
            t0, t1, d = stack.pop()
            t = t0 + (t1 - t0) / 2
            seg = a + (b - a) * acb(t + arb(0, (t1 - t0) / 2))
            if not p.eval_with_derivative(seg, prec)[0].contains(0):
                continue
            if d >= depth:
                return True
            stack.append((t0, t, d + 1))
            stack.append((t, t1, d + 1))
    return False


def _raw_count(p, box, prec):
    """Winding number as an ``acb`` enclosure (not yet rounded)."""
    corners = [acb(*[arb_from_fraction(c) for c in xy]) for xy in box.corners()]
    total = acb(0)
    with workprec(prec):
        for a, b in zip(corners, corners[1:] + corners[:1]):
            total += _edge_integral(p, a, b, prec)
        return total / acb(0, 2 * arb.pi())


def winding_count(p, box, precision_bits=128, cap_bits=DEFAULT_CAP_BITS):
    """Number of zeros of p(z, e^z) inside ``box``, with multiplicity.

    Box corners are rounded outward to the 2**-precision_bits grid so the
    contour is exactly representable.
    """
    prec = max(32, int(precision_bits))
    box = box.dyadic(prec)
    while True:
        with workprec(prec):
            n = _raw_count(p, box, prec)
            ok = n.is_finite() and n.rad() < 0.5
            if ok:
                k = n.real.unique_fmpz()
                if k is None:
                    lo = int(n.real.mid().floor().unique_fmpz())
                    k = lo if (n.real - lo).abs_upper() < 0.5 else lo + 1
                return max(0, int(k))
            corners = [acb(*[arb_from_fraction(c) for c in xy]) for xy in box.corners()]
            for a, b in zip(corners, corners[1:] + corners[:1]):
                if _edge_hits_zero(p, a, b, prec):
                    raise BoundaryZeroError(
                        "f may vanish on the box boundary; jitter the box and retry"
                    )
        prec *= 2
        if prec > cap_bits:
            raise PrecisionError("winding count undecided below the precision cap", prec)


def _jitter(rng, length, retry):
    if retry == 0:
        return Fraction(0)
    scale = 1 << 30
    u = Fraction(rng.randrange(-scale, scale + 1), scale)
    return u * length / (1 << 20)


def _count_with_jitter(p, box, config, rng, grow):
    """Count zeros, perturbing the box on boundary trouble.

    ``grow`` expands (or, if False, keeps) the box; the actual box used is
    returned alongside the count.
    """
    last = None
    for retry in range(config.jitter_retries + 1):
        if retry:
            dx = abs(_jitter(rng, box.width, retry))
            dy = abs(_jitter(rng, box.height, retry))
            cand = Box(box.re_lo - dx, box.re_hi + dx, box.im_lo - dy, box.im_hi + dy) if grow else box
        else:
            cand = box
        cand = cand.dyadic(config.working_bits)
        try:
            return cand, winding_count(p, cand, config.working_bits, config.cap_bits)
        except BoundaryZeroError as exc:
            last = exc
    raise last


def _split_counts(p, box, config, rng):
    mx = (box.re_lo + box.re_hi) / 2
    my = (box.im_lo + box.im_hi) / 2
    last = None
    for retry in range(config.jitter_retries + 1):
        sx = _dyadic(mx + _jitter(rng, box.width, retry), config.working_bits, False)
        sy = _dyadic(my + _jitter(rng, box.height, retry), config.working_bits, False)
        if not (box.re_lo < sx < box.re_hi and box.im_lo < sy < box.im_hi):
            continue
        children = box.split(sx, sy)
        try:
            counts = [winding_count(p, c, config.working_bits, config.cap_bits) for c in children]
        except BoundaryZeroError as exc:
            last = exc
            continue
        return children, counts
    raise last if last else BoundaryZeroError("could not split box")


def _krawczyk(p, ball, prec):
    """Krawczyk image of rectangle ``ball``; None if f' vanishes on it."""
    with workprec(prec):
        m = acb(ball.real.mid(), ball.imag.mid())
        fm, dfm = p.eval_with_derivative(m, prec)
        _, dfb = p.eval_with_derivative(ball, prec)
        if dfm.contains(0):
            return None
        y = 1 / acb(dfm.real.mid(), dfm.imag.mid())
        return m - y * fm + (1 - y * dfb) * (ball - m)


def _newton_point(p, z, prec, steps=80):
    """Plain Newton iteration on ball midpoints; returns (z, last step size)."""
    step = None
    with workprec(prec):
        for _ in range(steps):
            f, df = p.eval_with_derivative(z, prec)
            if df.contains(0):
                return z, None
            dz = f / df
            z = acb(z.real.mid(), z.imag.mid()) - acb(dz.real.mid(), dz.imag.mid())
            step = dz.abs_upper()
            if step < arb(2) ** (-prec + 8):
                break
    return z, step


def _certify_near(p, z, radius, prec, within):
    """Try to certify a unique zero in the square of half-width ``radius`` at z."""
    with workprec(prec):
        ball = acb(
            z.real.mid() + arb(0, radius),
            z.imag.mid() + arb(0, radius),
        )
        if not within.contains(ball):
            return None
        k = _krawczyk(p, ball, prec)
        if k is not None and k.is_finite() and ball.contains_interior(k):
            return ball, k
    return None


def refine_zero(p, seed, target_bits=256, config=None, check_count=True):
    """Certified ball of radius <= 2**-target_bits around the unique zero in ``seed``."""
    config = config or ZeroFinderConfig()
    target_bits = int(target_bits)
    if check_count:
        n = winding_count(p, seed, config.working_bits, config.cap_bits)
        if n != 1:
            raise HypothesisError(f"seed box contains {n} zeros, expected exactly 1")
    prec = max(config.working_bits, 64)
    box = seed
    rng = random.Random(config.seed)
    iso = None
    for _ in range(200):
        within = box.as_acb(prec)
        # whole box first, then Newton from its center
        with workprec(prec):
            k = _krawczyk(p, within, prec)
            if k is not None and k.is_finite() and within.contains_interior(k):
                iso = (within, k)
                break
            c = acb(within.real.mid(), within.imag.mid())
        z, step = _newton_point(p, c, prec)
        if step is not None and within.contains(acb(z.real.mid(), z.imag.mid())):
            r = max(step * 4, arb(2) ** (-prec // 2))
            r = min(r, arb_from_fraction(min(box.width, box.height) / 4))
            iso = _certify_near(p, z, r, prec, within)
            if iso is not None:
                break
        # bisection fallback
        children, counts = _split_counts(p, box, config, rng)
        nxt = [c for c, n in zip(children, counts) if n == 1]
        if not nxt:
            raise PrecisionError("lost the zero while bisecting the seed box")
        box = nxt[0]
    if iso is None:
        raise PrecisionError("Krawczyk contraction failed inside the seed box")
    iso_ball, enclosure = iso
    iso_box = Box.from_acb(iso_ball)

    # contract to the target radius at increasing precision
    work = max(prec, target_bits + 64)
    while True:
        with workprec(work):
            z = acb(enclosure.real.mid(), enclosure.imag.mid())
        z, _ = _newton_point(p, z, work, steps=60)
        r = arb(2) ** (-target_bits - 1)
        got = _certify_near(p, z, r, work, iso_ball)
        if got is not None:
            _, k = got
            with workprec(work):
                kk = k
                if kk.rad() <= arb(2) ** (-target_bits):
                    mid = acb(kk.real.mid(), kk.imag.mid())
                    res = p.eval_acb(mid, work).abs_upper()
                    return CertifiedZero(
                        approx=ComplexBall(kk, work),
                        residual_bound=arb_to_mpf(arb(res)),
                        box=iso_box,
                        multiplicity=1,
                    )
        work *= 2
        if work > config.cap_bits:
            raise PrecisionError("refinement exceeded the precision cap", work)


def isolate_zeros(p, box, config=None):
    """All zeros of p(z, e^z) in ``box``, each certified, sorted by (im, re)."""
    config = config or ZeroFinderConfig()
    rng = random.Random(config.seed)
    root_box, total = _count_with_jitter(p, box, config, rng, grow=True)
    out = []
    stack = [(root_box, total, 0)]
    while stack:
        b, n, depth = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(refine_zero(p, b, config.target_bits, config, check_count=False))
            continue
        if depth >= config.max_depth or b.width < config.cluster_width or b.height < config.cluster_width:
            out.append(_cluster(p, b, n, config.working_bits))
            continue
        children, counts = _split_counts(p, b, config, rng)
        if sum(counts) != n:
            raise AssertionError(f"count conservation violated: {n} != {counts}")
        if config.record_tree:
            config.tree.append((b, n, tuple(children), tuple(counts)))
        for c, k in reversed(list(zip(children, counts))):
            stack.append((c, k, depth + 1))
    out.sort(key=CertifiedZero.sort_key)
    if sum(z.multiplicity for z in out) != total:
        raise AssertionError("returned zeros do not account for the root count")
    return out


def _cluster(p, box, n, prec):
    with workprec(prec):
        ball = box.as_acb(prec)
        res = p.eval_acb(acb(ball.real.mid(), ball.imag.mid()), prec).abs_upper()
    return CertifiedZero(ComplexBall(ball, prec), arb_to_mpf(arb(res)), box, multiplicity=n)
