"""Exact integer lattice routines: LLL, Hermite normal form, kernels.

Everything here works on plain Python integers so results are exact and
reproducible. Matrices are tuples of row tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import RankError


@dataclass(frozen=True)
class IntegerMatrix:
    entries: tuple

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self):
        return len(self.entries)

    def tolist(self):
        return [list(r) for r in self.entries]


def _as_rows(m):
    if isinstance(m, IntegerMatrix):
        return [list(r) for r in m.entries]
    return [[int(x) for x in r] for r in m]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis, delta=Fraction(3, 4)):
    """LLL-reduce the rows of ``basis`` (integral variant, exact arithmetic).

    Raises RankError if the rows are linearly dependent.
    """
    delta = Fraction(delta)
    if not (Fraction(1, 4) < delta <= 1):
        raise ValueError("delta must lie in (1/4, 1]")
    b = _as_rows(basis)
    n = len(b)
    if n == 0:
        return IntegerMatrix([])
    p, q = delta.numerator, delta.denominator
    # d[i] = product of |b*_j|^2 for j < i (d[0] = 1); lam[k][j] = d[j+1] mu_kj
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]

    def gram_schmidt_row(k):
        for j in range(k + 1):
            u = _dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise RankError("basis rows are linearly dependent")
                d[k + 1] = u

    def reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * d[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        bb = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (bb * t + lm * lam[i][k]) // d[k + 1]
        d[k] = bb

    gram_schmidt_row(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            gram_schmidt_row(k)
        reduce(k, k - 1)
        lm = lam[k][k - 1]
        if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lm * lm:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return IntegerMatrix(b)


def gram_schmidt(rows):
    """Rational Gram-Schmidt data (mu, squared norms of b*)."""
    rows = [[Fraction(x) for x in r] for r in _as_rows(rows)]
    n = len(rows)
    star, norms = [], []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i, v in enumerate(rows):
        w = list(v)
        for j in range(i):
            mu[i][j] = _dot(v, star[j]) / norms[j] if norms[j] else Fraction(0)
            w = [a - mu[i][j] * c for a, c in zip(w, star[j])]
        star.append(w)
        norms.append(_dot(w, w))
    return mu, norms


def is_lll_reduced(rows, delta=Fraction(3, 4)):
    """Exact check of size reduction and the Lovasz condition."""
    mu, norms = gram_schmidt(rows)
    n = len(norms)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if norms[k] < (Fraction(delta) - mu[k][k - 1] ** 2) * norms[k - 1]:
            return False
    return True


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _echelon(rows, track=None):
    """Integer row echelon form via extended gcd row operations.

    ``track`` rows receive the same operations (transformation matrix).
    Returns (echelon rows, tracked rows, pivot columns).
    """
    a = [list(r) for r in rows]
    t = [list(r) for r in track] if track is not None else None
    m = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        nz = [i for i in range(r, m) if a[i][c] != 0]
        if not nz:
            continue
        for i in nz:
            if i == r:
                continue
            if a[r][c] == 0:
                a[r], a[i] = a[i], a[r]
                if t is not None:
                    t[r], t[i] = t[i], t[r]
                continue
            g, x, y = _xgcd(a[r][c], a[i][c])
            u, v = a[r][c] // g, a[i][c] // g
            ra, ia = a[r], a[i]
            a[r] = [x * p + y * s for p, s in zip(ra, ia)]
            a[i] = [u * s - v * p for p, s in zip(ra, ia)]
            if t is not None:
                rt, it = t[r], t[i]
                t[r] = [x * p + y * s for p, s in zip(rt, it)]
                t[i] = [u * s - v * p for p, s in zip(rt, it)]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            if t is not None:
                t[r] = [-x for x in t[r]]
        pivots.append(c)
        r += 1
    return a, t, pivots


def hnf(rows):
    """Row Hermite normal form of the lattice spanned by ``rows`` (zero rows dropped)."""
    rows = _as_rows(rows)
    if not rows:
        return IntegerMatrix([])
    a, _, pivots = _echelon(rows)
    a = a[: len(pivots)]
    for r, c in enumerate(pivots):
        for i in range(r):
            qt = a[i][c] // a[r][c]
            if qt:
                a[i] = [x - qt * y for x, y in zip(a[i], a[r])]
    return IntegerMatrix(a)


def integer_kernel(matrix, ncols=None):
    """Lattice basis of {x in Z^n : A x = 0} for integer A (list of rows)."""
    rows = _as_rows(matrix)
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if not rows:
        return IntegerMatrix([[int(i == j) for j in range(n)] for i in range(n)])
    at = [[rows[i][j] for i in range(len(rows))] for j in range(n)]
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    a, t, pivots = _echelon(at, ident)
    kern = [t[i] for i in range(len(pivots), n)]
    if not kern:
        return IntegerMatrix([])
    return lll_reduce(kern)


def rank(rows):
    rows = _as_rows(rows)
    if not rows:
        return 0
    _, _, pivots = _echelon(rows)
    return len(pivots)


def same_lattice(a, b):
    return hnf(a).entries == hnf(b).entries


def in_lattice(vector, basis):
    """True if ``vector`` is an integer combination of the rows of ``basis``."""
    h = hnf(basis).entries
    v = [int(x) for x in vector]
    for row in h:
        c = next(i for i, x in enumerate(row) if x)
        if v[c] % row[c]:
            return False
        qt = v[c] // row[c]
        v = [x - qt * y for x, y in zip(v, row)]
    return not any(v)


def normalize_sign(v):
    """Flip so the first nonzero entry is positive."""
    v = tuple(int(x) for x in v)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def primitive(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def reduced_basis(rows):
    """HNF then LLL, with sign normalization: a canonical-looking short basis."""
    h = hnf(rows)
    if not h.entries:
        return IntegerMatrix([])
    red = lll_reduce(h)
    return IntegerMatrix(sorted((normalize_sign(r) for r in red), key=lambda r: (sum(x * x for x in r), [-x for x in r])))
