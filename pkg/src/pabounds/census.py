"""Integral and primitive points in dilates of a rational polytope.

Counting is exact: the polytope is converted to integer half-spaces
``A x <= b`` once, and candidate points from the bounding box of ``tK`` are
tested as ``A x <= t b`` in integer arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

MAX_DIMENSION = 6
CHUNK = 1 << 16  # head points per enumeration chunk


class DegeneratePolytope(ValueError):
    pass


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _nullspace_vector(rows: list[list[Fraction]], n: int) -> list[Fraction]:
    """A nonzero vector orthogonal to ``rows`` (which have rank ``n - 1``)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise DegeneratePolytope("facet is not a hyperplane")
    x = [Fraction(0)] * n
    x[free[0]] = Fraction(1)
    for i, c in enumerate(pivots):
        x[c] = -m[i][free[0]]
    return x


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    n = len(base)
    rank, r = 0, 0
    m = [list(x) for x in rows]
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, len(m)):
            f = m[i][c] / m[r][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        rank += 1
    return rank


def _parse_coord(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**12)


@dataclass(frozen=True)
class RationalPolytope:
    """Convex hull of rational points in ``Q^k``."""

    vertices: tuple[tuple[Fraction, ...], ...]
    dimension: int = field(default=0)

    def __post_init__(self):
        verts = tuple(tuple(_parse_coord(x) for x in v) for v in self.vertices)
        if not verts:
            raise DegeneratePolytope("no vertices")
        k = len(verts[0])
        if any(len(v) != k for v in verts):
            raise ValueError("vertices have mixed dimensions")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "dimension", k)

    @classmethod
    def box(cls, k: int, lo=0, hi=1) -> "RationalPolytope":
        corners = [tuple(lo if (i >> j) & 1 == 0 else hi for j in range(k)) for i in range(1 << k)]
        return cls(tuple(corners))

    @classmethod
    def simplex(cls, k: int, scale=1) -> "RationalPolytope":
        verts = [tuple([0] * k)]
        for j in range(k):
            verts.append(tuple(scale if i == j else 0 for i in range(k)))
        return cls(tuple(verts))

    @classmethod
    def from_json(cls, data: dict) -> "RationalPolytope":
        return cls(tuple(tuple(Fraction(str(x)) for x in v) for v in data["vertices"]))

    @classmethod
    def load(cls, path) -> "RationalPolytope":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {"vertices": [[str(x) for x in v] for v in self.vertices]}

    @property
    def degenerate(self) -> bool:
        return _affine_rank(self.vertices) < self.dimension

    def scaled(self, s) -> "RationalPolytope":
        s = Fraction(s)
        return RationalPolytope(tuple(tuple(x * s for x in v) for v in self.vertices))

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer ``(A, b)`` with ``K = {x : A x <= b}``."""
        if self.degenerate:
            raise DegeneratePolytope("polytope is not full-dimensional")
        k = self.dimension
        if k == 1:
            xs = [v[0] for v in self.vertices]
            ineqs = [([Fraction(1)], max(xs)), ([Fraction(-1)], -min(xs))]
        else:
            pts = np.array([[float(x) for x in v] for v in self.vertices])
            hull = ConvexHull(pts)
            centroid = [sum(v[i] for v in self.vertices) / len(self.vertices) for i in range(k)]
            ineqs = []
            for simplex in hull.simplices:
                face = [self.vertices[i] for i in simplex]
                rows = [[a - b for a, b in zip(p, face[0])] for p in face[1:]]
                normal = _nullspace_vector(rows, k)
                offset = sum(a * b for a, b in zip(normal, face[0]))
                if sum(a * b for a, b in zip(normal, centroid)) > offset:
                    normal, offset = [-a for a in normal], -offset
                # float facets can be slightly wrong; every vertex must satisfy the exact inequality
                if all(sum(a * b for a, b in zip(normal, v)) <= offset for v in self.vertices):
                    ineqs.append((normal, offset))
        rows, rhs, seen = [], [], set()
        for normal, offset in ineqs:
            scale = _lcm(x.denominator for x in list(normal) + [offset])
            ints = [int(x * scale) for x in normal] + [int(offset * scale)]
            g = math.gcd(*ints)
            ints = tuple(x // g for x in ints)
            if ints not in seen:
                seen.add(ints)
                rows.append(ints[:-1])
                rhs.append(ints[-1])
        return np.array(rows, dtype=object), np.array(rhs, dtype=object)

    def bounding_box(self, t) -> list[tuple[int, int]]:
        t = Fraction(t)
        out = []
        for i in range(self.dimension):
            xs = [v[i] * t for v in self.vertices]
            out.append((math.ceil(min(xs)), math.floor(max(xs))))
        return out


def _check_dimension(K: RationalPolytope) -> None:
    if K.dimension > MAX_DIMENSION:
        raise ValueError(f"enumeration is capped at dimension {MAX_DIMENSION}, got {K.dimension}")
    if K.degenerate:
        raise DegeneratePolytope("polytope is not full-dimensional")


def _fibers(K: RationalPolytope, t):
    """Yield ``(head, lo, hi)``: head points of ``t K`` and the last-coordinate range over each.

    The head coordinates are enumerated in chunks; for each head point the
    half-spaces cut the last coordinate down to the interval ``[lo, hi]``
    (empty when ``lo > hi``).
    """
    _check_dimension(K)
    t = Fraction(t)
    if t < 0:
        raise ValueError("dilation must be nonnegative")
    A, b = K.halfspaces
    # A x <= t b  <=>  den * A x <= num * b, kept in int64
    Ai = np.array(A.tolist(), dtype=np.int64) * t.denominator
    bi = np.array(b.tolist(), dtype=np.int64) * t.numerator
    box = K.bounding_box(t)
    if any(lo > hi for lo, hi in box):
        return
    head = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box[:-1]]
    last_lo, last_hi = box[-1]
    c = Ai[:, -1]
    total_head = math.prod(len(a) for a in head) if head else 1
    for start in range(0, total_head, CHUNK):
        idx = np.arange(start, min(total_head, start + CHUNK))
        if head:
            coords = np.unravel_index(idx, [len(a) for a in head])
            hx = np.stack([a[i] for a, i in zip(head, coords)], axis=1)
        else:
            hx = np.zeros((len(idx), 0), dtype=np.int64)
        rhs = bi[None, :] - hx @ Ai[:, :-1].T
        lo = np.full(len(idx), last_lo, dtype=np.int64)
        hi = np.full(len(idx), last_hi, dtype=np.int64)
        for i, ci in enumerate(c):
            if ci > 0:
                hi = np.minimum(hi, rhs[:, i] // ci)
            elif ci < 0:
                lo = np.maximum(lo, -(rhs[:, i] // -ci))
            else:
                hi = np.where(rhs[:, i] >= 0, hi, lo - 1)
        yield hx, lo, hi


def lattice_points(K: RationalPolytope, t) -> np.ndarray:
    """All integer points of ``t K`` as an ``(n, k)`` int64 array."""
    out = []
    for hx, lo, hi in _fibers(K, t):
        counts = np.maximum(hi - lo + 1, 0)
        n = int(counts.sum())
        if n == 0:
            continue
        rep = np.repeat(np.arange(len(hx)), counts)
        offsets = np.arange(n) - np.repeat(np.cumsum(counts) - counts, counts)
        out.append(np.concatenate([hx[rep], (lo[rep] + offsets)[:, None]], axis=1))
    return np.concatenate(out) if out else np.zeros((0, K.dimension), dtype=np.int64)


def _squarefree_divisors(n: int) -> list[tuple[int, int]]:
    """``(d, mu(d))`` for the squarefree divisors ``d`` of ``n``."""
    primes, m, p = [], n, 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        primes.append(m)
    out = [(1, 1)]
    for p in primes:
        out += [(d * p, -s) for d, s in out]
    return out


def point_counts(K: RationalPolytope, t) -> tuple[int, int]:
    """``(integral, primitive)`` counts of ``t K`` without listing the points.

    On the fiber over a head point with coordinate gcd ``G`` the primitive
    points are the ``x`` in ``[lo, hi]`` coprime to ``G``, counted by
    inclusion-exclusion over the squarefree divisors of ``G``; ``G = 0``
    leaves only ``x = +-1``.
    """
    integral = primitive = 0
    for hx, lo, hi in _fibers(K, t):
        keep = hi >= lo
        hx, lo, hi = hx[keep], lo[keep], hi[keep]
        integral += int((hi - lo + 1).sum())
        G = np.gcd.reduce(np.abs(hx), axis=1) if hx.shape[1] else np.zeros(len(lo), dtype=np.int64)
        for value in np.unique(G):
            m = G == value
            a, b = lo[m], hi[m]
            if value == 0:
                primitive += int(((a <= 1) & (1 <= b)).sum() + ((a <= -1) & (-1 <= b)).sum())
                continue
            for d, sign in _squarefree_divisors(int(value)):
                primitive += sign * int((b // d - (a - 1) // d).sum())
    return integral, primitive


def integral_points(K: RationalPolytope, t) -> int:
    return int(len(lattice_points(K, t)))


def primitive_points(K: RationalPolytope, t) -> int:
    """Integer points of ``t K`` whose coordinates have gcd one."""
    pts = lattice_points(K, t)
    if len(pts) == 0:
        return 0
    g = np.gcd.reduce(np.abs(pts), axis=1)
    return int(np.count_nonzero(g == 1))


def mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def _nonzero_points(K: RationalPolytope, t: Fraction) -> int:
    pts = lattice_points(K, t)
    return int(np.count_nonzero(np.any(pts != 0, axis=1))) if len(pts) else 0


def primitive_points_mobius(K: RationalPolytope, t) -> int:
    """Primitive count by inclusion-exclusion over common divisors.

    Nonzero points of ``tK`` divisible by ``d`` correspond to nonzero points
    of ``(t/d) K``, so the primitive count is ``sum_d mu(d) * nonzero((t/d) K)``.
    """
    t = Fraction(t)
    box = K.bounding_box(t)
    bound = max([abs(x) for pair in box for x in pair] + [0])
    return sum(mobius(d) * _nonzero_points(K, t / d) for d in range(1, bound + 1) if mobius(d))


@dataclass(frozen=True)
class CensusRecord:
    g: int
    dilation: int
    integral_count: int
    primitive_count: int

    def __post_init__(self):
        if self.primitive_count > self.integral_count:
            raise ValueError("primitive count exceeds integral count")


def omega_census(K: RationalPolytope, g_range: Iterable[int], k: int) -> list[CensusRecord]:
    """Counts of integral and primitive points in ``(2g - 2) K`` for each ``g``.

    ``k = 0`` is vacuous: there is nothing to count and no record is produced.
    """
    if k == 0:
        return []
    if K.dimension != k:
        raise ValueError(f"polytope has dimension {K.dimension}, expected {k}")
    out = []
    for g in sorted(set(g_range)):
        if g < 2:
            raise ValueError("genus must be at least 2")
        t = 2 * g - 2
        out.append(CensusRecord(g, t, *point_counts(K, t)))
    return out


class GrowthFitError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    degree: int
    accepted: bool
    c1: Optional[float]
    c2: Optional[float]

    def floor(self, g: int, isom_order: int = 1) -> Optional[float]:
        """``(c1 g^k - c2) / N``, a lower bound for the count divided by ``N``."""
        if not self.accepted:
            return None
        return (self.c1 * g**self.degree - self.c2) / isom_order


def growth_fit(
    records: Sequence[CensusRecord], k: int, tolerance: float = 0.15, use: str = "primitive"
) -> GrowthFit:
    """Log-log slope over the upper half of the range, and a floor ``c1 g^k - c2``.

    ``c1`` is the least-squares coefficient of ``g^k`` on the upper half;
    ``c2`` is the smallest value making the floor hold on every record.  A
    slope further than ``tolerance`` from ``k`` rejects the fit.
    """
    if len(records) < k + 2:
        raise GrowthFitError(f"need at least {k + 2} records, got {len(records)}")
    recs = sorted(records, key=lambda r: r.g)
    counts = np.array(
        [r.primitive_count if use == "primitive" else r.integral_count for r in recs], dtype=float
    )
    gs = np.array([r.g for r in recs], dtype=float)
    upper = slice(len(recs) // 2, None)
    if np.any(counts[upper] <= 0):
        raise GrowthFitError("counts must be positive on the upper half")
    slope = float(np.polyfit(np.log(gs[upper]), np.log(counts[upper]), 1)[0])
    if abs(slope - k) > tolerance:
        return GrowthFit(slope, k, False, None, None)
    gk = gs**k
    c1 = float(np.dot(counts[upper], gk[upper]) / np.dot(gk[upper], gk[upper]))
    c2 = float(max(0.0, np.max(c1 * gk - counts)))
    c2 = math.nextafter(c2, math.inf) if c2 > 0 else 0.0
    return GrowthFit(slope, k, True, c1, c2)
