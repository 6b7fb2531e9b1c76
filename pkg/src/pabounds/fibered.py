"""Entropy on the fibered cone of the magic-type link complement.

Integral classes ``(a, b)`` with ``b > 0`` and ``|a| < b`` are fibered.  The
Thurston norm is ``2 max(|a|, |b|)`` and the monodromy of a class has
stretch factor equal to the largest root of

    L_{a,b}(x) = x^(2b) - x^(b+a) - x^b - x^(b-a) + 1.

The normalized entropy ``norm * entropy`` is constant on rays, so rational
points ``t`` of the slice ``b = 1`` reduce to integral classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional

from .intervals import CertifiedInterval, golden_log4, interval_precision, log_of
from .roots import Poly, as_dense, largest_root, poly_divmod

DEFAULT_TOL = Fraction(1, 10**12)


class OutOfCone(ValueError):
    pass


@dataclass(frozen=True)
class FiberedClass:
    a: int
    b: int

    @property
    def in_cone(self) -> bool:
        return self.b > 0 and -self.b < self.a < self.b

    def require_in_cone(self) -> None:
        if not self.in_cone:
            raise OutOfCone(f"class ({self.a}, {self.b}) is not in the fibered cone")

    def __add__(self, other: "FiberedClass") -> "FiberedClass":
        return FiberedClass(self.a + other.a, self.b + other.b)

    def scaled(self, m: int) -> "FiberedClass":
        return FiberedClass(m * self.a, m * self.b)

    @property
    def is_primitive(self) -> bool:
        return gcd(self.a, self.b) == 1


@dataclass(frozen=True)
class EntropyProfile:
    cls: FiberedClass
    norm: int
    entropy: CertifiedInterval
    normalized: CertifiedInterval

    def to_json(self) -> dict:
        hlo, hhi = self.entropy.floats()
        nlo, nhi = self.normalized.floats()
        return {
            "class": [self.cls.a, self.cls.b],
            "norm": self.norm,
            "h_lower": hlo,
            "h_upper": hhi,
            "normalized_lower": nlo,
            "normalized_upper": nhi,
        }


def lt_polynomial(c: FiberedClass) -> Poly:
    """Sparse ``L_{a,b}``; ``a`` and ``-a`` give the same polynomial."""
    c.require_in_cone()
    a, b = abs(c.a), c.b
    poly: Poly = {}
    for e, coef in ((2 * b, 1), (b + a, -1), (b, -1), (b - a, -1), (0, 1)):
        poly[e] = poly.get(e, 0) + coef
    return {e: x for e, x in poly.items() if x}


def lt_coefficients(c: FiberedClass) -> list[int]:
    """Dense coefficient list of ``L_{a,b}``, leading coefficient first."""
    return as_dense(lt_polynomial(c))


def thurston_norm(c: FiberedClass) -> int:
    if c.a == 0 and c.b == 0:
        raise ValueError("the zero class has no norm")
    return 2 * max(abs(c.a), abs(c.b))


def fried_entropy(c: FiberedClass, tol=DEFAULT_TOL) -> CertifiedInterval:
    """``log`` of the largest root of ``L_{a,b}``."""
    c.require_in_cone()
    root = largest_root(lt_polynomial(c), tol)
    with interval_precision():
        return root.log()


def normalized_entropy(c: FiberedClass, tol=DEFAULT_TOL) -> EntropyProfile:
    h = fried_entropy(c, tol)
    n = thurston_norm(c)
    return EntropyProfile(c, n, h, h * n)


def alpha_class(g: int) -> FiberedClass:
    if g < 3:
        raise ValueError(f"alpha_g is defined for g >= 3, got {g}")
    return FiberedClass(1, g + 1) if g % 6 in (2, 5) else FiberedClass(3, g + 1)


def psi_normalized(g: int, tol=DEFAULT_TOL) -> CertifiedInterval:
    """``(2g - 2) h(psi_g) = ((g - 1)/(g + 1)) * normalized entropy of alpha_g``."""
    prof = normalized_entropy(alpha_class(g), tol)
    return prof.normalized * Fraction(g - 1, g + 1)


def _slice_class(t) -> FiberedClass:
    t = Fraction(t)
    if not -1 < t < 1:
        raise OutOfCone(f"t = {t} is outside (-1, 1)")
    return FiberedClass(t.numerator, t.denominator)


def h1(t, tol=DEFAULT_TOL) -> CertifiedInterval:
    """Normalized entropy at ``(t, 1)``, via the integral class on its ray."""
    return normalized_entropy(_slice_class(t), tol).normalized


def F(t, tol=DEFAULT_TOL) -> CertifiedInterval:
    t = Fraction(t)
    return h1(t, tol) * (1 - Fraction(2, 3) * t)


def log_phi4() -> CertifiedInterval:
    with interval_precision():
        return golden_log4()


def lehmer_factorization(c: FiberedClass = FiberedClass(1, 6)) -> tuple[list[int], list[int]]:
    """Divide ``L_{1,6}`` by ``x^2 - x + 1``; returns (quotient, remainder)."""
    return poly_divmod(lt_polynomial(c), [1, -1, 1])


LEHMER = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]


# decomposition of the genus for the upper bound ---------------------------


@dataclass(frozen=True)
class DecompositionPlan:
    g: int
    k: int
    g0: int
    ell: Optional[int]
    r: Optional[int]
    branch: str

    @property
    def entropy_factor(self) -> int:
        """The bound is ``4 g0 h(f)`` on every branch."""
        return 4 * self.g0

    def check(self) -> bool:
        if self.branch == "base-case":
            return self.g == self.g0
        ok = 2 * self.g - 2 == self.ell * (2 * self.g0 - 2) + 2 * self.r and 0 < self.r < self.g0
        if self.branch == "coprime":
            return ok and gcd(self.r, self.ell) == 1
        return ok and self.r >= 2 and self.ell >= 2


def upper_bound_plan(g: int, k: int) -> DecompositionPlan:
    """Write ``2g - 2 = ell (2 g0 - 2) + 2r`` with ``0 < r < g0``.

    ``g0 = max(k/2, 2)``; ``r`` is chosen in ``1..g0-1`` with
    ``r = g - 1 (mod g0 - 1)``.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and at least 2, got {k}")
    g0 = max(k // 2, 2)
    if g < g0:
        raise ValueError(f"g = {g} is below g0 = {g0}")
    if g == g0:
        return DecompositionPlan(g, k, g0, None, None, "base-case")
    r = (g - 2) % (g0 - 1) + 1
    ell = (g - 1 - r) // (g0 - 1)
    if ell < 1:
        raise ValueError(f"no decomposition for g = {g}, g0 = {g0}")
    branch = "coprime" if gcd(r, ell) == 1 else "non-coprime"
    plan = DecompositionPlan(g, k, g0, ell, r, branch)
    if not plan.check():
        raise ValueError(f"decomposition fails its guards: {plan}")
    return plan


ENTROPY_CONSTANT_LOG2 = 6  # families have entropy below 6 log 2
UPPER_CONSTANT_LOG2 = 12


def theorem_bounds(k: int, g: int) -> tuple[CertifiedInterval, CertifiedInterval]:
    """Lower ``0.00031 (k+1)/(2g-2)`` and upper ``12 log 2 (k+1)/(2g-2)``."""
    if g < 2 or not 0 <= k <= 2 * g:
        raise ValueError(f"need g >= 2 and 0 <= k <= 2g, got k={k}, g={g}")
    q = Fraction(k + 1, 2 * g - 2)
    lower = CertifiedInterval.point(Fraction(31, 100000) * q)
    with interval_precision():
        upper = log_of(2) * (UPPER_CONSTANT_LOG2 * q)
    return lower, upper


# convexity ----------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityRecord:
    u: FiberedClass
    v: FiberedClass
    decrease: str  # "pass", "fail" or "inconclusive"
    entropy_midpoint: str
    slice_midpoint: str

    @property
    def ok(self) -> bool:
        return "fail" not in (self.decrease, self.entropy_midpoint, self.slice_midpoint)


def _verdict(smaller: CertifiedInterval, larger: CertifiedInterval, strict: bool) -> str:
    if smaller.certainly_less(larger) or (not strict and smaller.upper <= larger.lower):
        return "pass"
    if larger.certainly_less(smaller):
        return "fail"
    return "inconclusive"


def convexity_check(
    samples: Iterable[tuple[FiberedClass, FiberedClass]], tol=DEFAULT_TOL
) -> list[ConvexityRecord]:
    """Check ``h(u + v) < h(u)`` and two midpoint convexity statements.

    With ``far = u + 2v`` (so ``u + v`` is the midpoint of ``u`` and ``far``)
    the entropy itself satisfies ``2 h(u + v) <= h(u) + h(far)``.  The
    normalized entropy is constant on rays, so its convexity is tested on the
    slice ``b = 1``: ``2 h1(s) <= h1(t_u) + h1(t_far)`` with ``s`` the midpoint
    of the slice coordinates.  ``v = 0`` is the boundary case, where the strict
    decrease is reported inconclusive.
    """
    out = []
    for u, v in samples:
        u.require_in_cone()
        if not (v.b >= 0 and abs(v.a) <= v.b):
            raise OutOfCone(f"v = ({v.a}, {v.b}) is not in the closed cone")
        w, far = u + v, u + v.scaled(2)
        hu, hw, hf = (fried_entropy(c, tol) for c in (u, w, far))
        if v.a == 0 and v.b == 0:
            decrease = "inconclusive" if hw.overlaps(hu) else "fail"
        else:
            decrease = _verdict(hw, hu, strict=True)
        entropy_mid = _verdict(hw * 2, hu + hf, strict=False)
        tu, tf = Fraction(u.a, u.b), Fraction(far.a, far.b)
        slice_mid = _verdict(h1((tu + tf) / 2, tol) * 2, h1(tu, tol) + h1(tf, tol), strict=False)
        out.append(ConvexityRecord(u, v, decrease, entropy_mid, slice_mid))
    return out
