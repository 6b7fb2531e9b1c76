"""Certified real intervals with rational endpoints.

Transcendental operations (log, sqrt, sinh, pi) are delegated to mpmath's
interval context, whose endpoints are rounded outward; the resulting binary
floats are converted back to exact fractions so no precision is lost when
intervals are stored or compared.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Union

from mpmath import iv
from mpmath.libmp import to_rational

Number = Union[int, Fraction]

DEFAULT_PREC = 128


@contextmanager
def interval_precision(bits: int = DEFAULT_PREC) -> Iterator[None]:
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _raw_to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def fraction_to_iv(x: Number):
    """Smallest mpmath interval (at current precision) containing ``x``."""
    x = Fraction(x)
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


@dataclass(frozen=True)
class CertifiedInterval:
    """Closed interval ``[lower, upper]`` guaranteed to contain a real value."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    # construction -------------------------------------------------------

    @classmethod
    def point(cls, x: Number) -> "CertifiedInterval":
        return cls(Fraction(x), Fraction(x))

    @classmethod
    def from_iv(cls, x) -> "CertifiedInterval":
        lo, hi = x._mpi_
        return cls(_raw_to_fraction(lo), _raw_to_fraction(hi))

    def to_iv(self):
        lo = fraction_to_iv(self.lower)
        hi = fraction_to_iv(self.upper)
        return iv.mpf([lo.a, hi.b])

    # queries ------------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, float):
            x = Fraction(x)
        return self.lower <= x <= self.upper

    def overlaps(self, other: "CertifiedInterval") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def certainly_less(self, other) -> bool:
        """True when every point of ``self`` is strictly below ``other``."""
        if isinstance(other, CertifiedInterval):
            return self.upper < other.lower
        return self.upper < Fraction(other)

    def certainly_greater(self, other) -> bool:
        if isinstance(other, CertifiedInterval):
            return self.lower > other.upper
        return self.lower > Fraction(other)

    def floats(self) -> tuple[float, float]:
        """Endpoints as doubles, rounded outward."""
        lo, hi = float(self.lower), float(self.upper)
        if Fraction(lo) > self.lower:
            lo = math.nextafter(lo, -math.inf)
        if Fraction(hi) < self.upper:
            hi = math.nextafter(hi, math.inf)
        return lo, hi

    def __float__(self) -> float:
        return float(self.midpoint)

    def __repr__(self) -> str:
        lo, hi = self.floats()
        return f"CertifiedInterval[{lo!r}, {hi!r}]"

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return CertifiedInterval(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedInterval(-self.upper, -self.lower)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ]
        return CertifiedInterval(min(products), max(products))

    __rmul__ = __mul__

    def hull(self, other: "CertifiedInterval") -> "CertifiedInterval":
        return CertifiedInterval(min(self.lower, other.lower), max(self.upper, other.upper))

    def round_outward(self, bits: int = 96) -> "CertifiedInterval":
        """Re-round endpoints outward onto the grid ``2**-bits``.

        Keeps denominators bounded in long computations; the result contains
        ``self``.
        """
        scale = 1 << bits
        lo = Fraction(math.floor(self.lower * scale), scale)
        hi = Fraction(math.ceil(self.upper * scale), scale)
        return CertifiedInterval(lo, hi)

    # transcendental -----------------------------------------------------

    def log(self) -> "CertifiedInterval":
        if self.lower <= 0:
            raise ValueError("log of a non-positive interval")
        return CertifiedInterval.from_iv(iv.log(self.to_iv()))

    def sqrt(self) -> "CertifiedInterval":
        if self.lower < 0:
            raise ValueError("sqrt of a negative interval")
        return CertifiedInterval.from_iv(iv.sqrt(self.to_iv()))


def _coerce(x) -> CertifiedInterval:
    if isinstance(x, CertifiedInterval):
        return x
    if isinstance(x, (int, Rational)):
        return CertifiedInterval.point(Fraction(x))
    raise TypeError(f"cannot combine CertifiedInterval with {type(x).__name__}")


def log_of(x: Number) -> CertifiedInterval:
    """Certified enclosure of ``log(x)`` for rational ``x > 0``."""
    return CertifiedInterval.point(x).log()


def golden_log4() -> CertifiedInterval:
    """Enclosure of ``log(phi**4) = 2*log((3 + sqrt 5)/2)``."""
    x = (iv.mpf(3) + iv.sqrt(iv.mpf(5))) / 2
    return CertifiedInterval.from_iv(2 * iv.log(x))
