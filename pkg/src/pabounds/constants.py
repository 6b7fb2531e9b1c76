"""Numeric skeleton of the volume and first-Betti-number lower bound.

A Margulis number ``eps = log 3`` gives embedded balls of radius ``eps/2``
around the points of a maximal net in the thick part, so the net has at
most ``vol / vol(B_{eps/2})`` points, and each point has fewer than
``(vol B_{5eps/2} - vol B_{eps/2}) / vol B_{eps/2}`` neighbours.  The nerve
graph then bounds ``b_1`` linearly in volume, and a volume bound for mapping
tori turns that into an entropy bound.

Every function returns a :class:`CertifiedInterval` computed with outward
rounding, or a plain float when ``certified=False``.  The float path uses
double precision throughout; its error on these quantities stays below
``1e-12`` relative, far under the margins the checks need (the tightest,
``493.2244575 - V``, is about ``8.6e-8``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath import iv

from .intervals import CertifiedInterval, interval_precision

Real = Union[CertifiedInterval, float]

# reference targets for the checks below
VALENCE_TARGET = Fraction("493.2244575")
BETTI_INTERMEDIATE = Fraction("333.08")
BETTI_TARGET = Fraction("334.08")
SMALL_BALL_DISPLAY = Fraction("0.234721")
LOWER_TARGET = Fraction("0.00031")
LOWER_APPROX = Fraction("0.000317")
CULLER_SHALEN_TARGET = Fraction("0.326")
CULLER_SHALEN_VOLUME = Fraction("3.08")
WEEKS_VOLUME = Fraction("0.94")


def _iv(x):
    if isinstance(x, CertifiedInterval):
        return x.to_iv()
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def _certify(fn, certified: bool, *args):
    """Run ``fn`` on mpmath intervals, or on floats."""
    if not certified:
        return float(fn(math, *[float(a) for a in args]))
    if any(isinstance(a, float) for a in args):
        args = tuple(Fraction(a) if isinstance(a, float) else a for a in args)
    with interval_precision():
        return CertifiedInterval.from_iv(fn(_IvMath, *[_iv(a) for a in args]))


class _IvMath:
    """The handful of ``math`` functions used below, on intervals."""

    @staticmethod
    def log(x):
        return iv.log(x)

    @staticmethod
    def exp(x):
        return iv.exp(x)

    @staticmethod
    def sinh(x):
        return (iv.exp(x) - iv.exp(-x)) / 2


def _pi(m):
    return iv.pi if m is _IvMath else math.pi


def _eps(m):
    return m.log(3 if m is math else iv.mpf(3))


def epsilon(certified: bool = True) -> Real:
    return _certify(lambda m: _eps(m), certified)


def _ball(m, r):
    return _pi(m) * (m.sinh(2 * r) - 2 * r)


def ball_volume(r, certified: bool = True) -> Real:
    """Volume ``pi (sinh 2r - 2r)`` of a hyperbolic ball of radius ``r``."""
    if (r.lower if isinstance(r, CertifiedInterval) else r) <= 0:
        raise ValueError("radius must be positive")
    return _certify(_ball, certified, r)


def _small(m, scale=1):
    return _ball(m, scale * _eps(m) / 2)


def _big(m, scale=1):
    return _ball(m, 5 * scale * _eps(m) / 2)


def small_ball(certified: bool = True) -> Real:
    return _certify(lambda m: _small(m), certified)


def big_ball(certified: bool = True) -> Real:
    return _certify(lambda m: _big(m), certified)


def _valence(m, scale=1):
    s = _small(m, scale)
    return (_big(m, scale) - s) / s


def valence_ratio(epsilon_scale: int = 1, certified: bool = True) -> Real:
    """``(vol B_{5e/2} - vol B_{e/2}) / vol B_{e/2}`` for ``e = epsilon_scale * log 3``."""
    return _certify(lambda m: _valence(m, epsilon_scale), certified)


def net_cardinality_bound(vol, certified: bool = True) -> Real:
    """Upper bound ``vol / vol(B_{eps/2})`` on the size of the net."""
    if vol <= 0:
        raise ValueError("volume must be positive")
    return _certify(lambda m, v: v / _small(m), certified, vol)


def net_cardinality_display(vol) -> Fraction:
    """The weaker displayed form ``vol / 0.234721``, without the factor pi."""
    return Fraction(vol) / SMALL_BALL_DISPLAY


def _betti_coeff(m):
    return (_valence(m) - 2) / (2 * _small(m))


def betti_coefficient(certified: bool = True) -> Real:
    """``(V - 2) / (2 vol B_{eps/2})``: the slope of the Betti bound in volume."""
    return _certify(_betti_coeff, certified)


def graph_betti_bound(vol, certified: bool = True) -> Real:
    """``1 - #vertices + #edges <= 1 + ((V - 2)/2) * #vertices``."""
    if vol <= 0:
        raise ValueError("volume must be positive")
    return _certify(lambda m, v: 1 + (_valence(m) - 2) / 2 * (v / _small(m)), certified, vol)


def consolidated_betti_bound(vol) -> Fraction:
    """``334.08 vol``, which dominates the graph bound once ``vol >= 1``."""
    return BETTI_TARGET * Fraction(vol)


def lower_coefficient(certified: bool = True) -> Real:
    """``1 / (3 pi 334.08)``."""
    return _certify(lambda m: 100 / (3 * _pi(m) * 33408), certified)


def entropy_lower(k: int, chi: int, certified: bool = True) -> Real:
    """``(k + 1) / (334.08 * 3 pi |chi|)``."""
    if chi >= 0:
        raise ValueError("Euler characteristic must be negative")
    if k < 0:
        raise ValueError("kappa must be nonnegative")
    return _certify(lambda m: 100 * (k + 1) / (3 * _pi(m) * 33408 * abs(chi)), certified)


def kojima_mcshane_volume(chi: int, h, certified: bool = True) -> Real:
    """Volume upper bound ``3 pi |chi| h`` for the mapping torus."""
    if chi >= 0:
        raise ValueError("Euler characteristic must be negative")
    if (h.lower if isinstance(h, CertifiedInterval) else h) < 0:
        raise ValueError("entropy must be nonnegative")
    return _certify(lambda m, x: 3 * _pi(m) * abs(chi) * x, certified, h)


def culler_shalen_lower(chi: int, certified: bool = True) -> Real:
    """``3.08 / (3 pi |chi|)``."""
    if chi >= 0:
        raise ValueError("Euler characteristic must be negative")
    return _certify(lambda m: 308 / (100 * 3 * _pi(m) * abs(chi)), certified)


def weeks_guard() -> bool:
    return BETTI_TARGET * WEEKS_VOLUME > 5


@dataclass(frozen=True)
class Check:
    name: str
    value: CertifiedInterval
    relation: str
    target: Fraction
    passed: bool

    def to_json(self) -> dict:
        lo, hi = self.value.floats()
        return {
            "name": self.name,
            "lower": lo,
            "upper": hi,
            "relation": self.relation,
            "target": repr(float(self.target)),
            "pass": self.passed,
        }


def _check(name: str, value: CertifiedInterval, relation: str, target: Fraction) -> Check:
    ops = {
        "<": value.upper < target,
        "<=": value.upper <= target,
        ">": value.lower > target,
        ">=": value.lower >= target,
    }
    return Check(name, value, relation, target, bool(ops[relation]))


@dataclass(frozen=True)
class ConstantsLedger:
    epsilon: CertifiedInterval
    small_ball: CertifiedInterval
    big_ball: CertifiedInterval
    valence_ratio: CertifiedInterval
    net_coefficient: CertifiedInterval
    betti_coefficient: CertifiedInterval
    lower_constant: CertifiedInterval
    culler_shalen: CertifiedInterval

    @classmethod
    def compute(cls) -> "ConstantsLedger":
        return cls(
            epsilon=epsilon(),
            small_ball=small_ball(),
            big_ball=big_ball(),
            valence_ratio=valence_ratio(),
            net_coefficient=net_cardinality_bound(1),
            betti_coefficient=betti_coefficient(),
            lower_constant=lower_coefficient(),
            culler_shalen=culler_shalen_lower(-1),
        )

    def checks(self) -> list[Check]:
        one = CertifiedInterval.point(1)
        return [
            _check("valence_ratio", self.valence_ratio, "<", VALENCE_TARGET),
            _check("valence_ratio_floor", self.valence_ratio, ">", Fraction(493)),
            _check("betti_intermediate", self.betti_coefficient, "<=", BETTI_INTERMEDIATE),
            _check("betti_intermediate_floor", self.betti_coefficient, ">", Fraction(333)),
            _check("betti_consolidated", self.betti_coefficient + one, "<=", BETTI_TARGET),
            _check("lower_coefficient", self.lower_constant, ">=", LOWER_TARGET),
            _check("lower_coefficient_ceiling", self.lower_constant, "<", Fraction("0.00032")),
            _check("culler_shalen", self.culler_shalen, ">=", CULLER_SHALEN_TARGET),
            _check(
                "weeks_guard",
                CertifiedInterval.point(BETTI_TARGET * WEEKS_VOLUME),
                ">",
                Fraction(5),
            ),
        ]

    def to_json(self) -> dict:
        def pair(x: CertifiedInterval):
            return list(x.floats())

        return {
            "epsilon": pair(self.epsilon),
            "small_ball": pair(self.small_ball),
            "small_ball_over_pi": pair(_over_pi(self.small_ball)),
            "big_ball": pair(self.big_ball),
            "valence_ratio": pair(self.valence_ratio),
            "net_coefficient": pair(self.net_coefficient),
            "net_coefficient_display": float(net_cardinality_display(1)),
            "betti_coefficient": pair(self.betti_coefficient),
            "lower_constant": pair(self.lower_constant),
            "culler_shalen": pair(self.culler_shalen),
            "checks": [c.to_json() for c in self.checks()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _over_pi(x: CertifiedInterval) -> CertifiedInterval:
    with interval_precision():
        return CertifiedInterval.from_iv(x.to_iv() / iv.pi)
