"""Certified isolation of the largest real root of an integer polynomial.

Polynomials are sparse maps ``exponent -> coefficient``.  All sign
evaluations happen at dyadic rationals ``P / 2**k`` in exact integer
arithmetic, so brackets never depend on floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

from .intervals import CertifiedInterval

Poly = dict[int, int]
PolyLike = Union[Mapping[int, int], Sequence[int]]

MAX_DOUBLINGS = 256


class RootIsolationError(ArithmeticError):
    pass


def as_sparse(coeffs: PolyLike) -> Poly:
    """Accept a dict, or a dense list with the leading coefficient first."""
    if isinstance(coeffs, Mapping):
        poly = {int(e): int(c) for e, c in coeffs.items() if c}
    else:
        d = len(coeffs) - 1
        poly = {d - i: int(c) for i, c in enumerate(coeffs) if c}
    if not poly:
        raise ValueError("zero polynomial")
    return poly


def as_dense(poly: Mapping[int, int]) -> list[int]:
    d = max(poly)
    return [poly.get(e, 0) for e in range(d, -1, -1)]


def _scaled_value(poly: Poly, num: int, den: int) -> int:
    """``den**deg * p(num/den)``: same sign as ``p(num/den)`` for ``den > 0``."""
    d = max(poly)
    if den & (den - 1) == 0:  # dyadic: powers of den are shifts
        k = den.bit_length() - 1
        return sum((c * num**e) << (k * (d - e)) for e, c in poly.items())
    return sum(c * num**e * den ** (d - e) for e, c in poly.items())


def sign_at(poly: PolyLike, x: Fraction) -> int:
    poly = as_sparse(poly)
    x = Fraction(x)
    v = _scaled_value(poly, x.numerator, x.denominator)
    return (v > 0) - (v < 0)


def shifted_sign_variations(poly: Poly, num: int, den: int) -> int:
    """Descartes sign variations of ``p(y + num/den)``.

    By Descartes' rule this bounds the number of roots above ``num/den``
    with the same parity; a count of one certifies exactly one root there.
    """
    d = max(poly)
    if num <= 0:
        raise ValueError("shift point must be positive")
    # running C(e, k) * num**(e - k) * den**(d - e + k) for each term
    terms = [[c, e, num**e * den ** (d - e)] for e, c in poly.items()]
    signs = []
    for k in range(d + 1):
        s = sum(c * t for c, e, t in terms if e >= k)
        if s:
            signs.append(s > 0)
        for term in terms:
            c, e, t = term
            if e > k:
                term[2] = t * (e - k) // (k + 1) // num * den
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _dyadic_step(tol: Fraction) -> int:
    """Smallest ``k`` with ``2**-k <= tol``."""
    k = 0
    while Fraction(1, 1 << k) > tol:
        k += 1
    return k


def largest_root(coeffs: PolyLike, tol=Fraction(1, 10**12)) -> CertifiedInterval:
    """Bracket of width at most ``tol`` around the largest real root.

    The polynomial must be negative at 1 with its largest root above 1, as
    for ``L_{a,b}`` and the trace polynomials.  The search doubles the step from ``1 + tol`` until the polynomial turns
    positive.  Uniqueness of the root above the last nonpositive point is
    certified by a Descartes count of one, then the bracket is bisected.
    """
    poly = as_sparse(coeffs)
    if poly[max(poly)] < 0:
        poly = {e: -c for e, c in poly.items()}
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if max(poly) == 0:
        raise RootIsolationError("constant polynomial has no roots")

    k = _dyadic_step(tol)
    den = 1 << k
    lo, step = den, 1  # numerators over den; lo starts at x = 1
    if _scaled_value(poly, lo, den) > 0:
        raise RootIsolationError("polynomial is positive at 1; no sign change above 1")
    for _ in range(MAX_DOUBLINGS):
        hi = den + step
        if _scaled_value(poly, hi, den) > 0:
            break
        lo = hi
        step *= 2
    else:
        raise RootIsolationError("no sign change found below the doubling cap")

    # certify uniqueness, tightening the lower end until Descartes' count is one
    a, b = lo, hi
    while True:
        x = Fraction(a, den)  # reduced, so the shifted coefficients stay small
        count = shifted_sign_variations(poly, x.numerator, x.denominator)
        if count == 1:
            break
        if count == 0 and _scaled_value(poly, a, den) == 0:
            return CertifiedInterval.point(x)
        if b - a <= 1:
            raise RootIsolationError("could not certify a unique root above the bracket")
        mid = (a + b) // 2
        if _scaled_value(poly, mid, den) > 0:
            b = mid
        else:
            a = mid

    while b - a > 1:
        mid = (a + b) // 2
        if _scaled_value(poly, mid, den) > 0:
            b = mid
        else:
            a = mid
    # p(a/den) <= 0 < p(b/den); a zero at a itself is the root
    if _scaled_value(poly, a, den) == 0:
        return CertifiedInterval.point(Fraction(a, den))
    return CertifiedInterval(Fraction(a, den), Fraction(b, den))


def poly_divmod(num: PolyLike, den: PolyLike) -> tuple[list[int], list[int]]:
    """Exact division over the rationals; returns dense (quotient, remainder).

    Raises if the quotient is not integral, which never happens for monic
    divisors.
    """
    n = as_dense(as_sparse(num))
    d = as_dense(as_sparse(den))
    out = []
    rem = [Fraction(x) for x in n]
    while len(rem) >= len(d):
        q = rem[0] / d[0]
        out.append(q)
        for i, c in enumerate(d):
            rem[i] -= q * c
        rem.pop(0)
    while rem and rem[0] == 0:
        rem.pop(0)
    if any(x.denominator != 1 for x in out + rem):
        raise ValueError("division is not integral")
    return [int(x) for x in out], [int(x) for x in rem]
