"""Thurston's construction: Gram matrix, certified Perron-Frobenius root, entropy.

For filling multicurves ``A`` and ``B`` with intersection matrix ``N`` and
``mu`` the Perron-Frobenius eigenvalue of ``N N^T``, the twists ``T_A`` and
``T_B`` act through 2x2 matrices on a plane.  ``T_A T_B^{-1}`` has trace
``2 + mu`` and ``T_A T_B`` has trace ``mu - 2``; a hyperbolic image has
stretch factor equal to its larger eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from mpmath import iv
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .curves import CurveSystem
from .family import TwistWord
from .intervals import CertifiedInterval, interval_precision


class ReducibleMatrix(ValueError):
    pass


class NotHyperbolic(ValueError):
    pass


def gram(N) -> np.ndarray:
    """Exact ``N N^T`` for a nonnegative integer matrix."""
    N = np.asarray(N, dtype=object)
    if N.ndim != 2:
        raise ValueError("intersection matrix must be two-dimensional")
    big = max((abs(int(x)) for x in N.ravel()), default=0)
    if big * big * max(N.shape[1], 1) < 2**62:
        # every entry of the product is below 2**62, so int64 is exact
        Ni = N.astype(np.int64)
        return Ni @ Ni.T
    out = N.dot(N.T)
    return np.array(out.tolist(), dtype=np.int64) if _fits_int64(out) else out


def _fits_int64(M) -> bool:
    return all(abs(int(x)) < 2**62 for x in np.asarray(M).ravel())


def row_sum_bound(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return int(max(sum(int(x) for x in row) for row in M))


def is_irreducible(M) -> bool:
    M = np.asarray(M)
    if M.shape[0] == 0:
        return False
    support = csr_matrix((np.asarray(M, dtype=float) != 0).astype(np.int8))
    n, _ = connected_components(support, directed=True, connection="strong")
    if n != 1:
        return False
    # a 1x1 zero matrix is strongly connected but has no positive eigenvector
    return bool(M.shape[0] > 1 or M[0, 0] != 0)


def _sparse_rows(M) -> list[list[tuple[int, int]]]:
    return [[(j, int(x)) for j, x in enumerate(row) if x] for row in np.asarray(M)]


def collatz_wielandt(rows, v: Sequence[int]) -> tuple[Fraction, Fraction]:
    """``(min, max)`` of ``(Mv)_i / v_i`` for a positive integer vector ``v``."""
    lo = hi = None
    for i, row in enumerate(rows):
        q = Fraction(sum(x * v[j] for j, x in row), v[i])
        if lo is None or q < lo:
            lo = q
        if hi is None or q > hi:
            hi = q
    return lo, hi


def _float_perron_vector(M: np.ndarray) -> np.ndarray:
    A = M.astype(float)
    if np.array_equal(A, A.T):
        w, V = np.linalg.eigh(A)
        v = V[:, int(np.argmax(w))]
    else:
        w, V = np.linalg.eig(A)
        v = np.real(V[:, int(np.argmax(w.real))])
    v = np.abs(v)
    if not np.all(v > 0):
        # eigenvector components can underflow; smooth with a few power steps on M + I
        v = v + 1e-12
        for _ in range(50):
            v = A @ v + v
            v /= v.max()
    return v / v.max()


def _mp_perron_vector(M: np.ndarray, dps: int, start: np.ndarray) -> list[int]:
    """Perron vector refined by inverse iteration at ``dps`` digits, scaled to integers."""
    with mpmath.workdps(dps):
        A = mpmath.matrix(M.tolist())
        v = mpmath.matrix([mpmath.mpf(float(x)) for x in start])
        rho = max((A * v)[i] / v[i] for i in range(len(v)))
        shift = rho * (1 + mpmath.mpf(10) ** (-dps // 3))
        B = A - shift * mpmath.eye(A.rows)
        for _ in range(8):
            v = mpmath.lu_solve(B, v)
            m = max(abs(x) for x in v)
            v = v / m
        bits = int(dps * 3.33) + 8
        return _to_integer_vector([abs(x) for x in v], bits)


def _to_integer_vector(vals, bits: int) -> list[int]:
    scale = 1 << bits
    return [max(1, int(mpmath.nint(mpmath.mpf(x) * scale))) for x in vals]


def pf_eigenvalue(M, tol=Fraction(1, 10**9)) -> CertifiedInterval:
    """Certified bracket of width at most ``tol`` around the spectral radius.

    Any strictly positive ``v`` gives ``min (Mv)_i/v_i <= rho <= max (Mv)_i/v_i``
    for nonnegative irreducible ``M``; the quotients are evaluated exactly on
    an integer vector obtained from a floating-point (and if needed
    multiprecision) Perron vector.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if np.any(M < 0):
        raise ValueError("matrix must be nonnegative")
    if not is_irreducible(M):
        raise ReducibleMatrix("matrix is zero or reducible")
    if M.shape[0] == 1:
        return CertifiedInterval.point(int(M[0, 0]))

    rows = _sparse_rows(M)
    # the all-ones vector gives the row-sum bracket, exact when row sums agree
    lo_sum, hi_sum = collatz_wielandt(rows, [1] * len(rows))
    if hi_sum - lo_sum <= tol:
        return CertifiedInterval(lo_sum, hi_sum)
    v = _float_perron_vector(M)
    lo, hi = collatz_wielandt(rows, _to_integer_vector(v, 52))
    lo, hi = max(lo, lo_sum), min(hi, hi_sum)
    dps = 30
    while hi - lo > tol:
        if dps > 2000:
            raise ArithmeticError("failed to reach requested tolerance")
        lo2, hi2 = collatz_wielandt(rows, _mp_perron_vector(M, dps, v))
        lo, hi = max(lo, lo2), min(hi, hi2)
        dps *= 2
    out = CertifiedInterval(lo, hi).round_outward(bits=max(64, 4 * tol.denominator.bit_length()))
    return CertifiedInterval(max(out.lower, lo_sum), min(out.upper, hi_sum))


def _stretch(trace_lo: Fraction, trace_hi: Fraction) -> CertifiedInterval:
    """Enclosure of ``log`` of the larger root of ``x^2 - t x + 1`` for ``t`` in range.

    The map is increasing in ``t > 2``, so endpoints are evaluated separately.
    """
    def larger_root(t: Fraction):
        T = iv.mpf(t.numerator) / t.denominator
        return (T + iv.sqrt(T * T - 4)) / 2

    with interval_precision():
        lo = CertifiedInterval.from_iv(iv.log(larger_root(trace_lo)))
        hi = CertifiedInterval.from_iv(iv.log(larger_root(trace_hi)))
    return CertifiedInterval(max(lo.lower, Fraction(0)), hi.upper)


def entropy_diff(mu: CertifiedInterval) -> CertifiedInterval:
    """Entropy of ``T_A T_B^{-1}``: trace ``mu + 2``."""
    if mu.lower <= 0:
        raise ValueError("mu must be positive")
    return _stretch(mu.lower + 2, mu.upper + 2)


def entropy_prod(mu: CertifiedInterval) -> CertifiedInterval:
    """Entropy of ``T_A T_B``: trace ``mu - 2``, hyperbolic only for ``mu > 4``."""
    if mu.lower <= 4:
        raise NotHyperbolic(f"T_A T_B is not hyperbolic for mu <= 4 (mu >= {float(mu.lower)})")
    return _stretch(mu.lower - 2, mu.upper - 2)


def word_shape(system: CurveSystem, word: TwistWord) -> str:
    """``"diff"`` for ``T_A T_B^{-1}``, ``"prod"`` for ``T_A T_B``.

    Only words twisting once about every curve, positively along ``A``, with a
    common sign along ``B`` are recognized.
    """
    word.check_against(system)
    signs = dict(word.letters)
    if len(signs) != len(word.letters) or set(signs) != {c.id for c in system.curves}:
        raise ValueError("word must twist exactly once about every curve")
    if any(signs[c.id] != 1 for c in system.a_curves):
        raise ValueError("A-twists must be positive")
    b_signs = {signs[c.id] for c in system.b_curves}
    if len(b_signs) != 1:
        raise ValueError("B-twists must share one sign")
    return "prod" if b_signs == {1} else "diff"


@dataclass(frozen=True)
class ThurstonResult:
    genus: int
    shape: str
    mu: CertifiedInterval
    row_sum_bound: int
    entropy: CertifiedInterval

    def to_json(self) -> dict:
        mlo, mhi = self.mu.floats()
        hlo, hhi = self.entropy.floats()
        return {
            "g": self.genus,
            "word": self.shape,
            "mu_lower": mlo,
            "mu_upper": mhi,
            "row_sum_bound": self.row_sum_bound,
            "h_lower": hlo,
            "h_upper": hhi,
        }


def thurston_entropy(system: CurveSystem, word: TwistWord, tol=Fraction(1, 10**9)) -> ThurstonResult:
    shape = word_shape(system, word)
    M = gram(system.matrix)
    mu = pf_eigenvalue(M, tol)
    h = entropy_diff(mu) if shape == "diff" else entropy_prod(mu)
    return ThurstonResult(system.genus, shape, mu, row_sum_bound(M), h)


def row_sum_certificate(system: CurveSystem) -> dict:
    """Row-sum bounds on ``N N^T`` by residue class of the genus.

    ``g = 3k`` rows are at most 48.  For ``g = 3k + 2`` rows of degree-five
    curves are at most 44 and all rows at most 52; ``g = 3k + 1`` graphs sit
    inside the ``3k + 2`` pattern, so 52 applies.  Fixture genera only get
    the overall bound, and genus two has no residue-class bound.
    """
    M = gram(system.matrix)
    sums = [sum(int(x) for x in row) for row in M]
    degrees = [int(np.count_nonzero(row)) for row in system.matrix]
    g = system.genus
    out = {"max_row_sum": max(sums), "max_degree": max(degrees + [0])}
    if g < 3:
        out["bound"] = None
        out["ok"] = True
    elif g % 3 == 0:
        out["bound"] = 48
        out["ok"] = out["max_row_sum"] <= 48
    else:
        out["bound"] = 52
        deg5 = [s for s, d in zip(sums, degrees) if d == 5]
        out["degree5_max"] = max(deg5) if deg5 else None
        out["ok"] = out["max_row_sum"] <= 52 and all(s <= 44 for s in deg5)
    return out
