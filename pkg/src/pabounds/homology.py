"""Action of twist words on first homology and the fixed-space dimension kappa.

Homology vectors use the basis ``(a_1, ..., a_g, b_1, ..., b_g)`` with
algebraic intersection ``a_i . b_i = 1``.  A Dehn twist about a curve of
class ``v`` acts by the transvection ``w -> w + (w . v) v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .curves import CurveSystem, InvalidCurveSystem
from .family import TwistWord


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: the rationals (``characteristic == 0``) or ``F_p``."""

    characteristic: int = 0

    def __post_init__(self):
        if self.characteristic != 0 and not _is_prime(self.characteristic):
            raise ValueError(f"characteristic must be 0 or prime, got {self.characteristic}")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        t = text.strip().lower()
        if t in ("q", "0", "rationals"):
            return cls(0)
        if t.startswith("f"):
            t = t[1:]
        return cls(int(t))

    def __str__(self) -> str:
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"


@dataclass(frozen=True)
class SymplecticSpace:
    genus: int

    @cached_property
    def J(self) -> np.ndarray:
        g = self.genus
        J = np.zeros((2 * g, 2 * g), dtype=np.int64)
        J[:g, g:] = np.eye(g, dtype=np.int64)
        J[g:, :g] = -np.eye(g, dtype=np.int64)
        return J

    def pairing(self, v, w) -> int:
        return int(np.asarray(v) @ self.J @ np.asarray(w))

    def is_symplectic(self, M) -> bool:
        M = np.asarray(M, dtype=object)
        return bool(np.array_equal(M.T.dot(self.J.astype(object)).dot(M), self.J.astype(object)))


def _standard_J(n: int) -> np.ndarray:
    if n % 2:
        raise ValueError("homology vectors have even length")
    return SymplecticSpace(n // 2).J


def transvection(v: Sequence[int], power: int = 1) -> np.ndarray:
    """Matrix of ``w -> w + power * (w . v) v``; ``power=-1`` gives the inverse."""
    v = np.asarray(v, dtype=object)
    J = _standard_J(len(v)).astype(object)
    I = np.identity(len(v), dtype=object)
    return I - power * np.outer(v, v).dot(J)


def word_action(system: CurveSystem, word: TwistWord) -> np.ndarray:
    """Integer matrix of the word on ``H_1``; leftmost letter is applied last."""
    word.check_against(system)
    n = 2 * system.genus
    g = system.genus
    curves = {c.id: c for c in system.curves}
    M = np.identity(n, dtype=np.int64)
    bound = 1  # running bound on max |M_ij|
    for cid, sign in word.letters:
        c = curves[cid]
        if c.homology is None:
            raise InvalidCurveSystem(f"curve {cid} has no homology data")
        if not any(c.homology):
            continue
        v = np.asarray(c.homology, dtype=np.int64)
        # rank-one update M T = M - sign (M v)(v^T J); v^T J is as sparse as v,
        # so only a few columns change
        row = np.concatenate([-v[g:], v[:g]])
        supp = np.flatnonzero(v)
        cols = np.flatnonzero(row)
        vmax = int(np.abs(v[supp]).max())
        step = bound * len(supp) * vmax * vmax
        if M.dtype != object and bound + step >= 2**62:
            bound = int(np.abs(M).max())
            step = bound * len(supp) * vmax * vmax
            if bound + step >= 2**62:
                M = M.astype(object)
        dt = M.dtype
        Mv = M[:, supp].dot(v[supp].astype(dt))
        M[:, cols] -= sign * np.outer(Mv, row[cols].astype(dt))
        bound += step
    return M


def rank_fraction_free(A) -> int:
    """Rank over the rationals by Bareiss elimination on integers."""
    rows = [[int(x) for x in r] for r in np.asarray(A, dtype=object)]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rank, prev = 0, 1
    for col in range(n):
        pivot = next((i for i in range(rank, m) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, m):
            ri = rows[i]
            f = ri[col]
            rows[i] = [(p * ri[j] - f * rows[rank][j]) // prev for j in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank_mod_p(A, p: int) -> int:
    rows = [[int(x) % p for x in r] for r in np.asarray(A, dtype=object)]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rank = 0
    for col in range(n):
        pivot = next((i for i in range(rank, m) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        prow = [(x * inv) % p for x in rows[rank]]
        rows[rank] = prow
        for i in range(rank + 1, m):
            f = rows[i][col]
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == m:
            break
    return rank


def kappa(M, field: FieldSpec = FieldSpec()) -> int:
    """Dimension of the subspace fixed by ``M``: ``dim ker(M - I)``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    n = M.shape[0]
    D = M - np.identity(n, dtype=M.dtype if M.dtype != object else np.int64)
    D = D[np.any(D != 0, axis=1)]  # zero rows add nothing to the rank
    r = rank_fraction_free(D) if field.characteristic == 0 else rank_mod_p(D, field.characteristic)
    return n - r


def betti_of_mapping_torus(kappa_value: int) -> int:
    if kappa_value < 0:
        raise ValueError("kappa must be nonnegative")
    return kappa_value + 1
