from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pabounds.family import FIXTURE_GENERA, build_f2prime, build_family
from pabounds.intervals import CertifiedInterval, interval_precision, log_of
from pabounds.thurston import (
    NotHyperbolic,
    ReducibleMatrix,
    collatz_wielandt,
    entropy_diff,
    entropy_prod,
    gram,
    is_irreducible,
    pf_eigenvalue,
    row_sum_bound,
    row_sum_certificate,
    thurston_entropy,
)

pt = CertifiedInterval.point


def test_gram_examples():
    assert gram([[8]]).tolist() == [[64]]
    assert gram([[2, 2]]).tolist() == [[8]]
    assert gram(np.eye(2, dtype=int)).tolist() == [[1, 0], [0, 1]]


def test_one_by_one_is_exact():
    mu = pf_eigenvalue([[64]])
    assert mu.lower == mu.upper == 64


def test_row_sum_of_singleton():
    assert row_sum_bound([[64]]) == 64


def test_zero_and_reducible_rejected():
    with pytest.raises(ReducibleMatrix):
        pf_eigenvalue([[0, 0], [0, 0]])
    with pytest.raises(ReducibleMatrix):
        pf_eigenvalue([[1, 1], [0, 1]])
    assert not is_irreducible([[1, 0], [0, 1]])


def test_collatz_wielandt_brackets_known_eigenvalue():
    lo, hi = collatz_wielandt([[(0, 2), (1, 1)], [(0, 1), (1, 2)]], [1, 1])
    assert lo == hi == 3


def test_mu8_fixture_bracket_is_tight():
    mu = pf_eigenvalue(gram(build_family(8)[0].matrix), tol=Fraction(1, 1000))
    assert mu.width <= Fraction(1, 1000)


def test_entropy_diff_closed_form():
    h = entropy_diff(pt(62))
    mpmath.mp.dps = 40
    exact = mpmath.log((64 + mpmath.sqrt(4092)) / 2)
    assert h.lower <= Fraction(str(exact + mpmath.mpf("1e-30"))) and Fraction(str(exact - mpmath.mpf("1e-30"))) <= h.upper
    with interval_precision():
        assert h.certainly_less(log_of(64))


def test_entropy_diff_small_mu():
    h = entropy_diff(pt(Fraction(1, 10**9)))
    # lambda + 1/lambda = 2 + mu gives h ~ sqrt(mu)
    assert 0 < float(h.upper) < 1e-4
    assert math.isclose(float(h.lower), math.sqrt(1e-9), rel_tol=1e-3)


def test_entropy_prod_examples():
    h2 = entropy_prod(pt(64))
    assert abs(float(h2.lower) - math.log(31 + math.sqrt(960))) < 1e-12
    assert abs(float(h2.lower) - 4.1268) < 1e-3
    h2p = entropy_prod(pt(8))
    assert abs(float(h2p.upper) - math.log(3 + 2 * math.sqrt(2))) < 1e-12
    with interval_precision():
        assert h2.certainly_less(log_of(62))
        assert h2p.certainly_less(log_of(6))


@pytest.mark.parametrize("mu", [4, 3, Fraction(1, 2)])
def test_entropy_prod_rejects_non_hyperbolic(mu):
    with pytest.raises(NotHyperbolic):
        entropy_prod(pt(mu))


def test_entropy_monotone_on_grid():
    grid = [Fraction(n, 4) for n in range(1, 400)]
    diffs = [entropy_diff(pt(m)) for m in grid]
    assert all(a.certainly_less(b) for a, b in zip(diffs, diffs[1:]))
    prods = [entropy_prod(pt(m)) for m in grid if m > 4]
    assert all(a.certainly_less(b) for a, b in zip(prods, prods[1:]))


def test_f2_and_f2prime_pipeline():
    r2 = thurston_entropy(*build_family(2), tol=Fraction(1, 10**6))
    assert r2.mu.lower == r2.mu.upper == 64
    r2p = thurston_entropy(*build_f2prime(), tol=Fraction(1, 10**6))
    assert r2p.mu.lower == r2p.mu.upper == 8
    with interval_precision():
        assert r2.entropy.certainly_less(log_of(62))
        assert r2p.entropy.certainly_less(log_of(6))


def test_family_row_sum_certificates():
    for g in range(3, 201):
        cert = row_sum_certificate(build_family(g)[0])
        assert cert["ok"], (g, cert)
        if g % 3 == 0:
            assert cert["max_row_sum"] <= 48


def test_family_entropy_below_six_log_two():
    with interval_precision():
        six = log_of(2) * 6
    for g in range(3, 201):
        if g in FIXTURE_GENERA:
            continue
        res = thurston_entropy(*build_family(g), tol=Fraction(1, 10**6))
        assert res.mu.upper < 62, g
        assert res.mu.upper <= row_sum_bound(gram(build_family(g)[0].matrix))
        assert res.entropy.certainly_less(six), g


@st.composite
def positive_matrices(draw):
    n = draw(st.integers(1, 6))
    M = np.array(draw(st.lists(st.integers(0, 9), min_size=n * n, max_size=n * n))).reshape(n, n)
    # a cycle through all indices makes the support irreducible
    for i in range(n):
        M[i, (i + 1) % n] = max(M[i, (i + 1) % n], 1)
    return M


@settings(max_examples=500)
@given(positive_matrices())
def test_pf_bracket_contains_dense_oracle(M):
    mu = pf_eigenvalue(M, tol=Fraction(1, 10**9))
    rho = max(abs(np.linalg.eigvals(M.astype(float))))
    slack = 1e-9 * max(1.0, rho)
    assert float(mu.lower) - slack <= rho <= float(mu.upper) + slack
    assert mu.width <= Fraction(1, 10**9)
    assert mu.upper <= row_sum_bound(M)


@given(st.integers(1, 5).flatmap(lambda m: st.integers(1, 5).flatmap(
    lambda n: st.lists(st.integers(1, 6), min_size=m * n, max_size=m * n).map(
        lambda xs: np.array(xs).reshape(m, n)))))
def test_gram_transpose_spectral_radius(N):
    assert pf_eigenvalue(gram(N)).overlaps(pf_eigenvalue(gram(N.T)))
