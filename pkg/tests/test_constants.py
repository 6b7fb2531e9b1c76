from fractions import Fraction
import math

import pytest
from hypothesis import given, strategies as st

from pabounds import constants as K
from pabounds.intervals import CertifiedInterval

LOG3 = math.log(3)


def contains(x: CertifiedInterval, value: float, rel=1e-12) -> bool:
    lo, hi = x.floats()
    slack = rel * max(1.0, abs(value))
    return lo - slack <= value <= hi + slack


def test_small_ball():
    v = K.small_ball()
    assert contains(v, math.pi * (4 / 3 - LOG3))
    assert abs(float(v.lower) / math.pi - 0.234721) < 1e-6


def test_big_ball_closed_form():
    expected = math.pi * ((243 - 1 / 243) / 2 - 5 * LOG3)
    assert contains(K.big_ball(), expected)


def test_ball_volume_leading_order():
    r = 1e-6
    v = K.ball_volume(Fraction(1, 10**6))
    # float mode cancels catastrophically this close to 0, so only the certified path is checked
    assert contains(v, 4 / 3 * math.pi * r**3, rel=1e-5)
    with pytest.raises(ValueError):
        K.ball_volume(0)


def test_valence_ratio():
    v = K.valence_ratio()
    assert v.upper < Fraction("493.2244575")
    assert v.lower > 493
    assert v.lower > 100
    assert K.valence_ratio(epsilon_scale=2).lower > v.upper


def test_net_cardinality():
    one = K.net_cardinality_bound(1)
    assert abs(float(one.lower) - 1.3561) < 1e-4
    weeks = K.net_cardinality_bound(Fraction("0.94"))
    assert abs(float(weeks.lower) - 1.2747) < 1e-4
    assert weeks.upper < K.net_cardinality_display(Fraction("0.94"))


def test_graph_betti_bound():
    assert K.graph_betti_bound(1).upper < Fraction("334.08")
    ten = K.graph_betti_bound(10)
    assert ten.upper < Fraction("3340.8")
    assert ten.lower > 1 + Fraction("333.0") * 10


def test_displayed_coefficient_chain():
    # (493.2244575 - 2) / (2 pi 0.234721) from the displayed constants
    chain = 491.2244575 / (2 * math.pi * 0.234721)
    assert abs(chain - 333.08) < 0.01
    b = K.betti_coefficient()
    assert 333 < float(b.lower) and b.upper <= Fraction("333.08")


def test_entropy_lower():
    assert abs(float(K.entropy_lower(0, -2).lower) - 0.0001588) < 1e-7
    c = K.lower_coefficient()
    assert Fraction("0.00031") <= c.lower and c.upper < Fraction("0.00032")
    assert abs(float(c.lower) - 0.000317) < 1e-6
    with pytest.raises(ValueError):
        K.entropy_lower(0, 0)
    with pytest.raises(ValueError):
        K.entropy_lower(-1, -2)


@given(st.integers(0, 50), st.integers(1, 50))
def test_entropy_lower_monotone(k, chi):
    base = K.entropy_lower(k, -chi)
    assert base.certainly_less(K.entropy_lower(k + 1, -chi))
    assert K.entropy_lower(k, -chi - 1).certainly_less(base)
    assert base.lower >= Fraction("0.00031") * Fraction(k + 1, chi)


def test_kojima_mcshane():
    v = K.kojima_mcshane_volume(-2, math.log(62), certified=False)
    assert abs(v - 77.79) < 0.01
    assert K.kojima_mcshane_volume(-2, 0).upper == 0
    with pytest.raises(ValueError):
        K.kojima_mcshane_volume(1, 1)


@given(st.integers(0, 20), st.integers(1, 20), st.fractions(Fraction(1, 100), Fraction(10)))
def test_chain_recovers_entropy_bound(k, chi, h):
    """If ``k + 1 <= 334.08 * vol`` and ``vol <= 3 pi |chi| h`` then ``h >= entropy_lower``."""
    vol = K.kojima_mcshane_volume(-chi, h)
    if Fraction(k + 1) <= K.BETTI_TARGET * vol.lower:
        assert K.entropy_lower(k, -chi).lower <= h


def test_culler_shalen():
    assert K.culler_shalen_lower(-1).lower >= Fraction("0.326")
    assert abs(float(K.culler_shalen_lower(-2).lower) - 0.1634) < 1e-4
    assert K.culler_shalen_lower(-1).lower > Fraction(math.log(2) / 6)
    with pytest.raises(ValueError):
        K.culler_shalen_lower(0)


def test_weeks_guard():
    assert K.weeks_guard()


def test_float_mode_close_to_certified():
    for name in ("small_ball", "big_ball", "valence_ratio", "betti_coefficient", "lower_coefficient"):
        cert = getattr(K, name)()
        flt = getattr(K, name)(certified=False)
        assert contains(cert, flt, rel=1e-12), name


def test_ledger_all_pass_and_serializes():
    ledger = K.ConstantsLedger.compute()
    checks = ledger.checks()
    assert checks and all(c.passed for c in checks)
    data = ledger.to_json()
    assert data["valence_ratio"][0] <= data["valence_ratio"][1]
    assert ledger.dumps() == K.ConstantsLedger.compute().dumps()
