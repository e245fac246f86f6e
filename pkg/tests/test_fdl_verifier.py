import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fdlab.fdl_verifier import (
    LossReport,
    LossRow,
    coefficient_band,
    hyperbolic_band,
    loss_report,
    measure_loss_exponent,
    split_times,
    tarama_constants,
    verify_zone_chain,
    zone_bound_ingredients,
)
from fdlab.speeds import Envelope, SpeedClassSpec, constant_speed, model_speed_alpha, speed_from_functions

K0 = 4 / math.log(2)
SPEC = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0), K0=K0, order=2)


def test_split_times_values():
    st_ = split_times(100.0, SPEC)
    assert st_.a == pytest.approx(math.log(100) / 100, rel=1e-15)
    assert st_.b == pytest.approx(math.e * math.log(100) / 100, rel=1e-15)
    assert st_.ordered
    assert not split_times(3.0, SPEC).ordered
    with pytest.raises(ValueError):
        split_times(2.0, SPEC)


def test_hyperbolic_band():
    assert hyperbolic_band(0.5, 3.5, "squared") == pytest.approx(math.log(3.5**2 / 0.25))
    assert hyperbolic_band(0.5, 3.5, "direct") == pytest.approx(math.log(3.5 / 0.5))
    assert hyperbolic_band(1.0, 1.0 + 1e-9, "direct") == pytest.approx(1e-9, abs=1e-15)


_consts = st.tuples(st.floats(0.2, 2.0), st.floats(1.0, 6.0), st.floats(0.0, 20.0))


@given(_consts, st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1), st.floats(-1, 1), st.floats(1.0, 1e4))
def test_tarama_equivalence_band(cs, u, v, x, y, lam):
    mu1, width, kappa = cs
    mu2 = mu1 * width
    assume(abs(u) + abs(v) > 1e-6)
    c = mu1 + x * (mu2 - mu1)
    c1 = y * kappa * lam
    k = tarama_constants(mu1, mu2, kappa)
    u = u / lam  # keep both energy terms comparable
    e_kov = v * v + lam * lam * u * u
    w = v + c1 * u / (2 * c)
    e_tar = w * w / c + lam * lam * c * u * u
    assert k.eps0 * e_kov <= e_tar * (1 + 1e-12)
    assert e_tar <= k.M2 * e_kov * (1 + 1e-12)


@given(_consts, st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1), st.floats(-1, 1), st.floats(-50, 50),
       st.floats(1.0, 1e4))
def test_tarama_growth_rate(cs, u, v, x, y, c2, lam):
    mu1, width, kappa = cs
    mu2 = mu1 * width
    assume(abs(u) + abs(v) > 1e-6)
    c = mu1 + x * (mu2 - mu1)
    c1 = y * kappa * lam
    k = tarama_constants(mu1, mu2, kappa)
    u = u / lam
    w = v + c1 * u / (2 * c)
    e_tar = w * w / c + lam * lam * c * u * u
    d = (u * u * c1 / (2 * c**3) + u * v / c**2) * (c2 - 1.5 * c1 * c1 / c)
    assert abs(d) <= k.M3 * (abs(c2) + c1 * c1) / lam * e_tar * (1 + 1e-9) + 1e-300


def test_zone_ingredients_constant_speed():
    ing = zone_bound_ingredients(constant_speed(2.0, 0.5), split_times(1e3, SPEC), SPEC)
    assert ing.hyp_integral == 0.0
    assert ing.tarama_c2_integral == 0.0
    assert ing.kov_ceiling == pytest.approx((1 + 3.5**2) * math.log(1e3))
    assert all(m >= 0 for m in ing.margins.values())


def test_zone_chain_t_sin_single_lambda():
    z = verify_zone_chain(model_speed_alpha(0.0, 0.5), 1e3, SPEC)
    assert z.three_zone and z.passed
    assert all(m <= cc for m, cc in zip(z.measured_at, z.ceilings))
    assert z.ceilings[0] <= z.ceilings[1] <= z.ceilings[2]
    assert all(c <= k for c, k in zip(z.ceilings, z.class_ceilings))


def test_coefficient_band_of_constant():
    assert coefficient_band(constant_speed(2.25, 0.5), "direct") == pytest.approx(math.log(2.25))
    assert coefficient_band(constant_speed(2.25, 0.5), "squared") == pytest.approx(2 * math.log(2.25))
    assert coefficient_band(constant_speed(0.5, 0.5), "squared") == pytest.approx(-2 * math.log(0.5))


def test_constant_speed_has_no_loss():
    rep = measure_loss_exponent(constant_speed(2.25, 0.5), [1e3, 1e4], SPEC)
    assert rep.passed
    assert rep.delta_hat == [0.0, 0.0]
    assert LossReport.columns == ("lambda", "a", "b", "sup_log_gain", "delta_hat", "kov_exp", "hyp_ceiling",
                                  "tar_ceiling", "pass")
    # the raw exponent only reflects the bounded energy-equivalence band
    assert all(r.sup_log_gain <= r.log_m_hat + 1e-9 for r in rep.rows)


def test_grid_must_increase():
    with pytest.raises(ValueError):
        measure_loss_exponent(constant_speed(2.0, 0.5), [1e3, 1e2], SPEC)


def test_failed_lambda_is_recorded():
    bad = speed_from_functions(lambda t: np.where(t > 0.3, np.nan, 2.0), np.zeros_like, np.zeros_like, T0=0.5)
    rep = measure_loss_exponent(bad, [1e2, 1e3], SPEC)
    assert not rep.passed
    assert all(r.error and "IntegrationError" in r.error for r in rep.rows)


def _row(lam, dh):
    return LossRow(lam, 0, 0, 0, dh, dh, 0, 0, 0, 0, True)


def test_monotonicity_rule_on_top_half():
    ok = loss_report([_row(1, 0.9), _row(2, 1.2), _row(3, 0.5), _row(4, 0.52)], "squared")
    assert ok.passed  # 0.52 is within 5% of 0.5
    bad = loss_report([_row(1, 0.9), _row(2, 1.2), _row(3, 0.5), _row(4, 0.6)], "squared")
    assert not bad.passed
    assert loss_report([], "squared").passed
