import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdlab.speeds import (
    Envelope,
    SpeedClassSpec,
    affine_speed,
    class_distance,
    constant_speed,
    default_cutoff,
    density_check,
    desaturate,
    distance_ps1,
    distance_ps2,
    k0_for,
    log_grid,
    log_square_speed,
    membership_report,
    model_speed_alpha,
    sample_grid,
    smooth_to_initially_constant,
    speed_from_functions,
    speed_from_table,
    speed_table,
)


def fd(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)


# --- envelopes and class specs ---------------------------------------------


def test_envelope_catalog_values():
    t = np.array([0.5, 0.1, 1e-3])
    assert np.allclose(Envelope()(t), -np.log(t))
    assert np.allclose(Envelope("log-power", p=0.5)(t), np.sqrt(-np.log(t)))
    assert np.allclose(Envelope("constant", scale=2.0)(t), 2.0)
    assert Envelope.from_dict(Envelope("log-power", 0.5, 3.0).to_dict()) == Envelope("log-power", 0.5, 3.0)
    with pytest.raises(ValueError):
        Envelope("exp")


def test_spec_rejects_inverted_band():
    with pytest.raises(ValueError):
        SpeedClassSpec(2.0, 1.0, 0.5)


def test_k0_for_constant_envelopes():
    # omega = 2, psi = 1: 4 <= K0 |log t| on (0, 1/2] first binds at t = 1/2
    k0 = k0_for(Envelope("constant", scale=2.0), Envelope("constant", scale=1.0), 0.5)
    assert k0 == pytest.approx(4 / math.log(2), rel=1e-12)
    spec = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0), K0=k0)
    assert spec.check_envelopes(with_k0=True) == []
    tight = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0), K0=5.0)
    assert tight.check_envelopes(with_k0=True) == ["omega*(1+psi) exceeds K0*|log t|"]


def test_increasing_envelope_is_flagged():
    spec = SpeedClassSpec(0.5, 1.5, 0.5, omega=lambda t: np.asarray(t) + 1.0)
    assert "omega is not nonincreasing" in spec.check_envelopes()


# --- cutoff -----------------------------------------------------------------


def test_cutoff_box_and_flatness(theta):
    s = np.array([-1.0, 0.0, 1.0, 2.0])
    assert np.array_equal(theta(s), [0.0, 0.0, 1.0, 1.0])
    for m in (1, 2, 3):
        assert np.array_equal(theta.deriv(s, m), np.zeros(4))
    assert theta(0.5) == pytest.approx(0.5, abs=1e-15)


def test_cutoff_sup_norms_frozen(theta):
    # sup |theta^(m)| computed on 4e5 points and frozen
    assert theta.Km == pytest.approx((2.0, 9.8411, 110.567), rel=2e-4)


def test_cutoff_derivatives_match_finite_differences(theta):
    s = np.linspace(0.02, 0.98, 97)
    h = 1e-5
    for m in (1, 2, 3):
        num = fd(lambda x: theta.deriv(x, m - 1), s, h)
        ana = theta.deriv(s, m)
        assert np.max(np.abs(num - ana)) <= 1e-6 * max(1.0, np.max(np.abs(ana)))


@given(st.floats(-3, 4, allow_nan=False))
def test_cutoff_bounds_property(s):
    th = default_cutoff()
    assert 0.0 <= th(s) <= 1.0
    for m in (1, 2, 3):
        assert abs(th.deriv(s, m)) <= th.Km[m - 1]


# --- model speeds -----------------------------------------------------------


def test_alpha_zero_is_t_sin_inverse_t():
    c = model_speed_alpha(0.0, 0.5)
    t = np.geomspace(1e-6, 0.5, 50)
    assert np.allclose(c(t), 2 + t * np.sin(1 / t), rtol=0, atol=1e-15)
    assert c(1 / math.pi) == pytest.approx(2.0, abs=1e-15)


def test_alpha_one_follows_the_general_formula():
    # exp(-|log t|^0) = e^-1 and |log t|^2 exp(1) give 2 + sin(e L^2)/e
    c = model_speed_alpha(1.0, 0.5)
    t = np.geomspace(1e-4, 0.5, 30)
    L = -np.log(t)
    assert np.allclose(c(t), 2 + np.exp(-1) * np.sin(np.e * L**2), atol=1e-14)
    ls = log_square_speed(0.5)
    assert np.allclose(ls(t), 2 + np.sin(L**2), atol=1e-14)


def test_alpha_outside_range_rejected():
    with pytest.raises(ValueError):
        model_speed_alpha(1.5, 0.5)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 0.8, 1.0])
def test_model_derivatives_self_consistent(alpha):
    c = model_speed_alpha(alpha, 0.5)
    t = np.geomspace(2e-2, 0.45, 40)
    h = 1e-7 * t
    for order, fn in ((1, c.c1), (2, c.c2)):
        num = fd(lambda x: c.evaluate(x, order - 1), t, h)
        assert np.allclose(num, fn(t), rtol=1e-5, atol=1e-6 * np.max(np.abs(fn(t))))


def test_prefix_semantics():
    c = smooth_to_initially_constant(model_speed_alpha(0.0, 0.5), 0.1)
    t = np.linspace(0, 0.1, 11)
    assert np.all(c(t) == c.prefix[1])
    assert np.all(c.c1(t) == 0.0) and np.all(c.c2(t) == 0.0)
    assert c.t_start == 0.0
    with pytest.raises(ValueError):
        model_speed_alpha(0.0, 0.5)(1e-13)
    with pytest.raises(ValueError):
        c(0.6)


def test_segments_partition_horizon():
    c = smooth_to_initially_constant(model_speed_alpha(0.0, 0.5), 0.1)
    segs = c.segments
    assert segs[0].start == 0.0 and segs[-1].end == 0.5
    assert all(x.end == y.start for x, y in zip(segs, segs[1:]))
    assert [s.kind for s in segs[:2]] == ["constant", "generic"]


def test_smoothing_matches_outside_blend():
    base = model_speed_alpha(0.0, 0.5)
    c = smooth_to_initially_constant(base, 0.05)
    t = np.linspace(0.1, 0.5, 101)
    for k in (0, 1, 2):
        assert np.array_equal(c.evaluate(t, k), base.evaluate(t, k))
    assert c.prefix == (0.05, pytest.approx(float(base(0.05))))


def test_smoothing_derivatives_in_blend():
    c = smooth_to_initially_constant(model_speed_alpha(0.0, 0.5), 0.1)
    t = np.linspace(0.105, 0.195, 37)
    h = 1e-7
    assert np.allclose(fd(c, t, h), c.c1(t), rtol=1e-6, atol=1e-8)
    assert np.allclose(fd(c.c1, t, h), c.c2(t), rtol=1e-5, atol=1e-6)


# --- membership -------------------------------------------------------------


def test_membership_of_t_sin_inverse_t_first_order():
    spec = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0))
    rep = membership_report(model_speed_alpha(0.0, 0.5), spec)
    assert rep.passed
    assert [r.name for r in rep.ratios] == ["lower", "upper", "c1"]
    # |c'| t <= t + 1 on (0, 1/2]; sup |c'| t / 2 stays below 3/4
    assert rep.ratio("c1").max_ratio < 0.75


def test_membership_second_order_fails_near_zero():
    # |c''| t^2 ~ 1/t blows past (omega^2) e^psi = 4e; the grid finds it
    spec = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0), order=2)
    rep = membership_report(model_speed_alpha(0.0, 0.5), spec)
    assert not rep.passed
    assert not rep.ratio("c2").passed and rep.ratio("c2").argmax_t < 1e-6


def test_desaturate_maps_band_inward():
    spec = SpeedClassSpec(1.0, 3.0, 0.5)
    top = desaturate(constant_speed(3.0, 0.5), spec, 0.1)
    bottom = desaturate(constant_speed(1.0, 0.5), spec, 0.1)
    assert top(0.2) == pytest.approx(2.7) and bottom(0.2) == pytest.approx(1.1)
    assert top.prefix[1] == pytest.approx(2.7)
    shifted = affine_speed(model_speed_alpha(0.0, 0.5), 0.5, 1.0)
    assert shifted.c1(0.3) == pytest.approx(0.5 * model_speed_alpha(0.0, 0.5).c1(0.3))


def test_membership_band_violation():
    spec = SpeedClassSpec(0.5, 1.5, 0.5)
    rep = membership_report(constant_speed(2.0, 0.5), spec)
    assert not rep.ratio("upper").passed and rep.ratio("lower").passed


def test_membership_slack():
    spec = SpeedClassSpec(1.0, 3.0, 0.5)
    c = constant_speed(2.9, 0.5)
    assert membership_report(c, spec).passed
    assert not membership_report(c, spec, slack=0.05).passed


# --- distances --------------------------------------------------------------


SPEC2 = SpeedClassSpec(0.5, 3.5, 0.5, Envelope(), Envelope("constant", scale=1.0), order=2)


def test_distance_of_constants_is_level_gap():
    a, b = constant_speed(1.0, 0.5), constant_speed(1.25, 0.5)
    assert distance_ps1(a, b, SPEC2) == pytest.approx(0.25)
    assert distance_ps2(a, b, SPEC2) == pytest.approx(0.25)
    assert distance_ps1(a, a, SPEC2) == 0.0


def _family(p):
    amp, freq, lvl = p
    return speed_from_functions(
        lambda t: lvl + amp * t * np.sin(freq * t),
        lambda t: amp * (np.sin(freq * t) + freq * t * np.cos(freq * t)),
        lambda t: amp * (2 * freq * np.cos(freq * t) - freq**2 * t * np.sin(freq * t)),
        T0=0.5,
    )


_params = st.tuples(st.floats(-0.5, 0.5), st.floats(0.0, 40.0), st.floats(1.0, 2.0))
_GRID = log_grid(1e-8, 0.5, 256)


@given(_params, _params, _params)
def test_distance_is_a_pseudometric(p, q, r):
    a, b, c = _family(p), _family(q), _family(r)
    for dist in (distance_ps1, distance_ps2):
        ab, ba = dist(a, b, SPEC2, _GRID), dist(b, a, SPEC2, _GRID)
        assert ab == ba
        assert ab >= 0
        assert dist(a, c, SPEC2, _GRID) <= ab + dist(b, c, SPEC2, _GRID) + 1e-12
    assert class_distance(a, b, SPEC2, _GRID) == distance_ps2(a, b, SPEC2, _GRID)


def test_distance_rejects_mismatched_horizons():
    with pytest.raises(ValueError):
        distance_ps1(constant_speed(1, 0.5), constant_speed(1, 0.4), SPEC2)


# --- density ----------------------------------------------------------------


def test_density_distances_shrink():
    spec = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0))
    rows = density_check(model_speed_alpha(0.0, 0.5), spec, [0.1, 0.03, 0.01, 0.003])
    d = [r.distance for r in rows]
    assert all(y < x for x, y in zip(d, d[1:]))
    assert all(r.member for r in rows)


# --- grids and export -------------------------------------------------------


def test_sample_grid_refines_windows():
    from fdlab.activators import build_activator, schedule_c1

    c = build_activator(constant_speed(1.0, 0.5), schedule_c1(1e4, 1.0, Envelope()))
    g = sample_grid([c], 0.5, per_decade=16)
    w = c.windows()[0]
    inside = np.sum((g >= w.start) & (g <= w.end))
    assert inside >= (w.end - w.start) * w.freq / (2 * math.pi) * 32


def test_speed_table_round_trip(tmp_path):
    c = model_speed_alpha(0.0, 0.5)
    grid = np.linspace(0.01, 0.5, 2001)
    text = speed_table(c, grid)
    assert text.splitlines()[0] == "t,c,c1,c2"
    assert "\r" not in text
    row = text.splitlines()[1].split(",")
    assert float(row[0]) == grid[0] and float(row[1]) == float(c(grid[0]))
    p = tmp_path / "c.csv"
    p.write_text(text, encoding="utf-8")
    back = speed_from_table(str(p))
    assert np.array_equal(back(grid), c(grid))
