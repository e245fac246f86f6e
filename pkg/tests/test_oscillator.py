import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdlab.oscillator import (
    FORMS,
    IntegrationError,
    OscState,
    canonical_pair,
    continuous_dependence_probe,
    energies,
    energy_derivatives,
    integrate,
    log_energies,
    propagate_constant,
    propagator,
    wronskian,
)
from fdlab.speeds import (
    constant_speed,
    log_square_speed,
    model_speed_alpha,
    smooth_to_initially_constant,
    speed_from_functions,
)

CATALOG = {
    "t-sin": lambda: model_speed_alpha(0.0, 0.5),
    "alpha-half": lambda: model_speed_alpha(0.5, 0.5),
    "log-square": lambda: log_square_speed(0.5),
    "smoothed": lambda: smooth_to_initially_constant(model_speed_alpha(0.0, 0.5), 0.05),
}


def exact_rotation(gamma, lam, t, u0, v0):
    k = gamma * lam
    return u0 * math.cos(k * t) + v0 * math.sin(k * t) / k, -u0 * k * math.sin(k * t) + v0 * math.cos(k * t)


def test_state_normalization_preserves_true_values():
    s = OscState(0.1, 3e40, -2e40, 1.5, 10.0)
    n = s.normalized()
    assert max(abs(n.u), abs(n.v)) <= 2.0**32
    assert n.true() == pytest.approx(s.true(), rel=1e-13)


def test_constant_propagation_is_exact_rotation():
    s = propagate_constant(OscState(0.0, 0.3, 0.7, 0.0, 20.0), 1.5, 0.4)
    assert s.true() == pytest.approx(exact_rotation(1.5, 20.0, 0.4, 0.3, 0.7), rel=1e-13)


@pytest.mark.parametrize("form", FORMS)
def test_generic_segment_matches_rotation(form):
    # a speed without a constant tag goes through the Runge-Kutta path
    lvl = 2.25
    c = speed_from_functions(lambda t: np.full_like(t, lvl), np.zeros_like, np.zeros_like, T0=1.0)
    q = lvl if form == "direct" else lvl**2
    tr = integrate(c, 50.0, OscState(1e-12, 0.0, 1.0, 0.0, 50.0), 1.0, 1e-11, form=form)
    u, v = tr.final.true()
    ue, ve = exact_rotation(math.sqrt(q), 50.0, 1.0 - 1e-12, 0.0, 1.0)
    assert abs(u - ue) <= 1e-8 * math.hypot(50 * ue, ve) / 50
    assert abs(v - ve) <= 1e-8 * math.hypot(50 * ue, ve)


def test_output_times_are_respected():
    c = model_speed_alpha(0.0, 0.5)
    times = [0.1, 0.2, 0.3]
    tr = integrate(c, 30.0, OscState(0.05, 0.0, 1.0, 0.0, 30.0), 0.4, times=times)
    assert list(tr.t) == [0.05, 0.1, 0.2, 0.3, 0.4]
    assert tr.at(0.2).t == 0.2
    with pytest.raises(KeyError):
        tr.at(0.25)


def test_input_validation():
    c = model_speed_alpha(0.0, 0.5)
    with pytest.raises(ValueError):
        propagator(c, 10.0, [0.1, 0.2], tol=1.0)
    with pytest.raises(ValueError):
        propagator(c, 10.0, [0.1, 0.6])
    with pytest.raises(ValueError):
        propagator(c, 10.0, [0.1, 0.2], form="cubic")
    with pytest.raises(ValueError):
        integrate(c, 10.0, OscState(0.3, 0.0, 1.0), 0.2)


def test_nonfinite_coefficient_raises():
    bad = speed_from_functions(lambda t: np.where(t > 0.3, np.nan, 1.0), np.zeros_like, T0=0.5)
    with pytest.raises(IntegrationError):
        integrate(bad, 10.0, OscState(0.1, 0.0, 1.0, 0.0, 10.0), 0.5)


@given(st.sampled_from(sorted(CATALOG)), st.floats(1.0, 4.0), st.sampled_from(FORMS))
def test_wronskian_is_conserved(name, log_lam, form):
    c = CATALOG[name]()
    lam = 10.0**log_lam
    times = np.linspace(c.t_start, 0.5, 9)
    p, q = canonical_pair(c, lam, 0.5, 1e-10, times, form)
    for t in times:
        assert abs(wronskian(p, q, t) + 1.0) <= 1e-9


def test_energies_constant_speed():
    c = constant_speed(2.25, 0.5)
    tr = integrate(c, 40.0, OscState(0.0, 0.0, 1.0, 0.0, 40.0), 0.5, times=np.linspace(0, 0.5, 11), form="squared")
    eh = log_energies(tr, c, "hyp")
    assert np.ptp(eh) < 1e-12
    # with c' = 0 the Tarama energy is E_Hyp / c in the squared form
    et = log_energies(tr, c, "tar")
    assert np.allclose(et, eh - math.log(2.25), atol=1e-12)


_amp = st.floats(-3, 3).filter(lambda x: abs(x) > 1e-6)


@given(_amp, _amp, st.floats(0.5, 3.0), st.floats(-20, 20), st.floats(1, 1e3))
def test_squared_tarama_is_a_completed_square(u, v, c0, c1, lam):
    from fdlab.oscillator import _log_energy_arrays

    w = v + c1 * u / (2 * c0)
    expect = w * w / c0 + lam * lam * c0 * u * u
    got = math.exp(float(_log_energy_arrays(np.array([u]), np.array([v]), 0.0, lam, c0, c1, "squared", "tar")[0]))
    assert got == pytest.approx(expect, rel=1e-9, abs=1e-12)


def _fd_energy_derivatives(c, lam, form, ts, h):
    pts = sorted({c.t_start, *[t + d * h for t in ts for d in (-2, -1, 0, 1, 2)]})
    tr = integrate(c, lam, OscState(c.t_start, 0.0, 1.0, 0.0, lam), pts[-1], 1e-13, times=pts, form=form)
    out = []
    for t in ts:
        e = {}
        for d in (-2, -1, 1, 2):
            en = energies(tr.at(t + d * h), c, form)
            e[d] = np.exp([en.log_ehyp, en.log_etar])
        num = (8 * (e[1] - e[-1]) - (e[2] - e[-2])) / (12 * h)
        out.append((num, np.array(energy_derivatives(tr.at(t), c, form))))
    return out


@pytest.mark.parametrize("name", ["t-sin", "log-square"])
@pytest.mark.parametrize("form", FORMS)
def test_energy_derivatives_match_finite_differences(name, form):
    c = CATALOG[name]()
    for num, ana in _fd_energy_derivatives(c, 10.0, form, np.linspace(0.06, 0.44, 20), 1e-4):
        assert np.all(np.abs(num - ana) <= 1e-4 * np.abs(ana) + 1e-12)


def test_trajectory_table_header():
    c = model_speed_alpha(0.0, 0.5)
    tr = integrate(c, 10.0, OscState(0.1, 0.0, 1.0, 0.0, 10.0), 0.5, times=[0.2, 0.3])
    lines = tr.table(c).splitlines()
    assert lines[0] == "t,u,v,logscale,log_ekov,log_ehyp,log_etar"
    assert len(lines) == 5
    assert float(lines[1].split(",")[0]) == 0.1


def test_log_scale_absorbs_large_growth():
    # c = 1 + 0.9 sin(2 lam t) is parametrically resonant: growth of many e-folds
    lam = 200.0
    c = speed_from_functions(lambda t: 1 + 0.9 * np.sin(2 * lam * t), lambda t: 1.8 * lam * np.cos(2 * lam * t),
                             T0=1.0)
    tr = integrate(c, lam, OscState(1e-12, 0.0, 1.0, 0.0, lam), 1.0, 1e-10)
    le = tr.log_ekov()[-1]
    assert le > 100 * math.log(2)  # beyond what a double could hold unscaled without care
    assert np.isfinite(tr.u).all() and max(abs(tr.u[-1]), abs(tr.v[-1])) <= 2.0**32


def test_continuous_dependence_shrinks_with_perturbation():
    base = constant_speed(1.0, 1.0)
    seq = [speed_from_functions(lambda t, e=e: 1 + e * np.sin(3 * t), lambda t, e=e: 3 * e * np.cos(3 * t), T0=1.0)
           for e in (0.1, 0.01, 0.001)]
    d = continuous_dependence_probe(seq, base, 10.0, 1.0)
    assert d[0] > d[1] > d[2]
    assert d[1] / d[0] == pytest.approx(0.1, rel=0.05)
