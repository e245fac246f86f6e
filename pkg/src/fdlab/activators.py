"""Activator speeds c_lam, their parameter schedules, growth certificates and the staged iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels as _k
from .oscillator import OscState, integrate, propagator
from .quadrature import adaptive_quad, panel_quad
from .speeds import (
    CutoffFunction,
    PropagationSpeed,
    Segment,
    SpeedClassSpec,
    class_distance,
    constant_speed,
    default_cutoff,
    membership_report,
    sample_grid,
)


class WindowError(ValueError):
    pass


class GrowthMismatch(RuntimeError):
    pass


class StageUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class ActivatorWindow:
    """Window [a, b] with gamma*lam*a/(2 pi) = na and gamma*lam*b/(2 pi) = nb."""

    gamma: float
    lam: float
    na: int
    nb: int
    omega_l: float

    @property
    def a(self) -> float:
        return 2 * math.pi * self.na / (self.gamma * self.lam)

    @property
    def b(self) -> float:
        return 2 * math.pi * self.nb / (self.gamma * self.lam)

    @property
    def k(self) -> float:
        """Angular frequency gamma*lam of the base oscillation."""
        return self.gamma * self.lam

    @property
    def phi(self) -> float:
        if self.na <= 0 or self.nb <= 0:
            return math.nan
        return self.omega_l / (32 * self.gamma**2) * math.log(self.nb / self.na)

    def feasible(self, T1: float = math.inf) -> bool:
        return self.na >= 1 and 4 * self.na < self.nb and self.b < T1

    def check(self, T1: float = math.inf) -> None:
        if self.na < 1:
            raise WindowError(f"lambda={self.lam:g}: empty window start (na={self.na})")
        if not 4 * self.na < self.nb:
            raise WindowError(f"lambda={self.lam:g}: need 2a < b/2 (na={self.na}, nb={self.nb})")
        if not self.b < T1:
            raise WindowError(f"lambda={self.lam:g}: window end b={self.b:g} not below T1={T1:g}")


def _omega_l(omega, b, lam):
    return float(min(float(omega(b)), math.log(lam)))


def schedule_c1(lam: float, gamma: float, omega: Callable, T1: float = math.inf) -> ActivatorWindow:
    """na = floor(lam^(1/4)), nb = floor(lam^(1/2))."""
    na = int(math.floor(lam**0.25))
    nb = int(math.floor(math.sqrt(lam)))
    # guard floor() against representation error at perfect powers
    while (na + 1) ** 4 <= lam:
        na += 1
    while (nb + 1) ** 2 <= lam:
        nb += 1
    b = 2 * math.pi * nb / (gamma * lam)
    w = ActivatorWindow(float(gamma), float(lam), na, nb, _omega_l(omega, b, lam) if nb > 0 else 0.0)
    w.check(T1)
    return w


@dataclass(frozen=True)
class ScheduleC2Params:
    Gamma_l: float
    psi_l: float
    branch: str  # "log" when psi_l = log(lam)/8, else "psi"
    gamma_le_one: bool
    b_le_sqrt: bool
    feasible: bool
    ratio_omega_la: float  # omega_l/(lam a)
    ratio_ba: float  # b/a
    ratio_phi: float  # (omega_l/log lam) log(b/a)
    ratio_c2_first: float  # lam b exp(-psi(b))/omega(b)
    ratio_c2_second: float  # omega_l exp(-psi(b))/omega(b)


def schedule_c2(lam: float, gamma: float, omega: Callable, psi: Callable, T1: float = math.inf):
    """Window from psi_l = min(log(lam)/8, psi(lam^-1/2)/4 + log(Gamma_l)/4).

    Returns (window, params).  An infeasible window is returned as-is with
    ``params.feasible`` False so that the limit ratios can still be tabulated.
    """
    L = math.log(lam)
    s = lam**-0.5
    w_s, p_s = float(omega(s)), float(psi(s))
    if not (w_s > 0 and p_s > 0 and math.isfinite(w_s * p_s)):
        raise ValueError("omega(lam^-1/2) and psi(lam^-1/2) must be finite and positive")
    G = w_s * p_s / L
    alt = p_s / 4 + math.log(G) / 4
    psi_l = min(L / 8, alt)
    branch = "log" if L / 8 <= alt else "psi"
    na = int(math.floor(L * math.exp(psi_l)))
    nb = int(math.floor(L * math.exp(2 * psi_l)))
    b = 2 * math.pi * nb / (gamma * lam)
    wl = _omega_l(omega, b, lam) if nb > 0 else 0.0
    w = ActivatorWindow(float(gamma), float(lam), na, nb, wl)
    a = w.a
    wb, pb = float(omega(b)), float(psi(b))
    params = ScheduleC2Params(
        Gamma_l=G,
        psi_l=psi_l,
        branch=branch,
        gamma_le_one=G <= 1,
        b_le_sqrt=b <= s,
        feasible=w.feasible(T1),
        ratio_omega_la=wl / (lam * a) if na > 0 else math.inf,
        ratio_ba=b / a if na > 0 else math.inf,
        ratio_phi=wl / L * math.log(b / a) if na > 0 else math.nan,
        ratio_c2_first=lam * b * math.exp(-pb) / wb,
        ratio_c2_second=wl * math.exp(-pb) / wb,
    )
    return w, params


# ---------------------------------------------------------------------------
# profile and speed
# ---------------------------------------------------------------------------


def _inv_t_deriv(t, k):
    # d^k/dt^k of 1/t
    return (-1) ** k * factorial(k) / t ** (k + 1)


def epsilon_profile(w: ActivatorWindow, theta: CutoffFunction | None, t, order: int = 0):
    """k-th derivative of the amplitude: 0 outside [a, b], omega_l/t on [2a, b/2], cutoff ramps between."""
    if not 0 <= order <= 3:
        raise ValueError("order must be 0..3")
    theta = theta or default_cutoff()
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    a, b, om = w.a, w.b, w.omega_l
    out = np.zeros_like(t)
    mid = (t >= 2 * a) & (t <= b / 2)
    out[mid] = om * _inv_t_deriv(t[mid], order)
    for mask, s_of, ds in (
        ((t > a) & (t < 2 * a), lambda x: (x - a) / a, 1.0 / a),
        ((t > b / 2) & (t < b), lambda x: 2 * (b - x) / b, -2.0 / b),
    ):
        if np.any(mask):
            x = t[mask]
            th = theta.all(s_of(x), order)
            acc = np.zeros_like(x)
            for i in range(order + 1):
                acc += comb(order, i) * th[i] * ds**i * om * _inv_t_deriv(x, order - i)
            out[mask] = acc
    return float(out[0]) if scalar else out


def epsilon_constants(theta: CutoffFunction | None = None) -> tuple:
    """K^eps_m with |eps^(m)| <= K^eps_m omega_l / t^(m+1) on [a, b], m = 0..3."""
    theta = theta or default_cutoff()
    norms = (1.0, *theta.Km)
    return tuple(sum(comb(m, i) * norms[i] * 2**i * factorial(m - i) for i in range(m + 1)) for m in range(4))


def _window_terms(w: ActivatorWindow, theta, t, order):
    """Correction term of the given derivative order (c_lam^(order) = c_*^(order) - terms)."""
    g, k = w.gamma, w.k
    e = [epsilon_profile(w, theta, t, m) for m in range(order + 2)]
    s, c = np.sin(k * t), np.cos(k * t)
    S2, C2 = np.sin(2 * k * t), np.cos(2 * k * t)
    if order == 0:
        return e[0] * S2 / (4 * k) + e[1] * s**2 / (8 * k * k) + e[0] ** 2 * s**4 / (64 * g**2 * k * k)
    if order == 1:
        return (e[0] * C2 / 2
                + e[0] ** 2 * s**3 * c / (16 * g**2 * k)
                + 3 * e[1] * S2 / (8 * k)
                + e[0] * e[1] * s**4 / (32 * g**2 * k * k)
                + e[2] * s**2 / (8 * k * k))
    if order == 2:
        return (-k * e[0] * S2
                + e[0] ** 2 * (-s**4 + 3 * s**2 * c**2) / (16 * g**2)
                + 1.25 * e[1] * C2
                + e[1] ** 2 * s**4 / (32 * g**2 * k * k)
                + e[0] * e[1] * s**3 * c / (4 * g**2 * k)
                + e[2] * S2 / (2 * k)
                + e[0] * e[2] * s**4 / (32 * g**2 * k * k)
                + e[3] * s**2 / (8 * k * k))
    raise ValueError(order)


def build_activator(c_star: PropagationSpeed, w: ActivatorWindow, theta: CutoffFunction | None = None) -> PropagationSpeed:
    """c_lam = c_* - eps sin(2gl t)/(4gl) - eps' sin^2/(8g^2l^2) - eps^2 sin^4/(64g^4l^2)."""
    theta = theta or default_cutoff()
    if c_star.prefix is None:
        raise ValueError("host speed must be initially constant")
    T1, level = c_star.prefix
    if abs(level - w.gamma**2) > 1e-12 * level:
        raise ValueError(f"prefix level {level} does not match gamma^2={w.gamma**2}")
    w.check(T1)
    a, b = w.a, w.b

    fast = theta == default_cutoff()

    def make(order):
        def fn(t):
            out = c_star.evaluate(t, order)
            m = (t > a) & (t < b)
            if np.any(m):
                if fast:
                    corr = _k.window_correction_np(t[m], a, b, w.omega_l, w.gamma, w.k, order)
                else:
                    corr = _window_terms(w, theta, t[m], order)
                out[m] = out[m] - corr
            return out
        return fn

    segs = [Segment(0.0, a, "constant", level), Segment(a, b, "window", level, 2 * w.k)]
    for s in c_star.segments:
        if s.end <= b:
            continue
        segs.append(Segment(max(s.start, b), s.end, s.kind, s.level, s.freq))
    return PropagationSpeed(
        value=make(0),
        d1=make(1),
        d2=make(2) if c_star.d2 is not None else None,
        T0=c_star.T0,
        prefix=(a, level),
        segments=tuple(segs),
        name=f"act({c_star.name},{w.lam:g})",
        parent=c_star,
    )


def window_integral(w: ActivatorWindow, theta: CutoffFunction | None = None, t: float | None = None) -> float:
    """int_a^t eps(s) sin^2(gamma lam s) ds on half-period-aligned panels."""
    theta = theta or default_cutoff()
    a, b = w.a, w.b
    t = b if t is None else t
    if not a <= t <= b:
        raise ValueError("t outside the window")
    k = w.k
    f = lambda s: epsilon_profile(w, theta, s, 0) * np.sin(k * s) ** 2
    # quarter-period panels; endpoints of the ramps are panel edges
    return panel_quad(f, a, t, math.pi / (4 * k), breakpoints=(2 * a, b / 2))


def activator_closed_form(w: ActivatorWindow, theta: CutoffFunction | None, t: float) -> OscState:
    """Exact state of data (0, 1) at time 0 under c_lam, for t in [a, b]."""
    theta = theta or default_cutoff()
    a, b, g, k = w.a, w.b, w.gamma, w.k
    if not a <= t <= b:
        raise ValueError("t outside the window")
    I = window_integral(w, theta, t)
    if t == a or t == b:
        s, c = 0.0, 1.0
    else:
        s, c = math.sin(k * t), math.cos(k * t)
    eps = float(epsilon_profile(w, theta, t, 0))
    u = s / k
    v = c + u * eps * s * s / (8 * g * g)
    return OscState(float(t), u, v, I / (8 * g * g), w.lam)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    t: float
    log_ekov: float
    required: float
    margin: float


@dataclass(frozen=True)
class GrowthCertificate:
    lam: float
    gamma: float
    a: float
    b: float
    omega_l: float
    phi: float
    log_gain_at_b: float
    required: float
    checkpoints: tuple
    margin: float
    passed: bool
    log_m_delta: float = 0.0
    integrator_rel_err: float = math.nan
    u_b_rel: float = math.nan
    kind: str = "growth"  # "growth" (2 phi + log M) or "activation" (phi)

    columns = ("lambda", "gamma", "a", "b", "omega_l", "phi", "log_gain_at_b", "margin", "pass")
    checkpoint_columns = ("lambda", "t", "log_ekov", "required", "margin")

    def row(self):
        return (self.lam, self.gamma, self.a, self.b, self.omega_l, self.phi, self.log_gain_at_b, self.margin, self.passed)

    def checkpoint_rows(self):
        for c in self.checkpoints:
            yield (self.lam, c.t, c.log_ekov, c.required, c.margin)

    def log_ekov_at(self, t: float) -> float:
        for c in self.checkpoints:
            if abs(c.t - t) <= 1e-14 * max(1.0, t):
                return c.log_ekov
        raise KeyError(t)


def _log_ekov(state: OscState) -> float:
    return math.log(state.v**2 + state.lam**2 * state.u**2) + 2 * state.logscale


def log_m_delta(c_star: PropagationSpeed, mu2: float, rtol: float = 1e-8) -> float:
    """log of min(1, 1/mu2) exp(-int_{T1}^{T0} |c'|/c)."""
    T1 = c_star.prefix[0] if c_star.prefix is not None else 0.0
    base = math.log(min(1.0, 1.0 / mu2))
    if T1 >= c_star.T0:
        return base
    bp = [s.start for s in c_star.segments]
    q = adaptive_quad(lambda t: np.abs(c_star.c1(t)) / c_star(t), T1, c_star.T0, rtol, breakpoints=bp)
    return base - q.value


def verify_growth(c_lambda: PropagationSpeed, w: ActivatorWindow, checkpoints: Sequence[float],
                  use_integrator: bool = True, theta: CutoffFunction | None = None, mu2: float | None = None,
                  tol: float = 1e-12, mismatch_rtol: float = 1e-6) -> GrowthCertificate:
    """log E_Kov >= 2 phi + log M_delta at every checkpoint past b."""
    theta = theta or default_cutoff()
    c_star = c_lambda.parent
    if c_star is None:
        raise ValueError("c_lambda must come from build_activator")
    b = w.b
    cps = sorted(float(t) for t in checkpoints)
    if any(t <= b or t > c_lambda.T0 for t in cps):
        raise ValueError("checkpoints must lie in (b, T0]")
    if mu2 is None:
        g = sample_grid([c_star], c_star.T0, per_decade=64)
        mu2 = float(np.max(c_star(g)))
    lmd = log_m_delta(c_star, mu2)
    st_b = activator_closed_form(w, theta, b)
    log_b = _log_ekov(st_b)
    rel, u_rel = math.nan, math.nan
    if use_integrator:
        tr = integrate(c_lambda, w.lam, OscState(0.0, 0.0, 1.0, 0.0, w.lam), b, tol)
        fin = tr.final
        log_int = _log_ekov(fin)
        rel = abs(math.expm1(log_int - log_b))
        u_rel = abs(fin.u) / abs(fin.v)
        if rel > mismatch_rtol:
            raise GrowthMismatch(f"closed form and integrator disagree at b: relative {rel:.3e}")
    required = 2 * w.phi + lmd
    out = []
    if cps:
        tr = integrate(c_lambda, w.lam, st_b, cps[-1], tol, times=cps)
        for t in cps:
            le = _log_ekov(tr.at(t))
            out.append(Checkpoint(t, le, required, le - required))
    margin = min((c.margin for c in out), default=log_b - required)
    return GrowthCertificate(w.lam, w.gamma, w.a, b, w.omega_l, w.phi, log_b, required, tuple(out), margin,
                             bool(margin > 0), lmd, rel, u_rel, "growth")


def activation_checkpoints(T0: float, i: int, n_log: int = 32) -> np.ndarray:
    dy = [T0 / 2**j for j in range(i + 1)]
    return np.unique(np.concatenate([dy, np.geomspace(T0 / 2**i, T0, n_log)]))


def activation_certificate(speed: PropagationSpeed, w: ActivatorWindow, checkpoints: Sequence[float],
                           tol: float = 1e-10, cushion: float = 0.0) -> GrowthCertificate:
    """log E_Kov(t) > (1 + cushion) phi(lam) at the checkpoints, integrating data (0, 1) from t = 0."""
    cps = np.asarray(sorted(set(map(float, checkpoints))))
    t0 = speed.t_start
    tr = propagator(speed, w.lam, np.concatenate([[t0], cps]), tol).apply(0.0, 1.0)
    le = tr.log_ekov()[1:]
    req = (1 + cushion) * w.phi
    out = tuple(Checkpoint(float(t), float(x), req, float(x - req)) for t, x in zip(cps, le))
    margin = min(c.margin for c in out)
    log_b = math.nan
    return GrowthCertificate(w.lam, w.gamma, w.a, w.b, w.omega_l, w.phi, log_b, req, out, margin,
                             bool(margin > 0), 0.0, math.nan, math.nan, "activation")


# ---------------------------------------------------------------------------
# convergence tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    lam: float
    feasible: bool
    member: Optional[bool]
    distance: float
    worst_c1_ratio: float
    worst_c2_ratio: float
    ratio_c2_first: float = math.nan
    ratio_c2_second: float = math.nan
    note: str = ""

    columns = ("lambda", "feasible", "member", "distance", "worst_c1_ratio", "worst_c2_ratio",
               "ratio_c2_first", "ratio_c2_second", "note")

    def row(self):
        return (self.lam, self.feasible, self.member, self.distance, self.worst_c1_ratio, self.worst_c2_ratio,
                self.ratio_c2_first, self.ratio_c2_second, self.note)


def verify_convergence(c_star: PropagationSpeed, spec: SpeedClassSpec, lambda_grid: Sequence[float],
                       schedule: str = "c1", theta: CutoffFunction | None = None,
                       per_decade: int = 1024) -> list[ConvergenceRow]:
    """Membership of c_lam and its class distance to c_* along a frequency grid."""
    theta = theta or default_cutoff()
    if c_star.prefix is None:
        raise ValueError("host speed must be initially constant")
    T1, level = c_star.prefix
    gamma = math.sqrt(level)
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        r1 = r2 = math.nan
        try:
            if schedule == "c1":
                w = schedule_c1(lam, gamma, spec.omega, T1)
            elif schedule == "c2":
                w, p = schedule_c2(lam, gamma, spec.omega, spec.psi, T1)
                r1, r2 = p.ratio_c2_first, p.ratio_c2_second
                w.check(T1)
            else:
                raise ValueError(f"unknown schedule {schedule!r}")
        except WindowError as exc:
            rows.append(ConvergenceRow(lam, False, None, math.nan, math.nan, math.nan, r1, r2, str(exc)))
            continue
        c_l = build_activator(c_star, w, theta)
        grid = sample_grid([c_l], spec.T0, per_decade=per_decade)
        rep = membership_report(c_l, spec, grid)
        dist = class_distance(c_l, c_star, spec, grid)
        c2r = rep.ratio("c2").max_ratio if spec.order == 2 else math.nan
        rows.append(ConvergenceRow(lam, True, rep.passed, dist, rep.ratio("c1").max_ratio, c2r, r1, r2))
    return rows


# ---------------------------------------------------------------------------
# staged universal activator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageRecord:
    n: int
    lam: float
    window: ActivatorWindow
    sup_change: float
    membership: object
    certificates: tuple  # activation certificates of lam_1..lam_n under gamma_n
    candidates_tried: int


@dataclass(frozen=True)
class IterationResult:
    speed: PropagationSpeed
    speeds: tuple  # gamma_0, gamma_1, ..., gamma_n
    stages: tuple

    @property
    def lambdas(self):
        return [s.lam for s in self.stages]

    @property
    def certificates(self):
        return [(c.lam, c) for c in self.stages[-1].certificates] if self.stages else []


def iterate_universal(spec: SpeedClassSpec, gamma0_level: float | None = None, n_stages: int = 3,
                      margin: float = 0.05, tol: float = 1e-10, lam_min: float = 16.0,
                      theta: CutoffFunction | None = None, per_decade: int = 512, lam_max: float = 2.0**60,
                      log: Callable[[str], None] | None = None) -> IterationResult:
    """Stage n adds one window at lam_n to gamma_{n-1}, found by doubling until every check passes."""
    if not 1 <= n_stages <= 8:
        raise ValueError("n_stages must lie in 1..8")
    if margin <= 0:
        raise ValueError("margin must be positive")
    theta = theta or default_cutoff()
    level = (spec.mu1 + spec.mu2) / 2 if gamma0_level is None else float(gamma0_level)
    if not spec.mu1 < level < spec.mu2:
        raise ValueError("the initial level must lie strictly inside (mu1, mu2)")
    gamma = math.sqrt(level)
    T0 = spec.T0
    speeds = [constant_speed(level, T0)]
    stages: list[StageRecord] = []
    windows: list[ActivatorWindow] = []
    say = log or (lambda msg: None)

    for n in range(1, n_stages + 1):
        prev = speeds[-1]
        T1 = prev.prefix[0]
        lam = max(float(n), lam_min, 2 * stages[-1].lam if stages else 0.0)
        tried = 0
        while True:
            if lam > lam_max:
                raise StageUnreachable(f"stage {n}: no frequency up to {lam_max:g} passes at margin {margin}")
            try:
                w = schedule_c1(lam, gamma, spec.omega, T1)
            except WindowError:
                lam *= 2
                continue
            if w.b > 2.0**-n:
                lam *= 2
                continue
            tried += 1
            cand = build_activator(prev, w, theta)
            fine = np.linspace(w.a, w.b, max(2049, 64 * w.nb + 1))
            change = float(np.max(np.abs(cand(fine) - prev(fine))))
            ok = change <= 2.0**-n
            rep = None
            if ok:
                grid = sample_grid([cand], T0, per_decade=per_decade)
                rep = membership_report(cand, spec, grid, slack=margin)
                ok = rep.passed
            certs = []
            if ok:
                own = activation_certificate(cand, w, activation_checkpoints(T0, n), tol, cushion=margin)
                ok = own.passed
                certs.append(own)
            if ok:
                for i, wi in enumerate(windows, start=1):
                    ci = activation_certificate(cand, wi, activation_checkpoints(T0, i), tol)
                    certs.append(ci)
                    if not ci.passed:
                        ok = False
                        break
            say(f"stage {n}: lambda={lam:g} change={change:.3g} ok={ok}")
            if ok:
                ordered = tuple(certs[1:]) + (certs[0],)
                stages.append(StageRecord(n, lam, w, change, rep, ordered, tried))
                windows.append(w)
                speeds.append(cand)
                break
            lam *= 2
    return IterationResult(speeds[-1], tuple(speeds), tuple(stages))


# ---------------------------------------------------------------------------
# divergence table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SobolevRow:
    beta: float
    t: float
    stage: int
    lam: float
    log_term: float
    running_max: float
    lower_bound: float  # phi/2 - 2 beta log lam
    insufficient_range: bool

    columns = ("beta", "t", "stage", "lambda", "log_term", "running_max", "lower_bound", "insufficient_range")

    def row(self):
        return (self.beta, self.t, self.stage, self.lam, self.log_term, self.running_max, self.lower_bound,
                self.insufficient_range)


@dataclass(frozen=True)
class SobolevTable:
    rows: tuple
    verdicts: dict  # beta -> "pass" | "fail" | "insufficient frequency range"
    data_regularity: tuple  # (alpha, stage, lam, lhs, rhs, ok)

    @property
    def passed(self) -> bool:
        return all(v != "fail" for v in self.verdicts.values())


def sobolev_divergence_check(certs: Sequence, beta_list: Sequence[float] = (0, 1, 2, 4),
                             t_list: Sequence[float] | None = None,
                             alpha_list: Sequence[float] = (0.5, 1.0)) -> SobolevTable:
    """Per-stage log of a_i^2 E_Kov,i(t) lam_i^(-2 beta), a_i = exp(-phi_i/4).

    A beta passes when the running maximum over stages never drops and each
    term is at least the previous one.  When the certificate lower bound
    phi_i/2 - 2 beta log lam_i is negative the available frequencies are too
    small for the bound to say anything, and the verdict says so instead of
    failing.
    """
    cl = [c if isinstance(c, GrowthCertificate) else c[1] for c in certs]
    if not cl:
        raise ValueError("no certificates")
    if t_list is None:
        t_list = [max(c.t for c in cl[0].checkpoints)]
    rows, verdicts = [], {}
    for beta in beta_list:
        status = "pass"
        for t in t_list:
            best = -math.inf
            prev = -math.inf
            for i, c in enumerate(cl, start=1):
                lt = -c.phi / 2 + c.log_ekov_at(t) - 2 * beta * math.log(c.lam)
                lb = c.phi / 2 - 2 * beta * math.log(c.lam)
                insufficient = lb < 0
                new_best = max(best, lt)
                if new_best < best or (lt < prev and not insufficient):
                    status = "fail"
                elif lt < prev and insufficient and status == "pass":
                    status = "insufficient frequency range"
                best, prev = new_best, lt
                rows.append(SobolevRow(float(beta), float(t), i, c.lam, lt, best, lb, insufficient))
        verdicts[float(beta)] = status
    reg = []
    for alpha in alpha_list:
        for i, c in enumerate(cl, start=1):
            lhs = -c.phi / 2 + 2 * alpha * math.log(c.lam)
            rhs = -math.log(c.lam)
            reg.append((float(alpha), i, c.lam, lhs, rhs, bool(lhs <= rhs)))
    return SobolevTable(tuple(rows), verdicts, tuple(reg))
