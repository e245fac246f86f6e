"""Integration of u'' + lam^2 q(t) u = 0 with q = c (direct form) or c^2 (squared form).

The equation is linear, so each step is a 2x2 transfer matrix.  Step
matrices are computed in bulk with an embedded 8(5,3) Runge-Kutta pair
(the Dormand-Prince tableau shipped with scipy) and then chained
sequentially with power-of-two renormalization into a log scale.
Constant segments use the exact rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dp

from . import _kernels as _k

from .speeds import T_MIN, PropagationSpeed, fmt

FORMS = ("direct", "squared")

_NS = _dp.N_STAGES
_A = np.asarray(_dp.A[:_NS, :_NS], float)
_B = np.asarray(_dp.B, float)
_C = np.asarray(_dp.C[:_NS], float)
_E3 = np.asarray(_dp.E3, float)
_E5 = np.asarray(_dp.E5, float)

_CHUNK = 1 << 16
_MAX_SPLIT = 64


class IntegrationError(RuntimeError):
    def __init__(self, msg, t=None):
        super().__init__(msg if t is None else f"{msg} (t={t!r})")
        self.t = t


class DegenerateTrajectory(ValueError):
    pass


@dataclass(frozen=True)
class OscState:
    """(u, v) * exp(logscale) is the true solution at time t."""

    t: float
    u: float
    v: float
    logscale: float = 0.0
    lam: float = 1.0

    def true(self) -> tuple[float, float]:
        s = math.exp(self.logscale)
        return self.u * s, self.v * s

    def normalized(self) -> "OscState":
        m = max(abs(self.u), abs(self.v))
        if m == 0 or 2.0**-32 <= m <= 2.0**32:
            return self
        e = math.floor(math.log2(m))
        f = 2.0**-e
        return replace(self, u=self.u * f, v=self.v * f, logscale=self.logscale + e * math.log(2.0))


@dataclass(frozen=True)
class EnergyTriple:
    log_ekov: float
    log_ehyp: float
    log_etar: float


def _check_form(form):
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")


def coefficient(c: PropagationSpeed, form: str):
    _check_form(form)
    if form == "direct":
        return c.__call__
    return lambda t: c(t) ** 2


def propagate_constant(state: OscState, gamma: float, dt: float) -> OscState:
    """Exact rotation for u'' + lam^2 gamma^2 u = 0 over a step dt >= 0."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    w = gamma * state.lam
    s, c = math.sin(w * dt), math.cos(w * dt)
    u = state.u * c + state.v * s / w
    v = -state.u * w * s + state.v * c
    return replace(state, t=state.t + dt, u=u, v=v)


def _rotation(w: float, dt: float) -> np.ndarray:
    s, c = math.sin(w * dt), math.cos(w * dt)
    return np.array([[c, s / w], [-w * s, c]])


# ---------------------------------------------------------------------------
# bulk step matrices
# ---------------------------------------------------------------------------


def _rk_matrices(qfun, lam2: float, t: np.ndarray, h: np.ndarray, scale: float):
    """Transfer matrices and scaled error norms for steps (t, h).

    Solves Y' = M(t) Y, Y(t) = I with M = [[0,1],[-lam2 q, 0]].  The error
    norm conjugates by diag(scale, 1) so displacement errors are weighed
    like the energy.
    """
    ts = np.concatenate([(t[None, :] + _C[:, None] * h[None, :]).ravel(), t + h])
    q = lam2 * np.asarray(qfun(ts), float).reshape(_NS + 1, t.size)
    return _k.rk_matrices(q, h, _A, _B, _E3, _E5, float(scale))


def _accepted_steps(qfun, lam2, t, h, tol, scale, span):
    """Refine (t, h) until every step meets tol; returns time-sorted (t, R)."""
    out_t, out_R = [], []
    pend_t, pend_h = t, h
    while pend_t.size:
        nt, nh = [], []
        for lo in range(0, pend_t.size, _CHUNK):
            ct, ch = pend_t[lo:lo + _CHUNK], pend_h[lo:lo + _CHUNK]
            R, err = _rk_matrices(qfun, lam2, ct, ch, scale)
            if not np.all(np.isfinite(err)):
                k = int(np.argmin(np.isfinite(err)))
                raise IntegrationError("non-finite step", float(ct[k]))
            good = err <= tol
            out_t.append(ct[good])
            out_R.append(R[good])
            bad = ~good
            if np.any(bad):
                bt, bh, be = ct[bad], ch[bad], err[bad]
                k = np.clip(np.ceil(1.5 * (be / tol) ** 0.125), 2, _MAX_SPLIT).astype(np.int64)
                sub = bh / k
                if np.min(sub) < 1e-16 * span:
                    j = int(np.argmin(sub))
                    raise IntegrationError("step size underflow", float(bt[j]))
                rep = np.repeat(np.arange(bt.size), k)
                offs = np.arange(rep.size) - np.repeat(np.cumsum(k) - k, k)
                nt.append(bt[rep] + offs * sub[rep])
                nh.append(sub[rep])
        if nt:
            pend_t, pend_h = np.concatenate(nt), np.concatenate(nh)
        else:
            pend_t = pend_h = np.empty(0)
    t = np.concatenate(out_t)
    order = np.argsort(t, kind="stable")
    return t[order], np.ascontiguousarray(np.concatenate(out_R)[order])


def _renormalize(P, L):
    m = np.max(np.abs(P), axis=(1, 2))
    e = np.where(m > 0, np.floor(np.log2(np.where(m > 0, m, 1.0))), 0.0)
    P *= np.exp2(-e)[:, None, None]
    L += e * math.log(2.0)


@dataclass(frozen=True)
class Propagator:
    """Per-interval transfer matrices between consecutive breakpoints.

    The true propagator over interval i is P[i] * exp(L[i]); output time k
    sits at breakpoint ``out_idx[k]``.
    """

    c: PropagationSpeed
    lam: float
    form: str
    times: np.ndarray
    P: np.ndarray
    L: np.ndarray
    out_idx: np.ndarray
    n_steps: int

    def apply(self, u0: float, v0: float, logscale0: float = 0.0) -> "Trajectory":
        st = OscState(float(self.times[0]), u0, v0, logscale0, self.lam).normalized()
        U, V, S = _k.chain(self.P, self.L, float(st.u), float(st.v), float(st.logscale))
        i = self.out_idx
        return Trajectory(self.times.copy(), U[i], V[i], S[i], self.lam, self.form, self.c)


def _speed_bound(c: PropagationSpeed, t0: float, t1: float) -> float:
    g = np.unique(np.concatenate([np.linspace(t0, t1, 2001), np.geomspace(max(t0, T_MIN), t1, 2001)]))
    g = g[(g >= t0) & (g <= t1)]
    return float(np.max(np.abs(c(g))))


def _segment_at(c: PropagationSpeed, m: float):
    for s in c.segments:
        if s.start <= m < s.end or (m == s.end == c.T0):
            return s
    return None


def propagator(c: PropagationSpeed, lam: float, times: Sequence[float], tol: float = 1e-10,
               form: str = "direct", mu2: float | None = None) -> Propagator:
    """Transfer matrices from times[0] through every later output time."""
    _check_form(form)
    if not 1e-14 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [1e-14, 1e-3], got {tol}")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1 or np.any(np.diff(times) < 0):
        raise ValueError("output times must be a nondecreasing 1-D sequence")
    t0, t1 = float(times[0]), float(times[-1])
    if t1 > c.T0 * (1 + 1e-12):
        raise ValueError(f"t1={t1} beyond the horizon T0={c.T0}")
    span = max(t1 - t0, 1e-300)
    mu2 = _speed_bound(c, t0, t1) if mu2 is None else float(mu2)
    if not (math.isfinite(mu2) and mu2 > 0):
        raise IntegrationError("speed is not finite and positive on the integration interval", t0)
    qmax = mu2 if form == "direct" else mu2 * mu2
    hmax = 1.0 / (10.0 * lam * math.sqrt(qmax))
    qfun = coefficient(c, form)
    lam2 = lam * lam

    inner = [s.start for s in c.segments if t0 < s.start < t1]
    brk = np.unique(np.concatenate([times, inner]))
    n_int = brk.size - 1
    P = np.zeros((max(n_int, 0), 2, 2))
    P[:, 0, 0] = 1.0
    P[:, 1, 1] = 1.0
    L = np.zeros(max(n_int, 0))

    starts, steps = [], []
    for i in range(n_int):
        a, b = brk[i], brk[i + 1]
        s = _segment_at(c, 0.5 * (a + b))
        if s is not None and s.kind == "constant":
            lev = s.level if form == "direct" else s.level**2
            P[i] = _rotation(lam * math.sqrt(lev), b - a)
            continue
        hm = hmax
        if s is not None and s.kind == "window" and s.freq > 0:
            hm = min(hm, 1.0 / (5.0 * s.freq))
        n = max(1, int(math.ceil((b - a) / hm)))
        h = (b - a) / n
        starts.append(a + h * np.arange(n))
        steps.append(np.full(n, h))

    n_steps = 0
    if starts:
        T = np.concatenate(starts)
        H = np.concatenate(steps)
        for lo in range(0, T.size, _CHUNK):
            Ts, Rs = _accepted_steps(qfun, lam2, T[lo:lo + _CHUNK], H[lo:lo + _CHUNK], tol, lam, span)
            n_steps += Ts.size
            grp = np.clip(np.searchsorted(brk, Ts, side="right") - 1, 0, n_int - 1)
            g0 = int(grp[0])
            local = (grp - g0).astype(np.int64)
            n_loc = int(local[-1]) + 1
            Pb, Lb = _k.group_products(Rs, local, n_loc)
            sl = slice(g0, g0 + n_loc)
            P[sl] = Pb @ P[sl]
            L[sl] += Lb
            _renormalize(P[sl], L[sl])
    out_idx = np.searchsorted(brk, times)
    return Propagator(c, float(lam), form, times, np.ascontiguousarray(P), L, out_idx, n_steps)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    logscale: np.ndarray
    lam: float
    form: str
    speed: PropagationSpeed | None = None

    def __len__(self):
        return self.t.size

    def __getitem__(self, k) -> OscState:
        return OscState(float(self.t[k]), float(self.u[k]), float(self.v[k]), float(self.logscale[k]), self.lam)

    def __iter__(self) -> Iterator[OscState]:
        return (self[k] for k in range(len(self)))

    @property
    def final(self) -> OscState:
        return self[-1]

    def index(self, t: float) -> int:
        k = int(np.searchsorted(self.t, t))
        for j in (k, k - 1):
            if 0 <= j < self.t.size and abs(self.t[j] - t) <= 1e-14 * max(1.0, abs(t)):
                return j
        raise KeyError(f"time {t!r} is not an output time of this trajectory")

    def at(self, t: float) -> OscState:
        return self[self.index(t)]

    def log_ekov(self) -> np.ndarray:
        return log_energies(self, None, "kov")

    def table(self, c: PropagationSpeed | None = None) -> str:
        c = c or self.speed
        ek = log_energies(self, c, "kov")
        eh = log_energies(self, c, "hyp")
        et = log_energies(self, c, "tar")
        lines = ["t,u,v,logscale,log_ekov,log_ehyp,log_etar"]
        for row in zip(self.t, self.u, self.v, self.logscale, ek, eh, et):
            lines.append(",".join(fmt(x) for x in row))
        return "\n".join(lines) + "\n"


def integrate(c: PropagationSpeed, lam: float, state0: OscState, t1: float, tol: float = 1e-10,
              times: Sequence[float] | None = None, form: str = "direct", mu2: float | None = None) -> Trajectory:
    """Trajectory from state0 at its time to t1, reported at ``times`` (plus both ends)."""
    if not state0.t < t1:
        raise ValueError("need state0.t < t1")
    grid = [state0.t, t1] if times is None else sorted(set([state0.t, t1, *map(float, times)]))
    grid = np.asarray(grid, float)
    if grid[0] < state0.t or grid[-1] > t1:
        raise ValueError("output times must lie in [state0.t, t1]")
    prop = propagator(c, lam, grid, tol, form, mu2)
    return prop.apply(state0.u, state0.v, state0.logscale)


def canonical_pair(c: PropagationSpeed, lam: float, t1: float, tol: float = 1e-10, times=None,
                   form: str = "direct", t0: float | None = None, mu2=None) -> tuple[Trajectory, Trajectory]:
    """Trajectories with data (u, u') = (0, 1) and (1, 0), sharing one step plan."""
    t0 = c.t_start if t0 is None else t0
    grid = [t0, t1] if times is None else sorted(set([t0, t1, *map(float, times)]))
    prop = propagator(c, lam, grid, tol, form, mu2)
    return prop.apply(0.0, 1.0), prop.apply(1.0, 0.0)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------


def _log_energy_arrays(u, v, ls, lam, cval, c1, form, which):
    if which == "kov":
        e = v * v + lam * lam * u * u
    elif which == "hyp":
        q = cval if form == "direct" else cval * cval
        e = v * v + lam * lam * q * u * u
    elif which == "tar":
        if form == "direct":
            e = (v + c1 / (4 * cval) * u) ** 2 / np.sqrt(cval) + lam * lam * np.sqrt(cval) * u * u
        else:
            e = v * v / cval + lam * lam * cval * u * u + c1 * c1 * u * u / (4 * cval**3) + c1 * u * v / cval**2
    else:
        raise ValueError(which)
    e = np.asarray(e, float)
    if np.any(e <= 0):
        raise DegenerateTrajectory("zero state: energy logarithm undefined")
    return np.log(e) + 2 * np.asarray(ls, float)


def log_energies(traj: Trajectory, c: PropagationSpeed | None, which: str) -> np.ndarray:
    if which == "kov":
        return _log_energy_arrays(traj.u, traj.v, traj.logscale, traj.lam, None, None, traj.form, "kov")
    c = c or traj.speed
    cval = c(traj.t)
    c1 = c.c1(traj.t) if which == "tar" else None
    return _log_energy_arrays(traj.u, traj.v, traj.logscale, traj.lam, cval, c1, traj.form, which)


def energies(state: OscState, c: PropagationSpeed, form: str = "direct") -> EnergyTriple:
    _check_form(form)
    cv, c1 = float(c(state.t)), float(c.c1(state.t))
    vals = [
        float(_log_energy_arrays(np.array([state.u]), np.array([state.v]), state.logscale, state.lam, cv, c1, form, w)[0])
        for w in ("kov", "hyp", "tar")
    ]
    return EnergyTriple(*vals)


def energy_derivatives(state: OscState, c: PropagationSpeed, form: str) -> tuple[float, float]:
    """Closed-form time derivatives of (E_Hyp, E_Tar) of the true solution.

    E_Hyp' = lam^2 q' u^2.  In the squared form the Tarama derivative
    reduces to (u^2 c'/(2c^3) + u u'/c^2)(c'' - 1.5 c'^2/c); the direct
    form is differentiated term by term.
    """
    _check_form(form)
    u, v = state.true()
    lam = state.lam
    c0, c1, c2 = float(c(state.t)), float(c.c1(state.t)), float(c.c2(state.t))
    if form == "direct":
        dh = lam * lam * c1 * u * u
        # direct-form Tarama energy, differentiated along u'' = -lam^2 c u
        w = v + c1 / (4 * c0) * u
        dw = -lam * lam * c0 * u + (c2 / (4 * c0) - c1 * c1 / (4 * c0 * c0)) * u + c1 / (4 * c0) * v
        dt = (-0.5 * c1 * c0**-1.5 * w * w + 2 * w * dw / math.sqrt(c0)
              + lam * lam * (0.5 * c1 / math.sqrt(c0) * u * u + 2 * math.sqrt(c0) * u * v))
    else:
        dh = 2 * lam * lam * c0 * c1 * u * u
        dt = (u * u * c1 / (2 * c0**3) + u * v / c0**2) * (c2 - 1.5 * c1 * c1 / c0)
    return dh, dt


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def wronskian(traj1: Trajectory, traj2: Trajectory, t: float) -> float:
    i, j = traj1.index(t), traj2.index(t)
    w = traj1.u[i] * traj2.v[j] - traj2.u[j] * traj1.v[i]
    return float(w * math.exp(traj1.logscale[i] + traj2.logscale[j]))


def continuous_dependence_probe(c_seq: Sequence[PropagationSpeed], c_inf: PropagationSpeed, lam: float,
                                t1: float, tol: float = 1e-11, n_out: int = 513, form: str = "direct") -> list[float]:
    """Per speed in c_seq: sup over the output grid of max(|u_n - u|, |u_n' - u'|), data (0, 1)."""
    t0 = max(c.t_start for c in [c_inf, *c_seq])
    times = np.linspace(t0, t1, n_out)

    def run(c):
        if abs(c.T0 - c_inf.T0) > 1e-15:
            raise ValueError("speeds must share the horizon")
        tr = propagator(c, lam, times, tol, form).apply(0.0, 1.0)
        s = np.exp(tr.logscale)
        return tr.u * s, tr.v * s

    u_inf, v_inf = run(c_inf)
    out = []
    for c in c_seq:
        u, v = run(c)
        out.append(float(max(np.max(np.abs(u - u_inf)), np.max(np.abs(v - v_inf)))))
    return out
