"""Three-zone energy chain and empirical derivative-loss exponents.

The time interval [0, T0] is split at a = log(lam)/lam and
b = a exp(psi(1/lam)).  On [0, a] the Kovalevskyan energy grows at most
like exp(lam (1 + mu2^2) t); on [a, b] the hyperbolic energy grows like
exp(2 int |c'|/c); on [b, T0] the Tarama energy grows like
exp(M3/lam int (|c''| + c'^2)).  Every constant below is explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .oscillator import FORMS, canonical_pair
from .quadrature import adaptive_quad
from .speeds import T_MIN, PropagationSpeed, SpeedClassSpec, sample_grid


@dataclass(frozen=True)
class SplitTimes:
    lam: float
    a: float
    b: float
    T0: float

    @property
    def ordered(self) -> bool:
        return 1.0 / self.lam < self.a < self.b < self.T0


def split_times(lam: float, spec: SpeedClassSpec) -> SplitTimes:
    if lam <= math.e:
        raise ValueError("lambda must exceed e")
    a = math.log(lam) / lam
    b = a * math.exp(float(spec.psi(1.0 / lam)))
    return SplitTimes(float(lam), a, b, spec.T0)


# ---------------------------------------------------------------------------
# equivalence constants (squared form, |c'| <= kappa lam on the zone)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaramaConstants:
    """eps0 E_Kov <= E_Tar <= M2 E_Kov and E_Tar'/E_Tar <= M3 (|c''| + c'^2)/lam."""

    kappa: float
    eps0: float
    M2: float
    M3: float


def tarama_constants(mu1: float, mu2: float, kappa: float) -> TaramaConstants:
    # E_Tar = w^2/c + lam^2 c u^2 with w = u' + c' u/(2c)
    eps0 = 1.0 / max(2 * mu2, (1 + kappa**2 / (2 * mu1**2)) / mu1)
    M2 = max(2 / mu1, mu2 + kappa**2 / (2 * mu1**3))
    M3 = (kappa / (2 * mu1**3) + 1 / (2 * mu1**2)) * max(1.0, 1.5 / mu1) / eps0
    return TaramaConstants(kappa, eps0, M2, M3)


def hyperbolic_band(mu1: float, mu2: float, form: str = "squared") -> float:
    """log of max(1, q_max)/min(1, q_min) for the equation coefficient q."""
    p = 2 if form == "squared" else 1
    return math.log(max(1.0, mu2**p) / min(1.0, mu1**p))


# ---------------------------------------------------------------------------
# zone ingredients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZoneIngredients:
    lam: float
    a: float
    b: float
    kov_exponent: float
    kov_ceiling: float
    hyp_integral: float
    hyp_ceiling: float
    hyp_class_ceiling: float
    tarama_c1_sup: float
    tarama_c1_ceiling: float
    tarama_c2_integral: float
    tarama_c2_ceiling: float
    quad_error: float
    quad_converged: bool

    @property
    def margins(self) -> dict:
        return {
            "kov": self.kov_ceiling - self.kov_exponent,
            "hyp": self.hyp_ceiling - self.hyp_integral,
            "tarama_c1": self.tarama_c1_ceiling - self.tarama_c1_sup,
            "tarama_c2": self.tarama_c2_ceiling - self.tarama_c2_integral,
        }


def _breaks(c: PropagationSpeed):
    return [s.start for s in c.segments] + [s.end for s in c.segments]


def _sup(f, lo, hi, c, per_decade=4096):
    if hi <= lo:
        return 0.0
    g = sample_grid([c], hi, per_decade=per_decade, t_min=lo)
    g = g[(g >= lo) & (g <= hi)]
    return float(np.max(f(g)))


def zone_bound_ingredients(c: PropagationSpeed, st: SplitTimes, spec: SpeedClassSpec, rtol: float = 1e-6) -> ZoneIngredients:
    lam, a, b, T0 = st.lam, st.a, st.b, spec.T0
    hyp_end = b if st.ordered else T0
    hyp_end = min(max(hyp_end, a), T0)
    a_eff = min(a, T0)
    bp = _breaks(c)
    err, conv = 0.0, True

    q_h = adaptive_quad(lambda t: np.abs(c.c1(t)) / c(t), a_eff, hyp_end, rtol, breakpoints=bp)
    err += 2 * q_h.error
    conv &= q_h.converged
    hyp = 2 * q_h.value
    w_a = float(spec.omega(a_eff))
    hyp_ceiling = 2 * w_a / spec.mu1 * math.log(hyp_end / a_eff) if hyp_end > a_eff else 0.0
    hyp_class = 2 * spec.K0 / spec.mu1 * math.log(lam)

    if st.ordered:
        c1_sup = _sup(lambda t: np.abs(c.c1(t)), b, T0, c) / lam
        if c.d2 is None:
            raise ValueError("the Tarama zone needs a second derivative")
        q_t = adaptive_quad(lambda t: np.abs(c.c2(t)) + c.c1(t) ** 2, b, T0, rtol, breakpoints=bp)
        err += q_t.error / lam
        conv &= q_t.converged
        c2_int = q_t.value / lam
    else:
        c1_sup = 0.0
        c2_int = 0.0
    return ZoneIngredients(
        lam=lam, a=a, b=b,
        kov_exponent=lam * (1 + spec.mu2**2) * a_eff,
        kov_ceiling=(1 + spec.mu2**2) * math.log(lam),
        hyp_integral=hyp,
        hyp_ceiling=hyp_ceiling,
        hyp_class_ceiling=hyp_class,
        tarama_c1_sup=c1_sup,
        tarama_c1_ceiling=spec.K0,
        tarama_c2_integral=c2_int,
        tarama_c2_ceiling=2 * spec.K0**2 * math.log(lam),
        quad_error=err,
        quad_converged=bool(conv),
    )


# ---------------------------------------------------------------------------
# measured gains
# ---------------------------------------------------------------------------


def _output_times(c: PropagationSpeed, a: float, b: float, T0: float, n_out: int) -> np.ndarray:
    t0 = c.t_start
    lo = max(t0, T_MIN)
    half = n_out // 2
    a_c = min(a, T0)
    first = np.geomspace(lo, a_c, half) if a_c > lo else np.array([lo])
    second = np.linspace(a_c, T0, n_out - half + 1)[1:]
    extra = [t0, a_c, T0] + ([b] if b < T0 else [])
    return np.unique(np.concatenate([first, second, extra]))


def _gain_profile(c, lam, times, tol, form):
    """Worst-case (over canonical data) log E_Kov(t)/E_Kov(t0) at each time."""
    p, q = canonical_pair(c, lam, times[-1], tol, times, form, t0=times[0])
    gains = []
    for tr in (p, q):
        ek = tr.log_ekov()
        gains.append(ek - ek[0])
    return np.maximum(gains[0], gains[1])


def coefficient_band(c: PropagationSpeed, form: str, T0: float | None = None) -> float:
    """log M_hat: the energy-equivalence constant of the sampled coefficient."""
    T0 = T0 or c.T0
    g = sample_grid([c], T0, per_decade=256, t_min=max(c.t_start, T_MIN))
    v = c(g)
    q = v if form == "direct" else v * v
    return math.log(max(1.0, float(np.max(q))) / min(1.0, float(np.min(q))))


@dataclass(frozen=True)
class ZoneChain:
    lam: float
    a: float
    b: float
    three_zone: bool
    measured: tuple  # sup gain over each zone
    measured_at: tuple  # gain at a, b, T0
    ceilings: tuple  # cumulative ceilings at the end of each zone
    class_ceilings: tuple
    constants: TaramaConstants
    ingredients: ZoneIngredients

    @property
    def margins(self) -> tuple:
        return tuple(c - m for c, m in zip(self.ceilings, self.measured))

    @property
    def passed(self) -> bool:
        return all(m >= 0 for m in self.margins)


def verify_zone_chain(c: PropagationSpeed, lam: float, spec: SpeedClassSpec, tol: float = 1e-10,
                      n_out: int = 2048, rtol: float = 1e-6) -> ZoneChain:
    """Compare the measured Kovalevskyan gain with the cumulative zone ceilings (squared form)."""
    st = split_times(lam, spec)
    ing = zone_bound_ingredients(c, st, spec, rtol)
    T0 = spec.T0
    times = _output_times(c, st.a, st.b, T0, n_out)
    gain = _gain_profile(c, lam, times, tol, "squared")

    band_h = hyperbolic_band(spec.mu1, spec.mu2, "squared")
    a = min(st.a, T0)
    three = st.ordered
    b = st.b if three else T0
    kappa = ing.tarama_c1_sup
    k_meas = tarama_constants(spec.mu1, spec.mu2, kappa)
    k_cls = tarama_constants(spec.mu1, spec.mu2, spec.K0) if math.isfinite(spec.K0) else None

    ceil_a = ing.kov_exponent
    ceil_b = band_h + ceil_a + ing.hyp_integral
    ceil_T = math.log(k_meas.M2 / k_meas.eps0) + ceil_b + k_meas.M3 * ing.tarama_c2_integral if three else ceil_b

    cls_a = ing.kov_ceiling
    cls_b = band_h + cls_a + ing.hyp_class_ceiling
    if three and k_cls is not None:
        cls_T = math.log(k_cls.M2 / k_cls.eps0) + cls_b + k_cls.M3 * ing.tarama_c2_ceiling
    else:
        cls_T = cls_b

    z1 = times <= a
    z2 = (times > a) & (times <= b)
    z3 = times > b

    def zmax(mask):
        return float(np.max(gain[mask])) if np.any(mask) else -math.inf

    def at(t):
        return float(gain[int(np.argmin(np.abs(times - t)))])

    measured = (zmax(z1), zmax(z2), zmax(z3)) if three else (zmax(z1), zmax(z2 | z3), -math.inf)
    measured_at = (at(a), at(b), at(T0))
    ceilings = (ceil_a, ceil_b, ceil_T)
    return ZoneChain(float(lam), st.a, st.b, three, measured, measured_at, ceilings, (cls_a, cls_b, cls_T), k_meas, ing)


# ---------------------------------------------------------------------------
# loss sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LossRow:
    lam: float
    a: float
    b: float
    sup_log_gain: float
    delta_hat: float
    delta_raw: float
    log_m_hat: float
    kov_exp: float
    hyp_ceiling: float
    tar_ceiling: float
    passed: bool
    error: Optional[str] = None


@dataclass(frozen=True)
class LossReport:
    rows: tuple
    slope_fit: float
    passed: bool
    form: str
    slope_ceiling: Optional[float] = None

    columns = ("lambda", "a", "b", "sup_log_gain", "delta_hat", "kov_exp", "hyp_ceiling", "tar_ceiling", "pass")

    @property
    def lambda_grid(self):
        return [r.lam for r in self.rows]

    @property
    def sup_log_gain(self):
        return [r.sup_log_gain for r in self.rows]

    @property
    def delta_hat(self):
        return [r.delta_hat for r in self.rows]

    @property
    def zone_breakdown(self):
        return [(r.kov_exp, r.hyp_ceiling, r.tar_ceiling) for r in self.rows]

    def table_rows(self):
        for r in self.rows:
            yield (r.lam, r.a, r.b, r.sup_log_gain, r.delta_hat, r.kov_exp, r.hyp_ceiling, r.tar_ceiling, r.passed)


def loss_row(c: PropagationSpeed, lam: float, spec: SpeedClassSpec, tol: float = 1e-10, form: str = "squared",
             n_out: int = 2048, log_m_hat: float | None = None) -> LossRow:
    st = split_times(lam, spec)
    times = _output_times(c, st.a, st.b, spec.T0, n_out)
    if log_m_hat is None:
        log_m_hat = coefficient_band(c, form, spec.T0)
    try:
        gain = _gain_profile(c, lam, times, tol, form)
    except Exception as exc:  # recorded per lambda, the sweep goes on
        nan = math.nan
        return LossRow(lam, st.a, st.b, nan, nan, nan, log_m_hat, nan, nan, nan, False, f"{type(exc).__name__}: {exc}")
    sup = float(np.max(gain))
    L = math.log(lam)
    ing = zone_bound_ingredients(c, st, spec) if c.d2 is not None else None
    kov = (1 + spec.mu2**2) * L
    if ing is not None:
        hyp = ing.hyp_ceiling
        if st.ordered and math.isfinite(spec.K0):
            k = tarama_constants(spec.mu1, spec.mu2, spec.K0)
            tar = math.log(k.M2 / k.eps0) + k.M3 * ing.tarama_c2_ceiling
        elif st.ordered:
            k = tarama_constants(spec.mu1, spec.mu2, ing.tarama_c1_sup)
            tar = math.log(k.M2 / k.eps0) + k.M3 * ing.tarama_c2_integral
        else:
            tar = 0.0
    else:
        hyp = tar = math.nan
    total = kov + hyperbolic_band(spec.mu1, spec.mu2, form) + hyp + tar
    ok = bool(sup <= total) if math.isfinite(total) else True
    return LossRow(float(lam), st.a, st.b, sup, max(0.0, (sup - log_m_hat) / L), sup / L, log_m_hat,
                   kov, hyp, tar, ok)


def loss_report(rows: Sequence[LossRow], form: str, slope_ceiling: float | None = None, slack: float = 0.05) -> LossReport:
    good = [r for r in rows if r.error is None]
    if len(good) >= 2:
        x = np.log([r.lam for r in good])
        y = np.array([r.sup_log_gain for r in good])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = math.nan
    dh = [r.delta_hat for r in rows]
    top = dh[len(dh) // 2:]
    mono = all(math.isfinite(x) for x in top) and all(
        top[i + 1] <= top[i] * (1 + slack) + 1e-12 for i in range(len(top) - 1))
    ok = mono or (slope_ceiling is not None and math.isfinite(slope) and slope <= slope_ceiling)
    ok = ok and all(r.error is None for r in rows)
    return LossReport(tuple(rows), slope, bool(ok), form, slope_ceiling)


def measure_loss_exponent(c: PropagationSpeed, lambda_grid: Sequence[float], spec: SpeedClassSpec,
                          tol: float = 1e-10, form: str = "squared", slope_ceiling: float | None = None,
                          n_out: int = 2048) -> LossReport:
    """Worst canonical-data energy gain per lambda, normalized exponents and a verdict."""
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    grid = list(map(float, lambda_grid))
    if any(y <= x for x, y in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    log_m = coefficient_band(c, form, spec.T0)
    rows = [loss_row(c, lam, spec, tol, form, n_out, log_m) for lam in grid]
    return loss_report(rows, form, slope_ceiling)
