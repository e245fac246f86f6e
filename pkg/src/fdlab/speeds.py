"""Propagation speeds: representation, model families, class membership and metrics."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

T_MIN = 1e-12

Array = np.ndarray


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    """Named nonincreasing positive function on (0, 1).

    ``kind`` is one of ``log`` (C|log t|), ``log-power`` (C|log t|^p) or
    ``constant`` (C).  Keeping envelopes in a closed catalog makes every run
    reproducible from a config file.
    """

    kind: str = "log"
    p: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("log", "log-power", "constant"):
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("envelope scale must be positive")
        if self.kind == "log-power" and self.p <= 0:
            raise ValueError("log-power exponent must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.scale) if t.ndim else float(self.scale)
        L = np.abs(np.log(t))
        if self.kind == "log":
            out = self.scale * L
        else:
            out = self.scale * L ** self.p
        return out if t.ndim else float(out)

    @property
    def unbounded(self) -> bool:
        return self.kind != "constant"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "scale": self.scale}
        if self.kind == "log-power":
            d["p"] = self.p
        return d

    @classmethod
    def from_dict(cls, d) -> "Envelope":
        if isinstance(d, (int, float)):
            return cls("constant", scale=float(d))
        if isinstance(d, str):
            return cls(d)
        return cls(str(d.get("kind", "log")), float(d.get("p", 1.0)), float(d.get("scale", 1.0)))


@dataclass(frozen=True)
class SpeedClassSpec:
    mu1: float
    mu2: float
    T0: float
    omega: Callable = field(default_factory=Envelope)
    psi: Callable = field(default_factory=lambda: Envelope("constant", scale=1.0))
    K0: float = math.inf
    order: int = 1

    def __post_init__(self):
        if not (0 < self.mu1 < self.mu2):
            raise ValueError(f"need 0 < mu1 < mu2, got {self.mu1}, {self.mu2}")
        if self.T0 <= 0:
            raise ValueError("T0 must be positive")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")

    def check_envelopes(self, grid: Array | None = None, with_k0: bool = False) -> list[str]:
        """Return the list of envelope conditions violated on ``grid``."""
        if grid is None:
            grid = log_grid(T_MIN, self.T0, 64)
        grid = np.asarray(grid, float)
        problems = []
        w = np.asarray(self.omega(grid), float)
        p = np.asarray(self.psi(grid), float)
        if np.any(w <= 0) or np.any(p <= 0):
            problems.append("omega/psi must be positive")
        # nonincreasing in t: values on an ascending grid must not go up
        if np.any(np.diff(w) > 1e-12 * np.abs(w[1:])):
            problems.append("omega is not nonincreasing")
        if np.any(np.diff(p) > 1e-12 * np.abs(p[1:])):
            problems.append("psi is not nonincreasing")
        if with_k0:
            lhs = w * (1 + p)
            rhs = self.K0 * np.abs(np.log(grid))
            if np.any(lhs > rhs * (1 + 1e-12)):
                problems.append("omega*(1+psi) exceeds K0*|log t|")
        return problems


def k0_for(omega, psi, T0: float, grid: Array | None = None) -> float:
    """Smallest K0 with omega(t)(1+psi(t)) <= K0 |log t| on the grid (T0 < 1)."""
    if not 0 < T0 < 1:
        raise ValueError("T0 must lie in (0, 1)")
    if grid is None:
        grid = log_grid(T_MIN, T0, 256)
    return float(np.max(omega(grid) * (1 + psi(grid)) / np.abs(np.log(grid))))


# ---------------------------------------------------------------------------
# cutoff
# ---------------------------------------------------------------------------


def _f_derivs(s: Array, order: int) -> Array:
    # f(s) = exp(-1/s) and its derivatives; zero where exp underflows anyway
    out = np.zeros_like(s)
    m = s > 1.0 / 700.0
    x = 1.0 / s[m]
    f = np.exp(-x)
    if order == 0:
        out[m] = f
    elif order == 1:
        out[m] = f * x**2
    elif order == 2:
        out[m] = f * (x**4 - 2 * x**3)
    elif order == 3:
        out[m] = f * (x**6 - 6 * x**5 + 6 * x**4)
    else:
        raise ValueError("cutoff derivatives only up to order 3")
    return out


def _theta_all(s: Array, order: int) -> list[Array]:
    """theta and its derivatives up to ``order`` on the open interval (0,1)."""
    f = [_f_derivs(s, k) for k in range(order + 1)]
    fr = [_f_derivs(1.0 - s, k) for k in range(order + 1)]
    g = [f[k] + (-1) ** k * fr[k] for k in range(order + 1)]
    th = [f[0] / g[0]]
    if order >= 1:
        th.append((f[1] - th[0] * g[1]) / g[0])
    if order >= 2:
        th.append((f[2] - 2 * th[1] * g[1] - th[0] * g[2]) / g[0])
    if order >= 3:
        th.append((f[3] - 3 * th[2] * g[1] - 3 * th[1] * g[2] - th[0] * g[3]) / g[0])
    return th


@dataclass(frozen=True)
class CutoffFunction:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, smooth in between."""

    Km: tuple = (math.nan, math.nan, math.nan)

    def deriv(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        out = np.zeros_like(s)
        if order == 0:
            out[s >= 1] = 1.0
        inner = (s > 0) & (s < 1)
        if np.any(inner):
            out[inner] = _theta_all(s[inner], order)[order]
        return float(out[0]) if scalar else out

    def __call__(self, s):
        return self.deriv(s, 0)

    def all(self, s: Array, order: int) -> list[Array]:
        """Values of theta, theta', ... theta^(order) at once."""
        s = np.asarray(s, dtype=float)
        res = [np.zeros_like(s) for _ in range(order + 1)]
        res[0][s >= 1] = 1.0
        inner = (s > 0) & (s < 1)
        if np.any(inner):
            vals = _theta_all(s[inner], order)
            for k in range(order + 1):
                res[k][inner] = vals[k]
        return res


@lru_cache(maxsize=1)
def default_cutoff() -> CutoffFunction:
    s = np.linspace(0.0, 1.0, 400_001)[1:-1]
    th = _theta_all(s, 3)
    km = tuple(float(np.max(np.abs(th[m]))) * (1 + 1e-9) for m in (1, 2, 3))
    return CutoffFunction(Km=km)


# ---------------------------------------------------------------------------
# speeds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    kind: str  # "constant" | "window" | "generic"
    level: float = math.nan  # speed value on constant segments
    freq: float = 0.0  # angular frequency of the coefficient oscillation on windows


@dataclass(frozen=True, eq=False)
class PropagationSpeed:
    """A speed c(t) on (0, T0] with coded first and (optionally) second derivatives.

    ``value``, ``d1`` and ``d2`` take numpy arrays of times inside the
    evaluable range and return arrays of the same shape.  ``prefix`` =
    (T1, mu3) records that the speed equals mu3 on [0, T1]; only then is
    evaluation below ``T_MIN`` allowed.
    """

    value: Callable[[Array], Array]
    d1: Callable[[Array], Array]
    d2: Optional[Callable[[Array], Array]]
    T0: float
    prefix: Optional[tuple] = None
    segments: tuple = ()
    name: str = "speed"
    parent: Optional["PropagationSpeed"] = None
    d3: Optional[Callable[[Array], Array]] = None

    def __post_init__(self):
        if not self.segments:
            segs = []
            if self.prefix is not None:
                segs.append(Segment(0.0, self.prefix[0], "constant", self.prefix[1]))
                if self.prefix[0] < self.T0:
                    segs.append(Segment(self.prefix[0], self.T0, "generic"))
            else:
                segs.append(Segment(0.0, self.T0, "generic"))
            object.__setattr__(self, "segments", tuple(segs))

    # evaluation ------------------------------------------------------------

    def evaluate(self, t, order: int = 0):
        fn = (self.value, self.d1, self.d2, self.d3)[order] if order <= 3 else None
        if fn is None:
            raise ValueError(f"{self.name}: derivative of order {order} not available")
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if t.size and (np.min(t) < 0 or np.max(t) > self.T0 * (1 + 1e-12)):
            raise ValueError(f"{self.name}: evaluation outside [0, T0={self.T0}]")
        out = np.empty_like(t)
        if self.prefix is not None:
            pre = t <= self.prefix[0]
            out[pre] = self.prefix[1] if order == 0 else 0.0
            rest = ~pre
        else:
            if t.size and np.min(t) < T_MIN:
                raise ValueError(f"{self.name}: evaluation below t_min={T_MIN} without a constant prefix")
            rest = np.ones(t.shape, bool)
        if np.any(rest):
            out[rest] = fn(t[rest])
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self.evaluate(t, 0)

    def c1(self, t):
        return self.evaluate(t, 1)

    def c2(self, t):
        return self.evaluate(t, 2)

    @property
    def t_start(self) -> float:
        return 0.0 if self.prefix is not None else T_MIN

    def windows(self) -> list[Segment]:
        return [s for s in self.segments if s.kind == "window"]


def _wrap(fn):
    return lambda t: np.asarray(fn(np.asarray(t, float)), float)


def constant_speed(level: float, T0: float) -> PropagationSpeed:
    zero = lambda t: np.zeros_like(t)
    return PropagationSpeed(
        value=lambda t: np.full_like(t, level),
        d1=zero,
        d2=zero,
        d3=zero,
        T0=T0,
        prefix=(T0, level),
        segments=(Segment(0.0, T0, "constant", level),),
        name=f"const({level:g})",
    )


def speed_from_functions(value, d1, d2=None, T0=1.0, name="speed", d3=None) -> PropagationSpeed:
    return PropagationSpeed(
        value=_wrap(value),
        d1=_wrap(d1),
        d2=None if d2 is None else _wrap(d2),
        d3=None if d3 is None else _wrap(d3),
        T0=T0,
        name=name,
    )


def _from_log_variable(g, T0, name):
    """Build a speed from c = g(L), L = -log t, where g returns (c, c_L, c_LL)."""

    def value(t):
        return g(-np.log(t))[0]

    def d1(t):
        return -g(-np.log(t))[1] / t

    def d2(t):
        _, gl, gll = g(-np.log(t))
        return (gl + gll) / t**2

    return PropagationSpeed(value=value, d1=d1, d2=d2, T0=T0, name=name)


def model_speed_alpha(alpha: float, T0: float) -> PropagationSpeed:
    """c(t) = 2 + exp(-L^(1-a)) sin(L^(2a) exp(L^(1-a))), L = |log t|."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not 0 < T0 < 1:
        raise ValueError("T0 must lie in (0, 1)")
    a = float(alpha)

    if a == 0.0:
        # closed form in t avoids exp(L) overflow near t_min
        def value(t):
            return 2 + t * np.sin(1 / t)

        def d1(t):
            return np.sin(1 / t) - np.cos(1 / t) / t

        def d2(t):
            return -np.sin(1 / t) / t**3

        return PropagationSpeed(value=value, d1=d1, d2=d2, T0=T0, name="alpha(0)")

    def g(L):
        A = L ** (1 - a)
        A1 = (1 - a) * L ** (-a)
        A2 = -a * (1 - a) * L ** (-a - 1)
        E = np.exp(-A)
        E1 = -E * A1
        E2 = E * (A1**2 - A2)
        P = L ** (2 * a) * np.exp(A)
        r = 2 * a / L + A1
        P1 = P * r
        P2 = P1 * r + P * (-2 * a / L**2 + A2)
        s, c = np.sin(P), np.cos(P)
        val = 2 + E * s
        gl = E1 * s + E * c * P1
        gll = E2 * s + 2 * E1 * c * P1 - E * s * P1**2 + E * c * P2
        return val, gl, gll

    return _from_log_variable(g, T0, f"alpha({a:g})")


def log_square_speed(T0: float) -> PropagationSpeed:
    """c(t) = 2 + sin(|log t|^2)."""

    def g(L):
        s, c = np.sin(L**2), np.cos(L**2)
        return 2 + s, 2 * L * c, 2 * c - 4 * L**2 * s

    return _from_log_variable(g, T0, "log-square")


def affine_speed(c: PropagationSpeed, scale: float, shift: float, name=None) -> PropagationSpeed:
    """shift + scale * c(t)."""
    d2 = None if c.d2 is None else (lambda t: scale * c.d2(t))
    prefix = None if c.prefix is None else (c.prefix[0], shift + scale * c.prefix[1])
    segs = tuple(
        Segment(s.start, s.end, s.kind, shift + scale * s.level if s.kind == "constant" else s.level, s.freq)
        for s in c.segments
    )
    return PropagationSpeed(
        value=lambda t: shift + scale * c.value(t),
        d1=lambda t: scale * c.d1(t),
        d2=d2,
        T0=c.T0,
        prefix=prefix,
        segments=segs,
        name=name or f"{shift:g}+{scale:g}*{c.name}",
    )


def desaturate(c: PropagationSpeed, spec: SpeedClassSpec, eps: float) -> PropagationSpeed:
    """Affine map sending [mu1, mu2] onto [(1+eps) mu1, (1-eps) mu2]."""
    lo, hi = (1 + eps) * spec.mu1, (1 - eps) * spec.mu2
    if not 0 <= eps < 1 or lo >= hi:
        raise ValueError(f"eps={eps} leaves an empty target band")
    scale = (hi - lo) / (spec.mu2 - spec.mu1)
    return affine_speed(c, scale, lo - scale * spec.mu1, name=f"desat({c.name},{eps:g})")


def smooth_to_initially_constant(c_star: PropagationSpeed, delta: float, theta: CutoffFunction | None = None) -> PropagationSpeed:
    """c_delta(t) = c*(delta) + theta((t-delta)/delta) (c*(t) - c*(delta))."""
    theta = theta or default_cutoff()
    T0 = c_star.T0
    if not 0 < delta < T0 / 2:
        raise ValueError(f"delta must lie in (0, T0/2), got {delta}")
    if c_star.prefix is not None and c_star.prefix[0] >= 2 * delta:
        # the blend only touches [delta, 2 delta] where c_star is already constant
        return c_star
    c0 = float(c_star(delta))
    has2 = c_star.d2 is not None

    def pieces(t, order):
        out = np.empty_like(t)
        far = t >= 2 * delta
        if np.any(far):
            out[far] = c_star.evaluate(t[far], order)
        mid = ~far
        if np.any(mid):
            tm = t[mid]
            s = (tm - delta) / delta
            th = theta.all(s, order)
            g = [c_star.evaluate(tm, 0) - c0]
            for k in range(1, order + 1):
                g.append(c_star.evaluate(tm, k))
            if order == 0:
                out[mid] = c0 + th[0] * g[0]
            elif order == 1:
                out[mid] = th[1] / delta * g[0] + th[0] * g[1]
            elif order == 2:
                out[mid] = th[2] / delta**2 * g[0] + 2 * th[1] / delta * g[1] + th[0] * g[2]
        return out

    segs = [Segment(0.0, delta, "constant", c0), Segment(delta, 2 * delta, "generic")]
    for s in c_star.segments:
        if s.end <= 2 * delta:
            continue
        segs.append(Segment(max(s.start, 2 * delta), s.end, s.kind, s.level, s.freq))
    return PropagationSpeed(
        value=lambda t: pieces(t, 0),
        d1=lambda t: pieces(t, 1),
        d2=(lambda t: pieces(t, 2)) if has2 else None,
        T0=T0,
        prefix=(delta, c0),
        segments=tuple(segs),
        name=f"smooth({c_star.name},{delta:g})",
    )


def speed_from_table(path_or_text, T0: float | None = None, name="table") -> PropagationSpeed:
    """Linear interpolation of an exported ``t,c,c1[,c2]`` table."""
    src = path_or_text
    if isinstance(src, str) and "\n" not in src:
        with open(src, encoding="utf-8") as fh:
            src = fh.read()
    data = np.genfromtxt(io.StringIO(src), delimiter=",", names=True)
    t = np.asarray(data["t"], float)
    cols = data.dtype.names
    c = np.asarray(data["c"], float)
    c1 = np.asarray(data["c1"], float)
    c2 = np.asarray(data["c2"], float) if "c2" in cols else None
    T0 = float(t[-1]) if T0 is None else T0
    return PropagationSpeed(
        value=lambda x: np.interp(x, t, c),
        d1=lambda x: np.interp(x, t, c1),
        d2=None if c2 is None else (lambda x: np.interp(x, t, c2)),
        T0=T0,
        name=name,
    )


# ---------------------------------------------------------------------------
# grids, membership and metrics
# ---------------------------------------------------------------------------


def log_grid(t_lo: float, t_hi: float, per_decade: int = 4096) -> Array:
    n = max(2, int(math.ceil(math.log10(t_hi / t_lo) * per_decade)) + 1)
    g = np.geomspace(t_lo, t_hi, n)
    g[-1] = t_hi
    return g


def sample_grid(speeds: Sequence[PropagationSpeed], T0: float, per_decade: int = 4096,
                t_min: float = T_MIN, per_period: int = 32, max_window_points: int = 4_000_000) -> Array:
    """Log grid on [t_min, T0] refined inside every oscillatory window."""
    parts = [log_grid(t_min, T0, per_decade)]
    for c in speeds:
        for s in c.windows():
            n = int(math.ceil((s.end - s.start) * s.freq / (2 * math.pi) * per_period)) + 1
            parts.append(np.linspace(s.start, s.end, min(max(n, 64), max_window_points)))
    return np.unique(np.concatenate(parts))


@dataclass(frozen=True)
class BoundRatio:
    name: str
    max_ratio: float
    argmax_t: float
    passed: bool


@dataclass(frozen=True)
class MembershipReport:
    passed: bool
    ratios: tuple  # of BoundRatio
    grid_points: int
    slack: float = 0.0

    def ratio(self, name: str) -> BoundRatio:
        for r in self.ratios:
            if r.name == name:
                return r
        raise KeyError(name)

    columns = ("bound", "max_ratio", "argmax_t", "pass")

    def rows(self):
        for r in self.ratios:
            yield (r.name, r.max_ratio, r.argmax_t, r.passed)


def _check_grid(grid, T0):
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted ascending")
    if grid[0] <= 0 or grid[-1] > T0 * (1 + 1e-12):
        raise ValueError("grid must lie in (0, T0]")
    return grid


def membership_report(c: PropagationSpeed, spec: SpeedClassSpec, grid=None, slack: float = 0.0) -> MembershipReport:
    """Grid check of the class bounds; each ratio must stay <= 1 - slack."""
    if grid is None:
        grid = sample_grid([c], spec.T0)
    grid = _check_grid(grid, spec.T0)
    if spec.order == 2 and c.d2 is None:
        raise ValueError("order-2 membership needs a second derivative")
    val = c(grid)
    w = np.asarray(spec.omega(grid), float)
    entries = [
        ("lower", spec.mu1 / val),
        ("upper", val / spec.mu2),
        ("c1", np.abs(c.c1(grid)) * grid / w),
    ]
    if spec.order == 2:
        p = np.asarray(spec.psi(grid), float)
        entries.append(("c2", np.abs(c.c2(grid)) * grid**2 * np.exp(-p) / w**2))
    lim = 1.0 - slack
    ratios = []
    for name, r in entries:
        k = int(np.argmax(r))
        ratios.append(BoundRatio(name, float(r[k]), float(grid[k]), bool(r[k] <= lim)))
    return MembershipReport(all(r.passed for r in ratios), tuple(ratios), int(grid.size), slack)


def _distance_terms(c1, c2, spec, grid, order):
    if abs(c1.T0 - c2.T0) > 1e-15 * max(c1.T0, c2.T0):
        raise ValueError("speeds have mismatched horizons")
    if grid is None:
        grid = sample_grid([c1, c2], spec.T0)
    grid = _check_grid(grid, min(spec.T0, c1.T0))
    w = np.asarray(spec.omega(grid), float)
    terms = [
        float(np.max(np.abs(c1(grid) - c2(grid)))),
        float(np.max(grid**2 / w * np.abs(c1.c1(grid) - c2.c1(grid)))),
    ]
    if order == 2:
        if c1.d2 is None or c2.d2 is None:
            raise ValueError("distance_ps2 needs second derivatives")
        p = np.asarray(spec.psi(grid), float)
        terms.append(float(np.max(grid**3 * np.exp(-p) / w**2 * np.abs(c1.c2(grid) - c2.c2(grid)))))
    return terms


def distance_ps1(c1: PropagationSpeed, c2: PropagationSpeed, spec: SpeedClassSpec, grid=None) -> float:
    return float(sum(_distance_terms(c1, c2, spec, grid, 1)))


def distance_ps2(c1: PropagationSpeed, c2: PropagationSpeed, spec: SpeedClassSpec, grid=None) -> float:
    return float(sum(_distance_terms(c1, c2, spec, grid, 2)))


def class_distance(c1, c2, spec, grid=None) -> float:
    return distance_ps2(c1, c2, spec, grid) if spec.order == 2 else distance_ps1(c1, c2, spec, grid)


@dataclass(frozen=True)
class DensityRow:
    delta: float
    member: bool
    distance: float
    worst_c1_ratio: float


def density_check(c_star: PropagationSpeed, spec: SpeedClassSpec, deltas: Sequence[float],
                  theta: CutoffFunction | None = None, grid=None) -> list[DensityRow]:
    """Smooth c_star at each delta; report membership and distance back to c_star."""
    theta = theta or default_cutoff()
    if grid is None:
        grid = sample_grid([c_star], spec.T0)
    rows = []
    for d in deltas:
        cd = smooth_to_initially_constant(c_star, d, theta)
        rep = membership_report(cd, spec, grid)
        rows.append(DensityRow(float(d), rep.passed, class_distance(cd, c_star, spec, grid), rep.ratio("c1").max_ratio))
    return rows


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def speed_table(c: PropagationSpeed, grid) -> str:
    grid = np.asarray(grid, float)
    cols = [grid, c(grid), c.c1(grid)]
    header = "t,c,c1"
    if c.d2 is not None:
        cols.append(c.c2(grid))
        header += ",c2"
    lines = [header]
    for row in zip(*cols):
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"
