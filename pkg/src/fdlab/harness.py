"""Experiment configs, per-lambda orchestration, table emission and the command line."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import yaml

from . import activators as act
from . import fdl_verifier as fdl
from . import oscillator as osc
from . import speeds as sp

KINDS = ("membership", "fdl-sweep", "activator", "iterate", "density", "dependence")
FAMILIES = ("alpha", "log-square", "constant", "table")
FORMATS = ("csv", "jsonl")

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3


class ConfigError(ValueError):
    """Raised with every validation problem found, not just the first."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


@dataclass
class SpeedSelector:
    """Model family plus an optional affine map and smoothing to an initially constant speed."""

    family: str = "alpha"
    alpha: float = 0.0
    level: float = 1.0
    path: Optional[str] = None
    scale: float = 1.0
    shift: float = 0.0
    smooth_delta: Optional[float] = None


@dataclass
class SpecConfig:
    mu1: float = 0.5
    mu2: float = 3.5
    T0: float = 0.5
    omega: dict = field(default_factory=lambda: {"kind": "log", "scale": 1.0})
    psi: dict = field(default_factory=lambda: {"kind": "constant", "scale": 1.0})
    K0: Optional[float] = None  # None: smallest admissible value on a log grid
    order: int = 1


@dataclass
class LambdaGrid:
    start: float = 100.0
    ratio: float = 10.0
    count: int = 4
    values: Optional[list] = None

    def expand(self) -> list[float]:
        if self.values is not None:
            return [float(x) for x in self.values]
        return [float(self.start * self.ratio**i) for i in range(int(self.count))]


@dataclass
class ActivatorOptions:
    schedule: str = "c1"
    verify: bool = True
    use_integrator: bool = True
    n_checkpoints: int = 8
    convergence: bool = True


@dataclass
class IterateOptions:
    n_stages: int = 3
    margin: float = 0.05
    gamma0_level: Optional[float] = None
    lam_min: float = 16.0
    betas: list = field(default_factory=lambda: [0.0, 1.0, 2.0])


@dataclass
class DensityOptions:
    deltas: list = field(default_factory=lambda: [0.1, 0.05, 0.02, 0.01])


@dataclass
class DependenceOptions:
    n_values: list = field(default_factory=lambda: list(range(4, 11)))
    amplitude_base: float = 2.0
    max_ratio: float = 0.6


@dataclass
class ExperimentConfig:
    kind: str = "membership"
    speed: SpeedSelector = field(default_factory=SpeedSelector)
    spec: SpecConfig = field(default_factory=SpecConfig)
    lambdas: LambdaGrid = field(default_factory=LambdaGrid)
    tol: float = 1e-10
    form: str = "squared"
    n_out: int = 2048
    workers: int = 1
    out: str = "out"
    format: str = "csv"
    seed: int = 0
    activator: ActivatorOptions = field(default_factory=ActivatorOptions)
    iterate: IterateOptions = field(default_factory=IterateOptions)
    density: DensityOptions = field(default_factory=DensityOptions)
    dependence: DependenceOptions = field(default_factory=DependenceOptions)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        problems: list[str] = []
        cfg = _build(cls, d or {}, "", problems)
        try:
            problems += cfg.problems()
        except Exception as exc:  # malformed values that the checks cannot even inspect
            problems.append(f"invalid config: {exc}")
        if problems:
            raise ConfigError(problems)
        return cfg

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        try:
            d = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError([f"unreadable config: {exc}"]) from exc
        if d is not None and not isinstance(d, dict):
            raise ConfigError(["config must be a mapping"])
        return cls.from_dict(d or {})

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    # -- validation ---------------------------------------------------------

    def problems(self) -> list[str]:
        p: list[str] = []
        if self.kind not in KINDS:
            p.append(f"kind must be one of {KINDS}, got {self.kind!r}")
        s = self.speed
        if s.family not in FAMILIES:
            p.append(f"speed.family must be one of {FAMILIES}, got {s.family!r}")
        if s.family == "alpha" and not 0 <= s.alpha <= 1:
            p.append("speed.alpha must lie in [0, 1]")
        if s.family == "table" and not s.path:
            p.append("speed.path is required for family 'table'")
        if s.family == "constant" and s.level <= 0:
            p.append("speed.level must be positive")
        if s.scale == 0:
            p.append("speed.scale must be nonzero")
        sc = self.spec
        if not 0 < sc.mu1 < sc.mu2:
            p.append("spec needs 0 < mu1 < mu2")
        if not sc.T0 > 0:
            p.append("spec.T0 must be positive")
        elif sc.T0 >= 1 and self.kind != "dependence":
            p.append("spec.T0 must lie in (0, 1)")
        if sc.order not in (1, 2):
            p.append("spec.order must be 1 or 2")
        if sc.K0 is not None and not sc.K0 > 0:
            p.append("spec.K0 must be positive")
        for name in ("omega", "psi"):
            try:
                sp.Envelope.from_dict(getattr(sc, name))
            except (ValueError, TypeError, AttributeError) as exc:
                p.append(f"spec.{name}: {exc}")
        if s.smooth_delta is not None and not 0 < s.smooth_delta < sc.T0 / 2:
            p.append("speed.smooth_delta must lie in (0, T0/2)")
        g = self.lambdas
        try:
            lams = g.expand()
        except (TypeError, ValueError) as exc:
            p.append(f"lambdas: {exc}")
            lams = []
        if g.values is None and (g.start <= 0 or g.ratio <= 1 or g.count < 0):
            p.append("lambdas needs start > 0, ratio > 1, count >= 0")
        if any(not (math.isfinite(x) and x > 0) for x in lams):
            p.append("lambdas must be finite and positive")
        if any(y <= x for x, y in zip(lams, lams[1:])):
            p.append("lambdas must be strictly increasing")
        if not 1e-14 <= self.tol <= 1e-3:
            p.append("tol must lie in [1e-14, 1e-3]")
        if self.form not in osc.FORMS:
            p.append(f"form must be one of {osc.FORMS}")
        if self.n_out < 8:
            p.append("n_out must be at least 8")
        if self.workers < 1:
            p.append("workers must be at least 1")
        if self.format not in FORMATS:
            p.append(f"format must be one of {FORMATS}")
        if self.activator.schedule not in ("c1", "c2"):
            p.append("activator.schedule must be c1 or c2")
        if self.activator.n_checkpoints < 1:
            p.append("activator.n_checkpoints must be at least 1")
        it = self.iterate
        if not 1 <= it.n_stages <= 8:
            p.append("iterate.n_stages must lie in 1..8")
        if not it.margin > 0:
            p.append("iterate.margin must be positive")
        if self.kind == "density" and any(not 0 < d < sc.T0 / 2 for d in self.density.deltas):
            p.append("density.deltas must lie in (0, T0/2)")
        dep = self.dependence
        if len(dep.n_values) < 2 or any(y <= x for x, y in zip(dep.n_values, dep.n_values[1:])):
            p.append("dependence.n_values needs at least two increasing entries")
        if dep.amplitude_base <= 1:
            p.append("dependence.amplitude_base must exceed 1")
        if self.kind == "activator" and s.smooth_delta is None and s.family != "constant":
            p.append("activator runs need an initially constant host: set speed.smooth_delta or use family 'constant'")
        if self.kind == "dependence" and not lams:
            p.append("dependence needs at least one lambda")
        return p

    def validate(self) -> None:
        p = self.problems()
        if p:
            raise ConfigError(p)

    # -- derived objects ----------------------------------------------------

    def class_spec(self) -> sp.SpeedClassSpec:
        sc = self.spec
        omega = sp.Envelope.from_dict(sc.omega)
        psi = sp.Envelope.from_dict(sc.psi)
        if sc.K0 is not None:
            k0 = sc.K0
        else:
            k0 = sp.k0_for(omega, psi, sc.T0) if sc.T0 < 1 else math.inf
        return sp.SpeedClassSpec(sc.mu1, sc.mu2, sc.T0, omega, psi, k0, sc.order)


def _build(cls, d, where: str, problems: list[str]):
    """Recursive dataclass construction that records unknown keys and bad types."""
    if not isinstance(d, dict):
        problems.append(f"{where or 'config'} must be a mapping")
        return cls()
    known = {f.name: f for f in fields(cls)}
    kw = {}
    for key, val in d.items():
        path = f"{where}.{key}" if where else str(key)
        if key not in known:
            problems.append(f"unknown key {path}")
            continue
        default = getattr(cls(), key)
        if hasattr(default, "__dataclass_fields__"):
            kw[key] = _build(type(default), val, path, problems)
        else:
            kw[key] = _coerce(val, default, path, problems)
    return cls(**kw)


def _coerce(val, default, path, problems):
    if val is None or default is None or isinstance(default, (dict, list, str)):
        if isinstance(default, list) and not isinstance(val, list):
            problems.append(f"{path} must be a list")
            return default
        return val
    try:
        if isinstance(default, bool):
            if not isinstance(val, bool):
                raise TypeError("expected true/false")
            return val
        if isinstance(default, int):
            if isinstance(val, bool) or float(val) != int(val):
                raise TypeError("expected an integer")
            return int(val)
        if isinstance(default, float):
            if isinstance(val, bool):
                raise TypeError("expected a number")
            return float(val)
    except (TypeError, ValueError) as exc:
        problems.append(f"{path}: {exc}")
        return default
    return val


# ---------------------------------------------------------------------------
# speeds from config
# ---------------------------------------------------------------------------


def build_speed(cfg: ExperimentConfig) -> sp.PropagationSpeed:
    s, T0 = cfg.speed, cfg.spec.T0
    if s.family == "alpha":
        c = sp.model_speed_alpha(s.alpha, T0)
    elif s.family == "log-square":
        c = sp.log_square_speed(T0)
    elif s.family == "constant":
        c = sp.constant_speed(s.level, T0)
    else:
        c = sp.speed_from_table(s.path, T0)
    if s.scale != 1.0 or s.shift != 0.0:
        c = sp.affine_speed(c, s.scale, s.shift)
    if s.smooth_delta is not None:
        c = sp.smooth_to_initially_constant(c, s.smooth_delta)
    return c


@lru_cache(maxsize=8)
def _cached(text: str):
    cfg = ExperimentConfig.loads(text)
    return cfg, build_speed(cfg), cfg.class_spec()


def _perturbed(c_inf: sp.PropagationSpeed, n: int, base: float) -> sp.PropagationSpeed:
    amp = base ** (-n)
    return sp.speed_from_functions(
        lambda t: c_inf.evaluate(t, 0) + amp * np.sin(n * t),
        lambda t: c_inf.evaluate(t, 1) + amp * n * np.cos(n * t),
        (lambda t: c_inf.evaluate(t, 2) - amp * n * n * np.sin(n * t)) if c_inf.d2 is not None else None,
        T0=c_inf.T0, name=f"{c_inf.name}+{base:g}^-{n}sin({n}t)",
    )


# ---------------------------------------------------------------------------
# tables and emission
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple
    rows: tuple


def tables_for(report) -> list[Table]:
    """Flatten any module report into named tables."""
    if isinstance(report, Table):
        return [report]
    if isinstance(report, fdl.LossReport):
        return [Table("loss", report.columns, tuple(report.table_rows()))]
    if isinstance(report, sp.MembershipReport):
        return [Table("membership", report.columns, tuple(report.rows()))]
    if isinstance(report, act.GrowthCertificate):
        report = [report]
    if isinstance(report, act.SobolevTable):
        return [Table("sobolev", act.SobolevRow.columns, tuple(r.row() for r in report.rows)),
                Table("regularity", ("alpha", "stage", "lambda", "lhs", "rhs", "pass"), report.data_regularity)]
    if isinstance(report, (list, tuple)):
        items = list(report)
        if all(isinstance(x, act.GrowthCertificate) for x in items):
            return [Table("certificates", act.GrowthCertificate.columns, tuple(c.row() for c in items)),
                    Table("checkpoints", act.GrowthCertificate.checkpoint_columns,
                          tuple(r for c in items for r in c.checkpoint_rows()))]
        if all(isinstance(x, act.ConvergenceRow) for x in items):
            return [Table("convergence", act.ConvergenceRow.columns, tuple(r.row() for r in items))]
        if all(isinstance(x, sp.DensityRow) for x in items):
            return [Table("density", ("delta", "member", "distance", "worst_c1_ratio"),
                          tuple((r.delta, r.member, r.distance, r.worst_c1_ratio) for r in items))]
        if all(isinstance(x, Table) for x in items):
            return items
    raise TypeError(f"no table layout for {type(report).__name__}")


def _json_value(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g") if math.isfinite(x) else "null"
    return json.dumps(str(x), ensure_ascii=False)


def _csv_value(x) -> str:
    if x is None:
        return ""
    s = sp.fmt(x)
    if isinstance(x, str) and any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def render(table: Table, format: str = "csv") -> str:
    if format == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(_csv_value(x) for x in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if format == "jsonl":
        keys = [json.dumps(c) for c in table.columns]
        return "".join("{" + ", ".join(f"{k}: {_json_value(v)}" for k, v in zip(keys, row)) + "}\n"
                       for row in table.rows)
    raise ValueError(f"unknown format {format!r}")


def emit(report, out_dir: str, format: str = "csv") -> list[str]:
    """Write each table of ``report`` to ``out_dir/<name>.<ext>``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for tab in tables_for(report):
        path = os.path.join(out_dir, f"{tab.name}.{format}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render(tab, format))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# per-item tasks (run in workers; the speed is rebuilt from the config text)
# ---------------------------------------------------------------------------


def _loss_task(text: str, lam: float, log_m: float):
    cfg, c, spec = _cached(text)
    return fdl.loss_row(c, lam, spec, cfg.tol, cfg.form, cfg.n_out, log_m)


_WINDOW_COLUMNS = ("lambda", "gamma", "na", "nb", "a", "b", "omega_l", "phi", "feasible", "note")


def _activator_task(text: str, lam: float):
    cfg, host, spec = _cached(text)
    T1, level = host.prefix
    gamma = math.sqrt(level)
    opts = cfg.activator
    conv = act.verify_convergence(host, spec, [lam], opts.schedule)[0] if opts.convergence else None
    w, note = None, ""
    try:
        if opts.schedule == "c1":
            w = act.schedule_c1(lam, gamma, spec.omega)
        else:
            w, _ = act.schedule_c2(lam, gamma, spec.omega, spec.psi)
        w.check(T1)
    except act.WindowError as exc:
        note = str(exc)
    if w is None:
        nan = math.nan
        return (lam, gamma, -1, -1, nan, nan, nan, nan, False, note), conv, None
    row = (lam, gamma, w.na, w.nb, w.a, w.b, w.omega_l, w.phi, not note, note)
    if note:
        return row, conv, None
    cert = None
    if opts.verify:
        c_l = act.build_activator(host, w)
        cps = np.geomspace(w.b * (1 + 1e-6), spec.T0, opts.n_checkpoints)
        cert = act.verify_growth(c_l, w, cps, opts.use_integrator, mu2=spec.mu2, tol=min(cfg.tol, 1e-12))
    return row, conv, cert


def _density_task(text: str, delta: float):
    cfg, c, spec = _cached(text)
    return sp.density_check(c, spec, [delta])[0]


def _dependence_task(text: str, n: int):
    cfg, c, spec = _cached(text)
    dep = cfg.dependence
    lam = cfg.lambdas.expand()[0]
    cn = _perturbed(c, n, dep.amplitude_base)
    return osc.continuous_dependence_probe([cn], c, lam, c.T0, tol=min(cfg.tol, 1e-11), form=cfg.form)[0]


def _map(fn, text: str, items: Sequence, workers: int, *extra) -> list:
    """Ordered map; results follow the order of ``items`` whatever the pool does."""
    if workers <= 1 or len(items) <= 1:
        return [fn(text, x, *extra) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        futs = [pool.submit(fn, text, x, *extra) for x in items]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    status: int
    tables: list
    paths: list
    message: str = ""


def run(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    """Execute one experiment; tables are written under ``cfg.out`` when ``write``."""
    cfg.validate()
    text = cfg.dumps()
    _, c, spec = _cached(text)
    lams = cfg.lambdas.expand()
    status, msg = EXIT_OK, ""
    tables: list[Table] = []

    if cfg.kind == "membership":
        rep = sp.membership_report(c, spec)
        tables += tables_for(rep)
        grid = sp.sample_grid([c], spec.T0, per_decade=64)
        cols = ("t", "c", "c1", "c2") if c.d2 is not None else ("t", "c", "c1")
        vals = [grid, c(grid), c.c1(grid)] + ([c.c2(grid)] if c.d2 is not None else [])
        tables.append(Table("speed", cols, tuple(zip(*vals))))
        if not rep.passed:
            status, msg = EXIT_ASSERT, "membership failed"

    elif cfg.kind == "fdl-sweep":
        log_m = fdl.coefficient_band(c, cfg.form, spec.T0)
        rows = _map(_loss_task, text, lams, cfg.workers, log_m)
        rep = fdl.loss_report(rows, cfg.form)
        tables += tables_for(rep)
        tables.append(Table("loss_detail", ("lambda", "delta_raw", "log_m_hat", "error"),
                            tuple((r.lam, r.delta_raw, r.log_m_hat, r.error or "") for r in rows)))
        if any(r.error for r in rows):
            status, msg = EXIT_COMPUTE, "integration failed at some lambda"
        elif not rep.passed or not all(r.passed for r in rows):
            status, msg = EXIT_ASSERT, "loss ceilings or monotonicity violated"

    elif cfg.kind == "activator":
        if c.prefix is None:
            raise ConfigError(["activator host speed has no constant prefix"])
        out = _map(_activator_task, text, lams, cfg.workers)
        tables.append(Table("windows", _WINDOW_COLUMNS, tuple(o[0] for o in out)))
        if cfg.activator.convergence:
            tables += tables_for([o[1] for o in out])
        certs = [o[2] for o in out if o[2] is not None]
        if cfg.activator.verify:
            tables += tables_for(certs)
            if not all(x.passed for x in certs):
                status, msg = EXIT_ASSERT, "growth certificate failed"

    elif cfg.kind == "iterate":
        it = cfg.iterate
        try:
            res = act.iterate_universal(spec, it.gamma0_level, it.n_stages, it.margin, cfg.tol, it.lam_min)
        except act.StageUnreachable as exc:
            return _finish(cfg, [], EXIT_COMPUTE, str(exc), write)
        tables.append(Table("stages", ("stage", "lambda", "na", "nb", "a", "b", "omega_l", "sup_change", "candidates"),
                            tuple((s.n, s.lam, s.window.na, s.window.nb, s.window.a, s.window.b, s.window.omega_l,
                                   s.sup_change, s.candidates_tried) for s in res.stages)))
        reverified = [cert for s in res.stages for cert in s.certificates]
        tables += [Table("reverification", ("stage",) + act.GrowthCertificate.columns,
                         tuple((s.n,) + cert.row() for s in res.stages for cert in s.certificates))]
        tables += tables_for([cert for _, cert in res.certificates])
        sob = act.sobolev_divergence_check(res.certificates, it.betas)
        tables += tables_for(sob)
        if not all(x.passed for x in reverified) or not sob.passed:
            status, msg = EXIT_ASSERT, "iteration certificates or divergence check failed"

    elif cfg.kind == "density":
        rows = _map(_density_task, text, cfg.density.deltas, cfg.workers)
        tables += tables_for(rows)

    elif cfg.kind == "dependence":
        dep = cfg.dependence
        devs = _map(_dependence_task, text, dep.n_values, cfg.workers)
        rows = []
        for i, (n, d) in enumerate(zip(dep.n_values, devs)):
            r = devs[i] / devs[i - 1] if i else math.nan
            ok = True if i == 0 else bool(r <= dep.max_ratio)
            rows.append((int(n), d, r, ok))
        tables.append(Table("dependence", ("n", "sup_deviation", "ratio", "pass"), tuple(rows)))
        if not all(r[3] for r in rows):
            status, msg = EXIT_ASSERT, "deviation ratios above the threshold"

    return _finish(cfg, tables, status, msg, write)


def _finish(cfg, tables, status, msg, write) -> RunResult:
    paths = []
    if write:
        paths = emit(tables, cfg.out, cfg.format) if tables else []
        os.makedirs(cfg.out, exist_ok=True)
        cpath = os.path.join(cfg.out, "config.yaml")
        with open(cpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(cfg.dumps())
        paths.append(cpath)
    return RunResult(status, tables, paths, msg)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


VERBS = {
    "check-speed": "membership",
    "sweep-fdl": "fdl-sweep",
    "build-activator": "activator",
    "verify-activator": "activator",
    "iterate-universal": "iterate",
    "probe-dependence": "dependence",
    "check-density": "density",
}


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="fdlab", description="Derivative-loss and activator experiments.")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, help="YAML experiment file")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--workers", type=int, help="process count for per-lambda tasks")
        p.add_argument("--tol", type=float, help="integrator tolerance")
        p.add_argument("--seed", type=int, help="reserved; every computation is deterministic")
        p.add_argument("--format", choices=FORMATS)
    args = ap.parse_args(argv)

    try:
        cfg = ExperimentConfig.load(args.config)
        kind = VERBS[args.verb]
        if cfg.kind != kind:
            raise ConfigError([f"verb {args.verb} runs kind {kind!r} but the config declares {cfg.kind!r}"])
        over = {k: v for k, v in (("out", args.out), ("workers", args.workers), ("tol", args.tol),
                                  ("seed", args.seed), ("format", args.format)) if v is not None}
        if args.verb == "build-activator":
            cfg.activator = replace(cfg.activator, verify=False)
        cfg = replace(cfg, **over)
        cfg.validate()
    except ConfigError as exc:
        for p in exc.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        res = run(cfg)
    except ConfigError as exc:
        for p in exc.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # numerical failure of the whole experiment
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    for p in res.paths:
        print(p)
    if res.message:
        print(res.message, file=sys.stderr)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
