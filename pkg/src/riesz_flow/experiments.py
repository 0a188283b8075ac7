"""Experiment drivers behind the ``riesz-flow`` command.

Each experiment evaluates one family of quantities over a list of alpha
values and compares it with the corresponding limit.  Rows share the
columns ``alpha,param,quantity,value,limit,abs_error``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, QuadratureError, SolverError
from .flows import (
    FlowProblem,
    average_trajectory,
    compare_trajectories,
    decay_trajectory,
    default_tau,
    solve,
)
from .functionals import (
    EnergyKind,
    certify,
    counterexample_g1_exact,
    counterexample_norm_exact,
    counterexample_sequence,
    energy,
)
from .grid import Domain, GridField, build_domain, load_field, sphere_area
from .kernels import check_fourier_identity
from .operators import OperatorKind, gradient_check

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "Row",
    "SweepReport",
    "build_config_domain",
    "initial_data",
    "run",
    "write_csv",
    "write_plot_script",
]

EXPERIMENTS = (
    "sweep-zero", "sweep-d",
    "flow-zero-scaled", "flow-zero-renorm", "flow-d-plain", "flow-d-renorm",
    "fourier-check", "grad-check", "counterexample", "certify",
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 1, 2, 3

DEFAULT_N = {1: 1024, 2: 128}
DEFAULT_ALPHAS = {
    "sweep-zero": (0.4, 0.2, 0.1, 0.05, 0.025),
    "sweep-d": (0.8, 0.9, 0.95, 0.99),
    "flow-zero-scaled": (0.2, 0.1, 0.05),
    "flow-zero-renorm": (0.4, 0.2, 0.1),
    "flow-d-plain": (0.8, 0.9, 0.95),
    "flow-d-renorm": (0.8, 0.9, 0.95),
    "fourier-check": (0.25, 0.5, 0.75),
    "grad-check": (0.5,),
    "counterexample": (0.5, 0.1, 0.0),
    "certify": (0.25, 0.5, 0.75),
}
DEFAULT_TOL = {"fourier-check": 1e-6, "grad-check": 1e-6}

CSV_COLUMNS = ("alpha", "param", "quantity", "value", "limit", "abs_error")

COLUMN_DOCS = """\
CSV columns (all experiments): alpha,param,quantity,value,limit,abs_error
  sweep-zero        quantity -alphaJ (limit d*omega_d*||u||^2), Jhat (limit Jhat0)
  sweep-d           quantity J (limit Jd), Jtilde (limit JtildeD); alpha scaled to d
  flow-*            quantity l2_gap, energy_gap; value = sup over recorded times
  fourier-check     quantity fourier_rel_error; param = quadrature nodes
  grad-check        quantity defect:<energy>; param = t, limit = t*|E(phi)|
  counterexample    quantity norm_grid, G1_grid (param = n) and
                    norm_exact, G1_exact (param = log n, alpha = 1/log n)
  certify           quantity lambda:<energy>; limit = 2 * witness bound
Lines starting with '#' are metadata, checks and the column header."""

# flow experiments: the energy must be monotone to this relative level
MONOTONE_TOL = 1e-12
COUNTEREXAMPLE_NORM_MAX = 0.5
COUNTEREXAMPLE_G1_MIN = 10.0


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    d: int = 1
    n: int | None = None
    box: tuple[tuple[float, float], ...] | None = None
    alphas: tuple[float, ...] | None = None
    sign: int = 1
    u0: str = "indicator"
    tau: float | None = None
    T: float = 0.5
    tol: float | None = None
    scheme: str = "minimizing-movements"
    method: str | None = None
    record_every: int = 10
    workers: int = 1
    seed: int = 0
    quad_n: int = 4096
    log_ns: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
    out: str | None = None
    plot: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.d not in (1, 2):
            raise ConfigError("d must be 1 or 2")
        if self.n is None:
            object.__setattr__(self, "n", DEFAULT_N[self.d])
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.alphas is None:
            alphas = DEFAULT_ALPHAS[self.experiment]
            if self.experiment in ("sweep-d", "flow-d-plain", "flow-d-renorm"):
                alphas = tuple(round(a + self.d - 1, 12) for a in alphas)
            object.__setattr__(self, "alphas", alphas)
        if self.box is None:
            lo, hi = (-1.0, 1.0) if self.experiment == "counterexample" else (0.0, 1.0)
            object.__setattr__(self, "box", ((lo, hi),) * self.d)
        if len(self.box) != self.d:
            raise ConfigError(f"box has {len(self.box)} axes, d = {self.d}")
        if self.sign not in (1, -1):
            raise ConfigError("sign must be +1 or -1")
        if not self.alphas:
            raise ConfigError("alphas must not be empty")
        # G1 accepts alpha = 0; every other experiment needs 0 < alpha < d
        closed = self.experiment == "counterexample"
        for a in self.alphas:
            if not math.isfinite(a):
                raise ConfigError(f"alpha {a} is not finite")
            if not (0 <= a < self.d if closed else 0 < a < self.d):
                raise ConfigError(f"alpha {a:g} outside the admissible range for d = {self.d}")
            if self.experiment == "fourier-check" and (self.d != 1 or a >= 1):
                raise ConfigError("fourier-check runs in d = 1 with alpha in (0, 1)")
        if self.tau is not None and not self.tau > 0:
            raise ConfigError("tau must be positive")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.record_every < 1 or self.workers < 1:
            raise ConfigError("record_every and workers must be >= 1")
        if self.quad_n < 16:
            raise ConfigError("quad_n must be >= 16")
        if any(not ln >= math.log(2) for ln in self.log_ns):
            raise ConfigError("log_ns entries must be >= log 2")
        if self.method not in (None, "direct", "fft"):
            raise ConfigError("method must be direct or fft")
        if self.scheme not in ("minimizing-movements", "explicit-euler"):
            raise ConfigError("scheme must be minimizing-movements or explicit-euler")


@dataclass(frozen=True)
class Row:
    alpha: float
    param: float | None
    quantity: str
    value: float
    limit: float
    abs_error: float
    runtime_ms: float = 0.0


@dataclass
class SweepReport:
    """Rows sorted by alpha, run metadata and named pass/fail checks."""

    rows: list[Row]
    metadata: dict
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(ok for _, ok, _ in self.checks)

    @property
    def exit_code(self) -> int:
        if self.failures:
            return EXIT_NUMERIC
        return EXIT_OK if self.passed else EXIT_TOLERANCE

    def select(self, quantity: str) -> list[Row]:
        return [r for r in self.rows if r.quantity == quantity]


# ---------------------------------------------------------------------------
# inputs


def build_config_domain(cfg: ExperimentConfig) -> Domain:
    return build_domain(cfg.d, cfg.box, cfg.n)


def initial_data(source: str, domain: Domain) -> GridField:
    """``indicator``, ``gaussian``, ``twobump`` (mean zero) or a field file."""
    c = domain.centers()
    mid = (np.array(domain.lower) + np.array(domain.upper)) / 2
    width = min(hi - lo for lo, hi in zip(domain.lower, domain.upper))
    if source == "indicator":
        return GridField.indicator(domain)
    if source == "gaussian":
        s = width / 8
        return GridField(domain, np.exp(-np.sum((c - mid) ** 2, axis=1) / (2 * s * s)))
    if source == "twobump":
        s = width / 12
        shift = np.zeros(domain.dim)
        shift[0] = width / 4
        a = np.exp(-np.sum((c - mid + shift) ** 2, axis=1) / (2 * s * s))
        b = np.exp(-np.sum((c - mid - shift) ** 2, axis=1) / (2 * s * s))
        v = a - b
        return GridField(domain, v - v.mean())
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"u0 source {source!r} is neither a known profile nor a readable file")
    return load_field(path, domain)


# ---------------------------------------------------------------------------
# experiments


def _row(alpha, param, quantity, value, limit, t0):
    return Row(float(alpha), None if param is None else float(param), quantity,
               float(value), float(limit), abs(float(value) - float(limit)),
               (time.perf_counter() - t0) * 1e3)


def _sweep_zero(cfg, dom, u):
    limit_j = sphere_area(dom.dim) * u.norm() ** 2
    limit_hat = energy(EnergyKind.Jhat0(), u, cfg.method)

    def task(a):
        t0 = time.perf_counter()
        j = energy(EnergyKind.J(a), u, cfg.method)
        jh = energy(EnergyKind.Jhat(a), u, cfg.method)
        return [_row(a, None, "-alphaJ", -a * j, limit_j, t0),
                _row(a, None, "Jhat", jh, limit_hat, t0)]

    return task, ("-alphaJ", "Jhat"), -1


def _sweep_d(cfg, dom, u):
    limit_j = energy(EnergyKind.Jd(), u, cfg.method)
    limit_t = energy(EnergyKind.JtildeD(), u, cfg.method)

    def task(a):
        t0 = time.perf_counter()
        return [_row(a, None, "J", energy(EnergyKind.J(a), u, cfg.method), limit_j, t0),
                _row(a, None, "Jtilde", energy(EnergyKind.Jtilde(a), u, cfg.method), limit_t, t0)]

    return task, ("J", "Jtilde"), +1


def _flow_rows(cfg, a, tr, ref, t0):
    gap = compare_trajectories(tr, ref)
    return [_row(a, None, "l2_gap", gap.l2, 0.0, t0),
            _row(a, None, "energy_gap", gap.energy, 0.0, t0),
            _row(a, None, "energy_increase", max(tr.max_energy_increase(), 0.0), 0.0, t0)]


def _flow(cfg, dom, u, kind_of, ref_of, toward):
    kinds = [kind_of(a) for a in cfg.alphas]
    tau = cfg.tau if cfg.tau is not None else min(default_tau(k, dom) for k in kinds)
    ref = ref_of(tau)

    def task(a):
        t0 = time.perf_counter()
        prob = FlowProblem(kind_of(a), u, cfg.T, tau, cfg.scheme, cfg.record_every, cfg.method)
        tr = solve(prob)
        return _flow_rows(cfg, a, tr, ref(tr.times) if callable(ref) else ref, t0)

    return task, ("l2_gap",), toward


def _mm_reference(cfg, u, kind, tau):
    return solve(FlowProblem(kind, u, cfg.T, tau, cfg.scheme, cfg.record_every, cfg.method))


def _fourier(cfg, dom, u):
    def task(a):
        t0 = time.perf_counter()
        return [_row(a, cfg.quad_n, "fourier_rel_error",
                     check_fourier_identity(a, 1, cfg.quad_n), 0.0, t0)]

    return task, (), 0


def _grad_kinds(a):
    return [EnergyKind.J(a), EnergyKind.J(a, -1), EnergyKind.Jhat(a), EnergyKind.G1(a),
            EnergyKind.J1(a), EnergyKind.Jtilde(a), EnergyKind.Jtilde(a, -1)]


def _grad_check(cfg, dom, u):
    rng = np.random.default_rng(cfg.seed)
    base = GridField(dom, rng.standard_normal(dom.n_cells))
    phi = GridField(dom, rng.standard_normal(dom.n_cells))
    ts = (1e-1, 1e-2, 1e-3)

    def rows_for(a, kind, t0):
        gc = gradient_check(kind, base, phi, ts, cfg.method)
        return [_row(a, t, f"defect:{kind}", dt, ex, t0)
                for t, dt, ex in zip(gc.t, gc.defect, gc.expected)]

    def task(a):
        t0 = time.perf_counter()
        out = []
        for kind in _grad_kinds(a):
            out += rows_for(a, kind, t0)
        return out

    def fixed():
        t0 = time.perf_counter()
        out = rows_for(0.0, EnergyKind.G1(0.0), t0) + rows_for(0.0, EnergyKind.Jhat0(), t0)
        for kind in (EnergyKind.Jd(), EnergyKind.Jd(-1), EnergyKind.JtildeD(), EnergyKind.JtildeD(-1)):
            out += rows_for(dom.dim, kind, t0)
        return out

    return task, fixed, ()


def _certify(cfg, dom, u):
    def cert_rows(a, kind, t0):
        c = certify(kind, dom)
        return [_row(a, None, f"lambda:{kind}", c.lambda_, 2 * c.witness_bound, t0)]

    def task(a):
        t0 = time.perf_counter()
        out = []
        for kind in (EnergyKind.J(a), EnergyKind.Jhat(a), EnergyKind.G1(a),
                     EnergyKind.J1(a), EnergyKind.Jtilde(a)):
            out += cert_rows(a, kind, t0)
        return out

    def fixed():
        t0 = time.perf_counter()
        return (cert_rows(0.0, EnergyKind.Jhat0(), t0) + cert_rows(dom.dim, EnergyKind.Jd(), t0)
                + cert_rows(dom.dim, EnergyKind.JtildeD(), t0))

    return task, fixed


def _counterexample(cfg, dom, u):
    d = dom.dim
    # largest n with h < 1/n, halving down to 2
    ns = []
    n = 2
    while dom.h < 1.0 / n and dom.contains_point((0.0,) * d):
        ns.append(n)
        n *= 2

    def task(a):
        t0 = time.perf_counter()
        out = []
        for m in ns:
            v = counterexample_sequence(m, dom)
            ln = math.log(m)
            out.append(_row(a, m, "norm_grid", v.norm(), counterexample_norm_exact(ln, d), t0))
            g1 = energy(EnergyKind.G1(a), v)
            exact = counterexample_g1_exact(ln, a) if d == 1 else math.nan
            out.append(_row(a, m, "G1_grid", g1, exact, t0))
        return out

    def diagonal():
        t0 = time.perf_counter()
        out = []
        for ln in cfg.log_ns:
            a = 1.0 / ln
            nrm = counterexample_norm_exact(ln, d)
            out.append(_row(a, ln, "norm_exact", nrm, nrm, t0))
            if d == 1:
                g = counterexample_g1_exact(ln, a)
                out.append(_row(a, ln, "G1_exact", g, g, t0))
        return out

    return task, diagonal


# ---------------------------------------------------------------------------
# checks


def _trend_check(report, quantity, direction):
    """Errors must shrink as alpha moves toward the limit.

    ``direction = -1``: limit at alpha -> 0; ``+1``: limit at alpha -> d.
    """
    rows = sorted(report.select(quantity), key=lambda r: r.alpha, reverse=direction < 0)
    errs = [r.abs_error for r in rows]
    ok = all(b < a for a, b in zip(errs, errs[1:])) if len(errs) > 1 else True
    report.checks.append((f"trend:{quantity}", ok, " ".join(f"{e:.3g}" for e in errs)))


def _tol_check(report, name, values, tol):
    worst = max(values) if values else 0.0
    report.checks.append((name, worst <= tol, f"max={worst:.3g} tol={tol:.3g}"))


def _finish_checks(cfg, report, trend, direction):
    exp = cfg.experiment
    for q in trend:
        _trend_check(report, q, direction)
    if exp.startswith("flow-"):
        norm2 = report.metadata["u0_norm2"]
        inc = [r.value for r in report.select("energy_increase")]
        _tol_check(report, "energy_monotone", inc, MONOTONE_TOL * max(norm2, 1e-300))
        if cfg.tol is not None:
            best = min((r.value for r in report.select("l2_gap")), default=0.0)
            report.checks.append(("l2_gap<=tol", best <= cfg.tol, f"best={best:.3g}"))
    elif exp in ("sweep-zero", "sweep-d"):
        if cfg.tol is not None:
            for q in trend:
                rows = report.select(q)
                if rows:
                    best = min(r.abs_error for r in rows)
                    report.checks.append((f"{q}<=tol", best <= cfg.tol, f"best={best:.3g}"))
    elif exp == "fourier-check":
        tol = cfg.tol or DEFAULT_TOL[exp]
        _tol_check(report, "fourier<=tol", [r.value for r in report.rows], tol)
    elif exp == "grad-check":
        tol = cfg.tol or DEFAULT_TOL[exp]
        rel = [r.abs_error / r.limit if r.limit > 0 else r.abs_error for r in report.rows]
        _tol_check(report, "gradient_defect_rel", rel, tol)
    elif exp == "certify":
        ok = all(r.value > r.limit for r in report.rows)
        report.checks.append(("lambda>2*witness", ok, f"{len(report.rows)} certificates"))
    elif exp == "counterexample":
        norms = {(r.alpha, r.param): r.value for r in report.rows if r.quantity.startswith("norm")}
        hits = [
            (r.alpha, r.param) for r in report.rows
            if r.quantity.startswith("G1") and r.value >= COUNTEREXAMPLE_G1_MIN
            and norms.get((r.alpha, r.param), math.inf) <= COUNTEREXAMPLE_NORM_MAX
        ]
        detail = f"first hit alpha={hits[0][0]:.4g} param={hits[0][1]:.4g}" if hits else "no hit"
        report.checks.append(("norm<=0.5 and G1>=10", bool(hits), detail))


# ---------------------------------------------------------------------------
# driver


def run(cfg: ExperimentConfig) -> SweepReport:
    """Run ``cfg`` and write the CSV / plot script if requested."""
    dom = build_config_domain(cfg)
    u = initial_data(cfg.u0, dom)
    exp = cfg.experiment
    meta = {
        "experiment": exp, "version": __version__, "d": dom.dim, "n": dom.n,
        "h": dom.h, "box": ";".join(f"{lo!r},{hi!r}" for lo, hi in cfg.box),
        "u0": cfg.u0, "sign": cfg.sign, "u0_norm2": u.norm() ** 2,
    }
    extra = None
    trend: tuple[str, ...] = ()
    direction = 0
    if exp == "sweep-zero":
        task, trend, direction = _sweep_zero(cfg, dom, u)
    elif exp == "sweep-d":
        task, trend, direction = _sweep_d(cfg, dom, u)
    elif exp == "flow-zero-scaled":
        task, trend, direction = _flow(
            cfg, dom, u, lambda a: OperatorKind("GradScaledJ", a),
            lambda tau: (lambda times: decay_trajectory(u, times)), -1)
    elif exp == "flow-zero-renorm":
        task, trend, direction = _flow(
            cfg, dom, u, lambda a: OperatorKind("GradJhat", a),
            lambda tau: _mm_reference(cfg, u, OperatorKind("Laplacian0"), tau), -1)
    elif exp == "flow-d-plain":
        task, trend, direction = _flow(
            cfg, dom, u, lambda a: OperatorKind("GradJ", a, cfg.sign),
            lambda tau: (lambda times: average_trajectory(u, times, cfg.sign)), +1)
    elif exp == "flow-d-renorm":
        task, trend, direction = _flow(
            cfg, dom, u, lambda a: OperatorKind("GradJtilde", a, cfg.sign),
            lambda tau: _mm_reference(cfg, u, OperatorKind("GradJtildeD", None, cfg.sign), tau), +1)
    elif exp == "fourier-check":
        task, trend, direction = _fourier(cfg, dom, u)
    elif exp == "grad-check":
        task, extra, trend = _grad_check(cfg, dom, u)
    elif exp == "certify":
        task, extra = _certify(cfg, dom, u)
    else:
        task, extra = _counterexample(cfg, dom, u)
    report = SweepReport([], meta)
    alphas = sorted(set(cfg.alphas))

    def guarded(fn, label):
        try:
            return fn()
        except (SolverError, QuadratureError, ArithmeticError) as exc:
            report.failures.append(f"{label}: {type(exc).__name__}: {exc}")
            return []

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(guarded, (lambda a=a: task(a)), f"alpha={a:g}") for a in alphas]
        rows = [r for f in futures for r in f.result()]
    if extra is not None:
        rows += guarded(extra, "fixed")
    for r in rows:
        if not (math.isfinite(r.value) and (math.isfinite(r.limit) or math.isnan(r.limit))):
            report.failures.append(f"alpha={r.alpha:g} {r.quantity}: non-finite value")
    report.rows = sorted((r for r in rows if math.isfinite(r.value)), key=lambda r: r.alpha)
    _finish_checks(cfg, report, trend, direction)
    if cfg.out:
        write_csv(report, cfg.out)
        if cfg.plot:
            write_plot_script(report, cfg.out, cfg.plot)
    elif cfg.plot:
        raise ConfigError("--plot needs --out")
    return report


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def csv_text(report: SweepReport) -> str:
    m = report.metadata
    lines = [
        f"# riesz-flow version={m['version']} experiment={m['experiment']}",
        f"# d={m['d']} n={m['n']} h={_fmt(m['h'])} box={m['box']} u0={m['u0']} sign={m['sign']}",
    ]
    for name, ok, detail in report.checks:
        lines.append(f"# check {name} {'PASS' if ok else 'FAIL'} {detail}")
    for msg in report.failures:
        lines.append(f"# failure {msg}")
    lines.append("#" + ",".join(CSV_COLUMNS))
    for r in report.rows:
        lines.append(",".join((_fmt(r.alpha), _fmt(r.param), r.quantity,
                               _fmt(r.value), _fmt(r.limit), _fmt(r.abs_error))))
    return "\n".join(lines) + "\n"


def write_csv(report: SweepReport, path) -> None:
    Path(path).write_text(csv_text(report))


def write_plot_script(report: SweepReport, csv_path, path) -> None:
    """gnuplot script plotting ``value`` against ``alpha`` per quantity."""
    quantities = list(dict.fromkeys(r.quantity for r in report.rows))
    name = Path(csv_path).name
    lines = [
        f"# gnuplot script for {name}",
        "set datafile separator ','",
        "set xlabel 'alpha'",
        "set ylabel 'value'",
        "set key outside",
        f"set title '{report.metadata['experiment']}'",
    ]
    parts = [
        f"'{name}' using 1:(strcol(3) eq '{q}' ? $4 : 1/0) with linespoints title '{q}'"
        for q in quantities
    ]
    lines.append("plot " + ", \\\n     ".join(parts) if parts else "# no rows")
    Path(path).write_text("\n".join(lines) + "\n")
