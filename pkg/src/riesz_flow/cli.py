"""``riesz-flow <experiment> [options]``.

Options may also come from a plain-text config file of ``key=value`` lines
(``--config path``); command-line flags override the file.  Keys are the
long option names with ``-`` or ``_``.

Exit status: 0 all checks passed, 1 usage error, 2 numeric failure,
3 a check missed its tolerance.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, InputError, QuadratureError, RieszFlowError, SolverError
from .experiments import (
    COLUMN_DOCS,
    EXIT_NUMERIC,
    EXIT_USAGE,
    EXPERIMENTS,
    ExperimentConfig,
    csv_text,
    run,
)

log = logging.getLogger("riesz_flow")


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so callers decide the exit status."""

    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _box(text: str) -> tuple[tuple[float, float], ...]:
    axes = []
    for part in text.split(";"):
        vals = _floats(part)
        if len(vals) != 2 or not vals[0] < vals[1]:
            raise argparse.ArgumentTypeError(f"box axis must be 'lo,hi' with lo < hi, got {part!r}")
        axes.append(vals)
    return tuple(axes)


def _sign(text: str) -> int:
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    if text.strip() not in table:
        raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")
    return table[text.strip()]


# key -> (converter, help); every key is both a flag and a config-file key
OPTIONS = {
    "d": (int, "dimension, 1 or 2 (default 1)"),
    "n": (int, "cells per axis (default 1024 for d=1, 128 for d=2)"),
    "box": (_box, "box as 'lo,hi' or 'lo,hi;lo,hi' (default unit box)"),
    "alphas": (_floats, "comma-separated alpha values"),
    "sign": (_sign, "sign of the signed energies, + or - (default +)"),
    "u0": (str, "initial datum: indicator, gaussian, twobump or a field file"),
    "tau": (float, "time step (default min(1e-3, 0.1/lambda))"),
    "T": (float, "final time (default 0.5)"),
    "tol": (float, "tolerance for the experiment's checks"),
    "scheme": (str, "minimizing-movements (default) or explicit-euler"),
    "record-every": (int, "record every k-th flow step (default 10)"),
    "workers": (int, "threads for the alpha sweep (default 1)"),
    "seed": (int, "seed for random fields (default 0)"),
    "quad-n": (int, "quadrature nodes for fourier-check (default 4096)"),
    "log-ns": (_floats, "log n values scanned by counterexample"),
    "out": (str, "CSV output path"),
    "plot": (str, "gnuplot script path (needs --out)"),
    "method": (str, "convolution method: direct or fft (default by size)"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="riesz-flow",
        description="Riesz energies, their limits as alpha -> 0 and alpha -> d, and their flows.",
        epilog=COLUMN_DOCS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("experiment", nargs="?", choices=EXPERIMENTS, default=None)
    p.add_argument("--config", help="key=value file; flags override it")
    for key, (conv, text) in OPTIONS.items():
        if key == "method":
            continue
        p.add_argument(f"--{key}", dest=key.replace("-", "_"), type=conv, help=text)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--direct", dest="method", action="store_const", const="direct",
                   help="force direct convolution")
    g.add_argument("--fft", dest="method", action="store_const", const="fft",
                   help="force FFT convolution")
    p.add_argument("-v", "--verbose", action="store_true", default=False)
    return p


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}")
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        norm = key.replace("_", "-")
        if norm == "experiment":
            if value not in EXPERIMENTS:
                raise ConfigError(f"{path}:{lineno}: unknown experiment {value!r}")
            values["experiment"] = value
            continue
        if norm not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        conv = OPTIONS[norm][0]
        try:
            values[norm.replace("-", "_")] = conv(value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return values


def parse_config(args: list[str], file=None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from flags and an optional file.

    ``file`` (or ``--config``) supplies defaults; flags take precedence.
    """
    ns = vars(build_parser().parse_args(args))
    ns.pop("verbose", None)
    if ns.get("experiment") is None:
        ns.pop("experiment", None)
    path = ns.pop("config", None) or file
    merged = read_config_file(path) if path else {}
    merged.update(ns)
    if "experiment" not in merged:
        raise ConfigError("an experiment is required")
    return ExperimentConfig(**merged)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(
        level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        cfg = parse_config(argv)
    except (ConfigError, InputError) as exc:
        print(f"riesz-flow: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run(cfg)
    except (ConfigError, InputError) as exc:
        print(f"riesz-flow: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, QuadratureError, ArithmeticError, RieszFlowError) as exc:
        print(f"riesz-flow: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for r in report.rows:
        log.info("alpha=%g %s value=%.10g limit=%.10g err=%.3g (%.0f ms)",
                 r.alpha, r.quantity, r.value, r.limit, r.abs_error, r.runtime_ms)
    for name, ok, detail in report.checks:
        print(f"{'PASS' if ok else 'FAIL'} {name} {detail}", file=sys.stderr)
    for msg in report.failures:
        print(f"FAIL {msg}", file=sys.stderr)
    if not cfg.out:
        sys.stdout.write(csv_text(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
