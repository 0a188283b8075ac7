"""First variations of the energies: potentials, the 0-fractional Laplacian
and the gradients driving the flows.

Signs are arranged so that every flow reads ``u_t = -grad(u)``.  For an
energy ``E(u) = <B u, u>`` with ``B`` self-adjoint the gradient is ``2 B u``,
so ``<grad(u), u> = 2 E(u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .convolve import make_plan, operator_norm_bound, plan_for
from .errors import InputError
from .functionals import CERT_MARGIN, EnergyKind, _half_offsets, _overlap, certify, energy
from .grid import Domain, GridField, inner_product, sphere_area
from .kernels import KernelSpec, KernelTable, build_table, ring_mass

__all__ = [
    "GradientCheck",
    "OperatorKind",
    "apply",
    "certified_lambda",
    "gradient_check",
    "gradient_of",
    "laplacian0_reference",
    "operator_bound",
]

_TAGS = (
    "RieszPotential", "Laplacian0", "LogPotential",
    "GradScaledJ", "GradJhat", "GradJ", "GradJtilde",
    # gradients of the remaining energies
    "GradJtildeD", "GradJd", "GradG1", "GradJ1",
)
_OPEN_ALPHA = ("RieszPotential", "GradScaledJ", "GradJhat", "GradJ", "GradJtilde")
_CLOSED_ALPHA = ("GradG1", "GradJ1")
_SIGNED = ("GradJ", "GradJtilde", "GradJtildeD", "GradJd")


@dataclass(frozen=True)
class OperatorKind:
    """Linear operator on grid fields; ``sign`` is used by the signed gradients."""

    tag: str
    alpha: float | None = None
    sign: int = 1

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise InputError(f"unknown operator {self.tag!r}")
        if self.sign not in (1, -1):
            raise InputError("sign must be +1 or -1")
        if self.tag in _OPEN_ALPHA + _CLOSED_ALPHA:
            if self.alpha is None:
                raise InputError(f"{self.tag} needs alpha")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise InputError(f"{self.tag} takes no alpha")
        if self.sign != 1 and self.tag not in _SIGNED:
            raise InputError(f"{self.tag} takes no sign")

    def validate(self, d: int) -> None:
        a = self.alpha
        if self.tag in _OPEN_ALPHA and not 0 < a < d:
            raise InputError(f"{self.tag} needs 0 < alpha < {d}, got {a}")
        if self.tag in _CLOSED_ALPHA and not 0 <= a < d:
            raise InputError(f"{self.tag} needs 0 <= alpha < {d}, got {a}")

    def __str__(self):
        parts = [f"{self.alpha:g}"] if self.alpha is not None else []
        if self.tag in _SIGNED:
            parts.append("+" if self.sign > 0 else "-")
        return self.tag + (f"({','.join(parts)})" if parts else "")


# ---------------------------------------------------------------------------
# convolution helpers


def _conv(spec: KernelSpec, u: GridField, method=None) -> np.ndarray:
    return plan_for(spec, u.domain, method).apply_values(u.values)


@lru_cache(maxsize=32)
def _short_range_plan(alpha: float, domain: Domain, method):
    """Plan for the truncated kernel on ``B_1`` with the origin weight removed."""
    table = build_table(KernelSpec.truncated(alpha, 1.0, domain.dim), domain)
    w = table.weights.copy()
    w[table.center] = 0.0
    return make_plan(KernelTable(table.spec, domain, w, table.tol), method)


def _short_range(alpha: float, u: GridField, method=None) -> np.ndarray:
    """``2 S u - 2 (w * u)``: the discrete symmetric-difference integral on ``B_1``."""
    dom = u.domain
    S = ring_mass(alpha, dom.dim, dom.h)
    return 2 * S * u.values - 2 * _short_range_plan(alpha, dom, method).apply_values(u.values)


def laplacian0_reference(u: GridField) -> GridField:
    """Direct per-offset evaluation of the discrete 0-fractional Laplacian.

    Sums ``w_o (2u(x) - u(x+o) - u(x-o))`` over all nonzero offsets,
    adds ``2 u(x)`` times the ring mass not covered by the offset table, and
    subtracts twice the tail convolution.  Slow; used to validate the
    convolution form in :func:`apply`.
    """
    dom = u.domain
    d, n = dom.dim, dom.n
    w = build_table(KernelSpec.truncated(0.0, 1.0, d), dom).weights
    U = u.full()
    out = np.zeros(dom.shape)
    covered = 0.0
    c = n - 1
    for o in _half_offsets(n, d):
        wo = w[tuple(c + k for k in o)]
        if wo == 0.0:
            continue
        covered += 2 * wo
        A, B = _overlap(o, n)
        # offsets o and -o both contribute w_o (2u(x) - u(x+o) - u(x-o));
        # x in A sees x+o in B, x in B sees x-o in A
        out += 4 * wo * U
        out[A] -= 2 * wo * U[B]
        out[B] -= 2 * wo * U[A]
    vol = dom.cell_volume
    rest = ring_mass(0.0, d, dom.h) - covered * vol
    first = out[dom.mask] * vol + 2 * rest * u.values
    return GridField(dom, first - 2 * _conv(KernelSpec.tail(0.0, d), u))


# ---------------------------------------------------------------------------
# application


def apply(kind: OperatorKind, u: GridField, method: str | None = None) -> GridField:
    """Apply ``kind`` to ``u``; the result lives on ``u.domain``."""
    dom = u.domain
    d = dom.dim
    kind.validate(d)
    tag, a, s = kind.tag, kind.alpha, kind.sign
    if tag == "RieszPotential":
        v = 2 * _conv(KernelSpec.riesz(a, d), u, method)
    elif tag == "LogPotential":
        v = 2 * _conv(KernelSpec.log(d), u, method)
    elif tag == "Laplacian0":
        v = _short_range(0.0, u, method) - 2 * _conv(KernelSpec.tail(0.0, d), u, method)
    elif tag == "GradScaledJ":
        v = a * 2 * _conv(KernelSpec.riesz(a, d), u, method)
    elif tag == "GradJhat":
        v = -2 * _conv(KernelSpec.riesz(a, d), u, method) + 2 * sphere_area(d) / a * u.values
    elif tag == "GradJ":
        v = -s * 2 * _conv(KernelSpec.riesz(a, d), u, method)
    elif tag == "GradJtilde":
        # the difference-quotient kernel equals (k^alpha - 1)/(d - alpha)
        v = -s * 2 * _conv(KernelSpec.diff_quotient(a, d), u, method)
    elif tag == "GradJtildeD":
        v = -s * 2 * _conv(KernelSpec.log(d), u, method)
    elif tag == "GradJd":
        v = np.full(u.values.shape, -s * 2 * u.integral())
    elif tag == "GradG1":
        v = _short_range(a, u, method)
    else:
        v = -2 * _conv(KernelSpec.tail(a, d), u, method)
    return GridField(dom, v)


def gradient_of(kind: EnergyKind) -> OperatorKind:
    """Operator whose application is the L2 gradient of ``kind``."""
    tag, a, s = kind.tag, kind.alpha, kind.sign
    if tag == "J":
        return OperatorKind("GradJ", a, s)
    if tag == "Jtilde":
        return OperatorKind("GradJtilde", a, s)
    if tag == "JtildeD":
        return OperatorKind("GradJtildeD", None, s)
    if tag == "Jd":
        return OperatorKind("GradJd", None, s)
    if s != 1:
        raise InputError(f"no signed gradient for {tag}")
    if tag == "Jhat":
        return OperatorKind("GradJhat", a)
    if tag == "Jhat0":
        return OperatorKind("Laplacian0")
    if tag == "G1":
        return OperatorKind("GradG1", a)
    return OperatorKind("GradJ1", a)


def operator_bound(kind: OperatorKind, domain: Domain) -> float:
    """Young-type upper bound on the L2 operator norm of ``kind``."""
    d = domain.dim
    kind.validate(d)
    tag, a = kind.tag, kind.alpha

    def l1(spec):
        return operator_norm_bound(build_table(spec, domain))

    if tag in ("RieszPotential", "GradJ"):
        return 2 * l1(KernelSpec.riesz(a, d))
    if tag == "GradScaledJ":
        return 2 * a * l1(KernelSpec.riesz(a, d))
    if tag == "GradJhat":
        return 2 * l1(KernelSpec.riesz(a, d)) + 2 * sphere_area(d) / a
    if tag in ("LogPotential", "GradJtildeD"):
        return 2 * l1(KernelSpec.log(d))
    if tag == "GradJtilde":
        return 2 * l1(KernelSpec.diff_quotient(a, d))
    if tag == "GradJd":
        return 2 * domain.volume
    if tag == "GradJ1":
        return 2 * l1(KernelSpec.tail(a, d))
    g = 4 * ring_mass(0.0 if tag == "Laplacian0" else a, d, domain.h)
    if tag == "GradG1":
        return g
    return g + 2 * l1(KernelSpec.tail(0.0, d))


def certified_lambda(kind: OperatorKind, domain: Domain) -> float:
    """``lambda`` with ``<A u, u> + lambda ||u||^2 >= 0`` for the operator ``A``.

    Taken from the convexity certificate of the energy ``E = <A u, u> / 2``.
    ``RieszPotential`` and ``LogPotential`` are the gradients of ``-J`` and
    ``-JtildeD``; ``GradScaledJ`` is the gradient of ``-alpha J``, which is
    nonnegative.
    """
    tag, a = kind.tag, kind.alpha
    if tag in ("RieszPotential", "GradScaledJ"):
        return CERT_MARGIN
    if tag == "LogPotential":
        return certify(EnergyKind.JtildeD(), domain).lambda_
    if tag == "GradJ" and kind.sign < 0:
        return CERT_MARGIN
    if tag == "GradJd" and kind.sign < 0:
        return CERT_MARGIN
    if tag == "Laplacian0":
        energy_kind = EnergyKind.Jhat0()
    else:
        energy_kind = EnergyKind(
            {"GradJhat": "Jhat", "GradJ": "J", "GradJtilde": "Jtilde", "GradJtildeD": "JtildeD",
             "GradJd": "Jd", "GradG1": "G1", "GradJ1": "J1"}[tag], a)
    return certify(energy_kind, domain).lambda_


# ---------------------------------------------------------------------------
# directional derivative check


@dataclass(frozen=True)
class GradientCheck:
    """Finite-difference defects ``|(E(u+t phi)-E(u))/t - <grad u, phi>|``.

    For a quadratic energy the defect equals ``t |E(phi)|``; ``expected``
    holds that value per ``t``.
    """

    t: np.ndarray
    difference_quotient: np.ndarray
    directional: float
    defect: np.ndarray
    expected: np.ndarray

    def slopes(self) -> np.ndarray:
        return self.defect / self.t

    def max_relative_error(self) -> float:
        scale = np.maximum(np.abs(self.expected), np.finfo(float).tiny)
        return float(np.max(np.abs(self.defect - self.expected) / scale))


def gradient_check(kind: EnergyKind, u: GridField, phi: GridField, t_list,
                   method: str | None = None) -> GradientCheck:
    """Compare difference quotients of ``kind`` with the gradient along ``phi``."""
    t = np.asarray(t_list, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(t <= 0):
        raise InputError("t_list must be a non-empty list of positive values")
    if np.any(np.diff(t) >= 0):
        raise InputError("t_list must be decreasing")
    if u.domain != phi.domain:
        raise InputError("u and phi live on different domains")
    e0 = energy(kind, u, method)
    directional = inner_product(apply(gradient_of(kind), u, method), phi)
    eq = np.array([(energy(kind, u + phi * float(tk), method) - e0) / tk for tk in t])
    ephi = abs(energy(kind, phi, method))
    return GradientCheck(t, eq, directional, np.abs(eq - directional), t * ephi)
