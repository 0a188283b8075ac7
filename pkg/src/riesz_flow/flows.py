"""Gradient flows ``u_t = -A u`` of the quadratic energies and their limits.

Two schemes are available.  Explicit Euler, ``u <- u - tau A u``, is the
cheap cross-check.  Minimizing movements solve ``(I + tau A) v = u`` at
every step, which is the Euler-Lagrange equation of
``min_v E(v) + ||v - u||^2 / (2 tau)`` with ``E(u) = <A u, u> / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SolverError
from .grid import GridField, inner_product, sphere_area
from .operators import OperatorKind, apply, certified_lambda, operator_bound

__all__ = [
    "FlowProblem",
    "FlowTrajectory",
    "TrajectoryGap",
    "average_trajectory",
    "closed_form_average",
    "closed_form_decay",
    "compare_trajectories",
    "conjugate_gradient",
    "decay_trajectory",
    "default_tau",
    "solve",
    "step",
]

SCHEMES = ("explicit-euler", "minimizing-movements")
CG_RTOL = 1e-10


def default_tau(kind: OperatorKind, domain) -> float:
    """``min(1e-3, 0.1 / lambda)`` for the certified ``lambda`` of ``kind``."""
    return min(1e-3, 0.1 / certified_lambda(kind, domain))


@dataclass(frozen=True, eq=False)
class FlowProblem:
    """Cauchy problem ``u_t = -grad(u)``, ``u(0) = u0`` on ``[0, T]``."""

    grad_kind: OperatorKind
    u0: GridField
    T: float
    tau: float
    scheme: str = "minimizing-movements"
    record_every: int = 1
    method: str | None = None
    lambda_: float = field(init=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InputError(f"scheme must be one of {SCHEMES}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise InputError("tau must be positive")
        if not (math.isfinite(self.T) and self.T >= self.tau):
            raise InputError("T must be >= tau")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InputError("record_every must be a positive integer")
        dom = self.u0.domain
        self.grad_kind.validate(dom.dim)
        lam = certified_lambda(self.grad_kind, dom)
        object.__setattr__(self, "lambda_", lam)
        if self.scheme == "minimizing-movements":
            if not self.tau * lam < 1:
                raise InputError(f"minimizing movements need tau * lambda < 1 (lambda = {lam:.6g})")
        else:
            bound = operator_bound(self.grad_kind, dom)
            if self.tau > 1 / (2 * bound):
                raise InputError(f"explicit Euler needs tau <= {1 / (2 * bound):.6g}")

    def step_sizes(self) -> np.ndarray:
        """Time steps covering ``[0, T]``; the last one is shortened if needed."""
        k = self.T / self.tau
        K = round(k)
        if abs(k - K) <= 1e-9 * max(k, 1.0):
            return np.full(K, self.tau)
        K = math.floor(k)
        return np.append(np.full(K, self.tau), self.T - K * self.tau)


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    """Recorded states of a flow.

    ``energies`` is the driving energy at the recorded times;
    ``step_energies`` holds it after every step (index 0 is ``u0``) and
    ``dissipation`` holds ``||u_{k+1} - u_k||^2 / tau_k`` per step.
    """

    times: np.ndarray
    states: list[GridField]
    energies: np.ndarray
    dissipation: np.ndarray = field(default_factory=lambda: np.zeros(0))
    step_energies: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def final(self) -> GridField:
        return self.states[-1]

    def max_energy_increase(self) -> float:
        """Largest step-to-step increase of the driving energy (<= 0 if monotone)."""
        e = self.step_energies if self.step_energies.size > 1 else self.energies
        if e.size < 2:
            return -math.inf
        return float(np.max(np.diff(e)))


def conjugate_gradient(matvec, b: GridField, x0: GridField | None = None,
                       rtol: float = CG_RTOL, maxiter: int | None = None) -> GridField:
    """Solve ``M x = b`` for self-adjoint positive-definite ``M`` on grid fields.

    Stops when ``||b - M x|| <= rtol ||b||`` in the L2 norm of the domain.

    Raises
    ------
    SolverError
        If the residual target is not met within ``maxiter`` (default ``10 N``)
        iterations, or a non-positive curvature is met.
    """
    dom = b.domain
    if maxiter is None:
        maxiter = 10 * dom.n_cells
    target = rtol * b.norm()
    if target == 0.0:
        return GridField.zeros(dom)
    x = b.values.copy() if x0 is None else x0.values.copy()
    r = b.values - matvec(x)
    p = r.copy()
    rr = float(np.dot(r, r))
    scale = dom.cell_volume
    for _ in range(maxiter + 1):
        if math.sqrt(rr * scale) <= target:
            return GridField(dom, x)
        Mp = matvec(p)
        curv = float(np.dot(p, Mp))
        if not curv > 0:
            raise SolverError("operator is not positive definite")
        a = rr / curv
        x += a * p
        r -= a * Mp
        rr_new = float(np.dot(r, r))
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise SolverError(f"conjugate gradient did not converge in {maxiter} iterations")


def _grad(problem: FlowProblem, values: np.ndarray) -> np.ndarray:
    return apply(problem.grad_kind, GridField(problem.u0.domain, values), problem.method).values


def _step(problem: FlowProblem, u: GridField, tau: float) -> GridField:
    if problem.scheme == "explicit-euler":
        return GridField(u.domain, u.values - tau * _grad(problem, u.values))

    def matvec(x):
        return x + tau * _grad(problem, x)

    return conjugate_gradient(matvec, u, x0=u)


def step(problem: FlowProblem, u: GridField) -> GridField:
    """Advance ``u`` by one step of size ``problem.tau``."""
    if u.domain != problem.u0.domain:
        raise InputError("state and problem live on different domains")
    return _step(problem, u, problem.tau)


def flow_energy(kind: OperatorKind, u: GridField, method=None) -> float:
    """Driving energy ``<A u, u> / 2`` of the flow ``u_t = -A u``."""
    return 0.5 * inner_product(apply(kind, u, method), u)


def solve(problem: FlowProblem) -> FlowTrajectory:
    """Integrate to ``T``, recording every ``record_every`` steps and at ``T``."""
    taus = problem.step_sizes()
    u = problem.u0
    t = 0.0
    times, states = [0.0], [u]
    step_e = [flow_energy(problem.grad_kind, u, problem.method)]
    rec_e = [step_e[0]]
    diss = []
    for k, tk in enumerate(taus, start=1):
        v = _step(problem, u, float(tk))
        diff = v - u
        diss.append(inner_product(diff, diff) / tk)
        u = v
        t = float(np.sum(taus[:k]))
        step_e.append(flow_energy(problem.grad_kind, u, problem.method))
        if k % problem.record_every == 0 or k == len(taus):
            times.append(t)
            states.append(u)
            rec_e.append(step_e[-1])
    return FlowTrajectory(np.array(times), states, np.array(rec_e), np.array(diss), np.array(step_e))


# ---------------------------------------------------------------------------
# limit dynamics


def closed_form_decay(u0: GridField, t: float, d: int | None = None) -> GridField:
    """Solution ``exp(-2 d omega_d t) u0`` of ``u_t = -2 d omega_d u``."""
    if not t >= 0:
        raise InputError("t must be nonnegative")
    d = u0.domain.dim if d is None else d
    if d != u0.domain.dim:
        raise InputError("d does not match the field's domain")
    return u0 * math.exp(-2 * sphere_area(d) * t)


def closed_form_average(u0: GridField, t: float, sign: int) -> GridField:
    """Solution of ``u_t = sign * 2 int u`` on the domain.

    The mean ``a(t) = int u`` obeys ``a' = 2 sign |Omega| a``, hence
    ``u(t) = u0 + (a0 / |Omega|)(exp(2 sign |Omega| t) - 1)``.
    """
    if not t >= 0:
        raise InputError("t must be nonnegative")
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    vol = u0.domain.volume
    shift = u0.integral() / vol * math.expm1(2 * sign * vol * t)
    return GridField(u0.domain, u0.values + shift)


def decay_trajectory(u0: GridField, times) -> FlowTrajectory:
    """:func:`closed_form_decay` sampled at ``times``; energy ``d omega_d ||u||^2``."""
    c = sphere_area(u0.domain.dim)
    states = [closed_form_decay(u0, float(t)) for t in times]
    return FlowTrajectory(np.asarray(times, float), states,
                          np.array([c * inner_product(s, s) for s in states]))


def average_trajectory(u0: GridField, times, sign: int) -> FlowTrajectory:
    """:func:`closed_form_average` sampled at ``times``; energy ``-sign (int u)^2``."""
    states = [closed_form_average(u0, float(t), sign) for t in times]
    return FlowTrajectory(np.asarray(times, float), states,
                          np.array([-sign * s.integral() ** 2 for s in states]))


@dataclass(frozen=True)
class TrajectoryGap:
    """Sup over recorded times of the L2 distance and of the energy gap."""

    l2: float
    energy: float


def compare_trajectories(a: FlowTrajectory, b: FlowTrajectory) -> TrajectoryGap:
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=1e-12, atol=1e-14):
        raise InputError("trajectories are recorded on different time grids")
    l2 = max((x - y).norm() for x, y in zip(a.states, b.states))
    de = float(np.max(np.abs(a.energies - b.energies)))
    return TrajectoryGap(float(l2), de)
