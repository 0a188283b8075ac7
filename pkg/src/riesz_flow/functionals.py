"""Riesz interaction energies, their renormalisations and limit energies.

Every energy is a quadratic form in the zero-extended field ``u~``:

* ``J``       ``-<u~, u~ * k^alpha>``
* ``Jhat``    ``J + (d omega_d / alpha) ||u||^2``
* ``G1``      ``1/2 iint_{|x-y|<=1} |u~(x)-u~(y)|^2 k^alpha``   (alpha >= 0)
* ``J1``      ``-<u~, u~ * k^alpha 1_{|z|>1}>``                 (alpha >= 0)
* ``Jhat0``   ``G1(0) + J1(0)``
* ``Jd``      ``-(int u)^2``
* ``Jtilde``  ``(J - Jd) / (d - alpha)``
* ``JtildeD`` ``-<u~, u~ * log(1/|z|)>``

``Jhat = G1 + J1`` holds for the discrete versions too: ``G1`` uses the
cell averages of ``k^alpha`` restricted to the unit ball and ``J1`` the
averages of the complementary tail, so the two tables add up to the full
kernel table offset by offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolve import operator_norm_bound, plan_for
from .errors import InputError
from .grid import Domain, GridField, ball_volume, inner_product, sphere_area
from .kernels import KernelSpec, build_table, ring_mass

__all__ = [
    "ConvexityCertificate",
    "EnergyKind",
    "certify",
    "counterexample_g1_exact",
    "counterexample_norm_exact",
    "counterexample_sequence",
    "energy",
    "h00_norm",
]

DIVERGED = 1e300

_TAGS = ("J", "Jhat", "G1", "J1", "Jhat0", "Jd", "Jtilde", "JtildeD")
_NEEDS_ALPHA = ("J", "Jhat", "G1", "J1", "Jtilde")


@dataclass(frozen=True)
class EnergyKind:
    """Which energy to evaluate, with its exponent and a sign multiplier."""

    tag: str
    alpha: float | None = None
    sign: int = 1

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise InputError(f"unknown energy {self.tag!r}")
        if self.sign not in (1, -1):
            raise InputError("sign must be +1 or -1")
        if self.tag in _NEEDS_ALPHA:
            if self.alpha is None:
                raise InputError(f"{self.tag} needs alpha")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise InputError(f"{self.tag} takes no alpha")

    def validate(self, d: int) -> None:
        a = self.alpha
        if self.tag in ("J", "Jhat", "Jtilde") and not 0 < a < d:
            raise InputError(f"{self.tag} needs 0 < alpha < {d}, got {a}")
        if self.tag in ("G1", "J1") and not 0 <= a < d:
            raise InputError(f"{self.tag} needs 0 <= alpha < {d}, got {a}")

    def __str__(self):
        s = "-" if self.sign < 0 else ""
        return f"{s}{self.tag}" + (f"({self.alpha:g})" if self.alpha is not None else "")

    @classmethod
    def J(cls, alpha, sign=1):
        return cls("J", alpha, sign)

    @classmethod
    def Jhat(cls, alpha, sign=1):
        return cls("Jhat", alpha, sign)

    @classmethod
    def G1(cls, alpha, sign=1):
        return cls("G1", alpha, sign)

    @classmethod
    def J1(cls, alpha, sign=1):
        return cls("J1", alpha, sign)

    @classmethod
    def Jhat0(cls, sign=1):
        return cls("Jhat0", None, sign)

    @classmethod
    def Jd(cls, sign=1):
        return cls("Jd", None, sign)

    @classmethod
    def Jtilde(cls, alpha, sign=1):
        return cls("Jtilde", alpha, sign)

    @classmethod
    def JtildeD(cls, sign=1):
        return cls("JtildeD", None, sign)


# ---------------------------------------------------------------------------
# building blocks


def _pairing(spec: KernelSpec, u: GridField, method=None) -> float:
    """``<u~, u~ * k>`` for the table of ``spec``."""
    plan = plan_for(spec, u.domain, method)
    return inner_product(u, GridField(u.domain, plan.apply_values(u.values)))


def _half_offsets(n: int, d: int):
    """Nonzero offsets in ``[-(n-1), n-1]^d`` that are lexicographically positive."""
    if d == 1:
        for o in range(1, n):
            yield (o,)
        return
    for o0 in range(0, n):
        for o1 in range(-(n - 1), n):
            if o0 > 0 or o1 > 0:
                yield (o0, o1)


def _overlap(o: tuple[int, ...], n: int):
    """Slices ``A`` and ``B`` with ``B`` the ``A``-cells shifted by ``o``."""
    a, b = [], []
    for k in o:
        if k >= 0:
            a.append(slice(0, n - k))
            b.append(slice(k, n))
        else:
            a.append(slice(-k, n))
            b.append(slice(0, n + k))
    return tuple(a), tuple(b)


def gagliardo_parts(alpha: float, u: GridField) -> tuple[float, float]:
    """Return the interior and exterior parts of the discrete ``G1``.

    The interior part is the direct double sum
    ``sum_{pairs i,j in domain} (u_i - u_j)^2 w_{i-j} h^{2d}`` over unordered
    pairs at nonzero offsets.  The exterior part collects pairs with one
    cell outside the domain, ``sum_i u_i^2 h^d m_i`` with ``m_i`` the kernel
    mass of the cells outside the domain within unit distance.
    """
    dom = u.domain
    d, n, h = dom.dim, dom.n, dom.h
    w = build_table(KernelSpec.truncated(alpha, 1.0, d), dom).weights
    U = u.full()
    M = dom.mask.astype(float)
    inside_mass = np.zeros(dom.shape)
    pair = 0.0
    c = n - 1
    vol = dom.cell_volume
    # huge fields overflow to inf, which _g1 reports as divergence
    with np.errstate(over="ignore", invalid="ignore"):
        for o in _half_offsets(n, d):
            wo = w[tuple(c + k for k in o)]
            if wo == 0.0:
                continue
            A, B = _overlap(o, n)
            both = M[A] * M[B]
            diff = U[A] - U[B]
            pair += wo * float(np.sum(diff * diff * both))
            inside_mass[A] += wo * both
            inside_mass[B] += wo * both
        outside = ring_mass(alpha, d, h) - inside_mass[dom.mask] * vol
        exterior = float(np.sum(u.values**2 * outside)) * vol
    return pair * vol * vol, exterior


def _g1(alpha: float, u: GridField) -> float:
    interior, exterior = gagliardo_parts(alpha, u)
    val = interior + exterior
    return math.inf if val > DIVERGED else val


def energy(kind: EnergyKind, u: GridField, method: str | None = None) -> float:
    """Evaluate ``kind`` on ``u``.

    ``G1`` (and hence ``Jhat0``) returns ``math.inf`` when the double sum
    exceeds 1e300 instead of raising.
    """
    dom = u.domain
    d = dom.dim
    kind.validate(d)
    tag, a = kind.tag, kind.alpha
    if tag == "J":
        val = -_pairing(KernelSpec.riesz(a, d), u, method)
    elif tag == "Jhat":
        val = -_pairing(KernelSpec.riesz(a, d), u, method) + sphere_area(d) / a * inner_product(u, u)
    elif tag == "G1":
        val = _g1(a, u)
    elif tag == "J1":
        val = -_pairing(KernelSpec.tail(a, d), u, method)
    elif tag == "Jhat0":
        val = _g1(0.0, u) - _pairing(KernelSpec.tail(0.0, d), u, method)
    elif tag == "Jd":
        val = -u.integral() ** 2
    elif tag == "Jtilde":
        val = -_pairing(KernelSpec.diff_quotient(a, d), u, method)
    else:
        val = -_pairing(KernelSpec.log(d), u, method)
    return kind.sign * val


def h00_norm(u: GridField) -> float:
    """``||u||_L2 + sqrt(2 G1(0)(u))``; infinite if ``G1(0)`` diverged."""
    g = _g1(0.0, u)
    if math.isinf(g):
        return math.inf
    return u.norm() + math.sqrt(2 * max(g, 0.0))


# ---------------------------------------------------------------------------
# convexity certificates


@dataclass(frozen=True)
class ConvexityCertificate:
    """``F + (lambda/2)||.||^2`` is nonnegative / convex.

    ``witness_bound`` is the constant ``C`` with ``|F(u)| <= C ||u||^2``
    used to derive ``lambda = 2 C (1 + margin)``.
    """

    lambda_: float
    kind: str
    witness_bound: float


CERT_MARGIN = 0.01


def certify(kind: EnergyKind, domain: Domain, mode: str = "positivity") -> ConvexityCertificate:
    """Certified ``lambda`` for which ``kind`` is lambda-positive and lambda-convex.

    For quadratic energies the two notions coincide, so ``mode`` only
    labels the certificate.  ``G1`` is nonnegative; it gets a zero witness
    and the smallest certificate ``lambda = CERT_MARGIN``.
    """
    if mode not in ("positivity", "convexity"):
        raise InputError("mode must be 'positivity' or 'convexity'")
    d = domain.dim
    kind.validate(d)
    tag, a = kind.tag, kind.alpha
    if tag == "J":
        bound = operator_norm_bound(build_table(KernelSpec.riesz(a, d), domain))
    elif tag in ("Jhat", "J1", "Jhat0", "Jd"):
        bound = domain.volume
    elif tag == "G1":
        return ConvexityCertificate(CERT_MARGIN, mode, 0.0)
    elif tag == "Jtilde":
        bound = operator_norm_bound(build_table(KernelSpec.diff_quotient(a, d), domain))
    else:
        bound = operator_norm_bound(build_table(KernelSpec.log(d), domain))
    return ConvexityCertificate(2 * bound * (1 + CERT_MARGIN), mode, bound)


# ---------------------------------------------------------------------------
# the v_n sequence


def counterexample_sequence(n: int, domain: Domain) -> GridField:
    """``v_n = n^{d/2} / log(n)^{1/4} * indicator(B_{1/n}(0))`` on the grid."""
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    d = domain.dim
    if not domain.contains_point((0.0,) * d):
        raise InputError("the origin must lie in the domain")
    if not domain.h < 1.0 / n:
        raise InputError(f"grid does not resolve B_(1/{n}): need h < {1.0 / n}")
    amp = n ** (d / 2) / math.log(n) ** 0.25
    r2 = np.sum(domain.centers() ** 2, axis=1)
    return GridField(domain, np.where(r2 < (1.0 / n) ** 2, amp, 0.0))


def counterexample_norm_exact(log_n: float, d: int = 1) -> float:
    """Exact ``||v_n||_L2 = (omega_d / sqrt(log n))^{1/2}``; takes ``log n``."""
    if not log_n > 0:
        raise InputError("log n must be positive")
    return math.sqrt(ball_volume(d) / math.sqrt(log_n))


def counterexample_g1_exact(log_n: float, alpha: float) -> float:
    """Exact ``G1(alpha)(v_n)`` in one dimension, as a function of ``log n``.

    For ``v = A * indicator(-r, r)`` with ``2r <= 1``,
    ``G1 = (2 A^2 / alpha) (2r - (2r)^(alpha+1)/(alpha+1))``, and
    ``A^2 = n / sqrt(log n)``, ``r = 1/n``.  Taking ``log n`` keeps the
    formula usable far beyond any grid resolution.
    """
    if not log_n >= math.log(2):
        raise InputError("need n >= 2")
    if not alpha >= 0:
        raise InputError("alpha must be nonnegative")
    L = log_n - math.log(2)  # log(1/(2r))
    if alpha == 0:
        core = 1.0 + L
    else:
        core = (alpha - math.expm1(-alpha * L)) / (alpha * (1.0 + alpha))
    return 4.0 * core / math.sqrt(log_n)
