"""Radial interaction kernels and their cell-averaged lattice tables.

Kernels are functions of ``r = |z|`` only:

============  ==========================================
riesz         ``r^(alpha-d)``
truncated     ``r^(alpha-d)`` for ``r <= R``, else 0
tail          ``r^(alpha-d)`` for ``r > 1``, else 0
log           ``log(1/r)``
diffquotient  ``(r^(alpha-d) - 1) / (d - alpha)``
constant      ``1``
============  ==========================================

A :class:`KernelTable` holds, for every lattice offset ``o`` in
``[-(n-1), n-1]^d``, the average of the kernel over the cell of width ``h``
centred at ``o*h``.  In one dimension the averages come from exact
antiderivatives.  In two dimensions the origin cell is integrated in polar
coordinates around an analytic inner disc, cells cut by a truncation circle
are integrated with the circle as an explicit integration limit, and all
other cells use adaptive tensor Gauss-Legendre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, QuadratureError
from .grid import Domain, ball_volume, gamma_fn, sphere_area

__all__ = [
    "KernelSpec",
    "KernelTable",
    "build_table",
    "check_fourier_identity",
    "eval_kernel",
    "fourier_constant",
    "fourier_lhs",
    "kernel_l1_truncated",
    "ring_mass",
    "taylor_defect",
]

ALPHA_MARGIN = 1e-3
MAX_DEPTH = 24

_KINDS = ("riesz", "truncated", "tail", "log", "diffquotient", "constant")


@dataclass(frozen=True)
class KernelSpec:
    """Symbolic radial kernel.

    Use the named constructors (:meth:`riesz`, :meth:`truncated`, ...);
    they validate the exponent range.
    """

    kind: str
    dim: int
    alpha: float | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown kernel kind {self.kind!r}")
        if self.dim not in (1, 2):
            raise InputError(f"kernels are implemented for d in (1, 2), got {self.dim}")
        d = self.dim
        a = self.alpha
        if self.kind in ("riesz", "diffquotient"):
            if a is None or not ALPHA_MARGIN <= a <= d - ALPHA_MARGIN:
                raise InputError(
                    f"{self.kind} kernel needs {ALPHA_MARGIN} <= alpha <= d - {ALPHA_MARGIN}, got {a}"
                )
        elif self.kind in ("truncated", "tail"):
            # alpha = 0 is allowed: the origin cell is then excluded
            if a is None or not 0 <= a < d:
                raise InputError(f"{self.kind} kernel needs 0 <= alpha < d, got {a}")
        if self.kind == "truncated" and not (self.radius is not None and self.radius > 0):
            raise InputError("truncated kernel needs a radius R > 0")

    @classmethod
    def riesz(cls, alpha, dim=1):
        return cls("riesz", dim, float(alpha))

    @classmethod
    def truncated(cls, alpha, radius, dim=1):
        return cls("truncated", dim, float(alpha), float(radius))

    @classmethod
    def tail(cls, alpha, dim=1):
        return cls("tail", dim, float(alpha))

    @classmethod
    def log(cls, dim=1):
        return cls("log", dim)

    @classmethod
    def diff_quotient(cls, alpha, dim=1):
        return cls("diffquotient", dim, float(alpha))

    @classmethod
    def constant(cls, dim=1):
        return cls("constant", dim)

    @property
    def singular(self) -> bool:
        return self.kind in ("riesz", "truncated", "log", "diffquotient")

    @property
    def cutoff(self) -> float | None:
        """Radius where the kernel jumps, if any."""
        if self.kind == "truncated":
            return self.radius
        if self.kind == "tail":
            return 1.0
        return None


# ---------------------------------------------------------------------------
# pointwise evaluation


def _radial(spec: KernelSpec, r: np.ndarray) -> np.ndarray:
    """Kernel value as a function of ``r > 0`` (ignores truncation)."""
    d = spec.dim
    if spec.kind in ("riesz", "truncated", "tail"):
        return r ** (spec.alpha - d)
    if spec.kind == "log":
        return -np.log(r)
    if spec.kind == "diffquotient":
        eps = d - spec.alpha
        return np.expm1(-eps * np.log(r)) / eps
    return np.ones_like(r)


def eval_kernel(spec: KernelSpec, z) -> float | np.ndarray:
    """Evaluate the kernel at a point (or at a stack of points).

    ``z`` is a scalar for ``d == 1`` or an array whose last axis has length
    ``d``.  Singular kernels raise at ``z == 0``.
    """
    z = np.asarray(z, dtype=float)
    if spec.dim == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        r = np.abs(z)
    else:
        if z.shape[-1] != spec.dim:
            raise InputError(f"point must have {spec.dim} coordinates")
        r = np.sqrt(np.sum(z**2, axis=-1))
    if spec.singular and np.any(r == 0):
        raise InputError(f"{spec.kind} kernel is singular at z = 0")
    with np.errstate(divide="ignore"):
        val = np.where(r > 0, _radial(spec, np.where(r > 0, r, 1.0)), 1.0)
    if spec.kind == "truncated":
        val = np.where(r <= spec.radius, val, 0.0)
    elif spec.kind == "tail":
        val = np.where(r > 1.0, val, 0.0)
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# exact radial primitives


def _powint(alpha: float, a, b):
    """``int_a^b r^(alpha-1) dr`` for ``0 <= a <= b``, stable as alpha -> 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if alpha == 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(b / a)
        return np.where(b > a, out, 0.0)
    with np.errstate(divide="ignore"):
        la = np.log(a)
        lb = np.log(b)
    ea = np.where(a > 0, np.expm1(alpha * np.where(a > 0, la, 0.0)), -1.0)
    eb = np.where(b > 0, np.expm1(alpha * np.where(b > 0, lb, 0.0)), -1.0)
    return (eb - ea) / alpha


def _line_primitive(spec: KernelSpec, a, b):
    """``int_a^b k(r) dr`` for ``0 <= a <= b`` in one dimension."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    kind = spec.kind
    if kind in ("riesz", "truncated", "tail"):
        return _powint(spec.alpha, a, b)
    if kind == "constant":
        return b - a
    if kind == "log":

        def prim(r):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(r > 0, r - r * np.log(r), 0.0)

        return prim(b) - prim(a)
    eps = 1.0 - spec.alpha

    def prim(r):
        with np.errstate(divide="ignore", invalid="ignore"):
            val = r * (np.expm1(-eps * np.log(r)) / eps + 1.0) / spec.alpha
        return np.where(r > 0, val, 0.0)

    return prim(b) - prim(a)


def _disk_primitive(spec: KernelSpec, rho):
    """``int_0^rho k(r) r dr`` in two dimensions (kernel without cutoff)."""
    rho = np.asarray(rho, dtype=float)
    kind = spec.kind
    if kind in ("riesz", "truncated"):
        return rho**spec.alpha / spec.alpha
    if kind == "constant":
        return rho**2 / 2
    if kind == "log":
        return rho**2 / 4 - rho**2 * np.log(rho) / 2
    if kind == "diffquotient":
        eps = 2.0 - spec.alpha
        return rho**2 * (2 * np.expm1(-eps * np.log(rho)) / eps + 1.0) / (2 * spec.alpha)
    raise InputError(f"no disk primitive for {kind}")


# ---------------------------------------------------------------------------
# Gauss-Legendre helpers

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(m: int):
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _gl_1d(f, a: float, b: float, m: int) -> float:
    x, w = _gl(m)
    half = (b - a) / 2
    return float(half * np.sum(w * f((a + b) / 2 + half * x)))


def _gl_converged(f, a: float, b: float, tol: float, m0: int = 16) -> float:
    """Gauss-Legendre on a smooth integrand, doubling the order until stable."""
    prev = _gl_1d(f, a, b, m0)
    m = m0
    while m <= 1024:
        m *= 2
        cur = _gl_1d(f, a, b, m)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureError("Gauss-Legendre order doubling did not converge")


def _tensor_gl(f, x0, x1, y0, y1, m=8):
    x, w = _gl(m)
    hx = (x1 - x0) / 2
    hy = (y1 - y0) / 2
    X = ((x0 + x1) / 2)[:, None, None] + hx[:, None, None] * x[None, :, None]
    Y = ((y0 + y1) / 2)[:, None, None] + hy[:, None, None] * x[None, None, :]
    vals = f(np.hypot(X, Y))
    return hx * hy * np.einsum("kij,i,j->k", vals, w, w)


def _adaptive_cells(f, x0, x1, y0, y1, tol):
    """Integrate radial ``f`` over many rectangles with dyadic refinement.

    A rectangle is accepted when its Gauss value and the sum over its four
    children agree to ``tol`` relative to the value plus the rectangle area.
    """
    x0, x1, y0, y1 = (np.asarray(v, dtype=float).copy() for v in (x0, x1, y0, y1))
    total = np.zeros(x0.size)
    owner = np.arange(x0.size)
    coarse = _tensor_gl(f, x0, x1, y0, y1)
    for _ in range(MAX_DEPTH):
        xm = (x0 + x1) / 2
        ym = (y0 + y1) / 2
        cx0 = np.concatenate([x0, xm, x0, xm])
        cx1 = np.concatenate([xm, x1, xm, x1])
        cy0 = np.concatenate([y0, y0, ym, ym])
        cy1 = np.concatenate([ym, ym, y1, y1])
        child = _tensor_gl(f, cx0, cx1, cy0, cy1)
        k = x0.size
        fine = child[:k] + child[k : 2 * k] + child[2 * k : 3 * k] + child[3 * k :]
        area = (x1 - x0) * (y1 - y0)
        ok = np.abs(fine - coarse) <= tol * (np.abs(fine) + area)
        np.add.at(total, owner[ok], fine[ok])
        if ok.all():
            return total
        bad = np.flatnonzero(~ok)
        sel = np.concatenate([bad, bad + k, bad + 2 * k, bad + 3 * k])
        x0, x1, y0, y1 = cx0[sel], cx1[sel], cy0[sel], cy1[sel]
        owner = np.tile(owner[bad], 4)
        coarse = child[sel]
    raise QuadratureError(f"cell quadrature did not reach tol={tol} within depth {MAX_DEPTH}")


def _disk_clipped(f, x0, x1, y0, y1, R, tol):
    """``int`` of radial ``f`` over ``[x0,x1] x [y0,y1]`` intersected with ``|z| <= R``.

    The chord ``|y| <= sqrt(R^2 - x^2)`` is used as the inner limit; the
    outer interval is split where the chord meets a cell edge, and pieces
    ending at ``x = +-R`` use ``x = +-(R - s^2)`` to remove the square-root
    endpoint.
    """
    cuts = {x0, x1}
    for yy in (y0, y1):
        if abs(yy) < R:
            s = math.sqrt(R * R - yy * yy)
            cuts.update((s, -s))
    cuts.update((R, -R))
    pts = sorted(p for p in cuts if x0 <= p <= x1)

    def g(x, m):
        # inner integral for an array of x
        c = np.sqrt(np.clip(R * R - x * x, 0.0, None))
        lo = np.maximum(y0, -c)
        hi = np.minimum(y1, c)
        length = np.clip(hi - lo, 0.0, None)
        t, w = _gl(m)
        Y = lo[:, None] + (length[:, None] / 2) * (t[None, :] + 1)
        vals = f(np.hypot(x[:, None], Y))
        return (length / 2) * (vals @ w)

    def piece(p, q, m):
        t, w = _gl(m)
        if math.isclose(q, R, rel_tol=0, abs_tol=1e-15 * max(1.0, R)):
            smax = math.sqrt(q - p)
            s = smax / 2 * (t + 1)
            return smax / 2 * np.sum(w * g(R - s * s, m) * 2 * s)
        if math.isclose(p, -R, rel_tol=0, abs_tol=1e-15 * max(1.0, R)):
            smax = math.sqrt(q - p)
            s = smax / 2 * (t + 1)
            return smax / 2 * np.sum(w * g(-R + s * s, m) * 2 * s)
        x = (p + q) / 2 + (q - p) / 2 * t
        return (q - p) / 2 * np.sum(w * g(x, m))

    def adaptive(p, q, depth):
        a = piece(p, q, 16)
        b = piece(p, q, 32)
        if abs(a - b) <= tol * (abs(b) + (q - p) * (y1 - y0)):
            return b
        if depth >= MAX_DEPTH:
            raise QuadratureError("clipped-cell quadrature did not converge")
        mid = (p + q) / 2
        return adaptive(p, mid, depth + 1) + adaptive(mid, q, depth + 1)

    return sum(adaptive(p, q, 0) for p, q in zip(pts[:-1], pts[1:]) if q > p)


# ---------------------------------------------------------------------------
# cell integrals


def _cell_integrals_1d(spec: KernelSpec, h: float, n: int) -> np.ndarray:
    o = np.arange(-(n - 1), n)
    lo = (o - 0.5) * h
    hi = (o + 0.5) * h
    straddle = (lo < 0) & (hi > 0)
    # radial pieces [a, b] (two pieces for the origin cell)
    a1 = np.where(straddle, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    b1 = np.where(straddle, -lo, np.maximum(np.abs(lo), np.abs(hi)))
    a2 = np.zeros_like(a1)
    b2 = np.where(straddle, hi, 0.0)

    def clip(a, b):
        if spec.kind == "truncated":
            R = spec.radius
            return np.minimum(a, R), np.minimum(b, R)
        if spec.kind == "tail":
            return np.maximum(a, 1.0), np.maximum(b, 1.0)
        return a, b

    out = np.zeros(o.shape)
    for a, b in ((a1, b1), (a2, b2)):
        a, b = clip(a, b)
        nz = b > a
        if spec.alpha == 0 and spec.kind == "truncated":
            nz &= a > 0
        out[nz] += _line_primitive(spec, a[nz], b[nz])
    if spec.alpha == 0 and spec.kind == "truncated":
        out[straddle] = 0.0
    return out


def _origin_cell_2d(spec: KernelSpec, h: float, tol: float) -> float:
    if spec.kind == "tail" or (spec.kind == "truncated" and spec.alpha == 0):
        return 0.0
    a = h / 2
    if spec.cutoff is not None and a * math.sqrt(2) > spec.cutoff:
        raise InputError("truncation radius is smaller than the origin cell")
    eps = h / 4
    inner = float(_disk_primitive(spec, eps))
    ball = 2 * math.pi * inner

    def integrand(theta):
        return _disk_primitive(spec, a / np.cos(theta)) - inner

    return ball + 8 * _gl_converged(integrand, 0.0, math.pi / 4, tol)


def _cell_integrals_2d(spec: KernelSpec, h: float, n: int, tol: float) -> np.ndarray:
    # unique offsets up to the 8-fold symmetry: n-1 >= i >= j >= 0
    ii, jj = np.tril_indices(n)
    x0 = (ii - 0.5) * h
    x1 = (ii + 0.5) * h
    y0 = (jj - 0.5) * h
    y1 = (jj + 0.5) * h
    vals = np.zeros(ii.size)
    origin = (ii == 0) & (jj == 0)

    # distances from the origin to each rectangle
    dmin = np.hypot(np.maximum(x0, 0.0), np.maximum(y0, 0.0))
    dmax = np.hypot(np.maximum(np.abs(x0), np.abs(x1)), np.maximum(np.abs(y0), np.abs(y1)))

    R = spec.cutoff
    f = lambda r: _radial(spec, r)  # noqa: E731
    if R is None:
        regular = ~origin
        straddle = np.zeros_like(origin)
    else:
        inside = dmax <= R
        outside = dmin >= R
        straddle = ~(inside | outside) & ~origin
        if spec.kind == "truncated":
            regular = inside & ~origin
        else:
            regular = outside & ~origin
    if regular.any():
        vals[regular] = _adaptive_cells(f, x0[regular], x1[regular], y0[regular], y1[regular], tol)
    if straddle.any():
        full = None
        if spec.kind == "tail":
            full = _adaptive_cells(
                f, x0[straddle], x1[straddle], y0[straddle], y1[straddle], tol
            )
        for k, idx in enumerate(np.flatnonzero(straddle)):
            clipped = _disk_clipped(f, x0[idx], x1[idx], y0[idx], y1[idx], R, tol)
            vals[idx] = clipped if spec.kind == "truncated" else full[k] - clipped
    vals[origin] = _origin_cell_2d(spec, h, tol)

    out = np.zeros((2 * n - 1, 2 * n - 1))
    c = n - 1
    for si in (-1, 1):
        for sj in (-1, 1):
            out[c + si * ii, c + sj * jj] = vals
            out[c + si * jj, c + sj * ii] = vals
    return out


@lru_cache(maxsize=64)
def _cell_averages(spec: KernelSpec, h: float, n: int, tol: float) -> np.ndarray:
    if spec.kind == "constant":
        w = np.ones((2 * n - 1,) * spec.dim)
    elif spec.dim == 1:
        w = _cell_integrals_1d(spec, h, n) / h
    else:
        w = _cell_integrals_2d(spec, h, n, tol) / h**2
    w.flags.writeable = False
    return w


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Cell-averaged kernel on the offset lattice ``[-(n-1), n-1]^d``.

    ``weights[o + (n-1)]`` approximates ``h^-d * int_{cell(o)} k``.  For the
    ``alpha = 0`` truncated kernel the origin cell is not integrable; its
    weight is stored as 0 and ``origin_excluded`` is set.
    """

    spec: KernelSpec
    domain: Domain
    weights: np.ndarray
    tol: float

    @property
    def origin_excluded(self) -> bool:
        return self.spec.kind == "truncated" and self.spec.alpha == 0

    @property
    def center(self) -> tuple[int, ...]:
        return (self.domain.n - 1,) * self.domain.dim

    def weight(self, offset) -> float:
        offset = np.atleast_1d(offset)
        return float(self.weights[tuple(int(o) + self.domain.n - 1 for o in offset)])

    def mass(self) -> float:
        """``sum(weights) * h^d``."""
        return float(np.sum(self.weights)) * self.domain.cell_volume

    def l1_norm(self) -> float:
        """``sum(|weights|) * h^d``."""
        return float(np.sum(np.abs(self.weights))) * self.domain.cell_volume


def build_table(spec: KernelSpec, domain: Domain, tol: float = 1e-10) -> KernelTable:
    """Cell-average ``spec`` on the offset lattice of ``domain``.

    Raises
    ------
    QuadratureError
        If an adaptive rule does not reach ``tol`` within 24 refinements.
    """
    if spec.dim != domain.dim:
        raise InputError(f"kernel dimension {spec.dim} != domain dimension {domain.dim}")
    if not tol > 0:
        raise InputError("tol must be positive")
    w = _cell_averages(spec, domain.h, domain.n, float(tol))
    return KernelTable(spec, domain, w, float(tol))


def ring_mass(alpha: float, d: int, h: float, radius: float = 1.0) -> float:
    """``int`` of ``|z|^(alpha-d)`` over ``B_radius`` minus the origin cell.

    Finite for every ``alpha >= 0``; this is the total weight of all nonzero
    lattice offsets of the truncated kernel.
    """
    a = h / 2
    if a * math.sqrt(d) >= radius:
        raise InputError("the origin cell must lie inside the ball")
    if d == 1:
        return float(2 * _powint(alpha, a, radius))
    if d == 2:

        def integrand(theta):
            return _powint(alpha, a / np.cos(theta), radius)

        return 8 * _gl_converged(integrand, 0.0, math.pi / 4, 1e-14)
    raise InputError("ring_mass is implemented for d in (1, 2)")


# ---------------------------------------------------------------------------
# kernel identities


def kernel_l1_truncated(alpha: float, R: float, d: int) -> float:
    """``||k^alpha_R||_L1 = d omega_d R^alpha / alpha``."""
    if not 0 < alpha < d:
        raise InputError(f"need 0 < alpha < d, got alpha={alpha}, d={d}")
    if not R > 0:
        raise InputError("R must be positive")
    return sphere_area(d) * R**alpha / alpha


def fourier_constant(alpha: float, d: int) -> float:
    """Constant ``c`` with ``F[k^alpha](xi) = c * |xi|^(-alpha)``."""
    if not 0 < alpha < d:
        raise InputError(f"need 0 < alpha < d, got alpha={alpha}, d={d}")
    return 2**alpha * math.pi ** (d / 2) * gamma_fn(alpha / 2) / gamma_fn((d - alpha) / 2)


def _half_line_power(p: float, scale: float, quad_n: int) -> float:
    """``int_0^inf exp(-s^p / scale) ds`` by composite Gauss-Legendre.

    Used after the substitution ``x = s^(1/beta)`` which turns
    ``int_0^inf g(x) x^(beta-1) dx`` into ``(1/beta) int_0^inf g(s^(1/beta)) ds``
    and removes the endpoint singularity.
    """
    smax = (800.0 * scale) ** (1.0 / p)

    def composite(nodes):
        panels = max(nodes // 16, 1)
        edges = np.linspace(0.0, smax, panels + 1)
        t, w = _gl(16)
        mid = (edges[:-1] + edges[1:]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        s = mid[:, None] + half[:, None] * t[None, :]
        return float(np.sum(half[:, None] * w[None, :] * np.exp(-(s**p) / scale)))

    prev = composite(quad_n)
    nodes = quad_n
    for _ in range(6):
        nodes *= 2
        cur = composite(nodes)
        if abs(cur - prev) <= 1e-14 * abs(cur):
            return cur
        prev = cur
    raise QuadratureError("Fourier-side quadrature did not converge")


def check_fourier_identity(alpha: float, d: int = 1, quad_n: int = 4096) -> float:
    """Relative mismatch between the two sides of the Parseval check.

    With ``phi(x) = exp(-|x|^2)``, compares ``L = int phi k^alpha`` against
    ``(2 pi)^-d c(alpha, d) int F[phi](xi) |xi|^-alpha d xi``; both are
    computed by quadrature.
    """
    if d != 1:
        raise InputError("the Fourier check is implemented for d = 1")
    if not 0 < alpha < 1:
        raise InputError("need 0 < alpha < 1")
    if quad_n < 16:
        raise InputError("quad_n must be at least 16")
    lhs = fourier_lhs(alpha, quad_n)
    beta = 1.0 - alpha
    # int_R sqrt(pi) exp(-xi^2/4) |xi|^-alpha, substituted xi = s^(1/beta)
    rhs_integral = 2 * math.sqrt(math.pi) / beta * _half_line_power(2.0 / beta, 4.0, quad_n)
    rhs = fourier_constant(alpha, 1) * rhs_integral / (2 * math.pi)
    return abs(lhs - rhs) / abs(lhs)


def fourier_lhs(alpha: float, quad_n: int = 4096) -> float:
    """``int_R exp(-x^2) |x|^(alpha-1) dx`` by quadrature (equals Gamma(alpha/2))."""
    return 2.0 / alpha * _half_line_power(2.0 / alpha, 1.0, quad_n)


def taylor_defect(alpha: float, z_abs: float, d: int = 1) -> float:
    """Normalised remainder of ``(k^alpha - 1)/(d - alpha) -> log(1/|z|)``.

    Returns ``|k~^alpha(z) - log(1/|z|)| / ((d - alpha) log^2(1/|z|))``,
    which equals ``(e^x - 1 - x)/x^2`` with ``x = (d - alpha) log(1/|z|)``.
    """
    if not 0 < alpha < d:
        raise InputError(f"need 0 < alpha < d, got {alpha}")
    if not 0 < z_abs <= 1:
        raise InputError("z_abs must lie in (0, 1]")
    if z_abs == 1:
        return 0.0
    x = (d - alpha) * math.log(1.0 / z_abs)
    if abs(x) < 1e-3:
        return abs(0.5 + x / 6 + x * x / 24 + x**3 / 120)
    return abs((math.expm1(x) - x) / (x * x))
