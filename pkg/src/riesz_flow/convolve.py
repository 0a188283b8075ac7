"""Discrete convolution of zero-extended grid fields with kernel tables.

For a field ``u`` on a domain and a table ``w`` the result at masked cell
``i`` is ``sum_j u_j w_{i-j} h^d`` over masked ``j``.  Two paths compute it:
direct summation (the reference) and zero-padded FFT.  Values outside the
domain are never returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal

from .errors import InputError
from .grid import Domain, GridField
from .kernels import KernelSpec, KernelTable, build_table

__all__ = [
    "ConvolutionPlan",
    "convolve",
    "make_plan",
    "operator_norm_bound",
    "plan_for",
]

DIRECT_MAX_N = 128


def _next_pow2(m: int) -> int:
    return 1 << (m - 1).bit_length()


@dataclass(frozen=True, eq=False)
class ConvolutionPlan:
    """Precomputed data for repeated convolutions with one table."""

    domain: Domain
    table: KernelTable
    method: str
    padded_size: tuple[int, ...] | None = None
    _kernel_hat: np.ndarray | None = field(default=None, repr=False)

    def apply_full(self, full: np.ndarray) -> np.ndarray:
        """Convolve a zero-extended box array; returns values on the whole box."""
        n = self.domain.n
        d = self.domain.dim
        w = self.table.weights
        axes = tuple(range(d))
        if self.method == "direct":
            conv = signal.convolve(full, w, mode="full", method="direct")
        else:
            conv = np.fft.irfftn(
                np.fft.rfftn(full, self.padded_size, axes) * self._kernel_hat,
                self.padded_size,
                axes,
            )
        sl = (slice(n - 1, 2 * n - 1),) * d
        return conv[sl] * self.domain.cell_volume

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Convolve masked-cell values; returns masked-cell values."""
        full = np.zeros(self.domain.shape)
        full[self.domain.mask] = values
        return self.apply_full(full)[self.domain.mask]


def make_plan(table: KernelTable, method: str | None = None) -> ConvolutionPlan:
    """Choose direct summation for ``n <= 128`` and FFT above, unless forced."""
    domain = table.domain
    n = domain.n
    if method is None:
        method = "direct" if n <= DIRECT_MAX_N else "fft"
    if method not in ("direct", "fft"):
        raise InputError(f"unknown convolution method {method!r}")
    if table.weights.shape != (2 * n - 1,) * domain.dim:
        raise InputError("table does not match the domain lattice")
    if method == "direct":
        return ConvolutionPlan(domain, table, "direct")
    padded = (_next_pow2(2 * n - 1),) * domain.dim
    khat = np.fft.rfftn(table.weights, padded, tuple(range(domain.dim)))
    return ConvolutionPlan(domain, table, "fft", padded, khat)


def convolve(plan: ConvolutionPlan, u: GridField) -> GridField:
    """``(u~ * k)`` restricted to the masked cells of ``plan.domain``."""
    if u.domain != plan.domain:
        raise InputError("field and plan live on different domains")
    return GridField(plan.domain, plan.apply_values(u.values))


def operator_norm_bound(table: KernelTable) -> float:
    """Young bound ``sum |w| h^d`` on the L2 operator norm of the convolution."""
    return table.l1_norm()


@lru_cache(maxsize=64)
def plan_for(spec: KernelSpec, domain: Domain, method: str | None = None,
             tol: float = 1e-10) -> ConvolutionPlan:
    """Cached plan for ``spec`` on ``domain``."""
    return make_plan(build_table(spec, domain, tol), method)
