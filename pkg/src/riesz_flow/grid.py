"""Uniform cell grids on bounded sets, grid functions and shared constants.

A :class:`Domain` is a box split into ``n`` cells per axis together with a
boolean mask selecting the cells whose centers lie in the set.  A
:class:`GridField` stores one value per masked cell; everywhere else it is
zero, which is how the zero extension of a function on the set is
represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import EmptyDomainError, InputError

__all__ = [
    "Ball",
    "CellList",
    "Domain",
    "FullBox",
    "GridField",
    "ball_volume",
    "build_domain",
    "gamma_fn",
    "inner_product",
    "load_field",
    "save_field",
]


# ---------------------------------------------------------------------------
# shape descriptors


@dataclass(frozen=True)
class FullBox:
    """Every cell of the bounding box."""


@dataclass(frozen=True)
class Ball:
    """Cells whose centers satisfy ``|x - center| < radius``."""

    center: tuple[float, ...]
    radius: float


@dataclass(frozen=True)
class CellList:
    """Explicit list of multi-indices (row-major axis order)."""

    indices: tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# Domain


@dataclass(frozen=True, eq=False)
class Domain:
    """Cell-centred discretisation of a bounded open set.

    Attributes
    ----------
    dim : int
        Space dimension, 1 or 2.
    lower, upper : tuple of float
        Bounding box corners.
    n : int
        Cells per axis.
    mask : ndarray of bool, shape ``(n,) * dim``
        Selected cells.  The array is read-only.
    """

    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    n: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        object.__setattr__(
            self, "_key", (self.dim, self.lower, self.upper, self.n, mask.tobytes())
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Domain):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / self.n for lo, hi in zip(self.lower, self.upper))

    @property
    def h(self) -> float:
        """Common cell width; raises if the cells are not cubes."""
        sp = self.spacing
        if any(not math.isclose(s, sp[0], rel_tol=1e-12) for s in sp):
            raise InputError("anisotropic cells are not supported here")
        return sp[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def n_cells(self) -> int:
        return int(self.mask.sum())

    @property
    def volume(self) -> float:
        """Measure of the discrete set, ``n_cells * h^d``."""
        return self.n_cells * self.cell_volume

    def axes(self) -> list[np.ndarray]:
        """Cell-center coordinates along each axis."""
        return [
            lo + (np.arange(self.n) + 0.5) * s
            for lo, s in zip(self.lower, self.spacing)
        ]

    def centers(self) -> np.ndarray:
        """Masked cell centers, shape ``(n_cells, dim)``, row-major order."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([g[self.mask] for g in grids], axis=-1)

    @cached_property
    def diam(self) -> float:
        """Diameter of the union of masked cells."""
        return _union_diameter(self)

    def contains_point(self, x: Sequence[float]) -> bool:
        """True if ``x`` lies in the closure of a masked cell."""
        idx = []
        for xi, lo, s in zip(x, self.lower, self.spacing):
            k = math.floor((xi - lo) / s)
            if k == self.n and math.isclose(xi, lo + self.n * s):
                k -= 1
            if not 0 <= k < self.n:
                return False
            idx.append(k)
        return bool(self.mask[tuple(idx)])


def _union_diameter(domain: Domain) -> float:
    sp = np.asarray(domain.spacing)
    centers = domain.centers()
    if domain.dim == 1:
        return float(centers.max() - centers.min() + sp[0])
    corners = np.concatenate(
        [centers + sp * np.array([sx, sy]) / 2 for sx in (-1, 1) for sy in (-1, 1)]
    )
    try:
        pts = corners[ConvexHull(corners).vertices]
    except QhullError:
        pts = corners
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def build_domain(dim: int, box, n: int, mask_spec=FullBox()) -> Domain:
    """Discretise ``box`` with ``n`` cells per axis and select cells.

    Parameters
    ----------
    dim : int
        1 or 2.
    box : sequence
        ``(lo, hi)`` for ``dim == 1``, or one ``(lo, hi)`` pair per axis.
    n : int
        Cells per axis, at least 2.
    mask_spec : FullBox, Ball or CellList
        Which cells belong to the set.
    """
    if dim not in (1, 2):
        raise InputError(f"dim must be 1 or 2, got {dim}")
    if int(n) != n or n < 2:
        raise InputError("n >= 2 required")
    n = int(n)
    box = np.asarray(box, dtype=float)
    if box.shape == (2,):
        box = np.tile(box, (dim, 1))
    if box.shape != (dim, 2):
        raise InputError(f"box must give (lo, hi) for each of {dim} axes")
    if not np.all(np.isfinite(box)):
        raise InputError("box bounds must be finite")
    if np.any(box[:, 1] <= box[:, 0]):
        raise InputError("box must have positive extent on every axis")
    lower = tuple(float(v) for v in box[:, 0])
    upper = tuple(float(v) for v in box[:, 1])

    if isinstance(mask_spec, FullBox):
        mask = np.ones((n,) * dim, dtype=bool)
    elif isinstance(mask_spec, Ball):
        c = np.asarray(mask_spec.center, dtype=float).reshape(dim)
        axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi in box]
        grids = np.meshgrid(*axes, indexing="ij")
        r2 = sum((g - ci) ** 2 for g, ci in zip(grids, c))
        mask = r2 < mask_spec.radius**2
    elif isinstance(mask_spec, CellList):
        mask = np.zeros((n,) * dim, dtype=bool)
        for idx in mask_spec.indices:
            idx = tuple(int(i) for i in np.atleast_1d(idx))
            if len(idx) != dim or not all(0 <= i < n for i in idx):
                raise InputError(f"cell index {idx} outside the {n}^{dim} grid")
            mask[idx] = True
    else:
        raise InputError(f"unknown shape descriptor {mask_spec!r}")

    if not mask.any():
        raise EmptyDomainError("empty domain")
    return Domain(dim, lower, upper, n, mask)


# ---------------------------------------------------------------------------
# GridField


@dataclass(frozen=True, eq=False)
class GridField:
    """Real function on the masked cells of a domain, zero elsewhere."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != self.domain.n_cells:
            raise InputError(
                f"expected {self.domain.n_cells} values, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise InputError("field values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, domain: Domain) -> "GridField":
        return cls(domain, np.zeros(domain.n_cells))

    @classmethod
    def indicator(cls, domain: Domain) -> "GridField":
        return cls(domain, np.ones(domain.n_cells))

    @classmethod
    def from_function(cls, domain: Domain, f: Callable) -> "GridField":
        """Sample ``f`` at masked cell centers; ``f`` gets an ``(N, d)`` array."""
        return cls(domain, np.asarray(f(domain.centers()), dtype=float))

    @classmethod
    def from_full(cls, domain: Domain, array: np.ndarray) -> "GridField":
        """Restrict a full-box array to the masked cells."""
        return cls(domain, np.asarray(array)[domain.mask])

    def full(self) -> np.ndarray:
        """Zero-extended values on the whole box, shape ``domain.shape``."""
        out = np.zeros(self.domain.shape)
        out[self.domain.mask] = self.values
        return out

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.domain.cell_volume

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self), 0.0))

    def _check(self, other: "GridField"):
        if self.domain != other.domain:
            raise InputError("fields live on different domains")

    def __add__(self, other):
        self._check(other)
        return GridField(self.domain, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridField(self.domain, self.values - other.values)

    def __mul__(self, c):
        return GridField(self.domain, float(c) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return GridField(self.domain, self.values / float(c))

    def __neg__(self):
        return GridField(self.domain, -self.values)


def inner_product(u: GridField, v: GridField) -> float:
    """Midpoint-rule L2 pairing over the masked cells.

    The reduction is numpy's pairwise summation, so repeated calls on the
    same data give bit-identical results.
    """
    if u.domain != v.domain:
        raise InputError("fields live on different domains")
    return float(np.sum(u.values * v.values)) * u.domain.cell_volume


# ---------------------------------------------------------------------------
# special functions

# g = 7, 9-term Lanczos coefficients (Godfrey).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def gamma_fn(x: float) -> float:
    """Euler Gamma function for ``x > 0`` (Lanczos approximation).

    Arguments below 1/2 are shifted up with ``Gamma(x) = Gamma(x+1)/x``;
    the negative axis is not supported.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise InputError(f"gamma_fn requires x > 0, got {x}")
    if x < 0.5:
        return gamma_fn(x + 1.0) / x
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.exp(_LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t) * acc


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    if int(d) != d or d <= 0:
        raise InputError(f"dimension must be a positive integer, got {d}")
    return math.pi ** (d / 2) / gamma_fn(d / 2 + 1)


def sphere_area(d: int) -> float:
    """Surface measure ``d * omega_d`` of the unit sphere."""
    return d * ball_volume(d)


# ---------------------------------------------------------------------------
# text format


def _header(domain: Domain) -> str:
    n = ",".join(str(domain.n) for _ in range(domain.dim))
    box = ";".join(
        f"{lo!r},{hi!r}" for lo, hi in zip(domain.lower, domain.upper)
    )
    return f"# d={domain.dim} n={n} box={box}"


def save_field(path, u: GridField) -> None:
    """Write ``u`` as text: one header line, then one value per masked cell."""
    lines = [_header(u.domain)]
    lines.extend(format(v, ".17g") for v in u.values)
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header(line: str):
    if not line.startswith("#"):
        raise InputError("field file must start with a '# d=... n=... box=...' line")
    parts = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
    try:
        d = int(parts["d"])
        ns = [int(s) for s in parts["n"].split(",")]
        box = [tuple(float(s) for s in ax.split(",")) for ax in parts["box"].split(";")]
    except (KeyError, ValueError) as exc:
        raise InputError(f"bad field header {line!r}") from exc
    if len(ns) != d or len(box) != d or any(len(b) != 2 for b in box):
        raise InputError(f"inconsistent field header {line!r}")
    if len(set(ns)) != 1:
        raise InputError("only equal cell counts per axis are supported")
    return d, ns[0], box


def load_field(path, domain: Domain | None = None) -> GridField:
    """Read a field written by :func:`save_field`.

    The file does not record the mask.  Without ``domain`` the data must
    cover the full box; with ``domain`` the header must match it.
    """
    text = Path(path).read_text().splitlines()
    if not text:
        raise InputError(f"{path}: empty file")
    d, n, box = _parse_header(text[0])
    values = []
    for lineno, line in enumerate(text[1:], start=2):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: not a number: {line!r}") from exc
    if domain is None:
        domain = build_domain(d, box, n, FullBox())
    else:
        same = (
            domain.dim == d
            and domain.n == n
            and all(
                math.isclose(lo, b[0]) and math.isclose(hi, b[1])
                for lo, hi, b in zip(domain.lower, domain.upper, box)
            )
        )
        if not same:
            raise InputError(f"{path}: header does not match the given domain")
    return GridField(domain, np.array(values))
