"""
Uniform-grid scalar fields and the discrete operators shared by every module.

Nodes sit at ``x_i = i * h`` along each axis (``i = 0 .. n-1``); arrays use
``indexing='ij'`` so axis 0 is x.  Two boundary rules are supported:

``mirror``
    ghost node = nearest interior node (homogeneous Neumann).  The phase field
    saturates to +-1 away from the interface and this preserves the plateau.
``periodic``
    wrap-around, used for spectral test cases and the gradient check.

Operators
---------
laplacian
    5-point (2D) / 7-point (3D) central second difference divided by h^2.
bilaplacian
    ``laplacian(laplacian(f))`` with the boundary rule applied between the two
    passes.  On interior nodes at least two cells from the boundary this is the
    composed stencil (3D, divided by h^4)::

        centre                      +42
        6 face neighbours   (+-1)   -12
        12 edge neighbours  (+-1,+-1) +2
        6 axis neighbours   (+-2)    +1

    i.e. 25 distinct offsets; along one axis the 1-D pattern is
    ``[1, -4, 6, -4, 1]`` and the cross terms are ``2 * d_xx d_yy``.
gradient_magnitude_sq
    central first differences per axis, summed squares.

With the mirror rule the Laplacian equals minus the graph Laplacian of the grid,
a symmetric matrix, so ``bilaplacian = L @ L`` is the exact gradient of
``0.5 * sum((L f)**2)`` under either boundary rule.

Stencils can be evaluated on slabs along axis 0 by a thread pool; each output
element is produced by the same sequence of floating point operations whatever
the slab split, so results are bit-identical for any worker count.  The worker
count defaults to the ``BALANCE_FIELD_WORKERS`` environment variable (unset
means sequential).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

BOUNDARIES = ("mirror", "periodic")
WORKERS_ENV = "BALANCE_FIELD_WORKERS"


class FieldError(ValueError):
    """Invalid grid or non-finite field data."""


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise FieldError(f"{WORKERS_ENV}={raw!r} is not an integer") from exc
    return max(n, 1)


@dataclass(frozen=True)
class GridSpec:
    """Uniform isotropic grid: extents per axis, spacing ``h``, boundary rule."""

    dims: tuple[int, ...]
    spacing: float = 1.0
    boundary: str = "mirror"

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) not in (2, 3):
            raise FieldError(f"grid must be 2D or 3D, got {len(dims)} axes")
        if min(dims) < 8:
            raise FieldError(f"every extent must be >= 8, got {dims}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise FieldError(f"spacing must be positive, got {self.spacing}")
        if self.boundary not in BOUNDARIES:
            raise FieldError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.ndim

    @property
    def extent(self) -> tuple[float, ...]:
        """Physical length spanned by the nodes along each axis."""
        return tuple((n - 1) * self.spacing for n in self.dims)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(0.5 * e for e in self.extent)

    def axis_coords(self, axis: int) -> NDArray[np.float64]:
        return np.arange(self.dims[axis], dtype=np.float64) * self.spacing

    def coords(self) -> list[NDArray[np.float64]]:
        """Dense coordinate arrays (``indexing='ij'``)."""
        return np.meshgrid(*(self.axis_coords(a) for a in range(self.ndim)), indexing="ij")


@dataclass(frozen=True)
class Field:
    """Scalar values on the nodes of a :class:`GridSpec`."""

    grid: GridSpec
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.size != self.grid.size:
            raise FieldError(f"{arr.size} values for a grid of {self.grid.size} nodes")
        # a view, so freezing it leaves the caller's array writeable
        arr = arr.reshape(self.grid.dims).view()
        check_finite(arr, "field")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> Field:
        return cls(grid, np.full(grid.dims, float(value)))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> Field:
        """Sample ``fn(*coords)`` on the grid nodes."""
        return cls(grid, np.broadcast_to(fn(*grid.coords()), grid.dims))

    def with_values(self, values: ArrayLike) -> Field:
        return Field(self.grid, np.asarray(values, dtype=np.float64))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def check_finite(values: NDArray[np.float64], what: str = "values") -> None:
    if not np.isfinite(values).all():
        bad = np.argwhere(~np.isfinite(values))
        raise FieldError(
            f"{what} contains {len(bad)} non-finite entries (first at index {tuple(int(i) for i in bad[0])})"
        )


def _pad(values: NDArray[np.float64], width: int, boundary: str) -> NDArray[np.float64]:
    if width != 1:
        return np.pad(values, width, mode="edge" if boundary == "mirror" else "wrap")
    # one-node halo filled axis by axis; much cheaper than np.pad on large grids
    p = np.empty(tuple(n + 2 for n in values.shape))
    p[tuple(slice(1, -1) for _ in values.shape)] = values
    for a, n in enumerate(values.shape):
        lo, hi, src_lo, src_hi = ([slice(None)] * values.ndim for _ in range(4))
        lo[a], hi[a] = 0, n + 1
        src_lo[a], src_hi[a] = (1, n) if boundary == "mirror" else (n, 1)
        p[tuple(lo)] = p[tuple(src_lo)]
        p[tuple(hi)] = p[tuple(src_hi)]
    return p


def _run_slabs(kernel, n0: int, workers: int) -> None:
    """Call ``kernel(lo, hi)`` over a partition of ``range(n0)``."""
    workers = max(1, min(workers, n0))
    if workers == 1:
        kernel(0, n0)
        return
    bounds = np.linspace(0, n0, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda i: kernel(bounds[i], bounds[i + 1]), range(workers)))


def laplacian_array(
    values: NDArray[np.float64], h: float, boundary: str, workers: int | None = None
) -> NDArray[np.float64]:
    """Array-level Laplacian (no validation); used by the time loops.

    Each axis contributes ``a[i-1] - 2 a[i] + a[i+1]``, so a constant plateau
    gives exactly zero.  Slabs along the first axis see the same halo values
    as the whole-array call, so the result does not depend on ``workers``.
    """
    inv_h2 = 1.0 / (h * h)
    mode = "nearest" if boundary == "mirror" else "wrap"
    workers = max(1, min(workers or default_workers(), values.shape[0]))
    if workers == 1:
        out = ndimage.laplace(values, mode=mode)
        out *= inv_h2
        return out
    p = _pad(values, 1, boundary)
    out = np.empty_like(values)
    inner = (slice(1, -1),) * values.ndim

    def kernel(lo: int, hi: int) -> None:
        sub = ndimage.laplace(p[lo:hi + 2], mode=mode)
        np.multiply(sub[inner], inv_h2, out=out[lo:hi])

    _run_slabs(kernel, values.shape[0], workers)
    return out


def laplacian(f: Field, workers: int | None = None) -> Field:
    check_finite(f.values, "laplacian input")
    g = f.grid
    return Field(g, laplacian_array(f.values, g.spacing, g.boundary, workers))


def bilaplacian(f: Field, workers: int | None = None) -> Field:
    """Composition ``laplacian(laplacian(f))``; see the module docstring for the stencil."""
    check_finite(f.values, "bilaplacian input")
    g = f.grid
    first = laplacian_array(f.values, g.spacing, g.boundary, workers)
    return Field(g, laplacian_array(first, g.spacing, g.boundary, workers))


def gradient_array(values: NDArray[np.float64], h: float, boundary: str) -> list[NDArray[np.float64]]:
    """Central first differences per axis; mirror ghosts give one-sided halves at the edge."""
    p = _pad(values, 1, boundary)
    core = [slice(1, -1)] * values.ndim
    grads = []
    for a in range(values.ndim):
        hi, lo = list(core), list(core)
        hi[a] = slice(2, None)
        lo[a] = slice(None, -2)
        grads.append((p[tuple(hi)] - p[tuple(lo)]) / (2.0 * h))
    return grads


def gradient_magnitude_sq(f: Field) -> Field:
    check_finite(f.values, "gradient input")
    g = f.grid
    grads = gradient_array(f.values, g.spacing, g.boundary)
    total = grads[0] ** 2
    for d in grads[1:]:
        total = total + d**2
    return Field(g, total)


def forward_difference_sq_sum(values: NDArray[np.float64], h: float, boundary: str) -> float:
    """``sum over edges of ((f_j - f_i) / h)^2``.

    Edges are grid links between neighbouring nodes; periodic grids include the
    wrap-around link, mirror grids do not (the ghost link has zero difference).
    Its gradient with respect to ``f`` is exactly ``-2 * laplacian``.
    """
    parts = []
    for a in range(values.ndim):
        if boundary == "periodic":
            d = np.roll(values, -1, axis=a) - values
        else:
            d = np.diff(values, axis=a)
        parts.append(grid_sum(d * d))
    return math.fsum(parts) / (h * h)


def grid_sum(values: NDArray[np.float64]) -> float:
    """Correctly rounded sum, independent of summation order."""
    return math.fsum(np.ravel(values, order="C"))


def inner(f: Field, g: Field) -> float:
    """Grid inner product ``sum(f * g) * h^d``."""
    return grid_sum(f.values * g.values) * f.grid.cell_volume
