"""
Cubic transition profile, field initialization and the 1-D stationary profile.

The transition across the interface is modelled in the normal offset ``w`` by
the odd cubic that reaches +-1 with zero slope at ``w = +-W/2``::

    phi(w)   = -(4/W^3) w^3 + (3/W) w      |w| <= W/2
    phi(w)   = sign(w)                     |w| >  W/2

It is C1 at the band edges (value +-1, slope 0) and antisymmetric.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .grid import Field, GridSpec

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .model import ModelWeights


class DivergenceError(RuntimeError):
    """An explicit iteration produced non-finite values."""

    def __init__(self, message: str, step: int) -> None:
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class ProfileSpec:
    width: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"transition width must be positive, got {self.width}")

    def check_resolved(self, h: float) -> None:
        if self.width < 4.0 * h - 1e-12:
            raise ValueError(f"width {self.width} is under-resolved on spacing {h} (need W >= 4h)")


def _as_spec(spec: ProfileSpec | float) -> ProfileSpec:
    return spec if isinstance(spec, ProfileSpec) else ProfileSpec(float(spec))


def ansatz_value(w: ArrayLike, spec: ProfileSpec | float):
    W = _as_spec(spec).width
    w = np.clip(np.asarray(w, dtype=float), -W / 2, W / 2)
    out = -(4.0 / W**3) * w**3 + (3.0 / W) * w
    return out if out.ndim else float(out)


def ansatz_derivative(w: ArrayLike, spec: ProfileSpec | float, order: int = 1):
    """First or second derivative in ``w``; zero outside the band."""
    W = _as_spec(spec).width
    w = np.asarray(w, dtype=float)
    inside = np.abs(w) <= W / 2
    if order == 1:
        d = -(12.0 / W**3) * w**2 + 3.0 / W
    elif order == 2:
        d = -(24.0 / W**3) * w
    else:
        raise ValueError(f"order must be 1 or 2, got {order}")
    out = np.where(inside, d, 0.0)
    return out if out.ndim else float(out)


def ansatz_third_derivative(spec: ProfileSpec | float) -> float:
    """Constant third derivative inside the band, ``-24/W^3``."""
    return -24.0 / _as_spec(spec).width ** 3


@dataclass(frozen=True)
class SignedDistanceInit:
    """Shape plus orientation: +1 maps the shape's positive side (inside) to +1."""

    shape: object
    orientation: int = 1

    def __post_init__(self) -> None:
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")


def check_fits(grid: GridSpec, shape, width: float) -> None:
    """Zero set must stay ``W/2 + 2h`` away from the grid faces."""
    margin = width / 2 + 2 * grid.spacing
    lo_box = [0.0] * grid.ndim
    hi_box = list(grid.extent)
    if hasattr(shape, "bounds"):
        for axis, (lo, hi) in enumerate(shape.bounds(grid.ndim)):
            if lo < lo_box[axis] + margin - 1e-9 or hi > hi_box[axis] - margin + 1e-9:
                raise ValueError(
                    f"{shape.kind} spans [{lo:g}, {hi:g}] on axis {axis}; "
                    f"needs a margin of {margin:g} inside [0, {hi_box[axis]:g}]"
                )
        return
    corners = np.array(np.meshgrid(*[[0.0, e] for e in hi_box], indexing="ij")).reshape(grid.ndim, -1)
    d = shape.signed_distance(*corners)
    if d.max() < margin or d.min() > -margin:
        raise ValueError(f"plane does not cross the grid with a margin of {margin:g}")


def signed_distance_field(grid: GridSpec, init: SignedDistanceInit) -> NDArray[np.float64]:
    return init.orientation * np.asarray(init.shape.signed_distance(*grid.coords()), dtype=float)


def init_field(grid: GridSpec, init: SignedDistanceInit, spec: ProfileSpec | float) -> Field:
    spec = _as_spec(spec)
    check_fits(grid, init.shape, spec.width)
    return Field(grid, ansatz_value(signed_distance_field(grid, init), spec))


def step_field(grid: GridSpec, init: SignedDistanceInit, spec: ProfileSpec | float) -> Field:
    """Hard ``sign(signed distance)`` field, the worst-case reinitialization input."""
    spec = _as_spec(spec)
    check_fits(grid, init.shape, spec.width)
    return Field(grid, np.sign(signed_distance_field(grid, init)))


@dataclass
class Profile1D:
    offsets: NDArray[np.float64]
    values: NDArray[np.float64]
    residual: float
    steps: int
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)

    def zero_crossing(self) -> float:
        return zero_crossing_1d(self.offsets, self.values)


def zero_crossing_1d(x: NDArray[np.float64], f: NDArray[np.float64]) -> float:
    """Linear-interpolated location of the first +/- sign change of ``f``."""
    pos = f > 0
    idx = np.flatnonzero(pos[:-1] != pos[1:])
    if idx.size == 0:
        raise ValueError("profile has no sign change")
    i = idx[0]
    t = f[i] / (f[i] - f[i + 1])
    return float(x[i] + t * (x[i + 1] - x[i]))


def _lap_1d(f: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    return out


def residual_1d(f: NDArray[np.float64], weights: ModelWeights, h: float) -> NDArray[np.float64]:
    """1-D Euler-Lagrange residual on the free nodes; the two pinned nodes per end read 0."""
    L = _lap_1d(f, h)
    well = weights.lam * (f**3 - f)
    if weights.kind == "balanced":
        r = weights.D * _lap_1d(L, h) + L + well
    else:
        r = -L + well
    r[:2] = 0.0
    r[-2:] = 0.0
    return r


def relax_profile_1d(
    spec: ProfileSpec | float,
    weights: ModelWeights,
    n_nodes: int,
    dt: float | None = None,
    steps: int = 200_000,
    h: float = 1.0,
    init: str | ArrayLike = "ansatz",
    tol: float = 1e-8,
    check_every: int = 50,
) -> Profile1D:
    """Explicit gradient descent of the 1-D Euler-Lagrange residual to steady state.

    Nodes sit at ``(i - (n_nodes-1)/2) * h``; the first and last two nodes are
    pinned to -1 and +1 (value and zero slope).  ``init`` is ``"ansatz"``,
    ``"step"`` (hard sign step) or an explicit array.  Stops when the residual
    max-norm drops below ``tol`` or after ``steps`` iterations.
    """
    from .model import stable_dt_for

    spec = _as_spec(spec)
    W = spec.width
    x = (np.arange(n_nodes) - (n_nodes - 1) / 2.0) * h
    if x[-1] - x[0] < 4 * W - 1e-12:
        raise ValueError(f"1-D domain {x[-1] - x[0]:g} is narrower than 4W = {4 * W:g}")
    if dt is None:
        dt = stable_dt_for(1, h, weights)
    if dt > stable_dt_for(1, h, weights) * (1 + 1e-12):
        raise ValueError(f"dt={dt:g} exceeds the 1-D stability limit")

    if isinstance(init, str):
        if init == "ansatz":
            f = np.asarray(ansatz_value(x, spec), dtype=float)
        elif init == "step":
            f = np.sign(x)
        else:
            raise ValueError(f"unknown init {init!r}")
    else:
        f = np.array(init, dtype=float)
        if f.shape != x.shape:
            raise ValueError("init array length must equal n_nodes")
    f[:2] = -1.0
    f[-2:] = 1.0

    res = math.inf
    history = []
    for k in range(1, steps + 1):
        r = residual_1d(f, weights, h)
        f = f - dt * r
        if k % check_every == 0 or k == steps:
            if not np.isfinite(f).all():
                raise DivergenceError(f"1-D relaxation diverged at step {k}", k)
            res = float(np.max(np.abs(residual_1d(f, weights, h))))
            history.append(res)
            if res < tol:
                return Profile1D(x, f, res, k, True, history)
    return Profile1D(x, f, res, steps, False, history)


def rms(a: ArrayLike, b: ArrayLike) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.sqrt(np.mean(d * d)))


def write_profile_csv(path: str | Path, offsets: ArrayLike, values: ArrayLike) -> Path:
    """Two-column CSV ``w,phi``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["w", "phi"])
        for w, v in zip(np.asarray(offsets, float), np.asarray(values, float)):
            wr.writerow([repr(float(w)), repr(float(v))])
    return path


def read_profile_csv(path: str | Path) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["w", "phi"]:
        raise ValueError(f"unexpected profile header {rows[0]}")
    data = np.array(rows[1:], dtype=float).reshape(-1, 2)
    return data[:, 0], data[:, 1]
