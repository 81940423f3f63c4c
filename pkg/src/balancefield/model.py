"""
Ginzburg-Landau and balanced phase-field energies and their gradient descent.

Energies (``F(phi) = phi^4/4 - phi^2/2 + 1/4`` is the double well, zero at +-1)::

    GL        E = sum  1/2 |grad phi|^2               + lam F(phi)
    balanced  E = sum  D/2 (lap phi)^2 - 1/2 |grad phi|^2 + lam F(phi)

with Euler-Lagrange residuals (exact discrete gradients of the energies below)::

    GL        -lap phi + lam (phi^3 - phi)
    balanced  D lap lap phi + lap phi + lam (phi^3 - phi)

Balanced weights for a transition width W: ``D = W^2/16``, ``lam = 21/W^2``.

Discretisation of the energy: the Laplacian term uses the compact stencil of
:mod:`balancefield.grid`; the gradient term sums squared *forward* differences
over grid links.  Its variation is exactly ``-lap``, so ``el_residual * h^d`` is
the gradient of ``energy`` with respect to the nodal values.  Sums are
correctly rounded (``math.fsum``), hence independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .grid import (
    Field,
    GridSpec,
    check_finite,
    forward_difference_sq_sum,
    grid_sum,
    laplacian_array,
)
from .profile import DivergenceError

if TYPE_CHECKING:
    from numpy.typing import NDArray

KINDS = ("gl", "balanced")


@dataclass(frozen=True)
class ModelWeights:
    D: float
    lam: float
    kind: str = "balanced"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.kind == "gl" and self.D != 0:
            raise ValueError("Ginzburg-Landau weights carry D = 0")
        if self.kind == "balanced" and not self.D > 0:
            raise ValueError(f"balanced weights need D > 0, got {self.D}")


def gl_weights(lam: float) -> ModelWeights:
    return ModelWeights(0.0, float(lam), "gl")


def weights_from_width(W: float) -> ModelWeights:
    if not W > 0:
        raise ValueError(f"width must be positive, got {W}")
    return ModelWeights(W * W / 16.0, 21.0 / (W * W), "balanced")


def gl_weights_for_width(W: float) -> ModelWeights:
    """GL weights sharing the well weight ``21/W^2`` of the balanced model."""
    return gl_weights(weights_from_width(W).lam)


def optimal_width(weights: ModelWeights) -> float:
    """Positive root of ``lam W^4 + 24 W^2 - 720 D = 0``."""
    D, lam = weights.D, weights.lam
    if not (D > 0 and lam > 0):
        raise ValueError("optimal width needs D > 0 and lam > 0")
    disc = math.sqrt(144.0 + 720.0 * D * lam)
    # -12 + disc loses digits when D*lam is small; multiply by the conjugate.
    w2 = 720.0 * D / (12.0 + disc)
    return math.sqrt(w2)


def balance_residuals(W: float, weights: ModelWeights) -> tuple[float, float]:
    """(width condition, curvature cancellation) residuals; both vanish for balanced weights."""
    if not W > 0:
        raise ValueError(f"width must be positive, got {W}")
    D, lam = weights.D, weights.lam
    r1 = lam * W**4 + 24.0 * W**2 - 720.0 * D
    r2 = 48.0 * D / W**3 - 3.0 / W
    return r1, r2


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    steps: int
    record_every: int = 1

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class EnergyBreakdown:
    bilaplacian_term: float
    gradient_term: float
    well_term: float

    @property
    def total(self) -> float:
        return math.fsum((self.bilaplacian_term, self.gradient_term, self.well_term))


def residual_array(
    values: NDArray[np.float64], weights: ModelWeights, h: float, boundary: str
) -> NDArray[np.float64]:
    L = laplacian_array(values, h, boundary)
    well = weights.lam * (values * values * values - values)
    if weights.kind == "balanced":
        return weights.D * laplacian_array(L, h, boundary) + L + well
    return well - L


def el_residual(f: Field, weights: ModelWeights) -> Field:
    check_finite(f.values, "el_residual input")
    g = f.grid
    r = residual_array(f.values, weights, g.spacing, g.boundary)
    check_finite(r, "el_residual output")
    return Field(g, r)


def energy(f: Field, weights: ModelWeights) -> EnergyBreakdown:
    g = f.grid
    v = f.values
    dv = g.cell_volume
    if weights.kind == "balanced":
        L = laplacian_array(v, g.spacing, g.boundary)
        lap_term = 0.5 * weights.D * grid_sum(L * L) * dv
        sign = -0.5
    else:
        lap_term = 0.0
        sign = 0.5
    grad_term = sign * forward_difference_sq_sum(v, g.spacing, g.boundary) * dv
    v2 = v * v
    well = weights.lam * grid_sum(0.25 * (v2 - 1.0) ** 2) * dv
    return EnergyBreakdown(lap_term, grad_term, well)


def stable_dt_for(ndim: int, h: float, weights: ModelWeights) -> float:
    """Explicit Euler step limit.

    balanced: ``h^4 / (80 D)``.  The 3-D bilaplacian symbol peaks at
    ``144/h^4`` and Euler needs ``dt * D * 144/h^4 < 2``; 80 leaves margin for
    the lower-order terms.  GL: ``1 / (4 d / h^2 + 2 lam)``, half the Euler
    limit of the linearised operator.
    """
    if weights.kind == "balanced":
        return h**4 / (80.0 * weights.D)
    return 1.0 / (4.0 * ndim / (h * h) + 2.0 * weights.lam)


def stable_dt(grid: GridSpec, weights: ModelWeights) -> float:
    return stable_dt_for(grid.ndim, grid.spacing, weights)


def _check_dt(grid: GridSpec, weights: ModelWeights, dt: float) -> None:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    limit = stable_dt(grid, weights)
    if dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt:g} exceeds stable_dt={limit:g}")


def step(f: Field, weights: ModelWeights, dt: float) -> Field:
    g = f.grid
    _check_dt(g, weights, dt)
    with np.errstate(over="ignore", invalid="ignore"):
        r = residual_array(f.values, weights, g.spacing, g.boundary)
        out = f.values - dt * r
    if not np.isfinite(out).all():
        raise DivergenceError(
            f"step produced non-finite values (max |residual| = {np.nanmax(np.abs(r)):.3e})", 1
        )
    return Field(g, out)


def evolve(
    f: Field,
    weights: ModelWeights,
    config: EvolveConfig,
    observer: Callable[[int, Field], None] | None = None,
) -> Field:
    """Run ``config.steps`` explicit steps, calling ``observer(k, field)`` at the cadence.

    The observer sees step 0 (the input) and every ``record_every``-th step, and
    always the final one.
    """
    g = f.grid
    _check_dt(g, weights, config.dt)
    v = np.array(f.values)
    h, bc, dt = g.spacing, g.boundary, config.dt
    if observer is not None:
        observer(0, f)
    for k in range(1, config.steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            r = residual_array(v, weights, h, bc)
            v = v - dt * r
        if not np.isfinite(v).all():
            raise DivergenceError(
                f"evolution diverged at step {k} (max |residual| = {np.nanmax(np.abs(r)):.3e})", k
            )
        if observer is not None and (k % config.record_every == 0 or k == config.steps):
            observer(k, Field(g, v))
    return Field(g, v)


def reinitialize(f: Field, W: float, n: int = 10) -> Field:
    """``n`` balanced descent steps at the stable step size."""
    if n < 1:
        raise ValueError(f"reinitialization needs n >= 1, got {n}")
    weights = weights_from_width(W)
    return evolve(f, weights, EvolveConfig(stable_dt(f.grid, weights), n, n))
