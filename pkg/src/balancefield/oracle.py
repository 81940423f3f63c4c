"""
Closed-form analytics in the frame adapted to the zero level set.

A point near the surface is ``S(u, v) + w n`` with ``n`` the inward unit
normal.  The volume element is ``sqrt(g) = sqrt(G) (1 - w K_S + w^2 K_G)``,
so the normal part of the Laplacian of a profile ``phi(w)`` is
``phi'' + l(w) phi'`` with::

    l(w) = d/dw log(1 - w K_S + w^2 K_G) = (-K_S + 2 w K_G) / (1 - w K_S + w^2 K_G)

Band integrals of the cubic profile over ``|w| <= W/2`` (flat metric)::

    int phi''^2       = 48 / W^3
    int phi'^2        = 24 / (5 W)
    int F(phi)        = 486 W / 5005          (~0.0971 W)
    int w^2 phi'^2    = 6 W / 35
    int w^2 phi''^2   = 36 / (5 W)
    int w^2 F(phi)    = 37 W^3 / 18018

The energy-by-width model rounds the well integral to ``W/10``.

Curvature corrections (per unit area, exact for the cubic profile, odd powers
of ``w`` integrate to zero):

gradient
    ``-1/2 int phi'^2 sqrt(g) = -12/(5W) - (3W/35) K_G``
well
    ``lam int F sqrt(g) = lam (486W/5005 + (37 W^3/18018) K_G)``
laplacian
    ``D/2 int (phi'' + l phi')^2 sqrt(g)``.  Expanding, integrating the cross
    term by parts (``phi'`` vanishes at the band edges) and splitting the
    remaining rational factor by principal curvatures ``k1, k2``::

        = D/2 [ 48/W^3 - (12/(5W)) K_G + 4 K_G 24/(5W)
                + k1 (k1 - k2) J(k1) + k2 (k2 - k1) J(k2) ]
        J(k) = int phi'^2 / (1 - w k) dw = sum_m k^(2m) int w^(2m) phi'^2 dw

    For umbilic points this is ``D (24/W^3 + (12/(5W)) K_S^2 - (6/(5W)) K_G)``.
    Dropping ``sqrt(g) -> 1`` before integrating instead gives the low-curvature
    form ``D (24/W^3 + (12/(5W)) (K_S^2 - 2 K_G))``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import integrate, optimize

from .model import ModelWeights
from .profile import ProfileSpec, _as_spec, ansatz_derivative, ansatz_third_derivative, ansatz_value
from .surfaces import Plane, Sphere, Torus, curvature_terms

WELL_BAND = 486.0 / 5005.0
WELL_BAND_W2 = 37.0 / 18018.0
GRAD_BAND_W2 = 6.0 / 35.0
LAP_BAND_W2 = 36.0 / 5.0
TORUS_NODES = 256


class FocalPointError(ValueError):
    """The offset reaches a focal point of the surface (metric factor <= 0)."""

    def __init__(self, message: str, offset: float) -> None:
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class CurvatureSample:
    K_S: float
    K_G: float
    lap_T_K_S: float = 0.0

    def __post_init__(self) -> None:
        disc = self.K_S * self.K_S - 4 * self.K_G
        if disc < -1e-12 * max(1.0, self.K_S * self.K_S):
            raise ValueError(f"K_S^2 - 4 K_G = {disc:g} < 0 is not a real surface point")

    @property
    def umbilic_defect(self) -> float:
        """``K_S^2 - 4 K_G = (k1 - k2)^2``."""
        return max(self.K_S * self.K_S - 4 * self.K_G, 0.0)

    @classmethod
    def on(cls, surface, theta: float = 0.0) -> CurvatureSample:
        ks, kg, lt = curvature_terms(surface, theta)
        return cls(float(ks), float(kg), float(lt))


def metric_factor(w, c: CurvatureSample):
    w = np.asarray(w, dtype=float)
    out = 1.0 - w * c.K_S + w * w * c.K_G
    return out if out.ndim else float(out)


def adapted_log_metric_derivative(w, c: CurvatureSample):
    w = np.asarray(w, dtype=float)
    den = 1.0 - w * c.K_S + w * w * c.K_G
    if np.any(den == 0.0):
        bad = float(np.atleast_1d(w)[np.atleast_1d(den == 0.0)][0])
        raise FocalPointError(f"metric factor vanishes at focal offset w={bad:g}", bad)
    out = (-c.K_S + 2.0 * w * c.K_G) / den
    return out if out.ndim else float(out)


# --- Gaussian term of the metric -------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    max_deviation: float


def gaussian_area_identity(surface, u, v) -> IdentityCheck:
    """Compare ``n_u x n_v`` with ``sqrt(G) K_G`` on parameter samples.

    The left side is projected on the unit normal of ``S_u x S_v`` so the sign
    of ``K_G`` is kept; its absolute value is the magnitude identity.  The
    returned deviation is ``max|lhs - rhs| / max(|rhs|)`` (absolute when the
    right side vanishes identically).
    """
    uu, vv = np.meshgrid(np.asarray(u, float), np.asarray(v, float), indexing="ij")
    _, Su, Sv, _, nu, nv = surface.parameterization(uu, vv)
    cross_S = np.cross(Su, Sv)
    sqrtG = np.linalg.norm(cross_S, axis=-1)
    unit = cross_S / sqrtG[..., None]
    lhs = np.einsum("...i,...i->...", np.cross(nu, nv), unit)
    k1, k2 = surface.principal_curvatures(uu)
    rhs = sqrtG * k1 * k2
    scale = np.max(np.abs(rhs))
    dev = np.max(np.abs(lhs - rhs))
    return IdentityCheck(lhs, rhs, float(dev / scale if scale > 0 else dev))


# --- energy by width -------------------------------------------------------


def energy_by_width(W: float, weights: ModelWeights, A: float) -> float:
    D, lam = weights.D, weights.lam
    return (24.0 * D / W**3 - 12.0 / (5.0 * W) + lam * W / 10.0) * A


@dataclass(frozen=True)
class BandEnergy:
    laplacian: float
    gradient: float
    well: float

    @property
    def total(self) -> float:
        return self.laplacian + self.gradient + self.well


def flat_band_quadrature(W: float, weights: ModelWeights, A: float = 1.0, sign_gradient: float = -1.0) -> BandEnergy:
    """Adaptive quadrature of the flat-metric band energy of the cubic profile."""
    spec = ProfileSpec(W)
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    a, b = -W / 2, W / 2
    lap = integrate.quad(lambda w: 0.5 * weights.D * ansatz_derivative(w, spec, 2) ** 2, a, b, **opts)[0]
    grad = integrate.quad(lambda w: 0.5 * sign_gradient * ansatz_derivative(w, spec, 1) ** 2, a, b, **opts)[0]
    well = integrate.quad(lambda w: weights.lam * _well(ansatz_value(w, spec)), a, b, **opts)[0]
    return BandEnergy(lap * A, grad * A, well * A)


def _well(phi):
    return 0.25 * (phi * phi - 1.0) ** 2


def minimize_energy_by_width(weights: ModelWeights, lo: float = 1e-3, hi: float = 1e4) -> float:
    """Numerical minimiser of the energy-by-width curve.

    A log-spaced scan locates the basin, golden section refines it.
    """
    def e(W):
        return energy_by_width(W, weights, 1.0)

    grid = np.geomspace(lo, hi, 2001)
    i = int(np.argmin([e(W) for W in grid]))
    if i in (0, len(grid) - 1):
        raise ValueError(f"energy-by-width has no interior minimum in [{lo:g}, {hi:g}]")
    res = optimize.minimize_scalar(e, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=1e-12)
    return float(res.x)


def double_well_band_integral(W: float) -> tuple[float, float]:
    """Quadrature of ``F(phi)`` across the band and its ratio to ``0.1 W``."""
    spec = ProfileSpec(W)
    val = integrate.quad(lambda w: _well(ansatz_value(w, spec)), -W / 2, W / 2, epsabs=0.0, epsrel=1e-13)[0]
    return val, val / (0.1 * W)


# --- motion of the zero level set --------------------------------------------


def zero_set_residual(c: CurvatureSample, weights: ModelWeights, spec: ProfileSpec | float) -> float:
    """Euler-Lagrange residual at ``w = 0`` for the cubic profile in the adapted frame.

    Even derivatives of the profile vanish at the zero set.  Balanced:
    ``-2 D K_S phi''' - D [lap_T K_S + K_S (K_S^2 - 4 K_G)] phi' - K_S phi'``;
    GL (``-lap phi`` term): ``K_S phi'``.
    """
    spec = _as_spec(spec)
    d1 = ansatz_derivative(0.0, spec, 1)
    d3 = ansatz_third_derivative(spec)
    if weights.kind == "gl":
        return c.K_S * d1
    D = weights.D
    bracket = c.lap_T_K_S + c.K_S * (c.K_S * c.K_S - 4 * c.K_G)
    return -2.0 * D * c.K_S * d3 - D * bracket * d1 - c.K_S * d1


def zero_set_velocity(c: CurvatureSample, weights: ModelWeights, spec: ProfileSpec | float) -> float:
    """Normal speed of the zero set, positive towards the -1 side (``dR/dt`` for a sphere).

    Under ``phi_t = -residual`` the zero set moves by ``-phi_t / phi'`` along
    the inward normal, i.e. ``-residual / phi'`` outward.  For the cubic
    ``phi'''(0) / phi'(0) = -8 / W^2``, so the speed is
    ``K_S (1 - 16 D / W^2) + D [lap_T K_S + K_S (K_S^2 - 4 K_G)]``.
    """
    W = _as_spec(spec).width
    if weights.kind == "gl":
        return -c.K_S
    D = weights.D
    # with D = W^2/16 this factor is exactly zero in floating point
    shrink = 1.0 - 16.0 * D / (W * W)
    return c.K_S * shrink + D * (c.lap_T_K_S + c.K_S * (c.K_S * c.K_S - 4 * c.K_G))


def elastica_gap(c: CurvatureSample) -> tuple[float, float]:
    defect = c.K_S * (c.K_S * c.K_S - 4 * c.K_G)
    return c.lap_T_K_S + defect, c.lap_T_K_S + 0.5 * defect


@dataclass(frozen=True)
class LineTension:
    """Excess energy of the exact stationary 1-D profile and the resulting curvature speed.

    ``sigma = int [D/2 phi''^2 - 1/2 phi'^2 + lam F] dw`` and ``mobility = int phi'^2 dw``.
    The solvability condition of the relaxed interface gives the outward
    normal speed ``-sigma K_S / mobility`` to first order in curvature.
    """

    width: float
    sigma: float
    mobility: float
    virial_sigma: float
    peak: float
    slope_at_zero: float

    @property
    def speed_per_curvature(self) -> float:
        return -self.sigma / self.mobility

    def velocity(self, c: CurvatureSample) -> float:
        return self.speed_per_curvature * c.K_S


def stationary_line_tension(weights: ModelWeights, W: float, tol: float = 1e-10) -> LineTension:
    """Solve ``D phi'''' + phi'' + lam (phi^3 - phi) = 0`` on ``[0, 4W]`` for the odd kink.

    ``phi(0) = phi''(0) = 0`` by symmetry, ``phi = 1`` and ``phi' = 0`` at the far end.
    ``virial_sigma = 2 D int phi''^2 - int phi'^2`` is the same quantity through the
    dilation identity and serves as an accuracy check.
    """
    if weights.kind != "balanced":
        raise ValueError("line tension of the fourth-order profile needs balanced weights")
    D, lam = weights.D, weights.lam
    L = 4.0 * W

    def rhs(x, y):
        return np.vstack([y[1], y[2], y[3], -(y[2] + lam * (y[0] ** 3 - y[0])) / D])

    def bc(a, b):
        return np.array([a[0], a[2], b[0] - 1.0, b[1]])

    x = np.linspace(0.0, L, 4001)
    y0 = np.vstack([ansatz_value(x, W), ansatz_derivative(x, W, 1), ansatz_derivative(x, W, 2), np.zeros_like(x)])
    sol = integrate.solve_bvp(rhs, bc, x, y0, tol=tol, max_nodes=500_000)
    if not sol.success:
        raise RuntimeError(f"stationary profile did not converge: {sol.message}")
    opts = dict(epsabs=0.0, epsrel=1e-10, limit=500)

    def band(fn):
        return 2.0 * integrate.quad(lambda t: fn(sol.sol(t)), 0.0, L, **opts)[0]

    i1 = band(lambda y: y[1] ** 2)
    i2 = band(lambda y: y[2] ** 2)
    iF = band(lambda y: _well(y[0]))
    sigma = 0.5 * D * i2 - 0.5 * i1 + lam * iF
    return LineTension(W, sigma, i1, 2.0 * D * i2 - i1, float(sol.y[0].max()), float(sol.sol(0.0)[1]))


# --- appendix term tables --------------------------------------------------


def _cubic_moment(W: float, m: int) -> float:
    """``int w^m phi'^2 dw`` over the band (``m`` even)."""
    def mono(q: int) -> float:
        return 2.0 * (W / 2) ** (q + 1) / (q + 1)

    return 9.0 / W**2 * mono(m) - 72.0 / W**4 * mono(m + 2) + 144.0 / W**6 * mono(m + 4)


def _J(k: float, W: float) -> float:
    x = abs(k) * W / 2
    if x >= 1.0:
        raise FocalPointError(f"curvature {k:g} puts a focal point inside the band", 1.0 / k)
    total, m = 0.0, 0
    while True:
        term = k ** (2 * m) * _cubic_moment(W, 2 * m)
        total += term
        if abs(term) <= 1e-18 * abs(total) or m > 2000:
            return total
        m += 1


def _check_band(W: float, k1: float, k2: float) -> None:
    for k in (k1, k2):
        if k != 0 and abs(k) * W / 2 >= 1.0:
            raise FocalPointError(f"metric factor reaches zero inside |w| <= {W / 2:g}", 1.0 / k)


def pointwise_terms(W: float, k1: float, k2: float, weights: ModelWeights) -> dict[str, tuple[float, float, float]]:
    """Per-unit-area ``(flat, neglected, neglected_lowcurv)`` for each energy constituent."""
    _check_band(W, k1, k2)
    D, lam = weights.D, weights.lam
    KS, KG = k1 + k2, k1 * k2
    flat_grad = -12.0 / (5.0 * W)
    flat_well = lam * WELL_BAND * W
    flat_lap = 24.0 * D / W**3
    grad_neg = -0.5 * GRAD_BAND_W2 * W * KG
    well_neg = lam * WELL_BAND_W2 * W**3 * KG
    m2 = _cubic_moment(W, 0)
    third = 4.0 * KG * m2
    if k1 != k2:
        third += k1 * (k1 - k2) * _J(k1, W) + k2 * (k2 - k1) * _J(k2, W)
    lap_neg = 0.5 * D * ((LAP_BAND_W2 / W) * KG - 2.0 * KG * m2 + third)
    lap_low = D * (12.0 / (5.0 * W)) * (KS * KS - 2.0 * KG)
    return {
        "laplacian": (flat_lap, lap_neg, lap_low),
        "gradient": (flat_grad, grad_neg, grad_neg),
        "well": (flat_well, well_neg, well_neg),
    }


@dataclass(frozen=True)
class AppendixTerm:
    constituent: str
    eq12_term: float
    flat: float
    neglected: float
    neglected_lowcurv: float
    exact_closed: float
    exact_quadrature: float
    flat_quadrature: float
    ratio: float
    ratio_quadrature: float


def _surface_integral(surface, W: float, weights: ModelWeights, area: float):
    """Closed-form surface integrals of the pointwise terms."""
    if isinstance(surface, Torus):
        # periodic analytic integrand in theta: the uniform trapezoid rule converges spectrally
        theta = np.linspace(0.0, 2 * math.pi, TORUS_NODES, endpoint=False)
        k1s, k2s = surface.principal_curvatures(theta)
        dA = surface.area_element(theta)
        pts = [pointwise_terms(W, float(a), float(b), weights) for a, b in zip(k1s, k2s)]
        scale = (2 * math.pi) ** 2 / TORUS_NODES
        return {
            n: tuple(scale * math.fsum(p[n][i] * da for p, da in zip(pts, dA)) for i in range(3))
            for n in ("laplacian", "gradient", "well")
        }
    k1, k2 = (1.0 / surface.radius,) * 2 if isinstance(surface, Sphere) else (0.0, 0.0)
    return {n: tuple(v * area for v in t) for n, t in pointwise_terms(W, k1, k2, weights).items()}


def _quadrature_exact(surface, W: float, weights: ModelWeights, area: float) -> dict[str, float]:
    """Direct quadrature of the metric-weighted band energy in the surface's own coordinates."""
    spec = ProfileSpec(W)
    D, lam = weights.D, weights.lam
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)

    def p1(w):
        return ansatz_derivative(w, spec, 1)

    def p2(w):
        return ansatz_derivative(w, spec, 2)

    if isinstance(surface, Sphere):
        R = surface.radius
        # radial coordinate r = R - w; lap phi = phi_rr + (2/r) phi_r with phi_r = -phi'
        def shell(fn):
            return integrate.quad(lambda r: fn(R - r, r) * 4 * math.pi * r * r, R - W / 2, R + W / 2, **opts)[0]
        return {
            "laplacian": shell(lambda w, r: 0.5 * D * (p2(w) - 2.0 / r * p1(w)) ** 2),
            "gradient": shell(lambda w, r: -0.5 * p1(w) ** 2),
            "well": shell(lambda w, r: lam * _well(ansatz_value(w, spec))),
        }
    if isinstance(surface, Torus):
        Rm, rm = surface.major, surface.minor
        # toroidal coordinates (s, theta, phi), s = rm - w the distance to the tube axis
        def vol(fn):
            val = integrate.dblquad(
                lambda w, th: fn(w, th) * (rm - w) * (Rm + (rm - w) * math.cos(th)),
                0, 2 * math.pi, -W / 2, W / 2, epsabs=0.0, epsrel=1e-12,
            )[0]
            return 2 * math.pi * val

        def lap(w, th):
            s = rm - w
            return p2(w) - (1.0 / s + math.cos(th) / (Rm + s * math.cos(th))) * p1(w)

        return {
            "laplacian": vol(lambda w, th: 0.5 * D * lap(w, th) ** 2),
            "gradient": vol(lambda w, th: -0.5 * p1(w) ** 2),
            "well": vol(lambda w, th: lam * _well(ansatz_value(w, spec))),
        }
    flat = flat_band_quadrature(W, weights, area)
    return {"laplacian": flat.laplacian, "gradient": flat.gradient, "well": flat.well}


def appendix_integrals(W: float, surface, weights: ModelWeights, area: float | None = None) -> list[AppendixTerm]:
    """Dominant versus curvature-induced parts of each band-energy constituent.

    ``eq12_term`` is the constituent as it enters the energy-by-width formula,
    ``flat`` its exact flat-metric value, ``neglected`` the exact curvature
    correction (closed form), ``neglected_lowcurv`` the correction surviving a
    low-curvature metric (``sqrt(g) -> sqrt(G)``) for the Laplacian term.
    ``ratio = neglected / flat``; the ``*_quadrature`` columns come from direct
    quadrature in the surface's own coordinate system.
    """
    if isinstance(surface, Plane):
        A = 1.0 if area is None else float(area)
    else:
        A = surface.area if area is None else float(area)
    closed = _surface_integral(surface, W, weights, A)
    exact_q = _quadrature_exact(surface, W, weights, A)
    flat_q = flat_band_quadrature(W, weights, A)
    flat_q = {"laplacian": flat_q.laplacian, "gradient": flat_q.gradient, "well": flat_q.well}
    eq12 = {
        "laplacian": 24.0 * weights.D / W**3 * A,
        "gradient": -12.0 / (5.0 * W) * A,
        "well": weights.lam * W / 10.0 * A,
    }
    rows = []
    for name in ("laplacian", "gradient", "well"):
        flat, neg, low = closed[name]
        ratio = neg / flat if flat != 0 else 0.0
        rq = (exact_q[name] - flat_q[name]) / flat_q[name] if flat_q[name] != 0 else 0.0
        rows.append(AppendixTerm(name, eq12[name], flat, neg, low, flat + neg, exact_q[name], flat_q[name], ratio, rq))
    return rows


def write_rows_csv(path: str | Path, rows, header: list[str] | None = None) -> Path:
    """Write dataclass rows (or tuples with an explicit header) as CSV."""
    path = Path(path)
    rows = list(rows)
    if header is None:
        header = [f.name for f in fields(rows[0])]
        rows = [astuple(r) for r in rows]
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return path
