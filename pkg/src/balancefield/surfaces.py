"""
Analytic test surfaces with closed-form geometry.

Curvature sign convention: the unit normal points into the enclosed (+1)
region, and principal curvatures are positive for convex shapes, so a sphere
of radius R has ``K_S = 2/R`` and ``K_G = 1/R^2``.  Offsetting a point by ``w``
along this normal moves it inward.

Torus
-----
Tube radius ``r`` swept around the z axis at distance ``R`` (``R > r``).
With ``theta`` the angle around the tube (0 on the outer equator) and
``rho = R + r cos(theta)``::

    k1 = 1/r                       (meridian circle)
    k2 = cos(theta) / rho          (parallel direction)
    K_S = k1 + k2,  K_G = cos(theta) / (r rho)
    dA = r rho dtheta dphi

``K_S`` depends on theta only, so its surface Laplacian is
``(1/(r^2 rho)) d/dtheta(rho dK_S/dtheta)`` which reduces to::

    lap_T K_S = -R (R cos(theta) + r) / (r^2 rho^3)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Plane:
    """Plane ``n . x = offset``; the +1 side is where ``n . x > offset``."""

    normal: tuple[float, ...] = (1.0, 0.0, 0.0)
    offset: float = 0.0

    kind = "plane"

    def __post_init__(self) -> None:
        n = np.asarray(self.normal, dtype=float)
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise ValueError("plane normal must be nonzero")
        object.__setattr__(self, "normal", tuple(float(c) for c in n / norm))

    def signed_distance(self, *coords):
        return sum(c * x for c, x in zip(self.normal, coords)) - self.offset

    def principal_curvatures(self, theta=0.0):
        z = np.zeros_like(np.asarray(theta, dtype=float))
        return z, z

    def lap_t_sum_curvature(self, theta=0.0):
        return np.zeros_like(np.asarray(theta, dtype=float))

    def parameterization(self, u, v):
        """Cartesian patch ``S(u, v)`` with derivatives (3D, plane ``z = offset`` frame)."""
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        zero, one = np.zeros_like(u), np.ones_like(u)
        S = np.stack([u, v, zero + self.offset], axis=-1)
        Su = np.stack([one, zero, zero], axis=-1)
        Sv = np.stack([zero, one, zero], axis=-1)
        n = np.stack([zero, zero, one], axis=-1)
        nu = np.zeros_like(S)
        nv = np.zeros_like(S)
        return S, Su, Sv, n, nu, nv


@dataclass(frozen=True)
class Sphere:
    radius: float
    center: tuple[float, ...] = (0.0, 0.0, 0.0)

    kind = "sphere"

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"sphere radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        # 2D grids treat the sphere as a circle; callers use circumference there.
        return 4.0 * math.pi * self.radius**2

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    def signed_distance(self, *coords):
        """Positive inside."""
        r2 = sum((x - c) ** 2 for x, c in zip(coords, self.center))
        return self.radius - np.sqrt(r2)

    def bounds(self, ndim: int):
        c = self.center[:ndim]
        return [(ci - self.radius, ci + self.radius) for ci in c]

    def principal_curvatures(self, theta=0.0):
        k = np.full_like(np.asarray(theta, dtype=float), 1.0 / self.radius)
        return k, k.copy()

    def lap_t_sum_curvature(self, theta=0.0):
        return np.zeros_like(np.asarray(theta, dtype=float))

    def parameterization(self, u, v):
        """Polar angle ``u`` in (0, pi), azimuth ``v``; normal points to the centre."""
        R = self.radius
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        e = np.stack([np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u)], axis=-1)
        eu = np.stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u)], axis=-1)
        ev = np.stack([-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), np.zeros_like(u)], axis=-1)
        S = np.asarray(self.center, float) + R * e
        return S, R * eu, R * ev, -e, -eu, -ev


@dataclass(frozen=True)
class Torus:
    major: float
    minor: float
    center: tuple[float, ...] = (0.0, 0.0, 0.0)

    kind = "torus"

    def __post_init__(self) -> None:
        if not (self.major > self.minor > 0):
            raise ValueError(f"torus needs major > minor > 0, got ({self.major}, {self.minor})")

    @property
    def area(self) -> float:
        return 4.0 * math.pi**2 * self.major * self.minor

    @property
    def volume(self) -> float:
        return 2.0 * math.pi**2 * self.major * self.minor**2

    def signed_distance(self, *coords):
        if len(coords) != 3:
            raise ValueError("torus is a 3D shape")
        x, y, z = (xi - ci for xi, ci in zip(coords, self.center))
        rho = np.sqrt(x * x + y * y)
        return self.minor - np.sqrt((rho - self.major) ** 2 + z * z)

    def bounds(self, ndim: int):
        if ndim != 3:
            raise ValueError("torus is a 3D shape")
        cx, cy, cz = self.center
        a = self.major + self.minor
        return [(cx - a, cx + a), (cy - a, cy + a), (cz - self.minor, cz + self.minor)]

    def principal_curvatures(self, theta):
        theta = np.asarray(theta, dtype=float)
        rho = self.major + self.minor * np.cos(theta)
        return np.full_like(theta, 1.0 / self.minor), np.cos(theta) / rho

    def lap_t_sum_curvature(self, theta):
        R, r = self.major, self.minor
        theta = np.asarray(theta, dtype=float)
        rho = R + r * np.cos(theta)
        return -R * (R * np.cos(theta) + r) / (r * r * rho**3)

    def area_element(self, theta):
        """``dA / (dtheta dphi)``."""
        return self.minor * (self.major + self.minor * np.cos(np.asarray(theta, dtype=float)))

    def parameterization(self, u, v):
        """Tube angle ``u`` (0 = outer equator), azimuth ``v``; normal points to the tube axis."""
        R, r = self.major, self.minor
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        rho = R + r * np.cos(u)
        e = np.stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), np.sin(u)], axis=-1)
        eu = np.stack([-np.sin(u) * np.cos(v), -np.sin(u) * np.sin(v), np.cos(u)], axis=-1)
        ev = np.stack([-np.cos(u) * np.sin(v), np.cos(u) * np.cos(v), np.zeros_like(u)], axis=-1)
        S = np.asarray(self.center, float) + np.stack(
            [rho * np.cos(v), rho * np.sin(v), r * np.sin(u)], axis=-1
        )
        Su = r * eu
        Sv = np.stack([-rho * np.sin(v), rho * np.cos(v), np.zeros_like(u)], axis=-1)
        return S, Su, Sv, -e, -eu, -ev


AnalyticSurface = Plane | Sphere | Torus


def curvature_terms(surface, theta=0.0):
    """``(K_S, K_G, lap_T K_S)`` at parameter ``theta`` (ignored for plane/sphere)."""
    k1, k2 = surface.principal_curvatures(theta)
    return k1 + k2, k1 * k2, surface.lap_t_sum_curvature(theta)
