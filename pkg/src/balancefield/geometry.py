"""
Measurements of the zero level set of a field.

Sign convention: a node is *positive* when ``phi > 0``; an edge carries a
crossing when its two nodes disagree.  Crossings are placed by linear
interpolation, ``t = phi_a / (phi_a - phi_b)`` from node ``a``.

Area
----
3D: marching cubes with the Lewiner case table (scikit-image), which resolves
ambiguous faces and cell interiors with asymptotic-decider style tests; area is
the sum of triangle areas.  2D: marching squares implemented here; a saddle
cell (all four edges crossed) is split by the asymptotic decider, i.e. the sign
of the bilinear interpolant at its saddle point
``(f00 f11 - f10 f01) / (f00 + f11 - f10 - f01)``.

Volume
------
Every cell edge contributes the positive fraction of its length under linear
interpolation; a cell's positive fraction is the mean over its ``d 2^(d-1)``
edges and the volume is ``h^d`` times the sum over cells.  A constant positive
field gives the full box ``prod((n_i - 1) h)``.

Curvatures
----------
With ``g = grad phi`` and ``H`` the Hessian (central differences)::

    n   = g / |g|
    K_S = -div n                          (two central-difference passes)
    K_G = g^T adj(H) g / |g|^4            (3D only)

The second formula follows from restricting the shape operator
``P H P / |g|`` (``P`` the tangent projector) to the tangent plane: its
determinant there equals ``g^T adj(H) g / |g|^4``, independent of the sign of
``phi``.  Nodes where ``|g| < 1e-6 / h``, and their axis neighbours, are
marked invalid and read 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .grid import Field, gradient_array

if TYPE_CHECKING:
    from numpy.typing import NDArray


class EmptyZeroSetError(ValueError):
    """The field has no zero crossing (e.g. the tracked shape vanished)."""


@dataclass(frozen=True)
class ZeroCrossings:
    """Crossings ordered by edge axis, then C-order of the edge's first node."""

    points: NDArray[np.float64]
    axis: NDArray[np.int64]
    node: NDArray[np.int64]
    weight: NDArray[np.float64]

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    def __len__(self) -> int:
        return len(self.points)


def extract_zero_crossings(f: Field) -> ZeroCrossings:
    g = f.grid
    v = f.values
    h = g.spacing
    pts, axes, nodes, ws = [], [], [], []
    for a in range(g.ndim):
        lo = np.take(v, np.arange(v.shape[a] - 1), axis=a)
        hi = np.take(v, np.arange(1, v.shape[a]), axis=a)
        mask = (lo > 0) != (hi > 0)
        if not mask.any():
            continue
        idx = np.argwhere(mask)
        a0, b0 = lo[mask], hi[mask]
        t = a0 / (a0 - b0)
        p = idx.astype(float) * h
        p[:, a] += t * h
        pts.append(p)
        axes.append(np.full(len(t), a))
        nodes.append(idx)
        ws.append(t)
    if not pts:
        d = g.ndim
        return ZeroCrossings(np.empty((0, d)), np.empty(0, int), np.empty((0, d), int), np.empty(0))
    return ZeroCrossings(
        np.concatenate(pts), np.concatenate(axes), np.concatenate(nodes), np.concatenate(ws)
    )


def _require_crossings(f: Field) -> None:
    v = f.values
    if not ((v > 0).any() and (v <= 0).any()):
        raise EmptyZeroSetError("field has no zero crossing")


# --- marching squares ------------------------------------------------------


def _edge_points_2d(v: NDArray[np.float64], h: float):
    """Crossing points on the four edges of every cell: (4, nx-1, ny-1, 2)."""
    f00, f10 = v[:-1, :-1], v[1:, :-1]
    f01, f11 = v[:-1, 1:], v[1:, 1:]
    nx, ny = f00.shape
    ii, jj = np.meshgrid(np.arange(nx, dtype=float), np.arange(ny, dtype=float), indexing="ij")

    def cross(fa, fb):
        has = (fa > 0) != (fb > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(has, fa / (fa - fb), 0.0)
        return has, t

    # edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
    has = np.empty((4, nx, ny), bool)
    pts = np.empty((4, nx, ny, 2))
    has[0], t = cross(f00, f10)
    pts[0] = np.stack([ii + t, jj], -1)
    has[1], t = cross(f10, f11)
    pts[1] = np.stack([ii + 1, jj + t], -1)
    has[2], t = cross(f01, f11)
    pts[2] = np.stack([ii + t, jj + 1], -1)
    has[3], t = cross(f00, f01)
    pts[3] = np.stack([ii, jj + t], -1)
    return has, pts * h, (f00, f10, f01, f11)


def marching_squares(f: Field) -> NDArray[np.float64]:
    """Zero-contour segments as an (m, 2, 2) array of endpoint pairs."""
    v = f.values
    has, pts, (f00, f10, f01, f11) = _edge_points_2d(v, f.grid.spacing)
    count = has.sum(axis=0)
    segs = []

    two = count == 2
    if two.any():
        order = np.argsort(~has[:, two], axis=0, kind="stable")[:2]
        p = pts[:, two]
        cols = np.arange(p.shape[1])
        segs.append(np.stack([p[order[0], cols], p[order[1], cols]], axis=1))

    four = count == 4
    if four.any():
        a, b, c, d = f00[four], f10[four], f01[four], f11[four]
        denom = a + d - b - c
        with np.errstate(divide="ignore", invalid="ignore"):
            saddle = np.where(denom != 0, (a * d - b * c) / denom, a)
        # saddle on the f00 side: f00 and f11 connect, corners f10 and f01 are cut off
        join = (saddle > 0) == (a > 0)
        p = pts[:, four]
        e1 = np.where(join, 0, 0), np.where(join, 1, 3)
        e2 = np.where(join, 2, 1), np.where(join, 3, 2)
        cols = np.arange(p.shape[1])
        for ea, eb in (e1, e2):
            segs.append(np.stack([p[ea, cols], p[eb, cols]], axis=1))

    if not segs:
        return np.empty((0, 2, 2))
    return np.concatenate(segs)


# --- marching cubes ----------------------------------------------------------


def isosurface(f: Field) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """Triangle mesh of the zero level set (vertices in length units)."""
    from skimage.measure import marching_cubes

    if f.grid.ndim != 3:
        raise ValueError("isosurface is 3D; use marching_squares for 2D fields")
    _require_crossings(f)
    h = f.grid.spacing
    verts, faces, _, _ = marching_cubes(
        f.values, level=0.0, spacing=(h, h, h), method="lewiner", allow_degenerate=False
    )
    return verts.astype(np.float64), faces.astype(np.int64)


def surface_area(f: Field) -> float:
    """Isosurface area (3D) or contour length (2D)."""
    _require_crossings(f)
    if f.grid.ndim == 2:
        segs = marching_squares(f)
        return float(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1).sum())
    verts, faces = isosurface(f)
    tri = verts[faces]
    return float(0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1).sum())


def _edge_positive_fraction(v: NDArray[np.float64], axis: int) -> NDArray[np.float64]:
    n = v.shape[axis]
    a = np.take(v, np.arange(n - 1), axis=axis)
    b = np.take(v, np.arange(1, n), axis=axis)
    pa, pb = a > 0, b > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(pa != pb, a / (a - b), 0.0)
    return np.where(pa & pb, 1.0, np.where(pa & ~pb, t, np.where(~pa & pb, 1.0 - t, 0.0)))


def enclosed_volume(f: Field) -> float:
    """Volume (area in 2D) of the ``phi > 0`` region; see the module docstring."""
    v = f.values
    if not (v > 0).any():
        raise EmptyZeroSetError("field has no positive region")
    d = v.ndim
    total = 0.0
    for a in range(d):
        e = _edge_positive_fraction(v, a)
        # average the 2^(d-1) parallel edges of each cell
        for b in range(d):
            if b != a:
                e = 0.5 * (np.take(e, np.arange(e.shape[b] - 1), axis=b) + np.take(e, np.arange(1, e.shape[b]), axis=b))
        total += e.sum()
    return float(total / d * f.grid.cell_volume)


# --- curvature fields ------------------------------------------------------


@dataclass(frozen=True)
class MaskedField:
    field: Field
    valid: NDArray[np.bool_]

    @property
    def values(self) -> NDArray[np.float64]:
        return self.field.values


def _degenerate_mask(grads, h: float) -> NDArray[np.bool_]:
    mag = np.sqrt(sum(g * g for g in grads))
    bad = mag < 1e-6 / h
    grown = bad.copy()
    for a in range(bad.ndim):
        grown[tuple(slice(1, None) if i == a else slice(None) for i in range(bad.ndim))] |= np.take(
            bad, np.arange(bad.shape[a] - 1), axis=a
        )
        grown[tuple(slice(None, -1) if i == a else slice(None) for i in range(bad.ndim))] |= np.take(
            bad, np.arange(1, bad.shape[a]), axis=a
        )
    return grown


def sum_curvature_field(f: Field) -> MaskedField:
    g = f.grid
    h, bc = g.spacing, g.boundary
    grads = gradient_array(f.values, h, bc)
    mag = np.sqrt(sum(d * d for d in grads))
    safe = np.where(mag > 0, mag, 1.0)
    normals = [np.where(mag > 0, d / safe, 0.0) for d in grads]
    div = np.zeros_like(f.values)
    for a, n in enumerate(normals):
        div += gradient_array(n, h, bc)[a]
    invalid = _degenerate_mask(grads, h)
    ks = np.where(invalid, 0.0, -div)
    return MaskedField(Field(g, ks), ~invalid)


def hessian_array(values: NDArray[np.float64], h: float, boundary: str):
    grads = gradient_array(values, h, boundary)
    d = values.ndim
    H = [[None] * d for _ in range(d)]
    lap_pad = np.pad(values, 1, mode="edge" if boundary == "mirror" else "wrap")
    core = [slice(1, -1)] * d
    for a in range(d):
        plus, minus = list(core), list(core)
        plus[a] = slice(2, None)
        minus[a] = slice(None, -2)
        H[a][a] = (lap_pad[tuple(plus)] - 2 * values + lap_pad[tuple(minus)]) / (h * h)
        for b in range(a + 1, d):
            H[a][b] = H[b][a] = gradient_array(grads[a], h, boundary)[b]
    return grads, H


def gaussian_curvature_field(f: Field) -> MaskedField:
    g = f.grid
    if g.ndim != 3:
        raise ValueError("Gaussian curvature is defined for 3D fields only")
    grads, H = hessian_array(f.values, g.spacing, g.boundary)
    gx, gy, gz = grads
    (hxx, hxy, hxz), (_, hyy, hyz), (_, _, hzz) = H
    # adjugate (cofactor) entries of the symmetric Hessian
    axx = hyy * hzz - hyz * hyz
    ayy = hxx * hzz - hxz * hxz
    azz = hxx * hyy - hxy * hxy
    axy = hxz * hyz - hxy * hzz
    axz = hxy * hyz - hxz * hyy
    ayz = hxy * hxz - hxx * hyz
    num = (
        gx * gx * axx + gy * gy * ayy + gz * gz * azz
        + 2 * (gx * gy * axy + gx * gz * axz + gy * gz * ayz)
    )
    mag2 = gx * gx + gy * gy + gz * gz
    invalid = _degenerate_mask(grads, g.spacing)
    kg = np.where(invalid, 0.0, num / np.where(invalid, 1.0, mag2 * mag2))
    return MaskedField(Field(g, kg), ~invalid)


def band_mask(f: Field, curv: MaskedField, level: float = 0.5) -> NDArray[np.bool_]:
    """Valid nodes with ``|phi| <= level``."""
    return curv.valid & (np.abs(f.values) <= level)


def band_mean(f: Field, curv: MaskedField, level: float = 0.5) -> float:
    m = band_mask(f, curv, level)
    if not m.any():
        raise EmptyZeroSetError("no valid nodes in the interface band")
    return float(curv.values[m].mean())


# --- radius tracking -------------------------------------------------------


@dataclass(frozen=True)
class RadiusStats:
    mean: float
    min: float
    max: float
    std: float
    count: int


def sphere_radius(f: Field, center) -> RadiusStats:
    zc = extract_zero_crossings(f)
    if zc.empty:
        raise EmptyZeroSetError("no zero crossings: the tracked sphere has vanished")
    c = np.asarray(center, dtype=float)[: f.grid.ndim]
    d = np.linalg.norm(zc.points - c, axis=1)
    return RadiusStats(float(d.mean()), float(d.min()), float(d.max()), float(d.std()), len(d))


@dataclass(frozen=True)
class SurfaceMetrics:
    area: float
    volume: float
    radius: float
    mean_K_S: float


def surface_metrics(f: Field, center, band_level: float = 0.5) -> SurfaceMetrics:
    ks = sum_curvature_field(f)
    try:
        mk = band_mean(f, ks, band_level)
    except EmptyZeroSetError:
        mk = float("nan")
    return SurfaceMetrics(surface_area(f), enclosed_volume(f), sphere_radius(f, center).mean, mk)


# --- mesh export -----------------------------------------------------------

MESH_HEADER = "# balancefield mesh v1"


def write_mesh(path: str | Path, verts: NDArray[np.float64], faces: NDArray[np.int64]) -> Path:
    """ASCII mesh: header, ``vertices N`` + N lines ``x y z``, ``triangles M`` + M lines ``i j k`` (0-based)."""
    path = Path(path)
    lines = [MESH_HEADER, f"vertices {len(verts)}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in verts]
    lines.append(f"triangles {len(faces)}")
    lines += [" ".join(str(int(i)) for i in t) for t in faces]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_mesh(path: str | Path) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    lines = Path(path).read_text().splitlines()
    if lines[0] != MESH_HEADER:
        raise ValueError(f"not a balancefield mesh: {lines[0]!r}")
    nv = int(lines[1].split()[1])
    verts = np.array([l.split() for l in lines[2 : 2 + nv]], dtype=float).reshape(nv, 3)
    nt = int(lines[2 + nv].split()[1])
    faces = np.array([l.split() for l in lines[3 + nv : 3 + nv + nt]], dtype=np.int64).reshape(nt, 3)
    return verts, faces
