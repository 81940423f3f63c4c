"""Acceptance criteria, one test each, every tolerance pinned below.

Each test prints a single ``PASS``/``FAIL`` line (collected again in the
terminal summary) and then asserts the same condition.
"""

import math
from pathlib import Path

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from balancefield.grid import Field, GridSpec
from balancefield.harness.config import load_config
from balancefield.harness.experiments import run_experiment
from balancefield.model import balance_residuals, el_residual, energy, gl_weights, optimal_width, weights_from_width
from balancefield.oracle import (
    CurvatureSample,
    appendix_integrals,
    energy_by_width,
    flat_band_quadrature,
    gaussian_area_identity,
    metric_factor,
    zero_set_velocity,
)
from balancefield.surfaces import Sphere, Torus

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SWEEP = (2.0, 4.0, 6.0, 8.0, 12.0)

WEIGHT_TOL = 1e-12
ENERGY_TOL = 1e-10
METRIC_TOL = 1e-12
IDENTITY_TOL = 1e-8
GRADIENT_TOL = 1e-6
GL_TOL = 0.10
STASIS_TOL_H = 0.25
PHI_BOUND = 1.5
RECOVERY_RMS_TOL = 0.05
RECOVERY_SHIFT_TOL_H = 0.05
APPENDIX_MATCH_TOL = 1e-8
APPENDIX_RATIO_TOL = 0.05
TORUS_FACTOR = 2.0


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def smooth_field(g: GridSpec, seed: int) -> Field:
    rng = np.random.default_rng(seed)
    xs = g.coords()
    L = [n * g.spacing for n in g.dims]
    v = np.zeros(g.dims)
    for _ in range(4):
        k = [2 * math.pi * rng.integers(1, 3) / Li for Li in L]
        v += rng.uniform(0.2, 0.6) * np.cos(sum(ki * x for ki, x in zip(k, xs)) + rng.uniform(0, 2 * math.pi))
    return Field(g, v)


def test_criterion_1_weight_identity():
    worst_res, worst_w = 0.0, 0.0
    for W in SWEEP:
        wt = weights_from_width(W)
        r1, r2 = balance_residuals(W, wt)
        worst_res = max(worst_res, abs(r1) / (720 * wt.D), abs(r2) / (3 / W))
        worst_w = max(worst_w, rel(optimal_width(wt), W))
    ok = worst_res <= WEIGHT_TOL and worst_w <= WEIGHT_TOL
    report(1, "weight identity", ok,
           f"max residual {worst_res:.3g}, max width error {worst_w:.3g} (limit {WEIGHT_TOL:g})")


def test_criterion_2_energy_by_width():
    worst_q, worst_b = 0.0, 0.0
    for W in SWEEP:
        wt = weights_from_width(W)
        closed = energy_by_width(W, wt, 1.0)
        worst_q = max(worst_q, rel(flat_band_quadrature(W, wt, 1.0).total, closed))
        worst_b = max(worst_b, rel(closed, 1.2 / W))
    ok = worst_q <= ENERGY_TOL and worst_b <= ENERGY_TOL
    report(2, "energy by width", ok,
           f"quadrature vs closed form {worst_q:.4g}, closed form vs 1.2/W {worst_b:.3g} (limit {ENERGY_TOL:g})")


def test_criterion_3_adapted_metric():
    worst_m = 0.0
    for R in (5.0, 16.0, 20.0, 100.0):
        c = CurvatureSample.on(Sphere(R))
        w = np.linspace(-0.999 * R, 0.999 * R, 401)
        worst_m = max(worst_m, float(np.max(np.abs((R - w) ** 2 / R**2 - metric_factor(w, c)))))
    v = np.linspace(0.0, 2 * math.pi, 17)
    sph = gaussian_area_identity(Sphere(20.0), np.linspace(0.05, math.pi - 0.05, 13), v).max_deviation
    tor = gaussian_area_identity(Torus(18.0, 6.0), np.linspace(0.0, 2 * math.pi, 25), v).max_deviation
    ok = worst_m <= METRIC_TOL and max(sph, tor) <= IDENTITY_TOL
    report(3, "adapted metric", ok,
           f"offset area {worst_m:.3g} (limit {METRIC_TOL:g}), Gaussian identity sphere {sph:.3g} "
           f"torus {tor:.3g} (limit {IDENTITY_TOL:g})")


def test_criterion_4_gradient_consistency():
    g = GridSpec((12, 10, 8), 0.8, "periodic")
    worst = 0.0
    for kind in ("gl", "balanced"):
        wt = gl_weights(0.7) if kind == "gl" else weights_from_width(4.0)
        for seed in range(5):
            f = smooth_field(g, seed)
            d = smooth_field(g, seed + 100).values
            eps = 1e-5
            fd = (energy(f.with_values(f.values + eps * d), wt).total
                  - energy(f.with_values(f.values - eps * d), wt).total) / (2 * eps)
            an = math.fsum((el_residual(f, wt).values * d).ravel()) * g.cell_volume
            worst = max(worst, rel(fd, an))
    report(4, "gradient consistency", worst <= GRADIENT_TOL,
           f"max relative mismatch {worst:.3g} over 5 fields x 2 models (limit {GRADIENT_TOL:g})")


@pytest.mark.slow
def test_criterion_5_gl_shrinkage(tmp_path):
    res = run_experiment(load_config(CONFIGS / "gl_sphere.cfg"), tmp_path)
    worst, n = 0.0, 0
    for r in res.rows:
        ode = math.sqrt(max(256.0 - 4.0 * r.time, 0.0))
        if r.radius >= 8.0 and ode > 0:
            worst = max(worst, abs(r.radius - ode) / ode)
            n += 1
    ok = n > 10 and worst <= GL_TOL
    report(5, "GL shrinkage", ok, f"max deviation from sqrt(256 - 4t) {worst:.4g} over {n} rows (limit {GL_TOL:g})")


@pytest.mark.slow
def test_criterion_6_balanced_stasis(tmp_path):
    cfg = load_config(CONFIGS / "balanced_sphere.cfg")
    res = run_experiment(cfg, tmp_path)
    dR = abs(res.rows[-1].radius - res.rows[0].radius) / cfg.grid.spacing
    v = zero_set_velocity(CurvatureSample.on(cfg.shape), cfg.weights(), cfg.width)
    peak = max(r.max_abs_phi for r in res.rows)
    ok = dR <= STASIS_TOL_H and v == 0.0 and peak <= PHI_BOUND
    report(6, "balanced stasis", ok,
           f"|R(T) - R0| = {dR:.4g}h at T = {res.rows[-1].time:g} (limit {STASIS_TOL_H:g}h), "
           f"oracle speed {v + 0.0:g}, max|phi| {peak:.4g}")


def test_criterion_7_profile_recovery(tmp_path):
    res = run_experiment(load_config(CONFIGS / "profile_step.cfg"), tmp_path)
    s = res.summary
    shift = abs(s["zero_crossing_shift"]) / load_config(CONFIGS / "profile_step.cfg").grid.spacing
    ok = s["rms"] <= RECOVERY_RMS_TOL and shift <= RECOVERY_SHIFT_TOL_H
    report(7, "profile recovery", ok,
           f"RMS {s['rms']:.4g} (limit {RECOVERY_RMS_TOL:g}), crossing shift {shift:.3g}h "
           f"(limit {RECOVERY_SHIFT_TOL_H:g}h), ansatz gap {s['ansatz_gap_band_rms']:.4g} (report only)")


def test_criterion_8_appendix_magnitudes():
    terms = appendix_integrals(4.0, Sphere(20.0), weights_from_width(4.0))
    match = max(max(rel(t.ratio, t.ratio_quadrature), rel(t.exact_closed, t.exact_quadrature)) for t in terms)
    biggest = max(abs(t.ratio) for t in terms)
    ok = match <= APPENDIX_MATCH_TOL and biggest <= APPENDIX_RATIO_TOL
    report(8, "appendix magnitudes", ok,
           f"closed vs quadrature {match:.3g} (limit {APPENDIX_MATCH_TOL:g}), largest ratio {biggest:.4g} "
           f"(limit {APPENDIX_RATIO_TOL:g})")


@pytest.mark.slow
def test_criterion_9_torus_residual_motion(tmp_path):
    res = run_experiment(load_config(CONFIGS / "balanced_torus.cfg"), tmp_path)
    s = res.summary
    parts, signs = [], []
    for name in ("outer", "inner"):
        m, p = s[f"{name}_slope"], s[f"{name}_predicted"]
        signs.append(np.sign(m) == np.sign(p))
        within = 1 / TORUS_FACTOR <= m / p <= TORUS_FACTOR
        parts.append(f"{name} measured {m:+.4g} predicted {p:+.4g} ratio {m / p:.3g}"
                     f"{'' if within else ' (outside factor 2, report only)'}")
    report(9, "torus residual motion sign", all(signs), "; ".join(parts))
