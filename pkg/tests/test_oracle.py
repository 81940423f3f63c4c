import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from balancefield.model import gl_weights, weights_from_width
from balancefield.oracle import (
    WELL_BAND,
    CurvatureSample,
    FocalPointError,
    adapted_log_metric_derivative,
    appendix_integrals,
    double_well_band_integral,
    elastica_gap,
    energy_by_width,
    flat_band_quadrature,
    gaussian_area_identity,
    metric_factor,
    pointwise_terms,
    stationary_line_tension,
    zero_set_residual,
    zero_set_velocity,
)
from balancefield.surfaces import Plane, Sphere, Torus

SWEEP = (2.0, 4.0, 6.0, 8.0, 12.0)


class TestMetric:
    @given(st.floats(1.0, 100.0), st.floats(-0.99, 0.99))
    def test_sphere_offset_area_ratio(self, R, frac):
        w = frac * R
        assert metric_factor(w, CurvatureSample.on(Sphere(R))) == pytest.approx((R - w) ** 2 / R**2, abs=1e-12)

    @given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-5, 5))
    def test_factors_by_principal_curvatures(self, k1, k2, w):
        c = CurvatureSample(k1 + k2, k1 * k2)
        assert metric_factor(w, c) == pytest.approx((1 - w * k1) * (1 - w * k2), abs=1e-12)

    def test_log_derivative_matches_finite_difference(self):
        c = CurvatureSample.on(Torus(18.0, 6.0), 0.7)
        w, e = np.linspace(-2, 2, 9), 1e-6
        fd = (np.log(metric_factor(w + e, c)) - np.log(metric_factor(w - e, c))) / (2 * e)
        np.testing.assert_allclose(adapted_log_metric_derivative(w, c), fd, rtol=1e-7)

    def test_focal_point(self):
        c = CurvatureSample.on(Sphere(4.0))
        with pytest.raises(FocalPointError) as err:
            adapted_log_metric_derivative(np.array([0.0, 4.0]), c)
        assert err.value.offset == 4.0

    def test_rejects_impossible_curvatures(self):
        with pytest.raises(ValueError):
            CurvatureSample(0.0, 1.0)
        assert CurvatureSample(1.0, -2.0).umbilic_defect == 9.0


@pytest.mark.parametrize(
    "surface, u",
    [(Sphere(20.0), np.linspace(0.05, math.pi - 0.05, 13)), (Torus(18.0, 6.0), np.linspace(0, 2 * math.pi, 25))],
)
def test_gaussian_area_identity(surface, u):
    chk = gaussian_area_identity(surface, u, np.linspace(0, 2 * math.pi, 17))
    assert chk.max_deviation <= 1e-8


def test_gaussian_identity_keeps_torus_sign():
    chk = gaussian_area_identity(Torus(18.0, 6.0), np.array([0.0, math.pi]), np.array([0.3]))
    assert chk.lhs[0, 0] > 0 > chk.lhs[1, 0]
    assert gaussian_area_identity(Plane(), [0.0, 1.0], [0.0, 2.0]).max_deviation == 0.0


class TestEnergyByWidth:
    @pytest.mark.parametrize("W", SWEEP)
    def test_balanced_weights_give_six_fifths(self, W):
        assert energy_by_width(W, weights_from_width(W), 1.0) * W == pytest.approx(1.2, rel=1e-12)

    @pytest.mark.parametrize("W", SWEEP)
    def test_quadrature_of_dominant_terms(self, W):
        wt = weights_from_width(W)
        q = flat_band_quadrature(W, wt, 3.0)
        assert q.laplacian == pytest.approx(3.0 * 24 * wt.D / W**3, rel=1e-12)
        assert q.gradient == pytest.approx(-3.0 * 12 / (5 * W), rel=1e-12)
        assert q.well == pytest.approx(3.0 * wt.lam * WELL_BAND * W, rel=1e-12)

    @pytest.mark.parametrize("W", SWEEP)
    def test_well_band_integral_is_not_a_tenth(self, W):
        val, ratio = double_well_band_integral(W)
        assert val == pytest.approx(486 * W / 5005, rel=1e-12)
        assert ratio == pytest.approx(4860 / 5005, rel=1e-12)

    def test_quadrature_sits_below_closed_form(self):
        # the well term uses W/10 where the cubic gives 486 W/5005
        W = 6.0
        wt = weights_from_width(W)
        q, closed = flat_band_quadrature(W, wt).total, energy_by_width(W, wt, 1.0)
        assert (closed - q) / closed == pytest.approx(21 / W**2 * (W / 10 - 486 * W / 5005) / (1.2 / W), rel=1e-10)


class TestZeroSetMotion:
    @given(st.floats(0.5, 40.0), st.floats(1.0, 1000.0))
    def test_sphere_is_exactly_stationary(self, W, R):
        assert zero_set_velocity(CurvatureSample.on(Sphere(R)), weights_from_width(W), W) == 0.0

    @pytest.mark.parametrize("R", [5.0, 16.0, 20.0])
    def test_gl_sphere_shrinks_at_sum_curvature(self, R):
        v = zero_set_velocity(CurvatureSample.on(Sphere(R)), gl_weights(0.6), 6.0)
        assert v == pytest.approx(-2 / R, rel=1e-15)

    def test_plane_does_not_move(self):
        for wt in (weights_from_width(6.0), gl_weights(1.0)):
            assert zero_set_velocity(CurvatureSample.on(Plane()), wt, 6.0) == 0.0

    @given(st.floats(0.0, 2 * math.pi), st.floats(4.0, 8.0))
    def test_velocity_matches_residual(self, theta, W):
        c, wt = CurvatureSample.on(Torus(18.0, 6.0), theta), weights_from_width(W)
        v = zero_set_velocity(c, wt, W)
        assert v == pytest.approx(-zero_set_residual(c, wt, W) / (3 / W), rel=1e-10, abs=1e-16)

    def test_torus_equators(self):
        wt, torus = weights_from_width(4.0), Torus(18.0, 6.0)
        outer = CurvatureSample.on(torus, 0.0)
        inner = CurvatureSample.on(torus, math.pi)
        # reference values from the closed form with D = 1
        assert zero_set_velocity(outer, wt, 4.0) == pytest.approx(0.0023871527777777, rel=1e-12)
        assert zero_set_velocity(inner, wt, 4.0) == pytest.approx(0.0086805555555555, rel=1e-12)

    def test_velocity_is_d_times_elastica_term(self):
        torus = Torus(18.0, 6.0)
        for th in np.linspace(0, 2 * math.pi, 9):
            c = CurvatureSample.on(torus, th)
            full, half = elastica_gap(c)
            assert zero_set_velocity(c, weights_from_width(6.0), 6.0) == pytest.approx(2.25 * full, rel=1e-12)
            assert half - c.lap_T_K_S == pytest.approx(0.5 * (full - c.lap_T_K_S), rel=1e-12, abs=1e-18)
        assert elastica_gap(CurvatureSample.on(Sphere(10.0))) == (0.0, 0.0)


class TestAppendix:
    def test_umbilic_laplacian_correction(self):
        W, R = 4.0, 20.0
        wt = weights_from_width(W)
        KS, KG = 2 / R, 1 / R**2
        lap = pointwise_terms(W, 1 / R, 1 / R, wt)["laplacian"]
        assert lap[1] == pytest.approx(wt.D * (12 / (5 * W) * KS**2 - 6 / (5 * W) * KG), rel=1e-12)
        assert lap[2] == pytest.approx(wt.D * 12 / (5 * W) * (KS**2 - 2 * KG), rel=1e-12)

    def test_flat_surface_has_no_corrections(self):
        terms = pointwise_terms(6.0, 0.0, 0.0, weights_from_width(6.0))
        assert all(t[1] == 0.0 and t[2] == 0.0 for t in terms.values())

    def test_focal_point_inside_band(self):
        with pytest.raises(FocalPointError):
            pointwise_terms(4.0, 0.5, 0.1, weights_from_width(4.0))

    @pytest.mark.parametrize("surface", [Sphere(20.0), Torus(18.0, 6.0)])
    def test_closed_forms_match_quadrature(self, surface):
        for t in appendix_integrals(4.0, surface, weights_from_width(4.0)):
            assert t.exact_closed == pytest.approx(t.exact_quadrature, rel=1e-8)
            assert t.ratio == pytest.approx(t.ratio_quadrature, abs=1e-8)

    def test_sphere_ratios_are_small(self):
        terms = appendix_integrals(4.0, Sphere(20.0), weights_from_width(4.0))
        assert max(abs(t.ratio) for t in terms) <= 0.05
        assert {t.constituent for t in terms} == {"laplacian", "gradient", "well"}

    def test_plane_ratios_vanish(self):
        for t in appendix_integrals(6.0, Plane(), weights_from_width(6.0)):
            assert t.ratio == 0.0 and t.neglected == 0.0


@pytest.fixture(scope="module")
def tensions():
    return {W: stationary_line_tension(weights_from_width(W), W) for W in (4.0, 6.0, 8.0)}


class TestLineTension:
    def test_dilation_identity(self, tensions):
        for t in tensions.values():
            assert t.sigma == pytest.approx(t.virial_sigma, rel=1e-6)

    def test_scale_free_speed(self, tensions):
        # with D ~ W^2 and lam ~ 1/W^2 the profile is a rescaled copy, so sigma W is constant
        s = [t.speed_per_curvature for t in tensions.values()]
        assert max(s) - min(s) <= 1e-8
        assert tensions[4.0].sigma * 4 == pytest.approx(tensions[8.0].sigma * 8, rel=1e-7)

    def test_relaxed_profile_keeps_positive_tension(self, tensions):
        t = tensions[6.0]
        assert t.sigma > 0 and t.speed_per_curvature < -0.05
        assert t.peak > 1.1 and t.slope_at_zero > 3 / 6.0

    def test_sphere_speed(self, tensions):
        c = CurvatureSample.on(Sphere(16.0))
        assert tensions[6.0].velocity(c) == pytest.approx(0.125 * tensions[6.0].speed_per_curvature)

    def test_requires_balanced_weights(self):
        with pytest.raises(ValueError):
            stationary_line_tension(gl_weights(1.0), 6.0)
