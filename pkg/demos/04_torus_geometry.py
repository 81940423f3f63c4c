"""
Curvature bookkeeping on a torus
================================

A torus has both signs of Gaussian curvature, so it exercises every term
of the zero-set speed: the curvature cancellation, the umbilic defect and
the surface Laplacian of the sum curvature.
"""

import numpy as np

from balancefield.model import weights_from_width
from balancefield.oracle import CurvatureSample, appendix_integrals, elastica_gap, gaussian_area_identity, zero_set_velocity
from balancefield.surfaces import Sphere, Torus

torus = Torus(18.0, 6.0)
W = 4.0
wt = weights_from_width(W)

# %%
# Principal curvatures, the elastica term and the predicted speed around the tube.
print("theta   K_S       K_G         lap_T K_S    gap        speed")
for th in np.linspace(0.0, np.pi, 7):
    c = CurvatureSample.on(torus, th)
    full, _ = elastica_gap(c)
    print(f"{th:5.2f}  {c.K_S:8.5f}  {c.K_G:+10.6f}  {c.lap_T_K_S:+10.6f}  {full:+9.6f}  {zero_set_velocity(c, wt, W):+9.6f}")

# %%
# The normal derivatives span the Gaussian curvature times the area element.
u = np.linspace(0.0, 2 * np.pi, 25)
v = np.linspace(0.0, 2 * np.pi, 17)
print()
print("Gaussian identity deviation on the torus:", gaussian_area_identity(torus, u, v).max_deviation)

# %%
# How large are the curvature terms left out of the flat energy?
print()
for label, surf in (("sphere R = 20", Sphere(20.0)), ("torus (18, 6)", torus)):
    for t in appendix_integrals(W, surf, wt):
        print(f"{label:14s} {t.constituent:10s} neglected / flat = {t.ratio:+.5f}  (quadrature {t.ratio_quadrature:+.5f})")
