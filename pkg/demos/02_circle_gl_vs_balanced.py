"""
A shrinking circle and one that stays put
=========================================

Start the same circle on a 2D grid and evolve it once with Ginzburg-Landau
weights and once with balanced weights.  GL follows curvature flow,
R(t)^2 = R0^2 - 2t; the balanced model holds the radius almost fixed.
"""

import math

from balancefield.grid import GridSpec
from balancefield.harness.experiments import tracked_radius
from balancefield.model import EvolveConfig, evolve, gl_weights_for_width, stable_dt, weights_from_width
from balancefield.profile import SignedDistanceInit, init_field
from balancefield.surfaces import Sphere

g = GridSpec((64, 64))
circle = Sphere(20.0, g.center)
W, T = 6.0, 60.0
f0 = init_field(g, SignedDistanceInit(circle), W)

# %%
# Record the radius once per unit time for both models.
tracks = {}
for name, wt in (("gl", gl_weights_for_width(W)), ("balanced", weights_from_width(W))):
    dt = stable_dt(g, wt)
    steps = int(round(T / dt))
    every = int(round(10.0 / dt))
    rows = []
    evolve(f0, wt, EvolveConfig(dt, steps, every), lambda k, f, dt=dt, rows=rows: rows.append((k * dt, tracked_radius(f, circle))))
    tracks[name] = rows

# %%
print(" t      GL radius   curvature flow   balanced radius")
for (t, r_gl), (_, r_bal) in zip(tracks["gl"], tracks["balanced"]):
    print(f"{t:5.1f}   {r_gl:9.4f}   {math.sqrt(400 - 2 * t):14.4f}   {r_bal:15.4f}")
