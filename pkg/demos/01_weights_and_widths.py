"""
Balanced weights and the energy of a straight interface
=======================================================

The balanced model picks its two weights from a single transition width W.
This script walks through what that choice does to the energy of a flat
interface.
"""

import numpy as np

from balancefield.model import balance_residuals, optimal_width, weights_from_width
from balancefield.oracle import double_well_band_integral, energy_by_width, flat_band_quadrature

# %%
# Weights for a few widths.  Both residuals vanish and the width that
# minimises the energy curve is W itself.
for W in (2.0, 4.0, 6.0, 8.0, 12.0):
    wt = weights_from_width(W)
    r1, r2 = balance_residuals(W, wt)
    print(f"W = {W:4.1f}   D = {wt.D:7.4f}   lam = {wt.lam:7.4f}   residuals = ({r1:g}, {r2:g})"
          f"   optimal width = {optimal_width(wt):.15g}")

# %%
# The closed-form energy per unit area is 6 / (5 W) for the balanced weights.
# Direct quadrature of the cubic profile gives a slightly smaller number,
# because the double-well integral over the band is 486 W / 5005 rather than W / 10.
print()
for W in (4.0, 6.0):
    wt = weights_from_width(W)
    closed = energy_by_width(W, wt, 1.0)
    quad = flat_band_quadrature(W, wt).total
    well, ratio = double_well_band_integral(W)
    print(f"W = {W}: closed form {closed:.6f}  quadrature {quad:.6f}  gap {(closed - quad) / closed:.2%}")
    print(f"        well integral {well:.6f} = {ratio:.4f} x (W / 10)")

# %%
# The energy curve itself: a single interior minimum at W = 6 for the W = 6 weights.
wt = weights_from_width(6.0)
Ws = np.linspace(2.0, 16.0, 8)
print()
print("W      E(W) with the W = 6 weights")
for W, e in zip(Ws, (energy_by_width(W, wt, 1.0) for W in Ws)):
    print(f"{W:5.1f}  {e:.5f}")
