"""
A normal form on the stability boundary, 4 a1 a4 = a3^2.

With a1 = a4 = 1, a3 = 2, a2 = 0 the potential vanishes along the curve
z^2 = w, so it is not confining in every direction.  The spectrum is still
discrete: eigenvalues do not move when the finite-difference box grows.
The oscillator basis, tuned for confining wells, converges slowly along the
flat valley; compare its third digit with the grid.

    python demos/marginal_case.py
"""

import numpy as np

from hbondvib.nf_solver import decay_rate_estimate, normal_form_spectrum
from hbondvib.oracle import FdGrid, fd_solve
from hbondvib.surface import NormalFormCoefficients, classify_stability

c = NormalFormCoefficients(1.0, 0.0, 2.0, 1.0)
st = classify_stability(c)
print(f"stability: {st.variant.value}, margin 4 a1 a4 - a3^2 = {st.margin:g}")

w = np.linspace(0, 9, 4)
print("potential along the valley z^2 = w:", c.a1 * w ** 2 + (c.a2 - c.a3 * w) * w + c.a4 * w ** 2)

print("\nbox half-width   lowest three eigenvalues (h = 0.05)")
for L in (6.0, 8.0, 12.0):
    e = fd_solve(c, FdGrid.square(L, 0.05), 3).eigenvalues
    print(f"  {L:5.1f}          {e}")

s = normal_form_spectrum(c, 60, 60, k=3)
print(f"\noscillator basis 60 x 60:       {s.eigenvalues}")

d = decay_rate_estimate(s, 0, a_list=(0.5, 1.0))
print(f"weighted norms ||exp(a<x>) f0|| for a = 0.5, 1: {np.round(d.weighted_norms, 4)}, "
      f"grid-stable: {d.stable}")
