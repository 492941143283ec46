"""Exponential integral E1 at near machine precision.

Samples E1 log-uniformly over twelve decades, compares against the
independent series / continued-fraction oracle, and reports the worst
relative error.  Arguments above 34 return exactly zero: E1 there is
below the resolution of the double-precision Hamiltonian sums it feeds.
"""

import numpy as np

from vortexblob import e1_reference, exp_integral_e1

xs = np.exp(np.linspace(np.log(1e-12), np.log(34.0), 5000))
xs = np.minimum(xs, 34.0)
values = exp_integral_e1(xs)
refs = np.array([e1_reference(x) for x in xs])
rel = np.abs(values - refs) / np.abs(refs)
print(f"sampled {xs.size} points on [1e-12, 34]")
print(f"max relative error {rel.max():.3e} at x = {xs[rel.argmax()]:.6g}")
print(f"E1(1)      = {exp_integral_e1(1.0):.17g}")
print(f"E1(34)     = {exp_integral_e1(34.0):.17g}")
print(f"E1(34.001) = {exp_integral_e1(34.001):.17g} (hard zero above the cutoff)")
