"""Unroll the hemisphere tail and watch lambda_{1,1} climb to the disc value.

Run: python3 demos/unrolling_trace.py
"""

import math

import numpy as np

from revolute.bessel_ref import disc_eigenvalue
from revolute.meridian import CurveFamily, build_family
from revolute.surgery import HomotopyParams, run_pipeline

hemi = build_family(CurveFamily("spherical_cap", {"radius": 1.0, "angle": math.pi / 2}), 4097)
rep = run_pipeline(hemi, 1, 1, HomotopyParams(s_samples=33))
tr = rep.trace

print(f"Lambda (mixed problem on [z0, P]) = {rep.Lambda:.6f}")
print("     s      L*_s       lambda      Dini")
for s, L, lam, d in zip(tr.s_grid[::4], tr.L_star[::4], tr.lambdas[::4], tr.dini[::4]):
    print(f"  {s:5.3f}  {L:8.5f}  {lam:11.6f}  {d:9.4f}")
print(f"disc value j_(1,1)^2 = {disc_eigenvalue(1.0, 1, 1):.6f}")
print(f"largest step {tr.max_jump:.3e}, all steps non-negative: {bool(np.all(np.diff(tr.lambdas) >= 0))}")
print(f"pointwise bound max over sampled s: {max(b.max_value for b in rep.bounds):.3e}")
