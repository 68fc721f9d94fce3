"""Spectra of a few surfaces of revolution next to the flat disc.

Run: python3 demos/disc_and_caps.py
"""

import math

from revolute.bessel_ref import disc_spectrum
from revolute.meridian import CurveFamily, build_family, family_from_seed
from revolute.spectrum import compare_to_disc

J = 8

print("flat unit disc, first eigenvalues (k, n):")
for lam, k, n in disc_spectrum(1.0, J):
    print(f"  {lam:10.6f}  ({k}, {n})")

surfaces = {
    "hemisphere": CurveFamily("spherical_cap", {"radius": 1.0, "angle": math.pi / 2}),
    "shallow cap": CurveFamily("spherical_cap", {"radius": 2.0, "angle": 0.5}),
    "cone, slant 2": CurveFamily("cone", {"R": 1.0, "L": 2.0}),
    "random bump": family_from_seed("bumped_disc", 11),
}

for name, fam in surfaces.items():
    rep = compare_to_disc(build_family(fam, 4097), J)
    worst = min(rep.margins)
    print(f"\n{name}: verdict {rep.verdict}, smallest margin below the disc {worst:.4g}")
    for row in rep.rows[:4]:
        print(f"  j={row['j']}  {row['lambda_sigma']:10.6f}  disc {row['lambda_disc']:10.6f}")
