"""Walk one surface through the surgery stages and print lambda_{K,N} at each.

Run: python3 demos/surgery_chain.py [seed]
"""

import sys

from revolute.meridian import build_family, family_from_seed
from revolute.surgery import HomotopyParams, run_pipeline

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 7
alpha = build_family(family_from_seed("bumped_disc", seed), 4097)

for K, N in ((0, 1), (1, 1), (1, 2), (2, 3)):
    rep = run_pipeline(alpha, K, N, HomotopyParams(s_samples=32))
    ctx = rep.context
    print(f"(K,N)=({K},{N})  mu={ctx.mu:.6f}  A={ctx.A:.6f}  sunrise intervals={len(ctx.V)}")
    for name, lam in ctx.stage_lambdas.items():
        print(f"  {name:6s} {lam:12.6f}")
    print(f"  {'omega':6s} {rep.omega_lambda:12.6f}   (Bessel {rep.omega_lambda_bessel:.6f})")
    if rep.trace is not None:
        tr = rep.trace
        print(f"  trace on [z, L*]: z={rep.z:.5f}  {tr.lambdas[0]:.6f} -> {tr.lambdas[-1]:.6f}"
              f"  monotone={tr.monotone}  Lambda={rep.Lambda}")
    off = [k for k, v in rep.flags.items() if v is False]
    print(f"  flags not holding: {off or 'none'}\n")
