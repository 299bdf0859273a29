#!/usr/bin/env python3
"""Monte-Carlo local time vs its analytic expectation over a width sweep.

Example:
    python scripts/localtime_mc.py --hurst '{"const": 0.7}' --d 2 \
        --n-paths 5000 --eps 0.5 0.1 0.02
"""
import argparse
import json

from mbmlt.localtime import RegularizationParams, expected_local_time, local_time_mc
from mbmlt.simulate import SimulationConfig, simulate
from mbmlt.specfun import HurstFunctional


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hurst", default='{"const": 0.7}')
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--s", type=int, default=512)
    ap.add_argument("--n-paths", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--N", type=int, default=0, choices=[0, 1])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.1, 0.02])
    args = ap.parse_args()

    h = HurstFunctional.from_config(json.loads(args.hurst), T=args.T)
    cfg = SimulationConfig(h=h, s=args.s, n_paths=args.n_paths, d=args.d,
                           seed=args.seed)
    paths = simulate(cfg)
    print(f"h: {h.description}   d={args.d}  N={args.N}  n_paths={args.n_paths}")
    print(f"{'eps':>8}  {'MC estimate':>12}  {'stderr':>10}  {'analytic':>10}  {'|z|':>6}")
    for eps in args.eps:
        est = local_time_mc(paths, RegularizationParams(eps=eps, N=args.N))
        target = 0.0 if args.N == 1 else expected_local_time(h, eps, args.T, args.d)
        z = abs(est.estimate - target) / est.stderr if est.stderr > 0 else 0.0
        print(f"{eps:>8.3g}  {est.estimate:>12.6f}  {est.stderr:>10.6f}  "
              f"{target:>10.6f}  {z:>6.2f}")


if __name__ == "__main__":
    main()
