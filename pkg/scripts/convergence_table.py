#!/usr/bin/env python3
"""Tabulate the S-transform gap between regularized and limiting local times.

Example:
    python scripts/convergence_table.py --hurst '{"const": 0.6}' --d 2 --N 1 \
        --eps 1e-1 1e-2 1e-3 1e-4
"""
import argparse
import json

from mbmlt.chaos import GaussianBump, TestFunction, convergence_eps, s_transform_local_time
from mbmlt.specfun import HurstFunctional


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hurst", default='{"const": 0.6}')
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--eps", type=float, nargs="+",
                    default=[1e-1, 1e-2, 1e-3, 1e-4])
    ap.add_argument("--test-function", help="JSON test-function spec; default "
                    "is a Gaussian bump per component, offset from the origin")
    args = ap.parse_args()

    h = HurstFunctional.from_config(json.loads(args.hurst), T=args.T)
    if args.test_function:
        phi = TestFunction.from_config(json.loads(args.test_function))
    else:
        phi = TestFunction(tuple(
            GaussianBump(1.0, 1.0 + 0.5 * j, 0.3) for j in range(args.d)
        ))

    limit = s_transform_local_time(h, args.N, args.T, phi)
    rows = convergence_eps(h, args.N, args.T, phi, args.eps)
    print(f"h: {h.description}   d={args.d}  N={args.N}  limit={limit:.8g}")
    print(f"{'eps':>10}  {'value':>14}  {'gap':>12}  {'rel gap':>10}")
    for r in rows:
        print(f"{r.eps:>10.1e}  {r.value:>14.8g}  {r.gap:>12.4e}  "
              f"{r.gap / abs(limit):>10.4e}")


if __name__ == "__main__":
    main()
