"""Optimised residual energy against depth for several ring sizes.

Writes bound_saturation.csv with the bound 1/(2P+2) (or 0 when 2P >= N)
next to the best random-start optimum.
"""
import argparse
from pathlib import Path

from ringqaoa.io import write_csv
from ringqaoa.optimize import OptimizerConfig, optimize_random
from ringqaoa.pseudospin import residual_bound


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="8,12,16,50")
    ap.add_argument("--p-max", type=int, default=12)
    ap.add_argument("--starts", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for N in (int(n) for n in args.sizes.split(",")):
        for P in range(1, args.p_max + 1):
            best, _ = optimize_random(N, P, args.starts, OptimizerConfig(rng_seed=args.seed + P))
            rows.append((N, P, best.residual, residual_bound(N, P)))
            print(f"N={N:3d} P={P:2d} eps={best.residual:.10f}")
    write_csv(args.out / "bound_saturation.csv", ["N", "P", "epsilon", "eps_bound = 1/(2P+2) or 0"], rows,
              {"starts": args.starts, "seed": args.seed})


if __name__ == "__main__":
    main()
