"""Residual energy against annealing time for every schedule family.

Linear schedules run on N = 1024 both digitized and continuous; the
optimised Roland-Cerf and power-law families run on the infinite chain,
and the regular solutions are placed at tau = sum(gamma + beta).
"""
import argparse
from pathlib import Path

from ringqaoa import cli

RUNS = [
    ("linear_digitized", ["--n", "1024", "--family", "linear"]),
    ("linear_continuous", ["--n", "1024", "--family", "linear", "--mode", "continuous"]),
    ("roland_cerf", ["--n", "0", "--family", "roland_cerf"]),
    ("power_law", ["--n", "0", "--family", "power_law"]),
    ("regular", ["--n", "1024", "--family", "regular", "--p-max", "128"]),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    for name, extra in RUNS:
        code = cli.main(["scaling", *extra, "--out", str(args.out / f"scaling_{name}")])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
