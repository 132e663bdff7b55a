"""BFGS iterations to reach the bound within 1e-5, random against iterative starts."""
import argparse
from pathlib import Path

from ringqaoa import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    runs = [("random", "2,4,8,16,32,64"), ("iterative", "2,3,4,6,8,12,16,24,32,48,64,96,128")]
    for mode, ps in runs:
        code = cli.main(["cost", "--mode", mode, "--p", ps, "--out", str(args.out / f"cost_{mode}")])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
