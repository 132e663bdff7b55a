"""Distinct global minima reached from random starts at N = 50, P = 1..4."""
import argparse
from pathlib import Path

from ringqaoa import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--starts", default="10000")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    for P in range(1, 5):
        code = cli.main(["minima", "--n", "50", "--p", str(P), "--starts", args.starts, "--seed", str(60 + P),
                         "--out", str(args.out / f"minima_P{P}")])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
