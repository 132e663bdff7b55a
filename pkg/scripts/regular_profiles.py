"""Regular solutions and their s-profiles for N = 1024 and for N = 2P."""
import argparse
from pathlib import Path

from ringqaoa import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p-max", default="128")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    for n, sub in (("1024", "regular_n1024"), ("0", "regular_controllable")):
        code = cli.main(["regular", "--n", n, "--p-max", args.p_max, "--out", str(args.out / sub)])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
