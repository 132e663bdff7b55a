"""Collapse distance against alpha for regular profiles, 2P < N and 2P = N."""
import argparse
from pathlib import Path

from ringqaoa import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", default="32,64,128")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    for n, sub in (("1024", "collapse_n1024"), ("0", "collapse_controllable")):
        code = cli.main(["collapse", "--n", n, "--p", args.p, "--out", str(args.out / sub)])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
