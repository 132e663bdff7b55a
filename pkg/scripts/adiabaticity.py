"""Shannon entropy of regular, linear and random-start schedules at N = 1024."""
import argparse
from pathlib import Path

from ringqaoa import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", default="16,32,64,128")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    raise SystemExit(cli.main(["entropy", "--n", "1024", "--p", args.p, "--out", str(args.out / "entropy")]))


if __name__ == "__main__":
    main()
