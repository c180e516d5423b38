"""Shape of the random well-typed program generator: failures, mean size,
mean number of `*`, and how often a closure carries a local store."""
import argparse

from storepass.reach import generation_stats
from storepass.syntax import BaseKind


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=1000)
    ap.add_argument("--size", type=int, default=30)
    ap.add_argument("--base", choices=["bool", "int"], default="bool")
    args = ap.parse_args()
    stats = generation_stats(range(args.programs), args.size, BaseKind(args.base))
    for k, v in stats.items():
        print(f"{k:24} {v:.3f}" if isinstance(v, float) else f"{k:24} {v}")


if __name__ == "__main__":
    main()
