"""Differential suite: each benchmark source/translation pair over its
sampled inputs, then N generated programs with every boolean choice
sequence explored.  Prints totals; --json writes one row per program."""
import argparse
import json
import time

from storepass.corpus import benchmarks
from storepass.reach import diff_test, gen_well_typed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=1000)
    ap.add_argument("--size", type=int, default=30)
    ap.add_argument("--max-choices", type=int, default=6)
    ap.add_argument("--fuel", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0, help="first generator seed")
    ap.add_argument("--monitor", action="store_true", help="type-check every run-time state")
    ap.add_argument("--json", metavar="PATH")
    args = ap.parse_args()

    t0 = time.perf_counter()
    reports = [diff_test(e.program("source").term, fuel=e.fuel, max_choices=e.max_choices,
                         base=e.base, int_domain=e.int_domain, monitor=args.monitor, name=e.id)
               for e in benchmarks() if e.source]
    for s in range(args.seed, args.seed + args.programs):
        reports.append(diff_test(gen_well_typed(s, args.size), fuel=args.fuel,
                                 max_choices=args.max_choices, monitor=args.monitor,
                                 name=f"gen{s}"))
    dt = time.perf_counter() - t0

    paths = sum(r.paths for r in reports)
    oof = sum(r.out_of_fuel for r in reports)
    bad = [r.program for r in reports if r.disagreements]
    print(f"programs       {len(reports)}")
    print(f"paths          {paths}")
    print(f"out of fuel    {oof} ({100 * oof / max(paths, 1):.2f}%)")
    print(f"disagreements  {len(bad)} {' '.join(bad)}")
    if args.monitor:
        print(f"states checked {sum(r.monitor_checks for r in reports)}")
        print(f"violations     {sum(len(r.violations) for r in reports)}")
    print(f"time           {dt:.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_json() for r in reports], fh, indent=1)
    return 1 if bad or any(r.violations for r in reports) else 0


if __name__ == "__main__":
    raise SystemExit(main())
