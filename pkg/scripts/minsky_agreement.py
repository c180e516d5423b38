"""Run every bundled two-counter machine next to its four encodings and
report whether each encoding fails exactly when the machine halts."""
import argparse
import json
import time

from storepass.corpus import machines
from storepass.encode import agreement


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fuel", type=int, default=200_000, help="evaluation steps per encoding")
    ap.add_argument("--steps", type=int, default=10_000, help="machine steps before giving up")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rows = []
    for e in machines():
        t0 = time.perf_counter()
        a = agreement(e.machine(), args.fuel, args.steps)
        row = {"id": e.id, "expected": e.expected, **a.to_json(),
               "seconds": round(time.perf_counter() - t0, 3)}
        rows.append(row)
        if not args.json:
            outs = " ".join(f"{k}={v}" for k, v in a.outcomes.items())
            print(f"{'ok  ' if a.ok else 'FAIL'} {e.id:13} halts={a.halts!s:5} "
                  f"steps={a.steps!s:5} trace={a.trace_matches!s:5} {outs}")
    if args.json:
        print(json.dumps(rows, indent=1))
    return 0 if all(r["ok"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
