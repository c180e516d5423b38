"""Bounded reproduction of the benchmark safety table: the hand-written
target of each benchmark, plus the source and its translation where a
source exists, searched for a run reaching fail."""
import argparse
import time

from storepass.corpus import benchmarks
from storepass.reach import FAIL_REACHABLE, check_reach, replay
from storepass.eval import Failed
from storepass.translate import translate
from storepass.typecheck import TypeEnv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fuel", type=int, help="override each entry's fuel")
    args = ap.parse_args()

    print(f"{'program':20} {'expected':9} {'target':15} {'source':15} {'translated':15} paths  time")
    wrong = 0
    for e in benchmarks():
        fuel = args.fuel or e.fuel
        kw = dict(fuel=fuel, max_choices=e.max_choices, base=e.base, int_domain=e.int_domain)
        runs = {"target": (e.program("target").term, "target")}
        if e.source:
            src = e.program("source").term
            runs["source"] = (src, "refl")
            runs["translated"] = (translate(TypeEnv(), src, base=e.base)[0], "target")
        t0 = time.perf_counter()
        cols, paths = {}, 0
        for k, (t, lang) in runs.items():
            r = check_reach(t, lang, **kw)
            paths += r.paths
            ok = (r.verdict == FAIL_REACHABLE) == (e.expected == "unsafe")
            if r.witness is not None:
                ok &= isinstance(replay(t, lang, r.witness, fuel=fuel), Failed)
            wrong += not ok
            cols[k] = r.verdict + ("" if ok else "!")
        print(f"{e.id:20} {e.expected:9} {cols['target']:15} {cols.get('source', '-'):15} "
              f"{cols.get('translated', '-'):15} {paths:5}  {time.perf_counter() - t0:.2f}s")
    print(f"{'all verdicts as expected' if not wrong else f'{wrong} unexpected verdicts'}")
    return 1 if wrong else 0


if __name__ == "__main__":
    raise SystemExit(main())
