"""Bounded fail-reachability and differential testing of the translation.

Programs with ``*`` are explored over every sequence of answers: a run
records the answers it consumed (unanswered requests get the first domain
value), and each recorded position then spawns siblings with the other
domain values.  Every complete choice sequence is run exactly once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from ..eval.bigstep import eval_source, eval_target
from ..eval.dispatch import evaluate
from ..eval.runtime import initial_state, monitor_eval
from ..eval.values import (
    Failed, Fuel, LocV, OutOfFuel, Oracle, Stuck, TupleV, Val, domain_for, render,
)
from ..syntax.ast import BaseKind, Term
from ..translate import translate
from ..typecheck.ownership import typecheck_refl
from ..typecheck.types import BaseT, RefT, TypeEnv, store_size

FAIL_REACHABLE = "fail-reachable"
NO_FAIL = "no-fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class Path:
    choices: tuple
    outcome: object
    steps: int


def explore(run: Callable[[Oracle, Fuel], object], domain: Sequence, fuel: int,
            max_choices: int, stop: Optional[Callable[[object], bool]] = None) -> Iterator[Path]:
    """Run ``run`` once per complete choice sequence (depth-first)."""
    domain = tuple(domain)
    todo: List[tuple] = [()]
    while todo:
        prefix = todo.pop()
        oracle = Oracle(prefix, domain, limit=max_choices)
        f = Fuel(fuel)
        out = run(oracle, f)
        taken = tuple(oracle.taken)
        yield Path(taken, out, f.used)
        if stop is not None and stop(out):
            return
        for i in range(len(taken) - 1, len(prefix) - 1, -1):
            for d in reversed(domain[1:]):
                todo.append(taken[:i] + (d,))


@dataclass
class ReachResult:
    verdict: str
    witness: Optional[tuple] = None
    steps: int = 0
    paths: int = 0
    max_depth: int = 0
    out_of_fuel: int = 0
    stuck: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else [render(c) for c in self.witness],
            "steps": self.steps,
            "paths": self.paths,
            "max_depth": self.max_depth,
            "out_of_fuel": self.out_of_fuel,
            "stuck": self.stuck,
        }


def check_reach(t: Term, lang: str = "target", fuel: int = 100_000, max_choices: int = 12,
                base: BaseKind = BaseKind.BOOL, int_domain: Sequence[int] = None,
                stop_at_fail: bool = True, env=None, heap=None) -> ReachResult:
    """Search the choice sequences of a closed program for a run reaching
    ``fail``.  ``no-fail`` means every explored run terminated without
    failing; ``inconclusive`` means none failed but some ran out of fuel or
    choices."""
    domain = domain_for(base, int_domain) if int_domain is not None else domain_for(base)

    def run(oracle, f):
        h = dict(heap) if heap is not None else None
        return evaluate(t, lang, fuel=f, oracle=oracle, env=dict(env or {}), heap=h)

    res = ReachResult(NO_FAIL)
    for p in explore(run, domain, fuel, max_choices,
                     stop=(lambda o: isinstance(o, Failed)) if stop_at_fail else None):
        res.paths += 1
        res.max_depth = max(res.max_depth, len(p.choices))
        if isinstance(p.outcome, Failed):
            if res.verdict != FAIL_REACHABLE:
                res.verdict, res.witness, res.steps = FAIL_REACHABLE, p.choices, p.steps
        elif isinstance(p.outcome, OutOfFuel):
            res.out_of_fuel += 1
        elif isinstance(p.outcome, Stuck):
            res.stuck.append(f"{list(map(render, p.choices))}: {p.outcome.reason}")
    if res.verdict != FAIL_REACHABLE and (res.out_of_fuel or res.stuck):
        res.verdict = INCONCLUSIVE
    return res


def replay(t: Term, lang: str, witness: Sequence, fuel: int = 100_000, env=None, heap=None):
    """Run once with a fixed choice sequence."""
    oracle = Oracle(tuple(witness), limit=len(witness))
    return evaluate(t, lang, fuel=fuel, oracle=oracle, env=dict(env or {}),
                    heap=dict(heap) if heap is not None else None)


# --------------------------------------------------------------------------
# differential testing


@dataclass
class DiffPair:
    choices: tuple
    source: object
    target: object
    agree: Optional[bool]  # None when excluded (out of fuel)
    note: str = ""


@dataclass
class DiffReport:
    program: str
    pairs: List[DiffPair] = field(default_factory=list)
    paths: int = 0
    out_of_fuel: int = 0
    violations: List[str] = field(default_factory=list)
    monitor_checks: int = 0

    @property
    def disagreements(self) -> List[DiffPair]:
        return [p for p in self.pairs if p.agree is False]

    @property
    def verdict(self) -> str:
        return "agree" if not self.disagreements else "disagree"

    def to_json(self) -> dict:
        return {
            "program": self.program,
            "verdict": self.verdict,
            "paths": self.paths,
            "out_of_fuel": self.out_of_fuel,
            "monitor_checks": self.monitor_checks,
            "violations": self.violations,
            "disagreements": [
                {"choices": [render(c) for c in p.choices], "source": str(p.source),
                 "target": str(p.target), "note": p.note}
                for p in self.disagreements
            ],
        }


def _expected_store(post: TypeEnv, out: Val):
    """The store tuple the translation should return, when it is determined
    by reference cells alone; None otherwise."""
    cells = []
    for x, ty in post:
        if isinstance(ty, RefT) and isinstance(ty.inner, BaseT):
            cells.append(out.heap[out.env[x]])
        elif store_size(ty) > 0:
            return None
    return cells[0] if len(cells) == 1 else TupleV(tuple(cells))


def _compare(src, tgt, post: TypeEnv) -> Tuple[Optional[bool], str]:
    if isinstance(src, OutOfFuel) or isinstance(tgt, OutOfFuel):
        return None, "out of fuel"
    if isinstance(src, Failed) or isinstance(tgt, Failed):
        ok = isinstance(src, Failed) and isinstance(tgt, Failed)
        return ok, "" if ok else "only one side failed"
    if not isinstance(src, Val) or not isinstance(tgt, Val):
        return False, "unexpected outcome"
    v = tgt.value
    if not isinstance(v, TupleV) or len(v.items) != 2:
        return False, "target result is not a (value, store) pair"
    value, store = v.items
    if isinstance(src.value, (bool, int)):
        if type(value) is not type(src.value) or value != src.value:
            return False, "different values"
    expected = _expected_store(post, src)
    if expected is not None and store != expected:
        return False, f"store {render(store)} differs from the source heap {render(expected)}"
    return True, ""


def _contents(v, H):
    while isinstance(v, LocV):
        v = H[v]
    return v


def diff_test(t: Term, env: TypeEnv = TypeEnv(), fuel: int = 100_000, max_choices: int = 6,
              base: BaseKind = BaseKind.BOOL, int_domain: Sequence[int] = None,
              values: Optional[dict] = None, monitor: bool = False,
              name: str = "program") -> DiffReport:
    """Compare the source and its translation on every choice sequence.

    ``env`` may bind base values and base references (initialised from
    ``values``).  Raises :class:`OwnershipError` if the program is
    rejected."""
    j = typecheck_refl(env, t)
    target, _, post = translate(env, t, j, base)
    R0, H0 = initial_state(env, base, values)
    S0 = {x: _contents(v, H0) for x, v in R0.items()}
    domain = domain_for(base, int_domain) if int_domain is not None else domain_for(base)
    report = DiffReport(name)

    def run_source(oracle, f):
        if monitor:
            m = monitor_eval(j.term, env, dict(R0), dict(H0), fuel=f, oracle=oracle,
                             judgment=j)
            report.monitor_checks += m.checks
            report.violations.extend(m.violations)
            return m.outcome
        return eval_source(j.term, dict(R0), dict(H0), fuel=f, oracle=oracle)

    for p in explore(run_source, domain, fuel, max_choices):
        report.paths += 1
        toracle = Oracle(p.choices, domain, limit=max_choices)
        tgt = eval_target(target, dict(S0), fuel=fuel, oracle=toracle)
        ok, note = _compare(p.outcome, tgt, post)
        if ok is not None and tuple(toracle.taken) != p.choices:
            ok, note = False, "the two sides consumed different choices"
        if ok is None:
            report.out_of_fuel += 1
        report.pairs.append(DiffPair(p.choices, p.outcome, tgt, ok, note))
    return report
