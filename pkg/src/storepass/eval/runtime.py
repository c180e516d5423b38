"""Typing of run-time states ``(R, H) : Γ`` and a type-preservation monitor.

Two independent decision procedures are provided:

* :func:`check_runtime_state` computes, for every binding, the set of heap
  locations its value owns (a location owns itself and what its cell owns;
  a closure owns what its captured environment owns) and checks that those
  sets are pairwise disjoint.  Heap cells owned by nobody are allowed.
* :func:`check_runtime_state_exhaustive` searches all ways of splitting the
  heap among the bindings, following the typing rules literally.  It is
  exponential and limited to small heaps; tests use it as an oracle.

Closures are typed through the ownership derivation of the program that
created them: the derivation records, for every function node, its type
and the environment ``Δ`` its body was checked under.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import List, Optional

from ..syntax.ast import BaseKind, Fix, Lam, Term
from ..typecheck.ownership import Judgment, OwnershipError, typecheck_refl
from ..typecheck.types import (
    BaseT, FullType, FunT, RecFunT, RefT, TypeEnv, UnitT, store_size, zonk,
)
from .bigstep import DEFAULT_FUEL, eval_source
from .values import UNIT, Closure, LocV, TupleV, Val

EXHAUSTIVE_LIMIT = 8
RESULT_VAR = "$result"


@dataclass
class RuntimeCheck:
    ok: bool
    witness: str = ""

    def __bool__(self):
        return self.ok


class _Reject(Exception):
    pass


def _closure_typing(judgment: Optional[Judgment], clo: Closure):
    if judgment is None:
        raise _Reject(f"no derivation available to type {clo!r}")
    try:
        info = judgment.info(clo.fun)
    except KeyError:
        raise _Reject(f"{clo!r} was not created by the checked program") from None
    return zonk(info.type), info.extra["delta"]


def _same(a, b) -> bool:
    if isinstance(a, (bool, int)) or isinstance(a, (LocV, TupleV)):
        return type(a) is type(b) and a == b
    return a is b


def _check_recfun(R, x, ty: RecFunT, judgment):
    v = R[x]
    if not isinstance(v, Closure) or not isinstance(v.fun, Fix):
        raise _Reject(f"{x} should be a recursive function, found {v!r}")
    if judgment is not None:
        _, delta = _closure_typing(judgment, v)
        if delta.names() != ty.captured.names():
            raise _Reject(f"{x} captures {delta.names()}, type says {ty.captured.names()}")
    for y in ty.captured.names():
        if y not in v.env:
            raise _Reject(f"closure of {x} lacks captured variable {y}")
        if y in R and not _same(R[y], v.env[y]):
            raise _Reject(f"closure of {x} disagrees with the environment on {y}")


# --------------------------------------------------------------------------
# footprint route


def _footprint(v, ty: FullType, H: dict, judgment) -> frozenset:
    if isinstance(ty, UnitT):
        if v != UNIT:
            raise _Reject(f"{v!r} is not unit")
        return frozenset()
    if isinstance(ty, BaseT):
        if not isinstance(v, (bool, int)):
            raise _Reject(f"{v!r} is not a base constant")
        return frozenset()
    if isinstance(ty, RefT):
        if not isinstance(v, LocV):
            raise _Reject(f"{v!r} is not a location")
        if v not in H:
            raise _Reject(f"location {v!r} is not in the heap")
        inner = _footprint(H[v], ty.inner, H, judgment)
        if v in inner:
            raise _Reject(f"location {v!r} reaches itself")
        return inner | {v}
    if isinstance(ty, FunT):
        if not isinstance(v, Closure) or not isinstance(v.fun, (Lam, Fix)):
            raise _Reject(f"{v!r} is not a closure")
        fty, delta = _closure_typing(judgment, v)
        if fty != ty:
            raise _Reject(f"closure has type {fty}, expected {ty}")
        if store_size(delta) != store_size(ty):
            raise _Reject(f"closure owns {store_size(delta)} cells, type says {store_size(ty)}")
        return _env_footprint(v.env, delta, H, judgment)
    raise _Reject(f"a value cannot have type {ty}")


def _env_footprint(R: dict, env: TypeEnv, H: dict, judgment) -> frozenset:
    used = frozenset()
    for x, ty in env:
        if x not in R:
            raise _Reject(f"{x} is not bound")
        if isinstance(ty, RecFunT):
            _check_recfun(R, x, ty, judgment)
            continue
        fp = _footprint(R[x], ty, H, judgment)
        clash = fp & used
        if clash:
            raise _Reject(f"{x} shares {sorted(l.id for l in clash)} with an earlier binding")
        used |= fp
    return used


def check_runtime_state(R: dict, H: dict, env: TypeEnv,
                        judgment: Optional[Judgment] = None) -> RuntimeCheck:
    """Decide ``(R, H) : env``; closures are typed through ``judgment``."""
    try:
        _env_footprint(R, env, H, judgment)
    except _Reject as e:
        return RuntimeCheck(False, str(e))
    return RuntimeCheck(True)


# --------------------------------------------------------------------------
# exhaustive route


def _subsets(s: frozenset):
    items = sorted(s, key=lambda l: l.id)
    for k in range(len(items) + 1):
        for c in combinations(items, k):
            yield frozenset(c)


def check_runtime_state_exhaustive(R: dict, H: dict, env: TypeEnv,
                                   judgment: Optional[Judgment] = None) -> RuntimeCheck:
    """The same judgment decided by searching every heap split."""
    if len(H) > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search is limited to {EXHAUSTIVE_LIMIT} heap cells")

    @lru_cache(maxsize=None)
    def value_ok(vkey, S: frozenset, ty) -> bool:
        v = vals[vkey]
        if isinstance(ty, (UnitT, BaseT)):
            if S:
                return False
            return v == UNIT if isinstance(ty, UnitT) else isinstance(v, (bool, int))
        if isinstance(ty, RefT):
            if not isinstance(v, LocV) or v not in S:
                return False
            return value_ok(key(H[v]), S - {v}, ty.inner)
        if isinstance(ty, FunT):
            if not isinstance(v, Closure):
                return False
            try:
                fty, delta = _closure_typing(judgment, v)
            except _Reject:
                return False
            if fty != ty or store_size(delta) != store_size(ty):
                return False
            return env_ok(key(v.env), tuple(delta), S)
        return False

    @lru_cache(maxsize=None)
    def env_ok(rkey, bindings: tuple, S: frozenset) -> bool:
        if not bindings:
            return True
        Rx = vals[rkey]
        x, ty = bindings[-1]
        if x not in Rx:
            return False
        if isinstance(ty, RecFunT):
            try:
                _check_recfun(Rx, x, ty, judgment)
            except _Reject:
                return False
            return env_ok(rkey, bindings[:-1], S)
        for part in _subsets(S):
            if value_ok(key(Rx[x]), part, ty) and env_ok(rkey, bindings[:-1], S - part):
                return True
        return False

    vals = {}

    def key(v):
        k = id(v)
        vals[k] = v
        return k

    ok = env_ok(key(R), tuple(env), frozenset(H))
    return RuntimeCheck(ok, "" if ok else "no heap split satisfies the environment")


# --------------------------------------------------------------------------
# states and the monitor


def initial_state(env: TypeEnv, base: BaseKind = BaseKind.BOOL, values: Optional[dict] = None):
    """A run-time state for ``env`` built from fresh cells.

    ``values`` may give the base value for a variable (or for the contents
    of a reference variable); the default is false / 0."""
    values = values or {}
    default = False if base is BaseKind.BOOL else 0
    R, H = {}, {}

    def build(ty, seed):
        if isinstance(ty, UnitT):
            return UNIT
        if isinstance(ty, BaseT):
            return seed
        if isinstance(ty, RefT):
            l = LocV(len(H))
            H[l] = None
            H[l] = build(ty.inner, seed)
            return l
        raise ValueError(f"cannot build an initial value of type {ty}")

    for x, ty in env:
        R[x] = build(ty, values.get(x, default))
    return R, H


@dataclass
class MonitorReport:
    outcome: object
    checks: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def monitor_eval(term: Term, env: TypeEnv, R: Optional[dict] = None, H: Optional[dict] = None,
                 fuel: int = DEFAULT_FUEL, oracle=None, base: BaseKind = BaseKind.BOOL,
                 judgment: Optional[Judgment] = None) -> MonitorReport:
    """Evaluate an accepted program, checking after every let-bound
    subterm and at the end that the state is typed by the derivation's
    environment extended with the result."""
    j = judgment or typecheck_refl(env, term)
    if R is None:
        R, H = initial_state(env, base)
    H = H or {}
    report = MonitorReport(None)

    def check(R_, H_, env_, where):
        report.checks += 1
        r = check_runtime_state(R_, H_, env_, j)
        if not r.ok and len(report.violations) < 20:
            report.violations.append(f"{where}: {r.witness}")

    check(R, H, j.pre, "initial state")

    def on_let(node, v, R1, H1):
        info = j.info(node)
        extended = dict(R1)
        extended[RESULT_VAR] = v
        check(extended, H1, info.extra["mid"].extend(RESULT_VAR, info.extra["bound_type"]),
              f"after the binding of {node.name}")

    out = eval_source(j.term, R, H, fuel=fuel, oracle=oracle, on_let=on_let)
    report.outcome = out
    if isinstance(out, Val):
        final = dict(out.env)
        final[RESULT_VAR] = out.value
        check(final, out.heap, j.post.extend(RESULT_VAR, j.type), "final state")
    return report


__all__ = [
    "RuntimeCheck", "check_runtime_state", "check_runtime_state_exhaustive",
    "initial_state", "MonitorReport", "monitor_eval", "OwnershipError",
]
