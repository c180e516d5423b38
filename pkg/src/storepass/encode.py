"""Two-counter machines and their encodings into the extended calculi.

Each encoder turns a machine into a closed program that reaches ``fail``
exactly when the machine halts:

* ``encode_exn``: counters are chains of exception-raising closures;
* ``encode_alg``: counters are chains of effect-performing closures, case
  analysis by a handler (deep handlers need the unwrap/wrap trick to
  handle only the outermost effect);
* ``encode_sym``: counters are symbols plus a decrement function that
  remembers predecessors;
* ``encode_ref``: the symbol encoding with symbols emulated by Boolean
  reference cells.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .eval.machine import eval_exn
from .eval.values import Uncaught, Val
from .syntax.ast import (
    App, Assign, BaseKind, Calculus, Clause, Const, Deref, Fail, Fix, Gensym,
    Handle, Handler, If, Lam, Let, LetRec, LetTuple, MkRef, Perform, PrimOp, Program,
    Raise, RecBinding, SymEq, Term, Try, Tuple_, TyArrow, TyExpr, TyName,
    TyRef, TyTuple, Unit, Var,
)
from .syntax.minsky import Halt, Inc, MinskyMachine
from .syntax.ops import FreshNames, all_names, map_children
from .typecheck import simple as S

# --------------------------------------------------------------------------
# simulator


@dataclass(frozen=True)
class Config:
    pc: int
    c0: int
    c1: int

    def counter(self, j: int) -> int:
        return self.c0 if j == 0 else self.c1

    def with_counter(self, j: int, n: int) -> "Config":
        return Config(self.pc, n, self.c1) if j == 0 else Config(self.pc, self.c0, n)

    def at(self, pc: int) -> "Config":
        return Config(pc, self.c0, self.c1)


@dataclass(frozen=True)
class Halted:
    steps: int
    config: Config


@dataclass(frozen=True)
class Running:
    config: Config


def step_minsky(P: MinskyMachine, c: Config) -> Optional[Config]:
    """The successor configuration, or None at a halt instruction."""
    ins = P.program[c.pc]
    if isinstance(ins, Halt):
        return None
    if isinstance(ins, Inc):
        return c.with_counter(ins.counter, c.counter(ins.counter) + 1).at(ins.goto)
    n = c.counter(ins.counter)
    if n == 0:
        return c.at(ins.if_zero)
    return c.with_counter(ins.counter, n - 1).at(ins.if_nonzero)


def minsky_configs(P: MinskyMachine, fuel: int) -> Iterator[Config]:
    """Configurations from (0,0,0), at most ``fuel`` transitions."""
    c = Config(0, 0, 0)
    yield c
    for _ in range(fuel):
        c = step_minsky(P, c)
        if c is None:
            return
        yield c


def run_minsky(P: MinskyMachine, fuel: int):
    c = Config(0, 0, 0)
    for steps in range(fuel + 1):
        nxt = step_minsky(P, c)
        if nxt is None:
            return Halted(steps, c)
        if steps == fuel:
            break
        c = nxt
    return Running(c)


# --------------------------------------------------------------------------
# shared helpers

UNIT_TY = TyName("unit")
UU = TyArrow((UNIT_TY,), UNIT_TY)


def _seq(a: Term, b: Term) -> Term:
    return Let("_", a, b)


def _fname(i: int) -> str:
    return f"f{i}"


def _cname(j: int) -> str:
    return f"c{j}"


def _call(k: int, *pre: str) -> Term:
    return App(Var(_fname(k)), tuple(Var(x) for x in pre + ("c0", "c1")))


def _letrec(P: MinskyMachine, body_of, params, main: Term) -> Term:
    bs = tuple(RecBinding(_fname(i), params, body_of(P.program[i])) for i in P.indices)
    return LetRec(bs, main)


# --------------------------------------------------------------------------
# exceptions


def exn_numeral(n: int) -> Term:
    t: Term = Lam("x", Var("x"))
    for _ in range(n):
        t = Lam("x", Raise(UU, t))
    return t


def encode_exn(P: MinskyMachine) -> Term:
    def body(ins):
        if isinstance(ins, Halt):
            return Fail()
        if isinstance(ins, Inc):
            c = _cname(ins.counter)
            return Let(c, Lam("x", Raise(UU, Var(c))), _call(ins.goto))
        c = _cname(ins.counter)
        return Try(UU, _seq(App(Var(c), (Unit(),)), _call(ins.if_zero)), c, _call(ins.if_nonzero))

    main = App(Var("f0"), (exn_numeral(0), exn_numeral(0)))
    return _letrec(P, body, ("c0", "c1"), main)


def decode_exn_numeral(v, fuel: int = 100_000) -> int:
    """The number represented by an exception-chain closure, found by
    running it and counting the raises."""
    n = 0
    while True:
        out = eval_exn(App(Var("n"), (Unit(),)), fuel=fuel, env={"n": v})
        if isinstance(out, Val):
            return n
        if not isinstance(out, Uncaught):
            raise ValueError(f"not a numeral: {out}")
        v = out.value
        n += 1


def exn_call_trace(P: MinskyMachine, fuel: int) -> Tuple[object, List[Config]]:
    """Run the exception encoding and list the configurations its calls of
    the instruction functions pass through."""
    calls = []

    def on(ev):
        if ev.rule == "call" and ev.detail[0].startswith("f"):
            calls.append(ev.detail)

    out = eval_exn(encode_exn(P), fuel=fuel, trace=on)
    configs = [Config(int(name[1:]), decode_exn_numeral(a), decode_exn_numeral(b))
               for name, (a, b) in calls]
    return out, configs


# --------------------------------------------------------------------------
# algebraic effects

ZERO, SUCC = "opZ", "opS"
ZERO_OUTER, SUCC_OUTER = "opZ1", "opS1"
DEEP, SHALLOW = "deep", "shallow"


def eff_numeral(n: int) -> Term:
    t: Term = Lam("x", Perform(ZERO, Var("x"), Lam("y", Var("y"))))
    for _ in range(n):
        t = Lam("x", Perform(SUCC, Var("x"), t))
    return t


def _forward(*names) -> Tuple[Clause, ...]:
    return tuple(Clause(e, "x", "k", Perform(e, Var("x"), Var("k"))) for e in names)


def _wrapper_handlers():
    h_wrap = Handler("x", Var("x"), (
        Clause(ZERO_OUTER, "x", "k", Perform(ZERO, Var("x"), Var("k"))),
        Clause(SUCC_OUTER, "x", "k", Perform(SUCC, Var("x"), Var("k"))),
    ) + _forward(ZERO, SUCC))

    def rewrap():
        return Lam("y", Handle(App(Var("k"), (Var("y"),)), h_wrap))

    h_unwrap = Handler("x", Var("x"), (
        Clause(ZERO, "x", "k", Perform(ZERO_OUTER, Var("x"), rewrap())),
        Clause(SUCC, "x", "k", Perform(SUCC_OUTER, Var("x"), rewrap())),
    ) + _forward(ZERO_OUTER, SUCC_OUTER))
    return h_unwrap, h_wrap


def alg_signature(style: str) -> dict:
    sig = {ZERO: (UNIT_TY, UNIT_TY), SUCC: (UNIT_TY, UNIT_TY)}
    if style == DEEP:
        sig.update({ZERO_OUTER: (UNIT_TY, UNIT_TY), SUCC_OUTER: (UNIT_TY, UNIT_TY)})
    return sig


def encode_alg(P: MinskyMachine, style: str = SHALLOW) -> Tuple[Term, dict]:
    if style not in (DEEP, SHALLOW):
        raise ValueError(f"unknown handler style {style!r}")
    deep = style == DEEP
    z, s = (ZERO_OUTER, SUCC_OUTER) if deep else (ZERO, SUCC)

    def body(ins):
        if isinstance(ins, Halt):
            return Fail()
        c = _cname(ins.counter)
        if isinstance(ins, Inc):
            return Let(c, Lam("x", Perform(SUCC, Var("x"), Var(c))), _call(ins.goto))
        clauses = (Clause(z, "x", "k", _call(ins.if_zero)),
                   Clause(s, "x", c, _call(ins.if_nonzero)))
        if deep:
            clauses += _forward(ZERO, SUCC)
            scrutinee = App(Var("unwrap"), (Var(c), Unit()))
        else:
            scrutinee = App(Var(c), (Unit(),))
        return Handle(scrutinee, Handler("x", Var("x"), clauses))

    main = App(Var("f0"), (eff_numeral(0), eff_numeral(0)))
    t = _letrec(P, body, ("c0", "c1"), main)
    if deep:
        h_unwrap, _ = _wrapper_handlers()
        unwrap = Lam("c", Lam("x", Handle(App(Var("c"), (Unit(),)), h_unwrap)))
        t = Let("unwrap", unwrap, t)
    return t, alg_signature(style)


def unwrap_probe(n: int) -> Tuple[Term, dict]:
    """``handle (unwrap n† ()) with H`` where ``H`` answers -1 when the first
    effect is the primed zero, and otherwise counts the successor effects of
    the captured continuation.  Evaluates to ``n - 1`` for ``n >= 1`` exactly
    when unwrap exposes a primed successor whose continuation acts as the
    numeral ``(n-1)†``.  Integer base."""
    h_unwrap, _ = _wrapper_handlers()
    unwrap = Lam("c", Lam("x", Handle(App(Var("c"), (Unit(),)), h_unwrap)))
    count = Handler("x", Const(0), (
        Clause(SUCC, "x", "k", PrimOp("+", (Const(1), App(Var("k"), (Var("x"),))))),
        Clause(ZERO, "x", "k", Const(0)),
    ))
    probe = Handler("x", Const(-2), (
        Clause(ZERO_OUTER, "x", "k", Const(-1)),
        Clause(SUCC_OUTER, "x", "k", Handle(App(Var("k"), (Unit(),)), count)),
    ) + _forward(ZERO, SUCC))
    body = Handle(App(App(Var("unwrap"), (eff_numeral(n),)), (Unit(),)), probe)
    return Let("unwrap", unwrap, body), alg_signature(DEEP)


# --------------------------------------------------------------------------
# symbols

SYM_TY = TyName("sym")


def _sym_prelude(rest: Term) -> Term:
    inc = Lam("p", LetTuple(("x", "d"), Var("p"), Let("y", Gensym(), Tuple_((
        Var("y"),
        Lam("z", If(SymEq(Var("z"), Var("y")), Var("x"), App(Var("d"), (Var("z"),)))),
    )))))
    return Let("lzero", Gensym(),
               Let("iszero", Lam("x", SymEq(Var("x"), Var("lzero"))),
                   Let("dec", Lam("x", Var("lzero")),
                       Let("inc", inc, rest))))


def encode_sym(P: MinskyMachine) -> Term:
    def body(ins):
        if isinstance(ins, Halt):
            return Fail()
        c = _cname(ins.counter)
        if isinstance(ins, Inc):
            return LetTuple((c, "d"), App(Var("inc"), (Tuple_((Var(c), Var("d"))),)),
                            _call(ins.goto, "d"))
        return If(App(Var("iszero"), (Var(c),)), _call(ins.if_zero, "d"),
                  Let(c, App(Var("d"), (Var(c),)), _call(ins.if_nonzero, "d")))

    main = App(Var("f0"), (Var("dec"), Var("lzero"), Var("lzero")))
    return _sym_prelude(_letrec(P, body, ("d", "c0", "c1"), main))


def _sym_type(t: Optional[TyExpr]) -> Optional[TyExpr]:
    if t is None:
        return None
    if isinstance(t, TyName):
        return TyRef(TyName("bool")) if t.name == "sym" else t
    if isinstance(t, TyRef):
        return TyRef(_sym_type(t.inner))
    if isinstance(t, TyArrow):
        return TyArrow(tuple(_sym_type(p) for p in t.params), _sym_type(t.ret), t.store)
    if isinstance(t, TyTuple):
        return TyTuple(tuple(_sym_type(p) for p in t.items))
    return t


def sym_to_ref(t: Term) -> Term:
    """Replace symbols by Boolean cells: ``gensym`` allocates ``ref true``;
    ``a == b`` sets ``a`` to false and ``b`` to true and reads ``a``."""
    fresh = FreshNames(all_names(t))

    def go(s: Term) -> Term:
        s = map_children(s, go)
        if isinstance(s, Gensym):
            return MkRef(Const(True), s.span)
        if isinstance(s, SymEq):
            x, y = fresh.fresh("sx"), fresh.fresh("sy")
            return Let(x, s.left, Let(y, s.right, _seq(
                Assign(Var(x), Const(False)), _seq(Assign(Var(y), Const(True)), Deref(Var(x))))), s.span)
        if isinstance(s, Lam) and s.ann is not None:
            return Lam(s.param, s.body, _sym_type(s.ann), s.span)
        if isinstance(s, Fix) and s.anns is not None:
            return Fix(s.name, s.params, s.body, tuple(_sym_type(a) for a in s.anns), s.span)
        if isinstance(s, Raise):
            return Raise(_sym_type(s.ty), s.arg, s.span)
        if isinstance(s, Try):
            return Try(_sym_type(s.ty), s.body, s.binder, s.handler, s.span)
        return s

    return go(t)


def encode_ref(P: MinskyMachine) -> Term:
    return sym_to_ref(encode_sym(P))


# --------------------------------------------------------------------------
# recursion elimination with exceptions


def _curry(t: TyExpr) -> TyExpr:
    if isinstance(t, TyArrow) and len(t.params) > 1:
        return TyArrow(t.params[:1], _curry(TyArrow(t.params[1:], t.ret)))
    return t


def eliminate_recursion_exn(f: Fix, ty: Optional[TyExpr] = None) -> Term:
    """A recursion-free term equivalent to the recursive function ``f``.

    ``selfapp g`` extracts, by raising and catching, the function carried
    by ``g`` and applies it to ``g`` itself; the result behaves as ``f``.
    ``ty`` is the type of ``f`` (inferred when omitted)."""
    if not isinstance(f, Fix):
        raise TypeError("expected a recursive function")
    if ty is None:
        ty = S.to_tyexpr(S.typecheck_ext(f))
    fresh = FreshNames(all_names(f))
    sa, g, h, g2 = (fresh.fresh(s) for s in ("selfapp", "g", "h", "g"))
    carried = TyArrow((UU,), _curry(ty))
    fun_body: Term = Let(f.name, App(Var(sa), (Var(g2),)), f.body)
    for p in reversed(f.params):
        fun_body = Lam(p, fun_body)
    selfapp = Lam(g, App(
        Try(carried, _seq(App(Var(g), (Unit(),)), Raise(UNIT_TY, Unit())), h, Var(h)),
        (Var(g),)))
    thrower = Lam("_", Raise(carried, Lam(g2, fun_body)))
    return Let(sa, selfapp, Let(g, thrower, App(Var(sa), (Var(g),))))


# --------------------------------------------------------------------------
# front door

TARGETS = ("exn", "alg-shallow", "alg-deep", "sym", "ref")


def encode(P: MinskyMachine, target: str) -> Program:
    if target == "exn":
        return Program(encode_exn(P), Calculus.EXN, BaseKind.BOOL, {})
    if target in ("alg-shallow", "alg-deep"):
        t, sig = encode_alg(P, target.split("-")[1])
        return Program(t, Calculus.ALGEFF, BaseKind.BOOL, sig)
    if target == "sym":
        return Program(encode_sym(P), Calculus.SYM, BaseKind.BOOL, {})
    if target == "ref":
        return Program(encode_ref(P), Calculus.REF, BaseKind.BOOL, {})
    raise ValueError(f"unknown encoding target {target!r}; expected one of {', '.join(TARGETS)}")



# --------------------------------------------------------------------------
# agreement between a machine and its encodings

ENCODINGS = ("exn", "alg-shallow", "alg-deep", "ref")


@dataclass
class Agreement:
    halts: bool                     # within the machine step budget
    steps: Optional[int]
    outcomes: Dict[str, str]        # encoding -> rendered outcome
    trace_matches: Optional[bool]   # exception encoding vs configurations

    @property
    def ok(self) -> bool:
        reached = [o == "fail" for o in self.outcomes.values()]
        return all(r == self.halts for r in reached) and self.trace_matches is not False

    def to_json(self) -> dict:
        return {"halts": self.halts, "steps": self.steps, "outcomes": self.outcomes,
                "trace_matches": self.trace_matches, "ok": self.ok}


def agreement(P: MinskyMachine, fuel: int = 200_000, machine_steps: int = 10_000,
              targets: Tuple[str, ...] = ENCODINGS) -> Agreement:
    """Run ``P`` directly and through each encoding.  A halting machine
    must make every encoding fail and the exception encoding's calls must
    follow its configurations; a machine still running after
    ``machine_steps`` must not make any encoding fail within ``fuel``."""
    from .eval.dispatch import evaluate

    run = run_minsky(P, machine_steps)
    halts = isinstance(run, Halted)
    outcomes = {}
    for tgt in targets:
        prog = encode(P, tgt)
        outcomes[tgt] = str(evaluate(prog.term, tgt, fuel=fuel))
    trace = None
    if halts:
        # only halting runs: decoding every call of a long run is quadratic
        _, calls = exn_call_trace(P, fuel)
        trace = calls == list(minsky_configs(P, machine_steps))
    return Agreement(halts, run.steps if halts else None, outcomes, trace)
