"""Small-step evaluation for the calculi with control effects.

The evaluation context is kept explicitly as a stack of frames, so the
reductions that inspect the context (catching an exception, capturing the
part of the context up to the innermost handler) are direct stack
operations.  One loop iteration is one transition and costs one unit of
fuel.

Handled languages: exceptions, algebraic effects with deep or shallow
handlers, symbols, and (for cross-checking the big-step interpreter) the
unrestricted reference language.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..syntax.ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, Gensym, Handle, If, Lam,
    Let, LetRec, LetTuple, Loc, MkRef, Perform, PrimOp, Proj, Raise, Span,
    SymEq, Term, Try, Tuple_, Unit, Var,
)
from ..syntax.desugar import unfold_letrec
from ._stack import run_deep
from .bigstep import DEFAULT_FUEL
from .prim import PrimError, apply_op
from .values import (
    UNIT, Closure, ContValue, Failed, FuelExhausted, LocV, OutOfFuel,
    Stuck, SymV, TupleV, Uncaught, Val, as_fuel, as_oracle, truthy,
)

DEEP = "deep"
SHALLOW = "shallow"


@dataclass(frozen=True)
class TraceEvent:
    rule: str
    span: Optional[Span]
    detail: Any = None

    def __str__(self):
        where = f" at {self.span.line}:{self.span.col}" if self.span else ""
        extra = f" {self.detail}" if self.detail is not None else ""
        return f"{self.rule}{where}{extra}"


class _Stop(Exception):
    def __init__(self, outcome):
        super().__init__()
        self.outcome = outcome


class SmallStep:
    def __init__(self, fuel: int = DEFAULT_FUEL, oracle=None, style: str = DEEP,
                 heap: Optional[dict] = None, trace: Optional[Callable] = None):
        if style not in (DEEP, SHALLOW):
            raise ValueError(f"unknown handler style {style!r}")
        self.fuel = as_fuel(fuel)
        self.oracle = as_oracle(oracle)
        self.deep = style == DEEP
        self.heap = heap
        self.next_loc = max((l.id for l in heap), default=-1) + 1 if heap is not None else 0
        self.next_sym = 0
        self.trace = trace
        self._unfolded = {}

    def emit(self, rule, span=None, detail=None):
        if self.trace is not None:
            self.trace(TraceEvent(rule, span, detail))

    # ------------------------------------------------------------------

    def run(self, t: Term, env: Optional[dict] = None):
        stack = []
        self.stack = stack
        mode_eval, term, env, val = True, t, dict(env or {}), None
        try:
            while True:
                self.fuel.tick()
                if mode_eval:
                    r = self.step_eval(term, env, stack)
                else:
                    if not stack:
                        return Val(val, None, self.heap)
                    r = self.step_ret(val, stack)
                if r[0]:
                    mode_eval, term, env = True, r[1], r[2]
                else:
                    mode_eval, val = False, r[1]
        except _Stop as s:
            return s.outcome
        except FuelExhausted as e:
            return OutOfFuel(e.reason)

    # results: (True, term, env) to continue evaluating, (False, value) to return

    def step_eval(self, t, env, stack):
        if isinstance(t, Var):
            try:
                return False, env[t.name]
            except KeyError:
                raise _Stop(Stuck(f"unbound variable {t.name}")) from None
        if isinstance(t, Const):
            return False, t.value
        if isinstance(t, Unit):
            return False, UNIT
        if isinstance(t, AnyBase):
            v = self.oracle.choose()
            self.emit("choice", t.span, v)
            return False, v
        if isinstance(t, Fail):
            self.emit("fail", t.span)
            raise _Stop(Failed())
        if isinstance(t, (Lam, Fix)):
            return False, Closure(t, env)
        if isinstance(t, Let):
            stack.append(("let", t.name, t.body, env))
            return True, t.bound, env
        if isinstance(t, LetTuple):
            stack.append(("lett", t.names, t.body, env))
            return True, t.bound, env
        if isinstance(t, If):
            stack.append(("if", t.then, t.else_, env))
            return True, t.cond, env
        if isinstance(t, LetRec):
            hit = self._unfolded.get(id(t))
            if hit is None:
                hit = self._unfolded[id(t)] = (t, unfold_letrec(t))
            return True, hit[1], env
        if isinstance(t, Gensym):
            s = SymV(self.next_sym)
            self.next_sym += 1
            self.emit("gensym", t.span, s)
            return False, s
        if isinstance(t, Loc):
            return False, LocV(t.id)
        if isinstance(t, Try):
            stack.append(("try", t.ty, t.binder, t.handler, env))
            return True, t.body, env
        if isinstance(t, Handle):
            stack.append(("handle", t.handler, env))
            return True, t.body, env
        parts = _operands(t)
        if parts is None:
            raise _Stop(Stuck(f"{type(t).__name__} is not supported here"))
        if not parts:
            return self.finish(t, (), stack)
        stack.append(("args", t, (), parts[1:], env))
        return True, parts[0], env

    def step_ret(self, v, stack):
        fr = stack.pop()
        tag = fr[0]
        if tag == "args":
            _, node, done, rest, env = fr
            done = done + (v,)
            if rest:
                stack.append(("args", node, done, rest[1:], env))
                return True, rest[0], env
            return self.finish(node, done, stack)
        if tag == "let":
            env = dict(fr[3])
            env[fr[1]] = v
            return True, fr[2], env
        if tag == "lett":
            names = fr[1]
            if not isinstance(v, TupleV) or len(v.items) != len(names):
                raise _Stop(Stuck(f"cannot split {v!r} into {len(names)} components"))
            env = dict(fr[3])
            env.update(zip(names, v.items))
            return True, fr[2], env
        if tag == "if":
            try:
                b = truthy(v)
            except TypeError as e:
                raise _Stop(Stuck(str(e))) from None
            return True, (fr[1] if b else fr[2]), fr[3]
        if tag == "try":
            return False, v
        if tag == "handle":
            h, env = fr[1], fr[2]
            self.emit("R-Ret", None)
            env = dict(env)
            env[h.ret_binder] = v
            return True, h.ret_body, env
        if tag == "apply":
            return self.apply(v, fr[1], stack)
        raise AssertionError(tag)

    def finish(self, t, vals, stack):
        if isinstance(t, PrimOp):
            try:
                return False, apply_op(t.op, list(vals))
            except PrimError as e:
                raise _Stop(Stuck(str(e))) from None
        if isinstance(t, Tuple_):
            return False, TupleV(tuple(vals))
        if isinstance(t, Proj):
            (v,) = vals
            if not isinstance(v, TupleV) or not 1 <= t.index <= len(v.items):
                raise _Stop(Stuck(f"projection .{t.index} of {v!r}"))
            return False, v.items[t.index - 1]
        if isinstance(t, App):
            self.emit("app", t.span, _fname(vals[0]))
            return self.apply(vals[0], vals[1:], stack)
        if isinstance(t, SymEq):
            a, b = vals
            if not isinstance(a, SymV) or not isinstance(b, SymV):
                raise _Stop(Stuck("symbol comparison of non-symbols"))
            return False, a.label == b.label
        if isinstance(t, Raise):
            return self.throw(t.ty, vals[0], stack, t.span)
        if isinstance(t, Perform):
            return self.perform(t, vals[0], vals[1], stack)
        if isinstance(t, MkRef):
            self.need_heap()
            l = LocV(self.next_loc)
            self.next_loc += 1
            self.heap[l] = vals[0]
            return False, l
        if isinstance(t, Deref):
            self.need_heap()
            return False, self.heap[self.loc(vals[0])]
        if isinstance(t, Assign):
            self.need_heap()
            self.heap[self.loc(vals[0])] = vals[1]
            return False, UNIT
        raise AssertionError(type(t).__name__)

    def need_heap(self):
        if self.heap is None:
            raise _Stop(Stuck("reference operation in a heap-free language"))

    def loc(self, v):
        if not isinstance(v, LocV) or v not in self.heap:
            raise _Stop(Stuck(f"not a live location: {v!r}"))
        return v

    # ------------------------------------------------------------------

    def apply(self, f, args, stack):
        if isinstance(f, ContValue):
            if len(args) > 1:
                stack.append(("apply", args[1:]))
            stack.extend(f.frames)
            self.emit("resume", None, len(f.frames))
            return self.apply(f.fn, args[:1], stack)
        if not isinstance(f, Closure):
            raise _Stop(Stuck(f"application of a non-function {f!r}"))
        fun = f.fun
        env = dict(f.env)
        if isinstance(fun, Lam):
            env[fun.param] = args[0]
            rest = args[1:]
        else:
            k = len(fun.params)
            if len(args) < k:
                raise _Stop(Stuck(f"{fun.name} expects {k} arguments, got {len(args)}"))
            env[fun.name] = f
            env.update(zip(fun.params, args[:k]))
            rest = args[k:]
            self.emit("call", fun.span, (fun.name, args[:k]))
        if rest:
            stack.append(("apply", rest))
        return True, fun.body, env

    def throw(self, ty, v, stack, span):
        while stack:
            fr = stack.pop()
            if fr[0] == "try" and fr[1] == ty:
                self.emit("catch", span, v)
                env = dict(fr[4])
                env[fr[2]] = v
                return True, fr[3], env
        raise _Stop(Uncaught(ty, v))

    def perform(self, t: Perform, arg, cont, stack):
        for i in range(len(stack) - 1, -1, -1):
            if stack[i][0] == "handle":
                break
        else:
            raise _Stop(Stuck(f"unhandled effect {t.name}",
                              {"effect": t.name, "arg": arg, "cont": cont}))
        hframe = stack[i]
        inner = tuple(stack[i + 1:])
        del stack[i:]
        handler, env = hframe[1], hframe[2]
        clause = handler.clause(t.name)
        if clause is None:
            raise _Stop(Stuck(f"handler has no clause for {t.name}",
                              {"effect": t.name, "arg": arg, "cont": cont}))
        frames = (hframe,) + inner if self.deep else inner
        self.emit("R-DH" if self.deep else "R-SH", t.span, (t.name, arg))
        env = dict(env)
        env[clause.arg] = arg
        env[clause.cont] = ContValue(frames, cont)
        return True, clause.body, env


def _operands(t):
    if isinstance(t, PrimOp):
        return t.args
    if isinstance(t, Tuple_):
        return t.items
    if isinstance(t, App):
        return (t.fun,) + tuple(t.args)
    if isinstance(t, (Proj,)):
        return (t.tup,)
    if isinstance(t, SymEq):
        return (t.left, t.right)
    if isinstance(t, Raise):
        return (t.arg,)
    if isinstance(t, Perform):
        return (t.arg, t.cont)
    if isinstance(t, (MkRef, Deref)):
        return (t.arg,)
    if isinstance(t, Assign):
        return (t.target, t.value)
    return None


def _fname(f):
    return f.name if isinstance(f, Closure) else None


# --------------------------------------------------------------------------
# entry points


def _go(m: SmallStep, t, env):
    return m.run(t, env)


def eval_exn(t: Term, fuel: int = DEFAULT_FUEL, oracle=None, trace=None, env=None):
    """Outcome of a program with exceptions; ``Uncaught`` if one escapes."""
    return run_deep(_go, SmallStep(fuel, oracle, trace=trace), t, env)


def eval_alg(t: Term, style: str = DEEP, fuel: int = DEFAULT_FUEL, oracle=None,
             trace=None, env=None):
    """Outcome of a program with algebraic effects under deep or shallow
    handlers; an effect with no enclosing handler is ``Stuck``."""
    return run_deep(_go, SmallStep(fuel, oracle, style, trace=trace), t, env)


def eval_sym(t: Term, fuel: int = DEFAULT_FUEL, oracle=None, trace=None, env=None):
    return run_deep(_go, SmallStep(fuel, oracle, trace=trace), t, env)


def eval_ref_smallstep(t: Term, H: Optional[dict] = None, fuel: int = DEFAULT_FUEL,
                       oracle=None, env=None):
    """Small-step run of the unrestricted reference language; an independent
    route to the outcome computed by :func:`eval_source`."""
    return run_deep(_go, SmallStep(fuel, oracle, heap=dict(H or {})), t, env)
