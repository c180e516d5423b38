"""Big-step interpreters for the reference languages and the pure target.

``eval_source`` runs both the ownership-typed language (``ownership=True``:
environments shrink when a non-sharable value is used, and closures take the
part of the environment they mention) and the unrestricted reference
language (``ownership=False``: environments are never restricted).
``eval_target`` runs pure PCF with tuples.

Whether a value is sharable is decided from the value itself: locations are
not, closures are iff they reach no location, and the self-binding of a
recursive function always is.  On well-typed programs this coincides with
the static types.
"""
from __future__ import annotations

from typing import Callable, Dict, Optional

from ..syntax.ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, If, Lam, Let, LetRec,
    LetTuple, Loc, MkRef, PrimOp, Proj, Term, Tuple_, Unit, Var,
)
from ..syntax.desugar import unfold_letrec
from ..syntax.ops import free_vars
from ._stack import run_deep
from .prim import PrimError, apply_op
from .values import (
    UNIT, Closure, Failed, Fuel, FuelExhausted, LocV, OutOfFuel, Stuck,
    TupleV, Val, as_fuel, as_oracle, sharable_value, truthy,
)

DEFAULT_FUEL = 1_000_000


class _Fail(Exception):
    pass


class _Stuck(Exception):
    def __init__(self, reason, payload=None):
        super().__init__(reason)
        self.reason = reason
        self.payload = payload


class _Machine:
    def __init__(self, fuel: Fuel, oracle, heap: Optional[dict], ownership: bool,
                 on_let: Optional[Callable] = None):
        self.fuel = fuel
        self.oracle = oracle
        self.heap = heap
        self.ownership = ownership
        self.on_let = on_let
        self.next_loc = max((l.id for l in heap), default=-1) + 1 if heap is not None else 0
        self._fv: Dict[int, tuple] = {}
        self._unfolded: Dict[int, tuple] = {}

    # helpers -------------------------------------------------------------

    def lookup(self, R, x):
        try:
            return R[x]
        except KeyError:
            raise _Stuck(f"unbound variable {x}") from None

    def drop_if_owned(self, R, x, v):
        if self.ownership and not sharable_value(v) and x in R:
            R = dict(R)
            del R[x]
        return R

    def need_heap(self, what):
        if self.heap is None:
            raise _Stuck(f"{what} in a heap-free language")

    def loc(self, v):
        if not isinstance(v, LocV):
            raise _Stuck(f"expected a location, got {v!r}")
        if v not in self.heap:
            raise _Stuck(f"dangling location {v!r}")
        return v

    def free(self, t):
        hit = self._fv.get(id(t))
        if hit is None:
            hit = (t, free_vars(t))
            self._fv[id(t)] = hit
        return hit[1]

    def unfold(self, t):
        hit = self._unfolded.get(id(t))
        if hit is None:
            hit = (t, unfold_letrec(t))
            self._unfolded[id(t)] = hit
        return hit[1]

    def operand(self, t, R):
        if isinstance(t, Var):
            return self.lookup(R, t.name), R, t.name
        v, R = self.ev(t, R)
        return v, R, None

    # rules ---------------------------------------------------------------

    def ev(self, t: Term, R: dict):
        self.fuel.tick()
        if isinstance(t, Var):
            v = self.lookup(R, t.name)
            return v, self.drop_if_owned(R, t.name, v)
        if isinstance(t, Const):
            return t.value, R
        if isinstance(t, Unit):
            return UNIT, R
        if isinstance(t, AnyBase):
            return self.oracle.choose(), R
        if isinstance(t, Fail):
            raise _Fail()
        if isinstance(t, Let):
            v1, R1 = self.ev(t.bound, R)
            if self.on_let is not None:
                self.on_let(t, v1, R1, self.heap)
            R1 = dict(R1)
            R1[t.name] = v1
            v2, R2 = self.ev(t.body, R1)
            if self.ownership and t.name in R2:
                R2 = dict(R2)
                del R2[t.name]
            return v2, R2
        if isinstance(t, If):
            c, R1, _ = self.operand(t.cond, R)
            try:
                b = truthy(c)
            except TypeError as e:
                raise _Stuck(str(e)) from None
            return self.ev(t.then if b else t.else_, R1)
        if isinstance(t, PrimOp):
            vals = []
            for a in t.args:
                v, R, _ = self.operand(a, R)
                vals.append(v)
            try:
                return apply_op(t.op, vals), R
            except PrimError as e:
                raise _Stuck(str(e)) from None
        if isinstance(t, (Lam, Fix)):
            fv = self.free(t)
            cap = {y: R[y] for y in fv if y in R}
            clo = Closure(t, cap)
            if self.ownership:
                R = {y: v for y, v in R.items() if y not in fv or sharable_value(v)}
            return clo, R
        if isinstance(t, App):
            f, R, _ = self.operand(t.fun, R)
            args = []
            for a in t.args:
                v, R, _ = self.operand(a, R)
                args.append(v)
            return self.apply(f, args), R
        if isinstance(t, Deref):
            self.need_heap("dereference")
            l, R, x = self.operand(t.arg, R)
            v = self.heap[self.loc(l)]
            if x is not None:
                R = self.drop_if_owned(R, x, v)
            return v, R
        if isinstance(t, MkRef):
            self.need_heap("allocation")
            v, R, x = self.operand(t.arg, R)
            if x is not None:
                R = self.drop_if_owned(R, x, v)
            l = LocV(self.next_loc)
            self.next_loc += 1
            self.heap[l] = v
            return l, R
        if isinstance(t, Assign):
            self.need_heap("assignment")
            l, R, _ = self.operand(t.target, R)
            v, R, x = self.operand(t.value, R)
            self.heap[self.loc(l)] = v
            if x is not None:
                R = self.drop_if_owned(R, x, v)
            return UNIT, R
        if isinstance(t, Loc):
            return LocV(t.id), R
        if isinstance(t, Tuple_):
            vals = []
            for a in t.items:
                v, R, _ = self.operand(a, R)
                vals.append(v)
            return TupleV(tuple(vals)), R
        if isinstance(t, Proj):
            v, R, _ = self.operand(t.tup, R)
            if not isinstance(v, TupleV) or not 1 <= t.index <= len(v.items):
                raise _Stuck(f"projection .{t.index} of {v!r}")
            return v.items[t.index - 1], R
        if isinstance(t, LetTuple):
            v1, R1 = self.ev(t.bound, R)
            if not isinstance(v1, TupleV) or len(v1.items) != len(t.names):
                raise _Stuck(f"cannot split {v1!r} into {len(t.names)} components")
            R1 = dict(R1)
            R1.update(zip(t.names, v1.items))
            v2, R2 = self.ev(t.body, R1)
            if self.ownership:
                R2 = {y: v for y, v in R2.items() if y not in t.names}
            return v2, R2
        if isinstance(t, LetRec):
            return self.ev(self.unfold(t), R)
        raise _Stuck(f"{type(t).__name__} is not part of this language")

    def apply(self, f, args):
        while args:
            self.fuel.tick()
            if not isinstance(f, Closure):
                raise _Stuck(f"application of a non-function {f!r}")
            fun = f.fun
            env = dict(f.env)
            if isinstance(fun, Lam):
                env[fun.param] = args[0]
                args = args[1:]
            else:
                k = len(fun.params)
                if len(args) < k:
                    raise _Stuck(f"{fun.name} expects {k} arguments, got {len(args)}")
                env[fun.name] = f if f.rec_self else Closure(fun, f.env, rec_self=True)
                env.update(zip(fun.params, args[:k]))
                args = args[k:]
            f, _ = self.ev(fun.body, env)
        return f


def _run(m: _Machine, t: Term, R: dict, keep_state: bool):
    try:
        v, R2 = m.ev(t, R)
    except _Fail:
        return Failed()
    except _Stuck as e:
        return Stuck(e.reason, e.payload)
    except FuelExhausted as e:
        return OutOfFuel(e.reason)
    except RecursionError:
        return OutOfFuel("depth")
    if keep_state:
        return Val(v, R2, m.heap)
    return Val(v)


def eval_source(t: Term, R: Optional[dict] = None, H: Optional[dict] = None,
                fuel: int = DEFAULT_FUEL, oracle=None, ownership: bool = True,
                on_let: Optional[Callable] = None):
    """Evaluate a reference-language term; returns ``Val(v, R', H')`` or
    ``Failed`` / ``OutOfFuel`` / ``Stuck``.  ``oracle`` answers ``*``."""
    m = _Machine(as_fuel(fuel), as_oracle(oracle), dict(H or {}), ownership, on_let)
    return run_deep(_run, m, t, dict(R or {}), True)


def eval_target(t: Term, S: Optional[dict] = None, fuel: int = DEFAULT_FUEL, oracle=None):
    """Evaluate a pure target term; returns ``Val(v)`` or another outcome."""
    m = _Machine(as_fuel(fuel), as_oracle(oracle), None, False)
    return run_deep(_run, m, t, dict(S or {}), False)
