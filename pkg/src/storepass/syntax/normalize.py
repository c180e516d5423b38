"""Administrative normalisation and alpha-equivalence for pure terms.

Used to compare generated target programs with hand-written expected ones
"up to administrative lets".  Every rewrite is a sound equation of the pure
call-by-value target language:

* ``let x = a in M``  ->  ``M[a/x]`` when ``a`` is an atom (variable,
  constant, unit, projection of an atom, tuple of atoms);
* ``let (x1..xk) = (e1..ek) in M``  ->  sequential lets;
* let-flattening ``let x = (let y = a in b) in c``  ->
  ``let y = a in let x = b in c`` (also for tuple lets);
* ``let x = (if c then a else b) in M``  ->  ``if c then let x = a in M
  else let x = b in M``;
* ``(e1..ek).i``  ->  ``ei`` for atoms; ``let x = M in x``  ->  ``M``;
  ``let (x1..xk) = M in (x1..xk)``  ->  ``M``;
* ``let x = fail in M``  ->  ``fail``;
* ``let (x1..xk) = a in M`` for an atom ``a``  ->  ``M`` when the xs are
  unused, or ``M`` with ``(x1..xk)`` replaced by ``a`` when that tuple is
  their only use.
"""
from __future__ import annotations

from typing import Dict

from .ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, Gensym, Handle, If, Lam,
    Let, LetRec, LetTuple, Loc, MkRef, Perform, PrimOp, Proj, Raise, SymEq,
    Term, Try, Tuple_, Unit, Var,
)
from .ops import FreshNames, all_names, binder_names, free_vars, map_children, rename_apart, subst


def is_atom(t: Term) -> bool:
    if isinstance(t, (Var, Const, Unit)):
        return True
    if isinstance(t, Proj):
        return is_atom(t.tup)
    if isinstance(t, Tuple_):
        return all(is_atom(i) for i in t.items)
    return False


class _Norm:
    def __init__(self, t: Term):
        self.fresh = FreshNames(all_names(t))

    def norm(self, t: Term) -> Term:
        t = map_children(t, self.norm)
        r = self.step(t)
        return t if r is None else self.norm(r)

    def step(self, t: Term):
        if isinstance(t, Proj) and isinstance(t.tup, Tuple_) and 1 <= t.index <= len(t.tup.items):
            if all(is_atom(i) for i in t.tup.items):
                return t.tup.items[t.index - 1]
        if isinstance(t, Let):
            b = t.bound
            if isinstance(b, Fail):
                return b
            if is_atom(b):
                return subst(t.body, {t.name: b}, self.fresh)
            if isinstance(t.body, Var) and t.body.name == t.name:
                return b
            if isinstance(b, (Let, LetTuple)):
                return self.flatten(b, lambda inner: Let(t.name, inner, t.body), t.body)
            if isinstance(b, If):
                return If(b.cond, Let(t.name, b.then, t.body), Let(t.name, b.else_, t.body))
            return None
        if isinstance(t, LetTuple):
            b = t.bound
            if isinstance(b, Fail):
                return b
            if isinstance(b, Tuple_) and len(b.items) == len(t.names):
                tmp = [self.fresh.fresh(n) for n in t.names]
                body = subst(t.body, {n: Var(m) for n, m in zip(t.names, tmp)}, self.fresh)
                for m, e in reversed(list(zip(tmp, b.items))):
                    body = Let(m, e, body)
                return body
            if (isinstance(t.body, Tuple_) and len(t.body.items) == len(t.names)
                    and all(isinstance(i, Var) and i.name == n for i, n in zip(t.body.items, t.names))):
                return b
            if is_atom(b):
                return self.eta_tuple(t)
            if isinstance(b, (Let, LetTuple)):
                return self.flatten(b, lambda inner: LetTuple(t.names, inner, t.body), t.body)
            if isinstance(b, If):
                return If(b.cond, LetTuple(t.names, b.then, t.body), LetTuple(t.names, b.else_, t.body))
        return None

    def eta_tuple(self, t: LetTuple):
        # `let (x1..xk) = a in M` with a an atom: drop it when M ignores the
        # xs, or put `a` back where M only rebuilds the tuple (x1..xk)
        names = set(t.names)
        fv = free_vars(t.body)
        if not names & fv:
            return t.body
        if binder_names(t.body) & free_vars(t.bound):
            return None
        whole = Tuple_(tuple(Var(n) for n in t.names))

        def put(s):
            if isinstance(s, Tuple_) and s == whole:
                return t.bound
            return map_children(s, put)

        body = put(t.body)
        if names & free_vars(body):
            return None
        return body

    def flatten(self, inner_let, rebuild, outer_body):
        names = inner_let.names if isinstance(inner_let, LetTuple) else (inner_let.name,)
        fv = free_vars(outer_body)
        body = inner_let.body
        if any(n in fv for n in names):
            new = [self.fresh.fresh(n) for n in names]
            body = subst(body, {n: Var(m) for n, m in zip(names, new)}, self.fresh)
            names = tuple(new)
        if isinstance(inner_let, LetTuple):
            return LetTuple(tuple(names), inner_let.bound, rebuild(body))
        return Let(names[0], inner_let.bound, rebuild(body))


def admin_normalize(t: Term) -> Term:
    t = rename_apart(t)
    return _Norm(t).norm(t)


# --------------------------------------------------------------------------
# alpha-equivalence


def alpha_equiv(a: Term, b: Term) -> bool:
    return _eq(a, b, {}, {})


def _bind(ma, mb, xs, ys):
    if len(xs) != len(ys):
        return None
    ma, mb = dict(ma), dict(mb)
    for x, y in zip(xs, ys):
        tag = object()
        ma[x] = tag
        mb[y] = tag
    return ma, mb


def _eq(a, b, ma: Dict, mb: Dict) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ta, tb = ma.get(a.name), mb.get(b.name)
        if ta is None and tb is None:
            return a.name == b.name
        return ta is not None and ta is tb
    if isinstance(a, (Unit, AnyBase, Fail, Gensym)):
        return True
    if isinstance(a, Const):
        return a == b
    if isinstance(a, Loc):
        return a.id == b.id
    if isinstance(a, PrimOp):
        return a.op == b.op and len(a.args) == len(b.args) and all(
            _eq(x, y, ma, mb) for x, y in zip(a.args, b.args))
    if isinstance(a, (MkRef, Deref)):
        return _eq(a.arg, b.arg, ma, mb)
    if isinstance(a, Assign):
        return _eq(a.target, b.target, ma, mb) and _eq(a.value, b.value, ma, mb)
    if isinstance(a, SymEq):
        return _eq(a.left, b.left, ma, mb) and _eq(a.right, b.right, ma, mb)
    if isinstance(a, Let):
        if not _eq(a.bound, b.bound, ma, mb):
            return False
        return _eq(a.body, b.body, *_bind(ma, mb, (a.name,), (b.name,)))
    if isinstance(a, LetTuple):
        if len(a.names) != len(b.names) or not _eq(a.bound, b.bound, ma, mb):
            return False
        return _eq(a.body, b.body, *_bind(ma, mb, a.names, b.names))
    if isinstance(a, If):
        return all(_eq(x, y, ma, mb) for x, y in
                   ((a.cond, b.cond), (a.then, b.then), (a.else_, b.else_)))
    if isinstance(a, Lam):
        return _eq(a.body, b.body, *_bind(ma, mb, (a.param,), (b.param,)))
    if isinstance(a, Fix):
        r = _bind(ma, mb, (a.name, *a.params), (b.name, *b.params))
        return r is not None and _eq(a.body, b.body, *r)
    if isinstance(a, App):
        return len(a.args) == len(b.args) and _eq(a.fun, b.fun, ma, mb) and all(
            _eq(x, y, ma, mb) for x, y in zip(a.args, b.args))
    if isinstance(a, Tuple_):
        return len(a.items) == len(b.items) and all(
            _eq(x, y, ma, mb) for x, y in zip(a.items, b.items))
    if isinstance(a, Proj):
        return a.index == b.index and _eq(a.tup, b.tup, ma, mb)
    if isinstance(a, Raise):
        return a.ty == b.ty and _eq(a.arg, b.arg, ma, mb)
    if isinstance(a, Try):
        return (a.ty == b.ty and _eq(a.body, b.body, ma, mb)
                and _eq(a.handler, b.handler, *_bind(ma, mb, (a.binder,), (b.binder,))))
    if isinstance(a, Perform):
        return a.name == b.name and _eq(a.arg, b.arg, ma, mb) and _eq(a.cont, b.cont, ma, mb)
    if isinstance(a, Handle):
        ha, hb = a.handler, b.handler
        if not _eq(a.body, b.body, ma, mb) or len(ha.clauses) != len(hb.clauses):
            return False
        if not _eq(ha.ret_body, hb.ret_body, *_bind(ma, mb, (ha.ret_binder,), (hb.ret_binder,))):
            return False
        cb = {c.name: c for c in hb.clauses}
        for c in ha.clauses:
            d = cb.get(c.name)
            if d is None or not _eq(c.body, d.body, *_bind(ma, mb, (c.arg, c.cont), (d.arg, d.cont))):
                return False
        return True
    if isinstance(a, LetRec):
        if len(a.bindings) != len(b.bindings):
            return False
        r = _bind(ma, mb, [x.name for x in a.bindings], [y.name for y in b.bindings])
        for x, y in zip(a.bindings, b.bindings):
            r2 = _bind(*r, x.params, y.params)
            if r2 is None or not _eq(x.body, y.body, *r2):
                return False
        return _eq(a.body, b.body, *r)
    raise TypeError(f"alpha_equiv: unexpected {type(a).__name__}")


def equiv_mod_admin(a: Term, b: Term) -> bool:
    """Alpha-equivalence after administrative normalisation of both sides."""
    return alpha_equiv(admin_normalize(a), admin_normalize(b))

