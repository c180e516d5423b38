"""Generic traversals: free variables, fresh names, substitution, renaming."""
from __future__ import annotations

import itertools
import re
from dataclasses import replace
from typing import Callable, Dict, Iterable, Iterator, Set

from .ast import (
    App, Assign, Clause, Const, Deref, Fail, Fix, Gensym, Handle, Handler, If,
    Lam, Let, LetRec, LetTuple, Loc, MkRef, Perform, PrimOp, Proj, Raise,
    SymEq, Term, Try, Tuple_, Unit, AnyBase, Var,
)

_LEAVES = (Unit, Const, AnyBase, Fail, Gensym, Loc)


def free_vars(t: Term) -> frozenset:
    out: Set[str] = set()
    _fv(t, frozenset(), out)
    return frozenset(out)


def _fv(t, bound, out):
    if isinstance(t, Var):
        if t.name not in bound:
            out.add(t.name)
    elif isinstance(t, _LEAVES):
        pass
    elif isinstance(t, Let):
        _fv(t.bound, bound, out)
        _fv(t.body, bound | {t.name}, out)
    elif isinstance(t, LetTuple):
        _fv(t.bound, bound, out)
        _fv(t.body, bound | set(t.names), out)
    elif isinstance(t, Lam):
        _fv(t.body, bound | {t.param}, out)
    elif isinstance(t, Fix):
        _fv(t.body, bound | {t.name} | set(t.params), out)
    elif isinstance(t, LetRec):
        names = {b.name for b in t.bindings}
        inner = bound | names
        for b in t.bindings:
            _fv(b.body, inner | set(b.params), out)
        _fv(t.body, inner, out)
    elif isinstance(t, Try):
        _fv(t.body, bound, out)
        _fv(t.handler, bound | {t.binder}, out)
    elif isinstance(t, Handle):
        _fv(t.body, bound, out)
        _fv_handler(t.handler, bound, out)
    else:
        for c in children(t):
            _fv(c, bound, out)


def _fv_handler(h: Handler, bound, out):
    _fv(h.ret_body, bound | {h.ret_binder}, out)
    for c in h.clauses:
        _fv(c.body, bound | {c.arg, c.cont}, out)


def children(t: Term) -> tuple:
    """Immediate subterms in evaluation order (binders not included)."""
    if isinstance(t, _LEAVES) or isinstance(t, Var):
        return ()
    if isinstance(t, PrimOp):
        return t.args
    if isinstance(t, (MkRef, Deref)):
        return (t.arg,)
    if isinstance(t, Assign):
        return (t.target, t.value)
    if isinstance(t, (Let, LetTuple)):
        return (t.bound, t.body)
    if isinstance(t, If):
        return (t.cond, t.then, t.else_)
    if isinstance(t, (Lam, Fix)):
        return (t.body,)
    if isinstance(t, App):
        return (t.fun,) + t.args
    if isinstance(t, LetRec):
        return tuple(b.body for b in t.bindings) + (t.body,)
    if isinstance(t, Raise):
        return (t.arg,)
    if isinstance(t, Try):
        return (t.body, t.handler)
    if isinstance(t, Perform):
        return (t.arg, t.cont)
    if isinstance(t, Handle):
        h = t.handler
        return (t.body, h.ret_body) + tuple(c.body for c in h.clauses)
    if isinstance(t, SymEq):
        return (t.left, t.right)
    if isinstance(t, Tuple_):
        return t.items
    if isinstance(t, Proj):
        return (t.tup,)
    raise TypeError(f"not a term: {t!r}")


def map_children(t: Term, f: Callable[[Term], Term]) -> Term:
    """Rebuild ``t`` with ``f`` applied to each immediate subterm."""
    if isinstance(t, _LEAVES) or isinstance(t, Var):
        return t
    if isinstance(t, PrimOp):
        return replace(t, args=tuple(f(a) for a in t.args))
    if isinstance(t, (MkRef, Deref, Raise)):
        return replace(t, arg=f(t.arg))
    if isinstance(t, Assign):
        return replace(t, target=f(t.target), value=f(t.value))
    if isinstance(t, (Let, LetTuple)):
        return replace(t, bound=f(t.bound), body=f(t.body))
    if isinstance(t, If):
        return replace(t, cond=f(t.cond), then=f(t.then), else_=f(t.else_))
    if isinstance(t, (Lam, Fix)):
        return replace(t, body=f(t.body))
    if isinstance(t, App):
        return replace(t, fun=f(t.fun), args=tuple(f(a) for a in t.args))
    if isinstance(t, LetRec):
        bs = tuple(replace(b, body=f(b.body)) for b in t.bindings)
        return replace(t, bindings=bs, body=f(t.body))
    if isinstance(t, Try):
        return replace(t, body=f(t.body), handler=f(t.handler))
    if isinstance(t, Perform):
        return replace(t, arg=f(t.arg), cont=f(t.cont))
    if isinstance(t, Handle):
        h = t.handler
        h2 = Handler(h.ret_binder, f(h.ret_body),
                     tuple(Clause(c.name, c.arg, c.cont, f(c.body)) for c in h.clauses))
        return replace(t, body=f(t.body), handler=h2)
    if isinstance(t, SymEq):
        return replace(t, left=f(t.left), right=f(t.right))
    if isinstance(t, Tuple_):
        return replace(t, items=tuple(f(a) for a in t.items))
    if isinstance(t, Proj):
        return replace(t, tup=f(t.tup))
    raise TypeError(f"not a term: {t!r}")


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(reversed(children(s)))


def binder_names(t: Term) -> Set[str]:
    out: Set[str] = set()
    for s in subterms(t):
        if isinstance(s, Let):
            out.add(s.name)
        elif isinstance(s, LetTuple):
            out.update(s.names)
        elif isinstance(s, Lam):
            out.add(s.param)
        elif isinstance(s, Fix):
            out.add(s.name)
            out.update(s.params)
        elif isinstance(s, LetRec):
            for b in s.bindings:
                out.add(b.name)
                out.update(b.params)
        elif isinstance(s, Try):
            out.add(s.binder)
        elif isinstance(s, Handle):
            out.add(s.handler.ret_binder)
            for c in s.handler.clauses:
                out.update((c.arg, c.cont))
    return out


def all_names(t: Term) -> Set[str]:
    names = binder_names(t)
    for s in subterms(t):
        if isinstance(s, Var):
            names.add(s.name)
    return names


_SUFFIX = re.compile(r"^(.*?)(?:_(\d+))?$")


class FreshNames:
    """Monotone fresh-name supply avoiding a given set of names."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.used: Set[str] = set(avoid)
        self.counter = itertools.count(1)

    def fresh(self, hint: str = "t") -> str:
        base = _SUFFIX.match(hint).group(1) or "t"
        base = base.lstrip("_") or "t"
        while True:
            name = f"{base}_{next(self.counter)}"
            if name not in self.used:
                self.used.add(name)
                return name

    def reserve(self, names: Iterable[str]) -> None:
        self.used.update(names)


def subst(t: Term, mapping: Dict[str, Term], fresh: FreshNames | None = None) -> Term:
    """Capture-avoiding simultaneous substitution of terms for variables."""
    if not mapping:
        return t
    if fresh is None:
        fresh = FreshNames(all_names(t))
        for v in mapping.values():
            fresh.reserve(all_names(v))
    danger: Set[str] = set()
    for v in mapping.values():
        danger |= free_vars(v)
    return _subst(t, dict(mapping), danger, fresh)


def _bind(names, mapping, danger, fresh):
    """Handle a binder list: drop shadowed keys, rename capturing binders.
    Returns (new_names, new_mapping)."""
    m = {k: v for k, v in mapping.items() if k not in names}
    new_names = []
    for n in names:
        if n in danger and m:
            n2 = fresh.fresh(n)
            m[n] = Var(n2)
            new_names.append(n2)
        else:
            new_names.append(n)
    return new_names, m


def _subst(t, mapping, danger, fresh):
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, _LEAVES):
        return t
    rec = lambda s, m=mapping: _subst(s, m, danger, fresh)  # noqa: E731
    if isinstance(t, Let):
        (n,), m = _bind([t.name], mapping, danger, fresh)
        return replace(t, name=n, bound=rec(t.bound), body=rec(t.body, m))
    if isinstance(t, LetTuple):
        ns, m = _bind(list(t.names), mapping, danger, fresh)
        return replace(t, names=tuple(ns), bound=rec(t.bound), body=rec(t.body, m))
    if isinstance(t, Lam):
        (p,), m = _bind([t.param], mapping, danger, fresh)
        return replace(t, param=p, body=rec(t.body, m))
    if isinstance(t, Fix):
        ns, m = _bind([t.name, *t.params], mapping, danger, fresh)
        return replace(t, name=ns[0], params=tuple(ns[1:]), body=rec(t.body, m))
    if isinstance(t, LetRec):
        fnames, m = _bind([b.name for b in t.bindings], mapping, danger, fresh)
        bs = []
        for b, fn in zip(t.bindings, fnames):
            ps, mb = _bind(list(b.params), m, danger, fresh)
            bs.append(replace(b, name=fn, params=tuple(ps), body=rec(b.body, mb)))
        return replace(t, bindings=tuple(bs), body=rec(t.body, m))
    if isinstance(t, Try):
        (x,), m = _bind([t.binder], mapping, danger, fresh)
        return replace(t, body=rec(t.body), binder=x, handler=rec(t.handler, m))
    if isinstance(t, Handle):
        h = t.handler
        (rb,), mr = _bind([h.ret_binder], mapping, danger, fresh)
        clauses = []
        for c in h.clauses:
            (a, k), mc = _bind([c.arg, c.cont], mapping, danger, fresh)
            clauses.append(Clause(c.name, a, k, rec(c.body, mc)))
        return replace(t, body=rec(t.body),
                       handler=Handler(rb, rec(h.ret_body, mr), tuple(clauses)))
    return map_children(t, rec)


def rename_apart(t: Term, avoid: Iterable[str] = ()) -> Term:
    """Alpha-rename so that every binder is distinct from every other binder
    and from the free variables (and ``avoid``).  Names that are already
    unique are kept, so already-distinct programs come back equal.  Every
    node of the result is a new object, so no node occurs twice."""
    avoid = set(avoid) | set(free_vars(t))
    fresh = FreshNames(all_names(t) | avoid)
    seen: Set[str] = set(avoid)

    def pick(n: str) -> str:
        if n in seen:
            n = fresh.fresh(n)
        seen.add(n)
        return n

    def go(t, env):
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name), t.span)
        if isinstance(t, _LEAVES):
            return replace(t)  # fresh object: callers key side tables by identity
        if isinstance(t, Let):
            b = go(t.bound, env)
            n = pick(t.name)
            return replace(t, name=n, bound=b, body=go(t.body, {**env, t.name: n}))
        if isinstance(t, LetTuple):
            b = go(t.bound, env)
            ns = [pick(n) for n in t.names]
            return replace(t, names=tuple(ns), bound=b,
                           body=go(t.body, {**env, **dict(zip(t.names, ns))}))
        if isinstance(t, Lam):
            p = pick(t.param)
            return replace(t, param=p, body=go(t.body, {**env, t.param: p}))
        if isinstance(t, Fix):
            ns = [pick(n) for n in (t.name, *t.params)]
            e2 = {**env, **dict(zip((t.name, *t.params), ns))}
            return replace(t, name=ns[0], params=tuple(ns[1:]), body=go(t.body, e2))
        if isinstance(t, LetRec):
            fn = [pick(b.name) for b in t.bindings]
            e1 = {**env, **{b.name: n for b, n in zip(t.bindings, fn)}}
            bs = []
            for b, n in zip(t.bindings, fn):
                ps = [pick(p) for p in b.params]
                bs.append(replace(b, name=n, params=tuple(ps), body=go(b.body, {**e1, **dict(zip(b.params, ps))})))
            return replace(t, bindings=tuple(bs), body=go(t.body, e1))
        if isinstance(t, Try):
            body = go(t.body, env)
            x = pick(t.binder)
            return replace(t, body=body, binder=x, handler=go(t.handler, {**env, t.binder: x}))
        if isinstance(t, Handle):
            body = go(t.body, env)
            h = t.handler
            rb = pick(h.ret_binder)
            rbody = go(h.ret_body, {**env, h.ret_binder: rb})
            clauses = []
            for c in h.clauses:
                a, k = pick(c.arg), pick(c.cont)
                clauses.append(Clause(c.name, a, k, go(c.body, {**env, c.arg: a, c.cont: k})))
            return replace(t, body=body, handler=Handler(rb, rbody, tuple(clauses)))
        return map_children(t, lambda s: go(s, env))

    return go(t, {})


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))
