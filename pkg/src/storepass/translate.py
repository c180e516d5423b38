"""Store-passing translation from the ownership-typed reference language to
pure PCF with tuples.

A reference becomes the value it holds.  A closure that owns ``n`` cells
becomes a pair ``(env, code)``: ``env`` is the ``n``-tuple of the current
values of its cells and ``code`` takes ``(x1, ..., xk, h)`` and returns
``(r, x1, ..., xk, h')``.  Every translated term returns ``(value, store)``
where ``store`` is the flat tuple of the cells owned by the post
environment.

Tuple conventions: a 0-tuple is ``()`` and a 1-tuple is its only element.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

from .syntax.ast import (
    AnyBase, App, Assign, BaseKind, Const, Deref, Fail, Fix, If, Lam, Let,
    LetTuple, MkRef, PrimOp, Proj, Term, Tuple_, Unit, Var, mk_let_tuple,
    mk_tuple,
)
from .syntax.ops import FreshNames, all_names
from .typecheck import simple as S
from .typecheck.ownership import Judgment, typecheck_refl
from .typecheck.types import (
    BaseT, FullType, FunT, RecFunT, RefT, TypeEnv, UnitT, env_drop,
    env_drop_if, store_size,
)


# --------------------------------------------------------------------------
# types


def translate_type(t: FullType):
    """The simple target type of a value of ownership type ``t``."""
    if isinstance(t, UnitT):
        return S.S_UNIT
    if isinstance(t, BaseT):
        return S.S_BASE
    if isinstance(t, RefT):
        return translate_type(t.inner)
    if isinstance(t, FunT):
        return S.STuple((S.base_tuple(t.store), _code_type(t.params, t.store, t.ret)))
    if isinstance(t, RecFunT):
        return _code_type(t.params, store_size(t.captured), t.ret)
    raise TypeError(t)


def _code_type(params, n, ret):
    ps = tuple(translate_type(p) for p in params)
    h = S.base_tuple(n)
    return S.SFun((S.tuple_type(ps + (h,)),), S.tuple_type((translate_type(ret),) + ps + (h,)))


def translate_env(env: TypeEnv) -> Dict[str, object]:
    return {x: translate_type(t) for x, t in env}


def result_type(ty: FullType, post: TypeEnv):
    """Predicted type ``[[ty]] * b^|post|`` of a translated term."""
    return S.STuple((translate_type(ty), S.base_tuple(store_size(post))))


# --------------------------------------------------------------------------
# pack / unpack


def env_of(f: str) -> Term:
    return Proj(Var(f), 1)


def code_of(f: str) -> Term:
    return Proj(Var(f), 2)


def _owned(env: TypeEnv):
    """Bindings that contribute to the store, with their sizes."""
    for x, t in env:
        if isinstance(t, RefT):
            yield x, t, 1
        elif isinstance(t, FunT) and store_size(t) > 0:
            yield x, t, store_size(t)


def _spread(src: Term, names: List[str], body: Term) -> Term:
    """``let (names) = src in body`` under the tuple conventions."""
    if not names:
        return body
    return mk_let_tuple(names, src, body)


def pack(env: TypeEnv, fresh: FreshNames) -> Term:
    """Flat tuple of the current values of the cells owned by ``env``."""
    items: List[Term] = []
    lets: List[Tuple[List[str], Term]] = []
    for x, t, n in _owned(env):
        if isinstance(t, RefT):
            items.append(Var(x))
        elif n == 1:
            items.append(env_of(x))
        else:
            us = [fresh.fresh("u") for _ in range(n)]
            lets.append((us, env_of(x)))
            items.extend(Var(u) for u in us)
    out = mk_tuple(items)
    for us, src in reversed(lets):
        out = LetTuple(tuple(us), src, out)
    return out


def unpack(env: TypeEnv, h: str, body: Term, fresh: FreshNames) -> Term:
    """Rebind the cells of ``env`` from the store tuple ``h``, then ``body``."""
    names: List[str] = []
    rebuild: List[Tuple[str, List[str]]] = []
    for x, t, n in _owned(env):
        if isinstance(t, RefT):
            names.append(x)
        else:
            us = [fresh.fresh("u") for _ in range(n)]
            names.extend(us)
            rebuild.append((x, us))
    for f, us in reversed(rebuild):
        body = Let(f, Tuple_((mk_tuple(Var(u) for u in us), code_of(f))), body)
    return _spread(Var(h), names, body)


# --------------------------------------------------------------------------
# terms


class _Translator:
    def __init__(self, j: Judgment, avoid, base: BaseKind = BaseKind.BOOL):
        self.j = j
        self.base = base
        self.fresh = FreshNames(set(all_names(j.term)) | set(avoid))

    def pair(self, v: Term, env: TypeEnv) -> Term:
        return Tuple_((v, pack(env, self.fresh)))

    def tr(self, t: Term) -> Term:
        info = self.j.info(t)
        pre, post = info.pre, info.post
        fresh = self.fresh
        if isinstance(t, (Fail, Unit, Const, AnyBase)):
            return self.pair(t, pre)
        if isinstance(t, Var):
            return self.pair(Var(t.name), env_drop(pre, t.name))
        if isinstance(t, PrimOp):
            return self.pair(PrimOp(t.op, tuple(Var(a.name) for a in t.args)), pre)
        if isinstance(t, Deref):
            return self.pair(Var(t.arg.name), env_drop_if(pre, t.arg.name, info.type))
        if isinstance(t, MkRef):
            return self.pair(Var(t.arg.name), env_drop(pre, t.arg.name))
        if isinstance(t, Assign):
            return Let(t.target.name, Var(t.value.name), self.pair(Unit(), post))
        if isinstance(t, Let):
            mid = info.extra["mid"]
            body_info = self.j.info(t.body)
            e1 = self.tr(t.bound)
            e2 = self.tr(t.body)
            inner_post = body_info.post
            xt = inner_post.get(t.name)
            if xt is not None and store_size(xt) > 0:
                # the body's store still includes the let-bound owner; drop it
                r, h = fresh.fresh("r"), fresh.fresh("h")
                e2 = LetTuple((r, h), e2, unpack(inner_post, h, self.pair(Var(r), post), fresh))
            h1 = fresh.fresh("h")
            return LetTuple((t.name, h1), e1, unpack(mid, h1, e2, fresh))
        if isinstance(t, If):
            return If(Var(t.cond.name), self.tr(t.then), self.tr(t.else_))
        if isinstance(t, Lam):
            delta, rest = info.extra["delta"], info.extra["rest"]
            param = info.type.params[0]
            code = self.code(None, (t.param,), (param,), delta, TypeEnv(), t.body)
            return Tuple_((Tuple_((pack(delta, fresh), code)), pack(rest, fresh)))
        if isinstance(t, Fix):
            delta, rest = info.extra["delta"], info.extra["rest"]
            rec = info.extra["rec"]
            code = self.code(t.name, t.params, info.type.params, delta,
                             TypeEnv([(t.name, rec)]), t.body)
            return Tuple_((Tuple_((pack(delta, fresh), code)), pack(rest, fresh)))
        if isinstance(t, App):
            f = t.fun.name
            ft = pre[f]
            r = fresh.fresh("r")
            outs = self._rebinders(t.args)
            args = [Var(a.name) for a in t.args]
            if isinstance(ft, FunT):
                hf = fresh.fresh("h")
                call = App(code_of(f), (mk_tuple(args + [env_of(f)]),))
                rebind = Let(f, Tuple_((Var(hf), code_of(f))), self.pair(Var(r), pre))
                return LetTuple((r, *outs, hf), call, rebind)
            delta = ft.captured
            hf, hf2 = fresh.fresh("h"), fresh.fresh("h")
            call = App(Var(f), (mk_tuple(args + [Var(hf)]),))
            return Let(hf, pack(delta, fresh),
                       LetTuple((r, *outs, hf2), call,
                                unpack(delta, hf2, self.pair(Var(r), pre), fresh)))
        raise TypeError(f"cannot translate {type(t).__name__}")

    def _rebinders(self, args) -> List[str]:
        # repeated (necessarily sharable) arguments get throwaway names
        seen, out = set(), []
        for a in args:
            if a.name in seen:
                out.append(self.fresh.fresh("_"))
            else:
                seen.add(a.name)
                out.append(a.name)
        return out

    def code(self, fname, params, ptypes, delta: TypeEnv, recenv: TypeEnv, body: Term) -> Term:
        fresh = self.fresh
        h, h2, r, p = fresh.fresh("h"), fresh.fresh("h"), fresh.fresh("r"), fresh.fresh("p")
        inner = delta.concat(recenv)
        for x, tx in zip(params, ptypes):
            inner = inner.extend(x, tx)
        result = mk_tuple([Var(r)] + [Var(x) for x in params] + [pack(delta, fresh)])
        e = self.tr(body)
        core = unpack(delta, h, LetTuple((r, h2), e, unpack(inner, h2, result, fresh)), fresh)
        core = LetTuple(tuple(params) + (h,), Var(p), core)
        ann = None
        if any(isinstance(tx, FunT) for tx in ptypes):
            # closure parameters are only taken apart by projections, which
            # need their tuple width up front
            arg = S.tuple_type(tuple(translate_type(tx) for tx in ptypes)
                               + (S.base_tuple(store_size(delta)),))
            ann = S.to_tyexpr(arg, self.base.value)
        if fname is None:
            return Lam(p, core, ann)
        return Fix(fname, (p,), core, None if ann is None else (ann,))


def translate(env: TypeEnv, term: Term, judgment: Judgment | None = None,
              base: BaseKind = BaseKind.BOOL):
    """Translate ``term`` typed under ``env``.

    Returns ``(target, type, post)``; the target term has simple type
    ``[[type]] * b^|post|`` under the translated environment.  ``base`` only
    picks the spelling of type annotations in the output."""
    j = judgment or typecheck_refl(env, term)
    out = _Translator(j, env.names(), base).tr(j.term)
    return out, j.type, j.post


# --------------------------------------------------------------------------
# subsumption


def subsume(target: Term, t: FunT, m: int, base: BaseKind = BaseKind.BOOL,
            fresh: FreshNames | None = None) -> Term:
    """Coerce a translated closure of type ``t`` (store size n) to store size
    ``m > n`` by padding its store with a dummy constant.

    ``target`` is a translated term ``(closure, store)``; the result has
    the same shape at the larger function type."""
    n = store_size(t)
    if m <= n:
        raise ValueError(f"subsumption needs a larger store size (got {m} <= {n})")
    fresh = fresh or FreshNames(all_names(target))
    dummy = Const(False) if base is BaseKind.BOOL else Const(0)
    pad = [dummy] * (m - n)
    k = len(t.params)
    c, n1, h1, h2 = (fresh.fresh(s) for s in ("c", "code", "h", "h"))
    p, xs = fresh.fresh("p"), [fresh.fresh("x") for _ in range(k)]
    h, r, h1b = fresh.fresh("h"), fresh.fresh("r"), fresh.fresh("h")

    def pieces(src: str, count: int):
        vs = [fresh.fresh("v") for _ in range(count)]
        return vs, (lambda body: _spread(Var(src), vs, body))

    hv, open_h = pieces(h, m)
    rv, open_r = pieces(h1b, n)
    ev, open_e = pieces(h1, n)
    call = App(Var(n1), (mk_tuple([Var(x) for x in xs] + [mk_tuple(Var(v) for v in hv[:n])]),))
    code = Lam(p, LetTuple(tuple(xs) + (h,), Var(p), open_h(
        LetTuple((r, *xs, h1b), call,
                 open_r(mk_tuple([Var(r)] + [Var(x) for x in xs]
                                 + [mk_tuple([Var(v) for v in rv] + pad)]))))))
    clos = Tuple_((open_e(mk_tuple([Var(v) for v in ev] + pad)), code))
    return LetTuple((c, h2), target, LetTuple((h1, n1), Var(c), Tuple_((clos, Var(h2)))))


def pad_type(t: FunT, m: int) -> FunT:
    return FunT(t.params, m, t.ret)

