"""The ownership type system for the reference language.

The checker is syntax directed: lambda nodes use the plain function rule,
fix nodes the recursive one, and an application uses the recursive-call rule
exactly when the callee is bound with a recursive function type.  Parameter
types come from a simple-type pre-pass (or annotations); store sizes of
function types are solved by unification and an undetermined size is fixed
to 0 the first time it is needed.

Besides the final judgment the checker records, for every node, the pre- and
post-environments and type it was checked at.  The translator and the
run-time monitor read that table instead of re-deriving it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from ..syntax.ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, If, Lam, Let, MkRef,
    PrimOp, Span, Term, TyArrow, TyExpr, TyName, TyRef, TyTuple, Unit, Var,
)
from ..syntax.ops import free_vars, rename_apart
from ..syntax.validate import is_anf
from . import simple as S
from .types import (
    BASE, UNIT, BaseT, FullType, FunT, RecFunT, RefT, SizeVar, TypeEnv, UnitT,
    env_drop, env_drop_if, is_subsequence, sharable, split_env, store_size,
    unify, unify_env, zonk, zonk_env,
)


class OwnershipError(Exception):
    """A rejected program.  ``rule`` names the typing rule that failed and
    ``binding`` the variable at fault, if any."""

    def __init__(self, rule: str, message: str, span: Optional[Span] = None,
                 binding: Optional[str] = None):
        where = f" at {span}" if span else ""
        super().__init__(f"[{rule}] {message}{where}")
        self.rule = rule
        self.message = message
        self.span = span
        self.binding = binding

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "message": self.message,
            "line": self.span.line if self.span else None,
            "col": self.span.col if self.span else None,
            "binding": self.binding,
        }


@dataclass
class NodeInfo:
    pre: TypeEnv
    type: FullType
    post: TypeEnv
    extra: dict = field(default_factory=dict)


@dataclass
class Judgment:
    pre: TypeEnv
    term: Term
    type: FullType
    post: TypeEnv
    derivation: Dict[int, NodeInfo] = field(default_factory=dict, repr=False, compare=False)

    def info(self, node: Term) -> NodeInfo:
        return self.derivation[id(node)]

    def __str__(self):
        return f"{self.pre} ⊢ M : {self.type} ⊣ {self.post}"


# --------------------------------------------------------------------------
# conversions between simple shapes, annotations, and ownership types


def _from_shape(s, span, what) -> FullType:
    s = S.prune(s)
    if isinstance(s, S.SVar) or isinstance(s, S.SUnit):
        return UNIT
    if isinstance(s, S.SBase):
        return BASE
    if isinstance(s, S.SRef):
        inner = _from_shape(s.inner, span, what)
        if not isinstance(inner, (BaseT, RefT)):
            raise OwnershipError("T-Mkref", f"{what}: references may only hold base values or references", span)
        return RefT(inner)
    if isinstance(s, S.SFun):
        return FunT(tuple(_from_shape(p, span, what) for p in s.params), SizeVar(),
                    _from_shape(s.ret, span, what))
    raise OwnershipError("T-Fun", f"{what}: type {S.resolve(s)} has no ownership counterpart", span)


def _to_shape(t: FullType):
    if isinstance(t, UnitT):
        return S.S_UNIT
    if isinstance(t, BaseT):
        return S.S_BASE
    if isinstance(t, RefT):
        return S.SRef(_to_shape(t.inner))
    if isinstance(t, (FunT, RecFunT)):
        return S.SFun(tuple(_to_shape(p) for p in t.params), _to_shape(t.ret))
    raise TypeError(t)


def from_annotation(t: TyExpr) -> FullType:
    """Ownership type written in a program, e.g. ``ref bool -[1]-> unit``."""
    if isinstance(t, TyName):
        if t.name == "unit":
            return UNIT
        if t.name in ("bool", "int"):
            return BASE
    if isinstance(t, TyRef):
        inner = from_annotation(t.inner)
        if isinstance(inner, (BaseT, RefT)):
            return RefT(inner)
    if isinstance(t, TyArrow):
        store = SizeVar() if t.store is None else t.store
        return FunT(tuple(from_annotation(p) for p in t.params), store, from_annotation(t.ret))
    if isinstance(t, TyTuple) and not t.items:
        return UNIT
    raise OwnershipError("T-Fun", f"annotation {t} is not an ownership type")


# --------------------------------------------------------------------------
# the checker


class _Checker:
    def __init__(self, shapes: S.Inference):
        self.shapes = shapes
        self.table: Dict[int, NodeInfo] = {}

    def record(self, t, pre, ty, post, **extra):
        self.table[id(t)] = NodeInfo(pre, ty, post, extra)
        return ty, post

    def lookup(self, env: TypeEnv, x: Term, rule: str, ctx: Term) -> FullType:
        if not isinstance(x, Var):
            raise OwnershipError(rule, "operand is not a variable", getattr(x, "span", None))
        ty = env.get(x.name)
        if ty is None:
            raise OwnershipError(rule, f"variable {x.name!r} is not available (unbound, or its ownership was consumed)",
                                 x.span or ctx.span, x.name)
        return ty

    def expect(self, ok: bool, rule: str, msg: str, t: Term, binding=None):
        if not ok:
            raise OwnershipError(rule, msg, getattr(t, "span", None), binding)

    def check(self, env: TypeEnv, t: Term):
        sp = getattr(t, "span", None)
        if isinstance(t, Fail):
            ty = _from_shape(self.shapes.fail_type[id(t)], sp, "fail")
            self.expect(isinstance(ty, (BaseT, UnitT)), "T-Fail",
                        f"fail is used at type {ty}; only base or unit is allowed", t)
            return self.record(t, env, ty, env, rule="T-Fail")
        if isinstance(t, Unit):
            return self.record(t, env, UNIT, env, rule="T-Unit")
        if isinstance(t, (Const, AnyBase)):
            return self.record(t, env, BASE, env, rule="T-Const")
        if isinstance(t, Var):
            ty = self.lookup(env, t, "T-Var", t)
            return self.record(t, env, ty, env_drop(env, t.name), rule="T-Var")
        if isinstance(t, PrimOp):
            for a in t.args:
                ty = self.lookup(env, a, "T-Op", t)
                self.expect(isinstance(ty, BaseT), "T-Op", f"operand {a.name!r} has type {ty}, expected base", t, a.name)
            return self.record(t, env, BASE, env, rule="T-Op")
        if isinstance(t, Deref):
            ty = self.lookup(env, t.arg, "T-Deref", t)
            self.expect(isinstance(ty, RefT), "T-Deref", f"dereferencing {t.arg.name!r} of type {ty}", t, t.arg.name)
            return self.record(t, env, ty.inner, env_drop_if(env, t.arg.name, ty.inner), rule="T-Deref")
        if isinstance(t, MkRef):
            ty = self.lookup(env, t.arg, "T-Mkref", t)
            self.expect(isinstance(ty, (BaseT, RefT)), "T-Mkref",
                        f"cannot make a reference to {t.arg.name!r} of type {ty}", t, t.arg.name)
            return self.record(t, env, RefT(ty), env_drop(env, t.arg.name), rule="T-Mkref")
        if isinstance(t, Assign):
            ty = self.lookup(env, t.target, "T-Assign", t)
            tx = self.lookup(env, t.value, "T-Assign", t)
            self.expect(isinstance(ty, RefT) and unify(ty.inner, tx), "T-Assign",
                        f"assigning {t.value.name!r} : {tx} to {t.target.name!r} : {ty}", t, t.target.name)
            return self.record(t, env, UNIT, env_drop(env, t.value.name), rule="T-Assign")
        if isinstance(t, Let):
            self.expect(t.name not in env, "T-Let", f"let-bound {t.name!r} shadows a live binding", t, t.name)
            ty1, mid = self.check(env, t.bound)
            self.expect(t.name not in mid, "T-Let", f"let-bound {t.name!r} shadows a live binding", t, t.name)
            ty, post = self.check(mid.extend(t.name, ty1), t.body)
            return self.record(t, env, ty, post.remove(t.name), rule="T-Let", mid=mid, bound_type=ty1)
        if isinstance(t, If):
            tc = self.lookup(env, t.cond, "T-If", t)
            self.expect(isinstance(tc, BaseT), "T-If", f"condition {t.cond.name!r} has type {tc}", t, t.cond.name)
            ty1, post1 = self.check(env, t.then)
            ty2, post2 = self.check(env, t.else_)
            self.expect(unify(ty1, ty2), "T-If", f"branches have types {ty1} and {ty2}", t)
            self.expect(unify_env(post1, post2), "T-If",
                        f"branches leave different environments: {post1} vs {post2}", t)
            return self.record(t, env, ty1, post1, rule="T-If")
        if isinstance(t, Lam):
            param = self.param_type(t.ann, self.shapes.lam_param[id(t)], sp, t.param)
            delta, rest = self.split(env, free_vars(t), t)
            inner = delta.extend(t.param, param)
            ty2, post = self.check(inner, t.body)
            self.expect(unify_env(post, inner), "T-Fun",
                        f"function body must leave its environment {inner} intact, got {post}", t,
                        _lost(inner, post))
            fty = FunT((param,), store_size(delta), ty2)
            return self.record(t, env, fty, rest, rule="T-Fun", delta=delta, rest=rest)
        if isinstance(t, Fix):
            shapes, ret_shape = self.shapes.fix_sig[id(t)]
            anns = t.anns or (None,) * len(t.params)
            params = tuple(self.param_type(a, s, sp, p) for a, s, p in zip(anns, shapes, t.params))
            ret = _from_shape(ret_shape, sp, f"result of {t.name}")
            delta, rest = self.split(env, free_vars(t), t)
            rec = RecFunT(params, delta, ret)
            inner = delta.extend(t.name, rec)
            for p, pt in zip(t.params, params):
                inner = inner.extend(p, pt)
            ty2, post = self.check(inner, t.body)
            self.expect(unify(ty2, ret), "T-RFun", f"body type {ty2} does not match result type {ret}", t)
            self.expect(unify_env(post, inner), "T-RFun",
                        f"function body must leave its environment {inner} intact, got {post}", t,
                        _lost(inner, post))
            fty = FunT(params, store_size(delta), ret)
            return self.record(t, env, fty, rest, rule="T-RFun", delta=delta, rest=rest, rec=rec)
        if isinstance(t, App):
            ft = self.lookup(env, t.fun, "T-App", t)
            fname = t.fun.name
            rule = "T-RApp" if isinstance(ft, RecFunT) else "T-App"
            self.expect(isinstance(ft, (FunT, RecFunT)), rule, f"{fname!r} of type {ft} is not a function", t, fname)
            self.expect(len(ft.params) == len(t.args), rule,
                        f"{fname!r} expects {len(ft.params)} arguments, got {len(t.args)}", t, fname)
            owned = []
            for a, pt in zip(t.args, ft.params):
                at = self.lookup(env, a, rule, t)
                self.expect(unify(at, pt), rule, f"argument {a.name!r} has type {at}, expected {pt}", t, a.name)
                if not sharable(at):
                    self.expect(a.name not in owned and a.name != fname, rule,
                                f"argument {a.name!r} is passed twice but its ownership cannot be shared", t, a.name)
                    owned.append(a.name)
            if isinstance(ft, RecFunT):
                avail = env
                for x in {fname, *(a.name for a in t.args)}:
                    avail = avail.remove(x)
                self.expect(is_subsequence(ft.captured, avail), rule,
                            f"the store {ft.captured} of {fname!r} is not available apart from its arguments", t,
                            next((x for x, _ in ft.captured if x not in avail), None))
            return self.record(t, env, ft.ret, env, rule=rule)
        raise OwnershipError("syntax", f"{type(t).__name__} is not part of the reference language", sp)

    def param_type(self, ann, shape, span, name):
        ty = _from_shape(shape, span, f"parameter {name}")
        if ann is not None:
            a = from_annotation(ann)
            if not unify(a, ty):
                raise OwnershipError("T-Fun", f"annotation {a} of {name!r} conflicts with its use as {ty}", span, name)
            ty = a
        return ty

    def split(self, env: TypeEnv, fv, t):
        missing = sorted(x for x in fv if x not in env)
        if missing:
            raise OwnershipError("T-Fun", f"closure needs {missing[0]!r}, which is not available",
                                 t.span, missing[0])
        delta, rest = split_env(env, fv)
        for x, ty in delta:
            if isinstance(ty, RecFunT):
                raise OwnershipError("T-Fun", f"closure captures the recursive function {x!r}", t.span, x)
        return delta, rest


def _lost(before: TypeEnv, after: TypeEnv):
    for x, _ in before:
        if x not in after:
            return x
    return None


def _finalize(table: Dict[int, NodeInfo]) -> None:
    for info in table.values():
        info.pre = zonk_env(info.pre)
        info.post = zonk_env(info.post)
        info.type = zonk(info.type)
        for k, v in list(info.extra.items()):
            if isinstance(v, TypeEnv):
                info.extra[k] = zonk_env(v)
            elif isinstance(v, (FunT, RecFunT, RefT, BaseT, UnitT)):
                info.extra[k] = zonk(v)


def typecheck_refl(env: TypeEnv, term: Term, rename: bool = True) -> Judgment:
    """Derive ``env ⊢ term : τ ⊣ env'`` or raise :class:`OwnershipError`.

    The term is first alpha-renamed apart (binders distinct from each other
    and from ``env``); the judgment's ``term`` is that renamed copy and the
    derivation table is keyed by its nodes."""
    if not is_anf(term):
        raise OwnershipError("syntax", "term is not in administrative normal form", getattr(term, "span", None))
    if rename:
        term = rename_apart(term, env.names())
    inf = S.Inference()
    try:
        inf.run({x: _to_shape(t) for x, t in env}, term)
    except S.SimpleTypeError as e:
        raise OwnershipError("simple-type", e.msg, e.span) from None
    ck = _Checker(inf)
    ty, post = ck.check(env, term)
    _finalize(ck.table)
    return Judgment(zonk_env(env), term, zonk(ty), zonk_env(post), ck.table)
