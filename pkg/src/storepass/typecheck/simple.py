"""Simple types and a unification-based checker shared by the pure target
language, the exception / effect / symbol / reference extensions, and the
shape pre-pass of the ownership checker."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..syntax.ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, Gensym, Handle, If, Lam,
    Let, LetRec, LetTuple, Loc, MkRef, Perform, PrimOp, Proj, Raise, Span,
    SymEq, Term, Try, Tuple_, TyArrow, TyExpr, TyName, TyRef, TyTuple, Unit,
    Var,
)


class SimpleTypeError(Exception):
    def __init__(self, msg: str, span: Optional[Span] = None):
        where = f" at {span}" if span else ""
        super().__init__(msg + where)
        self.msg = msg
        self.span = span


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class SUnit:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class SBase:
    def __str__(self):
        return "b"


@dataclass(frozen=True)
class SSym:
    def __str__(self):
        return "sym"


@dataclass(frozen=True)
class SRef:
    inner: "SType"

    def __str__(self):
        return f"ref {_atom(self.inner)}"


@dataclass(frozen=True)
class SFun:
    params: Tuple["SType", ...]
    ret: "SType"

    def __str__(self):
        if len(self.params) == 1:
            p = self.params[0]
            dom = f"({p})" if isinstance(prune(p), SFun) else str(p)
        else:
            dom = "(" + ", ".join(map(str, self.params)) + ")"
        return f"{dom} -> {self.ret}"


@dataclass(frozen=True)
class STuple:
    items: Tuple["SType", ...]

    def __str__(self):
        return " * ".join(_atom(i) for i in self.items)


_var_ids = itertools.count()


class SVar:
    __slots__ = ("ref", "id")

    def __init__(self):
        self.ref: Optional["SType"] = None
        self.id = next(_var_ids)

    def __str__(self):
        t = prune(self)
        return f"'a{self.id}" if t is self else str(t)

    __repr__ = __str__


SType = object  # any of the classes above

S_UNIT = SUnit()
S_BASE = SBase()
S_SYM = SSym()


def _atom(t) -> str:
    t = prune(t)
    s = str(t)
    return f"({s})" if isinstance(t, (SFun, STuple)) else s


def tuple_type(items) -> SType:
    """Product type under the store-encoding conventions: the empty product
    is unit and a one-element product is its element."""
    items = tuple(items)
    if not items:
        return S_UNIT
    if len(items) == 1:
        return items[0]
    return STuple(items)


def base_tuple(n: int) -> SType:
    return tuple_type((S_BASE,) * n)


def prune(t):
    while isinstance(t, SVar) and t.ref is not None:
        t = t.ref
    return t


def _occurs(v: SVar, t) -> bool:
    t = prune(t)
    if t is v:
        return True
    if isinstance(t, SRef):
        return _occurs(v, t.inner)
    if isinstance(t, SFun):
        return any(_occurs(v, p) for p in t.params) or _occurs(v, t.ret)
    if isinstance(t, STuple):
        return any(_occurs(v, i) for i in t.items)
    return False


def unify(a, b, span: Optional[Span] = None) -> None:
    a, b = prune(a), prune(b)
    if a is b:
        return
    if isinstance(a, SVar):
        if _occurs(a, b):
            raise SimpleTypeError(f"cannot build infinite type {a} = {resolve(b)}", span)
        a.ref = b
        return
    if isinstance(b, SVar):
        unify(b, a, span)
        return
    if isinstance(a, SRef) and isinstance(b, SRef):
        unify(a.inner, b.inner, span)
        return
    if isinstance(a, SFun) and isinstance(b, SFun) and len(a.params) == len(b.params):
        for p, q in zip(a.params, b.params):
            unify(p, q, span)
        unify(a.ret, b.ret, span)
        return
    if isinstance(a, STuple) and isinstance(b, STuple) and len(a.items) == len(b.items):
        for p, q in zip(a.items, b.items):
            unify(p, q, span)
        return
    if type(a) is type(b) and isinstance(a, (SUnit, SBase, SSym)):
        return
    raise SimpleTypeError(f"type mismatch: {resolve(a)} vs {resolve(b)}", span)


def resolve(t, default=None):
    """Substitute solved variables; unsolved ones become ``default`` if given."""
    t = prune(t)
    if isinstance(t, SVar):
        return t if default is None else default
    if isinstance(t, SRef):
        return SRef(resolve(t.inner, default))
    if isinstance(t, SFun):
        return SFun(tuple(resolve(p, default) for p in t.params), resolve(t.ret, default))
    if isinstance(t, STuple):
        return STuple(tuple(resolve(i, default) for i in t.items))
    return t


def type_equal(a, b) -> bool:
    """Equality of resolved simple types, treating variables up to renaming."""
    m: Dict[int, int] = {}
    r: Dict[int, int] = {}

    def go(x, y):
        x, y = prune(x), prune(y)
        if isinstance(x, SVar) or isinstance(y, SVar):
            if not (isinstance(x, SVar) and isinstance(y, SVar)):
                return False
            if m.setdefault(x.id, y.id) != y.id or r.setdefault(y.id, x.id) != x.id:
                return False
            return True
        if type(x) is not type(y):
            return False
        if isinstance(x, SRef):
            return go(x.inner, y.inner)
        if isinstance(x, SFun):
            return len(x.params) == len(y.params) and all(map(go, x.params, y.params)) and go(x.ret, y.ret)
        if isinstance(x, STuple):
            return len(x.items) == len(y.items) and all(map(go, x.items, y.items))
        return True

    return go(a, b)


def from_tyexpr(t: TyExpr) -> SType:
    if isinstance(t, TyName):
        return {"unit": S_UNIT, "bool": S_BASE, "int": S_BASE, "sym": S_SYM}[t.name]
    if isinstance(t, TyRef):
        return SRef(from_tyexpr(t.inner))
    if isinstance(t, TyArrow):
        return SFun(tuple(from_tyexpr(p) for p in t.params), from_tyexpr(t.ret))
    if isinstance(t, TyTuple):
        return tuple_type(from_tyexpr(i) for i in t.items)
    raise TypeError(t)


def to_tyexpr(t: SType, base: str = "bool") -> TyExpr:
    """Concrete syntax for a resolved simple type; unsolved variables
    become ``unit``."""
    t = prune(t)
    if isinstance(t, (SUnit, SVar)):
        return TyName("unit")
    if isinstance(t, SBase):
        return TyName(base)
    if isinstance(t, SSym):
        return TyName("sym")
    if isinstance(t, SRef):
        return TyRef(to_tyexpr(t.inner, base))
    if isinstance(t, STuple):
        return TyTuple(tuple(to_tyexpr(i, base) for i in t.items))
    if isinstance(t, SFun):
        return TyArrow(tuple(to_tyexpr(p, base) for p in t.params), to_tyexpr(t.ret, base))
    raise TypeError(t)


# --------------------------------------------------------------------------
# inference


class Inference:
    """Monomorphic type inference over the unified term language.

    Records the inferred types of binders (lambda parameters, recursive
    function parameters and results) and of ``fail`` nodes, keyed by the
    identity of the node, for later passes."""

    def __init__(self, signature: Optional[dict] = None, deep: bool = True):
        self.signature = signature or {}
        self.deep = deep
        self.lam_param: Dict[int, object] = {}
        self.fix_sig: Dict[int, Tuple[tuple, object]] = {}
        self.fail_type: Dict[int, object] = {}
        self._projs: List[tuple] = []

    def run(self, env: Dict[str, object], t: Term):
        ty = self.infer(dict(env), t)
        self._solve_projections(final=True)
        return ty

    # projections wait until the arity of the tuple is known
    def _proj(self, tt, idx, res, node):
        t = prune(tt)
        if isinstance(t, SVar):
            self._projs.append((tt, idx, res, node))
            return
        if not isinstance(t, STuple):
            raise SimpleTypeError(f"projection .{idx} from non-tuple {resolve(t)}", node.span)
        if not 1 <= idx <= len(t.items):
            raise SimpleTypeError(f"projection .{idx} out of range for {resolve(t)}", node.span)
        unify(t.items[idx - 1], res, node.span)

    def _solve_projections(self, final=False):
        progress = True
        while progress and self._projs:
            progress = False
            pending, self._projs = self._projs, []
            for tt, idx, res, node in pending:
                if isinstance(prune(tt), SVar):
                    self._projs.append((tt, idx, res, node))
                else:
                    self._proj(tt, idx, res, node)
                    progress = True
        if final and self._projs:
            node = self._projs[0][3]
            raise SimpleTypeError("cannot determine the tuple type of a projection", node.span)

    def _eff(self, name, node):
        if name not in self.signature:
            raise SimpleTypeError(f"undeclared effect {name!r}", node.span)
        a, b = self.signature[name]
        return from_tyexpr(a), from_tyexpr(b)

    def infer(self, env, t):
        sp = getattr(t, "span", None)
        if isinstance(t, Unit):
            return S_UNIT
        if isinstance(t, (Const, AnyBase)):
            return S_BASE
        if isinstance(t, Var):
            if t.name not in env:
                raise SimpleTypeError(f"unbound variable {t.name!r}", sp)
            return env[t.name]
        if isinstance(t, Fail):
            v = SVar()
            self.fail_type[id(t)] = v
            return v
        if isinstance(t, PrimOp):
            for a in t.args:
                unify(self.infer(env, a), S_BASE, getattr(a, "span", sp))
            return S_BASE
        if isinstance(t, MkRef):
            return SRef(self.infer(env, t.arg))
        if isinstance(t, Deref):
            v = SVar()
            unify(self.infer(env, t.arg), SRef(v), sp)
            return v
        if isinstance(t, Assign):
            tt = self.infer(env, t.target)
            unify(tt, SRef(self.infer(env, t.value)), sp)
            return S_UNIT
        if isinstance(t, Let):
            b = self.infer(env, t.bound)
            return self.infer({**env, t.name: b}, t.body)
        if isinstance(t, LetTuple):
            vs = tuple(SVar() for _ in t.names)
            unify(self.infer(env, t.bound), STuple(vs), sp)
            return self.infer({**env, **dict(zip(t.names, vs))}, t.body)
        if isinstance(t, If):
            unify(self.infer(env, t.cond), S_BASE, sp)
            a = self.infer(env, t.then)
            unify(a, self.infer(env, t.else_), sp)
            return a
        if isinstance(t, Lam):
            p = from_tyexpr(t.ann) if t.ann is not None else SVar()
            self.lam_param[id(t)] = p
            return SFun((p,), self.infer({**env, t.param: p}, t.body))
        if isinstance(t, Fix):
            anns = t.anns or (None,) * len(t.params)
            ps = tuple(from_tyexpr(a) if a is not None else SVar() for a in anns)
            r = SVar()
            ft = SFun(ps, r)
            self.fix_sig[id(t)] = (ps, r)
            body = self.infer({**env, t.name: ft, **dict(zip(t.params, ps))}, t.body)
            unify(body, r, sp)
            return ft
        if isinstance(t, LetRec):
            sigs = {b.name: SFun(tuple(SVar() if a is None else from_tyexpr(a)
                                       for a in (b.anns or (None,) * len(b.params))), SVar())
                    for b in t.bindings}
            env2 = {**env, **sigs}
            for b in t.bindings:
                ft = sigs[b.name]
                body = self.infer({**env2, **dict(zip(b.params, ft.params))}, b.body)
                unify(body, ft.ret, sp)
            return self.infer(env2, t.body)
        if isinstance(t, App):
            ft = self.infer(env, t.fun)
            args = [self.infer(env, a) for a in t.args]
            i = 0
            while i < len(args):
                self._solve_projections()
                f = prune(ft)
                if isinstance(f, SFun):
                    k = len(f.params)
                    if i + k > len(args):
                        raise SimpleTypeError(
                            f"function of {k} parameters applied to {len(args) - i} arguments", sp)
                    for p, a in zip(f.params, args[i:i + k]):
                        unify(p, a, sp)
                    ft = f.ret
                    i += k
                elif isinstance(f, SVar):
                    r = SVar()
                    unify(f, SFun((args[i],), r), sp)
                    ft = r
                    i += 1
                else:
                    raise SimpleTypeError(f"applying a non-function of type {resolve(f)}", sp)
            return ft
        if isinstance(t, Tuple_):
            return tuple_type(self.infer(env, i) for i in t.items)
        if isinstance(t, Proj):
            tt = self.infer(env, t.tup)
            res = SVar()
            self._proj(tt, t.index, res, t)
            return res
        if isinstance(t, Raise):
            unify(self.infer(env, t.arg), from_tyexpr(t.ty), sp)
            return SVar()
        if isinstance(t, Try):
            a = self.infer(env, t.body)
            unify(a, self.infer({**env, t.binder: from_tyexpr(t.ty)}, t.handler), sp)
            return a
        if isinstance(t, Perform):
            b1, b2 = self._eff(t.name, t)
            unify(self.infer(env, t.arg), b1, sp)
            res = SVar()
            unify(self.infer(env, t.cont), SFun((b2,), res), sp)
            return res
        if isinstance(t, Handle):
            s1 = self.infer(env, t.body)
            h = t.handler
            s2 = self.infer({**env, h.ret_binder: s1}, h.ret_body)
            for c in h.clauses:
                b1, b2 = self._eff(c.name, t)
                k = SFun((b2,), s2 if self.deep else s1)
                unify(self.infer({**env, c.arg: b1, c.cont: k}, c.body), s2, sp)
            return s2
        if isinstance(t, Gensym):
            return S_SYM
        if isinstance(t, SymEq):
            unify(self.infer(env, t.left), S_SYM, sp)
            unify(self.infer(env, t.right), S_SYM, sp)
            return S_BASE
        if isinstance(t, Loc):
            raise SimpleTypeError("locations cannot be typed statically", sp)
        raise SimpleTypeError(f"unexpected term {type(t).__name__}", sp)


def typecheck_target(env: Dict[str, object], term: Term, expected=None):
    """Principal simple type of a pure target term under ``env``.

    If ``expected`` is given the result is also unified with it, so a
    translated program can be checked against its predicted type."""
    inf = Inference()
    ty = inf.run(env, term)
    if expected is not None:
        unify(ty, expected, getattr(term, "span", None))
    return resolve(ty)


def typecheck_ext(term: Term, signature: Optional[dict] = None, deep: bool = True,
                  env: Optional[Dict[str, object]] = None):
    """Simple type of a term of the exception, effect-handler, symbol, or
    unrestricted-reference calculus.  ``deep`` selects the continuation type
    used in handler clauses."""
    inf = Inference(signature, deep=deep)
    return resolve(inf.run(env or {}, term))
