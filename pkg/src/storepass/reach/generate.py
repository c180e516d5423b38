"""Random closed, ANF, ownership-typed programs of base type.

Generation follows the typing rules forwards: the generator keeps the
current type environment, only emits a binding whose rule premises hold
there, and updates the environment the way the rule does.  Nested blocks
(function bodies and branches) are not allowed to consume bindings they
inherit, which is exactly what the function and conditional rules demand.

Recursion uses a flag parameter that is switched off (Bool) or counted
down (Int) before the recursive call, so every generated program
terminates.  ``*`` only appears on the top-level spine, at most
``max_choices`` times, so each run consumes at most that many answers.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..syntax.ast import (
    AnyBase, App, Assign, BaseKind, Const, Deref, Fail, Fix, If, Lam, Let,
    MkRef, PrimOp, Term, TyArrow, TyExpr, TyName, TyRef, Unit, Var,
)
from ..syntax.ops import free_vars, subterms, term_size
from ..typecheck.ownership import typecheck_refl
from ..typecheck.types import (
    BASE, UNIT, BaseT, FunT, RecFunT, RefT, TypeEnv, UnitT, sharable, store_size,
)

B_REF = RefT(BASE)


class GenerationError(Exception):
    pass


@dataclass
class GenConfig:
    max_choices: int = 6
    max_depth: int = 2        # nesting of function bodies / branches
    retries: int = 20
    int_consts: Tuple[int, ...] = (0, 1, 2)


def to_tyexpr(t, base: BaseKind) -> TyExpr:
    if isinstance(t, BaseT):
        return TyName("bool" if base is BaseKind.BOOL else "int")
    if isinstance(t, UnitT):
        return TyName("unit")
    if isinstance(t, RefT):
        return TyRef(to_tyexpr(t.inner, base))
    if isinstance(t, FunT):
        return TyArrow(tuple(to_tyexpr(p, base) for p in t.params), to_tyexpr(t.ret, base), t.store)
    raise TypeError(t)


class _Scope:
    """Ordered bindings plus the names a nested block may not consume."""

    def __init__(self, bindings: List[Tuple[str, object]], frozen: frozenset):
        self.bindings = list(bindings)
        self.frozen = frozen

    def names_of(self, pred) -> List[str]:
        return [x for x, t in self.bindings if pred(t)]

    def type_of(self, x):
        for y, t in self.bindings:
            if y == x:
                return t
        raise KeyError(x)

    def consumable(self, x) -> bool:
        return x not in self.frozen

    def remove(self, xs):
        xs = set(xs)
        self.bindings = [(y, t) for y, t in self.bindings if y not in xs]

    def add(self, x, t):
        self.bindings.append((x, t))


class _Gen:
    def __init__(self, rng: random.Random, base: BaseKind, cfg: GenConfig):
        self.rng = rng
        self.base = base
        self.cfg = cfg
        self.counter = 0
        self.choices_left = cfg.max_choices

    def fresh(self, stem="x"):
        self.counter += 1
        return f"{stem}{self.counter}"

    def const(self):
        if self.base is BaseKind.BOOL:
            return Const(self.rng.random() < 0.5)
        return Const(self.rng.choice(self.cfg.int_consts))

    # ------------------------------------------------------------------

    def block(self, sc: _Scope, budget: int, want, depth: int, top: bool) -> Term:
        """A let-chain ending in a value of type ``want`` (base or unit)."""
        steps: List[Tuple[str, Term]] = []
        while budget > 2:
            got = self.step(sc, budget - 1, depth, top)
            if got is None:
                break
            name, bound, ty, consumed, cost = got
            sc.remove(consumed)
            sc.add(name, ty)
            steps.append((name, bound))
            budget -= cost
        body = self.result(sc, want, top)
        for name, bound in reversed(steps):
            body = Let(name, bound, body)
        return body

    def result(self, sc: _Scope, want, top: bool) -> Term:
        if isinstance(want, UnitT):
            return Unit()
        bases = sc.names_of(lambda t: isinstance(t, BaseT))
        if bases and self.rng.random() < 0.9:
            # favour recent values so the result depends on the computation
            return Var(bases[-1] if self.rng.random() < 0.7 else self.rng.choice(bases))
        return self.const()

    def step(self, sc: _Scope, budget: int, depth: int, top: bool):
        r = self.rng
        bases = sc.names_of(lambda t: isinstance(t, BaseT))
        refs = sc.names_of(lambda t: t == B_REF)
        refrefs = [x for x in sc.names_of(lambda t: isinstance(t, RefT) and isinstance(t.inner, RefT))
                   if sc.consumable(x)]
        movable = [x for x, t in sc.bindings
                   if sc.consumable(x) and not isinstance(t, RecFunT) and not sharable(t)]
        funs = [x for x, t in sc.bindings if isinstance(t, FunT)]
        options = [("const", 2 if bases else 6)]
        if top and self.choices_left > 0:
            options.append(("choice", 6))
        if bases:
            options += [("op", 3), ("alloc", 5)]
        if refs:
            options += [("deref", 4)]
        if refs and bases:
            options += [("assign", 3)]
        if refrefs:
            options += [("deref_ref", 1)]
        if movable:
            options += [("move", 1)]
        if refs and any(sc.consumable(x) for x in refs):
            options += [("alloc_ref", 1)]
        if depth < self.cfg.max_depth and budget >= 6:
            options += [("lam", 7 if refs else 2)]
            if budget >= 12:
                options += [("fix", 3 if refs else 1)]
        if funs:
            options += [("call", 6 if top else 3)]
        if bases and depth < self.cfg.max_depth and budget >= 6:
            options += [("if", 2)]
        kinds, weights = zip(*options)
        kind = r.choices(kinds, weights)[0]
        return getattr(self, "s_" + kind)(sc, budget, depth, top)

    # steps return (name, bound, type, consumed names, approximate size)

    def s_const(self, sc, budget, depth, top):
        return self.fresh("c"), self.const(), BASE, (), 2

    def s_choice(self, sc, budget, depth, top):
        self.choices_left -= 1
        return self.fresh("n"), AnyBase(), BASE, (), 2

    def s_op(self, sc, budget, depth, top):
        bases = sc.names_of(lambda t: isinstance(t, BaseT))
        a, b = self.rng.choice(bases), self.rng.choice(bases)
        if self.base is BaseKind.BOOL:
            op = self.rng.choice(["not", "&&", "||", "=", "<>"])
        else:
            op = self.rng.choice(["+", "-", "=", "<", "<=", "<>"])
        args = (Var(a),) if op == "not" else (Var(a), Var(b))
        return self.fresh("v"), PrimOp(op, args), BASE, (), 2 + len(args)

    def s_alloc(self, sc, budget, depth, top):
        a = self.rng.choice(sc.names_of(lambda t: isinstance(t, BaseT)))
        return self.fresh("r"), MkRef(Var(a)), B_REF, (), 3

    def s_alloc_ref(self, sc, budget, depth, top):
        a = self.rng.choice([x for x in sc.names_of(lambda t: t == B_REF) if sc.consumable(x)])
        return self.fresh("rr"), MkRef(Var(a)), RefT(B_REF), (a,), 3

    def s_deref(self, sc, budget, depth, top):
        a = self.rng.choice(sc.names_of(lambda t: t == B_REF))
        return self.fresh("d"), Deref(Var(a)), BASE, (), 3

    def s_deref_ref(self, sc, budget, depth, top):
        a = self.rng.choice([x for x in sc.names_of(lambda t: isinstance(t, RefT) and isinstance(t.inner, RefT))
                             if sc.consumable(x)])
        return self.fresh("r"), Deref(Var(a)), sc.type_of(a).inner, (a,), 3

    def s_assign(self, sc, budget, depth, top):
        a = self.rng.choice(sc.names_of(lambda t: t == B_REF))
        b = self.rng.choice(sc.names_of(lambda t: isinstance(t, BaseT)))
        return self.fresh("u"), Assign(Var(a), Var(b)), UNIT, (), 4

    def s_move(self, sc, budget, depth, top):
        a = self.rng.choice([x for x, t in sc.bindings
                             if sc.consumable(x) and not isinstance(t, RecFunT) and not sharable(t)])
        return self.fresh("m"), Var(a), sc.type_of(a), (a,), 2

    def param_type(self, sc):
        r = self.rng.random()
        if r < 0.5:
            return BASE
        if r < 0.85:
            return B_REF
        # a function parameter whose type matches some function in scope
        funs = [t for _, t in sc.bindings if isinstance(t, FunT) and len(t.params) == 1]
        if funs:
            return self.rng.choice(funs)
        return BASE

    def captures(self, sc):
        cands = [x for x, t in sc.bindings
                 if not isinstance(t, RecFunT) and (sharable(t) or sc.consumable(x))]
        # refs are the interesting captures: they make the closure carry a store
        return [x for x in cands
                if self.rng.random() < (0.8 if not sharable(sc.type_of(x)) else 0.4)]

    def use_captures(self, body, sc, cap):
        # a captured cell the body never reads would drop out of the closure
        fv = free_vars(body)
        for x in cap:
            if x not in fv and sc.type_of(x) == B_REF:
                body = Let(self.fresh("d"), Deref(Var(x)), body)
        return body

    def _closure_type(self, sc, fun_term, params, ret):
        fv = free_vars(fun_term)
        delta = TypeEnv((x, t) for x, t in sc.bindings if x in fv)
        consumed = tuple(x for x, t in delta if not sharable(t))
        return FunT(tuple(params), store_size(delta), ret), consumed

    def s_lam(self, sc, budget, depth, top):
        cap = self.captures(sc)
        p = self.fresh("p")
        pty = self.param_type(sc)
        want = BASE if self.rng.random() < 0.75 else UNIT
        inner = _Scope([(x, t) for x, t in sc.bindings if x in cap] + [(p, pty)],
                       frozenset(cap) | {p})
        body = self.use_captures(self.block(inner, max(3, budget // 2), want, depth + 1, False),
                                 sc, cap)
        lam = Lam(p, body, to_tyexpr(pty, self.base))
        fty, consumed = self._closure_type(sc, lam, [pty], want)
        return self.fresh("f"), lam, fty, consumed, 2 + term_size(body)

    def s_fix(self, sc, budget, depth, top):
        """``fix g k q.. = if flag k then (let k' = next k in g k' q..; rest) else body``."""
        cap = self.captures(sc)
        g, k = self.fresh("g"), self.fresh("k")
        extra = [(self.fresh("p"), self.param_type(sc)) for _ in range(self.rng.randint(0, 1))]
        params = [(k, BASE)] + extra
        want = BASE if self.rng.random() < 0.8 else UNIT
        rec_ty = RecFunT(tuple(t for _, t in params), TypeEnv(), want)
        names = frozenset(cap) | {g} | {x for x, _ in params}
        scope = lambda: _Scope([(x, t) for x, t in sc.bindings if x in cap]
                               + [(g, rec_ty)] + params, names)
        # the flag and the counted-down argument
        if self.base is BaseKind.BOOL:
            flag_steps, cond = [], k
            nk = self.fresh("k")
            next_steps = [(nk, Const(False))]
        else:
            z, cond, one, nk = self.fresh("z"), self.fresh("t"), self.fresh("o"), self.fresh("k")
            flag_steps = [(z, Const(0)), (cond, PrimOp(">", (Var(k), Var(z))))]
            next_steps = [(one, Const(1)), (nk, PrimOp("-", (Var(k), Var(one))))]
        sub = max(3, budget // 3)
        res = self.fresh("y")
        call = App(Var(g), (Var(nk),) + tuple(Var(x) for x, _ in extra))
        rec_sc = scope()
        for x, _ in next_steps:
            rec_sc.add(x, BASE)
        rec_sc.add(res, want)
        tail = self.block(rec_sc, sub, want, depth + 1, False)
        rec_branch = tail
        for x, e in reversed(next_steps + [(res, call)]):
            rec_branch = Let(x, e, rec_branch)
        base_sc = scope()
        for x, _ in flag_steps:
            base_sc.add(x, BASE)
        base_branch = self.block(base_sc, sub, want, depth + 1, False)
        body: Term = self.use_captures(If(Var(cond), rec_branch, base_branch), sc, cap)
        for x, e in reversed(flag_steps):
            body = Let(x, e, body)
        fix = Fix(g, tuple(x for x, _ in params), body,
                  tuple(to_tyexpr(t, self.base) for _, t in params))
        fty, consumed = self._closure_type(sc, fix, [t for _, t in params], want)
        return self.fresh("f"), fix, fty, consumed, 2 + term_size(body)

    def s_call(self, sc, budget, depth, top):
        funs = [x for x, t in sc.bindings if isinstance(t, FunT)]
        self.rng.shuffle(funs)
        for f in funs:
            fty = sc.type_of(f)
            args, used = [], {f}
            for pt in fty.params:
                cands = [x for x, t in sc.bindings
                         if t == pt and (sharable(t) or x not in used)]
                if not cands:
                    break
                a = self.rng.choice(cands)
                if not sharable(pt):
                    used.add(a)
                args.append(Var(a))
            else:
                return self.fresh("a"), App(Var(f), tuple(args)), fty.ret, (), 2 + 1 + len(args)
        return self.s_const(sc, budget, depth, top)

    def s_if(self, sc, budget, depth, top):
        bases = sc.names_of(lambda t: isinstance(t, BaseT))
        c = self.rng.choice(bases)
        want = BASE if self.rng.random() < 0.8 else UNIT
        sub = max(3, (budget - 2) // 2)
        frozen = frozenset(x for x, _ in sc.bindings)
        branches = []
        fail_at = self.rng.randrange(4)  # sometimes one branch is `fail`
        for i in range(2):
            if i == fail_at:
                branches.append(Fail())
            else:
                branches.append(self.block(_Scope(sc.bindings, frozen), sub, want, depth + 1, False))
        return (self.fresh("i"), If(Var(c), branches[0], branches[1]), want, (),
                2 + term_size(branches[0]) + term_size(branches[1]))


def gen_well_typed(seed: int, size: int = 30, base: BaseKind = BaseKind.BOOL,
                   cfg: Optional[GenConfig] = None) -> Term:
    """A closed program of base type with ``term_size`` at most ``size``,
    accepted by the ownership checker.  Deterministic in ``seed``."""
    cfg = cfg or GenConfig()
    rng = random.Random(seed)
    if size < 1:
        raise GenerationError("size must be positive")
    for _ in range(cfg.retries):
        g = _Gen(rng, base, cfg)
        t = g.block(_Scope([], frozenset()), size, BASE, 0, True)
        if term_size(t) > size:
            continue
        j = typecheck_refl(TypeEnv(), t)
        if j.type != BASE:
            continue
        return t
    raise GenerationError(f"no program of size <= {size} after {cfg.retries} attempts (seed {seed})")


def closure_store_sizes(t: Term) -> List[int]:
    """Store sizes of every function literal in a well-typed program."""
    j = typecheck_refl(TypeEnv(), t)
    out = []
    for info in j.derivation.values():
        if info.extra.get("rule") in ("T-Fun", "T-RFun"):
            out.append(store_size(info.type))
    return out


def generation_stats(seeds, size: int = 30, base: BaseKind = BaseKind.BOOL) -> Dict[str, float]:
    n = failures = with_store = choices = 0
    sizes = []
    for s in seeds:
        n += 1
        try:
            t = gen_well_typed(s, size, base)
        except GenerationError:
            failures += 1
            continue
        sizes.append(term_size(t))
        if any(k >= 1 for k in closure_store_sizes(t)):
            with_store += 1
        choices += sum(isinstance(x, AnyBase) for x in subterms(t))
    ok = n - failures
    return {
        "programs": n,
        "failures": failures,
        "store_closure_fraction": with_store / ok if ok else 0.0,
        "mean_size": sum(sizes) / ok if ok else 0.0,
        "mean_choices": choices / ok if ok else 0.0,
    }
