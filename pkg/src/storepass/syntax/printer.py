"""Pretty printer; the inverse of :mod:`storepass.syntax.parser`."""
from __future__ import annotations

from .ast import (
    AnyBase, App, Assign, Const, Deref, Fail, Fix, Gensym, Handle, If, Lam,
    Let, LetRec, LetTuple, Loc, MkRef, Perform, PrimOp, Proj, Raise, SymEq,
    Term, Try, Tuple_, TyArrow, TyExpr, TyName, TyRef, TyTuple, Unit, Var,
)

# precedence levels, mirroring the parser
OPEN, ASSIGN, OR, AND, CMP, ADD, APP, UNARY, POSTFIX, ATOM = range(10)

_BIN_LEVEL = {"||": OR, "&&": AND, "+": ADD, "-": ADD,
              "=": CMP, "<>": CMP, "<": CMP, "<=": CMP, ">": CMP, ">=": CMP}


def print_type(t: TyExpr, level: int = 0) -> str:
    # levels: 0 arrow, 1 tuple, 2 prefix
    if isinstance(t, TyName):
        return t.name
    if isinstance(t, TyRef):
        return "ref " + print_type(t.inner, 2)
    if isinstance(t, TyTuple):
        if not t.items:
            return "()"
        s = " * ".join(print_type(i, 2) for i in t.items)
        return s if level <= 1 else f"({s})"
    if isinstance(t, TyArrow):
        if len(t.params) == 1:
            dom = print_type(t.params[0], 1)
        else:
            dom = "(" + ", ".join(print_type(p) for p in t.params) + ")"
        arrow = "->" if t.store is None else f"-[{t.store}]->"
        s = f"{dom} {arrow} {print_type(t.ret, 0)}"
        return s if level == 0 else f"({s})"
    raise TypeError(t)


def _param(name, ann) -> str:
    if ann is None:
        return name
    return f"({name} : {print_type(ann)})"


class _Printer:
    def __init__(self, pretty: bool):
        self.pretty = pretty

    def nl(self, ind: int) -> str:
        return "\n" + "  " * ind if self.pretty else " "

    def p(self, t: Term, level: int = OPEN, ind: int = 0) -> str:
        s, own = self.node(t, ind)
        if own < level:
            return f"({s})"
        return s

    def node(self, t: Term, ind: int):
        p, nl = self.p, self.nl
        if isinstance(t, Unit):
            return "()", ATOM
        if isinstance(t, Const):
            if isinstance(t.value, bool):
                return ("true" if t.value else "false"), ATOM
            return str(t.value), (ATOM if t.value >= 0 else UNARY)
        if isinstance(t, Var):
            return t.name, ATOM
        if isinstance(t, AnyBase):
            return "*", ATOM
        if isinstance(t, Fail):
            return "fail", ATOM
        if isinstance(t, Gensym):
            return "gensym", ATOM
        if isinstance(t, Loc):
            return f"@{t.id}", ATOM
        if isinstance(t, Tuple_):
            return "(" + ", ".join(p(i, OPEN, ind) for i in t.items) + ")", ATOM
        if isinstance(t, Perform):
            return f"{t.name}({p(t.arg, ASSIGN, ind)}; {p(t.cont, OPEN, ind)})", ATOM
        if isinstance(t, Proj):
            return f"{p(t.tup, POSTFIX, ind)}.{t.index}", POSTFIX
        if isinstance(t, PrimOp):
            if t.op == "not":
                return "not " + p(t.args[0], UNARY, ind), UNARY
            lv = _BIN_LEVEL[t.op]
            a, b = t.args
            if lv in (OR, AND):          # right associative
                return f"{p(a, lv + 1, ind)} {t.op} {p(b, lv, ind)}", lv
            if lv == ADD:                # left associative
                return f"{p(a, ADD, ind)} {t.op} {p(b, APP, ind)}", lv
            return f"{p(a, ADD, ind)} {t.op} {p(b, ADD, ind)}", lv
        if isinstance(t, SymEq):
            return f"{p(t.left, ADD, ind)} == {p(t.right, ADD, ind)}", CMP
        if isinstance(t, Deref):
            return "!" + p(t.arg, UNARY, ind), UNARY
        if isinstance(t, MkRef):
            return "ref " + p(t.arg, UNARY, ind), UNARY
        if isinstance(t, Raise):
            return f"raise[{print_type(t.ty)}] {p(t.arg, UNARY, ind)}", UNARY
        if isinstance(t, App):
            args = " ".join(p(a, POSTFIX, ind) for a in t.args)
            return f"{p(t.fun, UNARY, ind)} {args}", APP
        if isinstance(t, Assign):
            return f"{p(t.target, OR, ind)} := {p(t.value, OR, ind)}", ASSIGN
        if isinstance(t, Let):
            return (f"let {t.name} = {p(t.bound, OPEN, ind + 1)} in"
                    f"{nl(ind)}{p(t.body, OPEN, ind)}"), OPEN
        if isinstance(t, LetTuple):
            return (f"let ({', '.join(t.names)}) = {p(t.bound, OPEN, ind + 1)} in"
                    f"{nl(ind)}{p(t.body, OPEN, ind)}"), OPEN
        if isinstance(t, If):
            return (f"if {p(t.cond, OPEN, ind)} then {p(t.then, OPEN, ind + 1)}"
                    f"{nl(ind)}else {p(t.else_, OPEN, ind + 1)}"), OPEN
        if isinstance(t, Lam):
            return f"fun {_param(t.param, t.ann)} ->{nl(ind + 1)}{p(t.body, OPEN, ind + 1)}", OPEN
        if isinstance(t, Fix):
            anns = t.anns or (None,) * len(t.params)
            ps = " ".join(_param(n, a) for n, a in zip(t.params, anns))
            return f"fix {t.name} {ps} ={nl(ind + 1)}{p(t.body, OPEN, ind + 1)}", OPEN
        if isinstance(t, LetRec):
            parts = []
            for i, b in enumerate(t.bindings):
                kw = "let rec" if i == 0 else "and"
                anns = b.anns or (None,) * len(b.params)
                ps = " ".join(_param(n, a) for n, a in zip(b.params, anns))
                parts.append(f"{kw} {b.name} {ps} ={nl(ind + 1)}{p(b.body, OPEN, ind + 1)}")
            return nl(ind).join(parts) + f" in{nl(ind)}{p(t.body, OPEN, ind)}", OPEN
        if isinstance(t, Try):
            return (f"try[{print_type(t.ty)}] {p(t.body, OPEN, ind + 1)}"
                    f"{nl(ind)}with {t.binder} -> {p(t.handler, OPEN, ind + 1)}"), OPEN
        if isinstance(t, Handle):
            h = t.handler
            cl = [f"return {h.ret_binder} -> {p(h.ret_body, OPEN, ind + 2)}"]
            for c in h.clauses:
                cl.append(f"{c.name}({c.arg}; {c.cont}) -> {p(c.body, OPEN, ind + 2)}")
            sep = "," + nl(ind + 1)
            return (f"handle {p(t.body, OPEN, ind + 1)} with {{{nl(ind + 1)}"
                    f"{sep.join(cl)}{nl(ind)}}}"), OPEN
        raise TypeError(f"cannot print {t!r}")


def print_term(t: Term, pretty: bool = False) -> str:
    return _Printer(pretty).p(t)


def print_program(t: Term, effects: dict | None = None, pretty: bool = True) -> str:
    head = ""
    for name, (a, b) in (effects or {}).items():
        head += f"effect {name} : {print_type(TyArrow((a,), b))};\n"
    return head + print_term(t, pretty) + "\n"
