"""Recursive-descent parser for the ML-like concrete syntax.

Grammar summary (lowest precedence first)::

    program  ::= ('effect' NAME ':' type ';')* seq
    seq      ::= expr (';' seq)?
    expr     ::= 'let' 'rec' NAME param+ '=' seq ('and' ...)* 'in' seq
               | 'let' pat '=' seq 'in' seq | 'let' NAME param+ '=' seq 'in' seq
               | 'fun' param+ '->' seq | 'fix' NAME param+ '=' seq
               | 'if' seq 'then' seq ('else' expr)?
               | 'try' '[' type ']' seq 'with' NAME '->' expr
               | 'handle' seq 'with' '{' clause (',' clause)* '}'
               | assign
    assign   ::= or (':=' or)?
    or / and ::= right-associative '||' / '&&'
    cmp      ::= add (('=' | '<>' | '<' | '<=' | '>' | '>=' | '==') add)?
    add      ::= app (('+' | '-') app)*
    app      ::= unary unary*
    unary    ::= '!' unary | 'ref' unary | 'not' unary | 'assert' unary
               | 'raise' '[' type ']' unary | '-' INT | postfix
    postfix  ::= atom ('.' INT)*
    atom     ::= INT | true | false | NAME | '*' | fail | gensym | '()'
               | '(' seq ')' | '(' seq (',' seq)+ ')' | EFF '(' expr ';' expr ')'
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .ast import (
    AnyBase, App, Assign, BaseKind, Calculus, Clause, Const, Deref, Fail, Fix,
    Gensym, Handle, Handler, If, Lam, Let, LetRec, LetTuple, MkRef, Perform,
    PrimOp, Program, Proj, Raise, RecBinding, Span, SymEq, Term, Try, Tuple_,
    TyArrow, TyExpr, TyName, TyRef, TyTuple, Unit, Var,
)
from .lexer import ParseError, Token, tokenize
from .ops import FreshNames

_CMP = {"=", "<>", "<", "<=", ">", ">="}
_ATOM_START_KW = {"true", "false", "fail", "gensym"}
_UNARY_KW = {"ref", "not", "assert", "raise"}


class _Param:
    """A parsed parameter: a name (possibly annotated) or a tuple pattern."""

    def __init__(self, name: str, ann: Optional[TyExpr] = None,
                 pattern: Optional[Tuple[str, ...]] = None):
        self.name = name
        self.ann = ann
        self.pattern = pattern


class Parser:
    def __init__(self, text: str, effects: Optional[Dict[str, tuple]] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.effects: Dict[str, tuple] = dict(effects or {})
        self.fresh = FreshNames(t.text for t in self.toks if t.kind == "IDENT")

    # -- token helpers -----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def span(self) -> Span:
        return Span(self.tok.line, self.tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("SYM", "KW") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "IDENT":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def error(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    # -- program -------------------------------------------------------------
    def program(self) -> Term:
        while self.at("effect"):
            self.advance()
            name = self.ident()
            self.expect(":")
            ty = self.type_()
            if not (isinstance(ty, TyArrow) and len(ty.params) == 1):
                self.error("effect type must be of the form b1 -> b2")
            self.expect(";")
            self.effects[name] = (ty.params[0], ty.ret)
        t = self.seq()
        if self.tok.kind != "EOF":
            self.error(f"unexpected {self.tok.text!r}")
        return t

    # -- types ---------------------------------------------------------------
    def type_(self) -> TyExpr:
        left = self.type_tuple()
        if self.at("->"):
            self.advance()
            return TyArrow(self._arrow_params(left), self.type_())
        if self.at("-") and self.peek().text == "[":
            self.advance()
            self.advance()
            if self.tok.kind != "INT":
                self.error("expected store size")
            n = int(self.advance().text)
            self.expect("]")
            self.expect("->")
            return TyArrow(self._arrow_params(left), self.type_(), n)
        return left

    @staticmethod
    def _arrow_params(left):
        if isinstance(left, _ParamList):
            return left.items
        return (left,)

    def type_tuple(self):
        items = [self.type_prefix()]
        while self.at("*"):
            self.advance()
            items.append(self.type_prefix())
        return items[0] if len(items) == 1 else TyTuple(tuple(items))

    def type_prefix(self):
        if self.at("ref"):
            self.advance()
            return TyRef(self.type_prefix())
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return TyTuple(())
            first = self.type_()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.type_())
                self.expect(")")
                return _ParamList(tuple(items))
            self.expect(")")
            return first
        name = self.ident()
        if name not in ("unit", "bool", "int", "sym"):
            self.error(f"unknown type {name!r}")
        return TyName(name)

    # -- expressions ---------------------------------------------------------
    def seq(self) -> Term:
        sp = self.span()
        e = self.expr()
        if self.at(";"):
            self.advance()
            return Let("_", e, self.seq(), sp)
        return e

    def expr(self) -> Term:
        t = self.tok
        if t.kind == "KW":
            if t.text == "let":
                return self.let_()
            if t.text == "fun":
                return self.fun_()
            if t.text == "fix":
                sp = self.span()
                self.advance()
                name = self.ident()
                params = self.params()
                self.expect("=")
                return self._mk_fix(name, params, self.seq(), sp)
            if t.text == "if":
                sp = self.span()
                self.advance()
                c = self.seq()
                self.expect("then")
                a = self.seq()
                if self.at("else"):
                    self.advance()
                    b = self.expr()
                else:
                    b = Unit(sp)
                return If(c, a, b, sp)
            if t.text == "try":
                sp = self.span()
                self.advance()
                self.expect("[")
                ty = self.type_()
                self.expect("]")
                body = self.seq()
                self.expect("with")
                x = self.ident()
                self.expect("->")
                return Try(ty, body, x, self.expr(), sp)
            if t.text == "handle":
                return self.handle_()
        return self.assign()

    def let_(self) -> Term:
        sp = self.span()
        self.expect("let")
        if self.at("rec"):
            self.advance()
            binds = [self.rec_binding()]
            while self.at("and"):
                self.advance()
                binds.append(self.rec_binding())
            self.expect("in")
            body = self.seq()
            return LetRec(tuple(RecBinding(f.name, f.params, f.body, f.anns) for _, f in binds), body, sp)
        # pattern let
        if self.at("("):
            names = self.tuple_pattern()
            self.expect("=")
            bound = self.seq()
            self.expect("in")
            body = self.seq()
            if names is None:
                return Let("_", bound, body, sp)
            if len(names) == 1:
                return Let(names[0], bound, body, sp)
            return LetTuple(names, bound, body, sp)
        name = self.ident()
        if self.at("="):
            self.advance()
            bound = self.seq()
            self.expect("in")
            return Let(name, bound, self.seq(), sp)
        params = self.params()
        self.expect("=")
        fn = self._mk_fun(params, self.seq(), sp)
        self.expect("in")
        return Let(name, fn, self.seq(), sp)

    def rec_binding(self):
        sp = self.span()
        name = self.ident()
        params = self.params()
        self.expect("=")
        return name, self._mk_fix(name, params, self.seq(), sp)

    def tuple_pattern(self) -> Optional[Tuple[str, ...]]:
        """``()`` gives None, ``(x)`` / ``(x, y, ...)`` give the names."""
        self.expect("(")
        if self.at(")"):
            self.advance()
            return None
        names = [self.ident()]
        while self.at(","):
            self.advance()
            names.append(self.ident())
        self.expect(")")
        return tuple(names)

    def params(self) -> List[_Param]:
        ps = []
        while True:
            if self.tok.kind == "IDENT":
                ps.append(_Param(self.advance().text))
            elif self.at("("):
                ps.append(self.paren_param())
            else:
                break
        if not ps:
            self.error("expected parameter")
        return ps

    def paren_param(self) -> _Param:
        self.expect("(")
        if self.at(")"):
            self.advance()
            return _Param("_", TyName("unit"))
        name = self.ident()
        if self.at(":"):
            self.advance()
            ty = self.type_()
            self.expect(")")
            return _Param(name, ty)
        names = [name]
        while self.at(","):
            self.advance()
            names.append(self.ident())
        self.expect(")")
        if len(names) == 1:
            return _Param(name)
        return _Param(self.fresh.fresh("p"), None, tuple(names))

    def _wrap_patterns(self, params: List[_Param], body: Term) -> Term:
        for p in reversed(params):
            if p.pattern is not None:
                body = LetTuple(p.pattern, Var(p.name), body)
        return body

    def _mk_fun(self, params: List[_Param], body: Term, sp) -> Term:
        body = self._wrap_patterns(params, body)
        for p in reversed(params):
            body = Lam(p.name, body, p.ann, sp)
        return body

    def _mk_fix(self, name: str, params: List[_Param], body: Term, sp) -> Fix:
        body = self._wrap_patterns(params, body)
        anns = tuple(p.ann for p in params)
        return Fix(name, tuple(p.name for p in params), body,
                   anns if any(a is not None for a in anns) else None, sp)

    def fun_(self) -> Term:
        sp = self.span()
        self.expect("fun")
        params = self.params()
        self.expect("->")
        return self._mk_fun(params, self.seq(), sp)

    def handle_(self) -> Term:
        sp = self.span()
        self.expect("handle")
        body = self.seq()
        self.expect("with")
        self.expect("{")
        ret = None
        clauses: List[Clause] = []
        while True:
            if self.at("return"):
                self.advance()
                x = self.ident()
                self.expect("->")
                if ret is not None:
                    self.error("duplicate return clause")
                ret = (x, self.seq())
            else:
                name = self.ident()
                self.expect("(")
                x = self.ident()
                self.expect(";")
                k = self.ident()
                self.expect(")")
                self.expect("->")
                if any(c.name == name for c in clauses):
                    self.error(f"duplicate clause for effect {name!r}")
                clauses.append(Clause(name, x, k, self.seq()))
            if self.at(","):
                self.advance()
                continue
            self.expect("}")
            break
        if ret is None:
            ret = ("x", Var("x"))
        return Handle(body, Handler(ret[0], ret[1], tuple(clauses)), sp)

    def assign(self) -> Term:
        sp = self.span()
        left = self.or_()
        if self.at(":="):
            self.advance()
            return Assign(left, self.or_(), sp)
        return left

    def or_(self) -> Term:
        sp = self.span()
        left = self.and_()
        if self.at("||"):
            self.advance()
            return PrimOp("||", (left, self.or_()), sp)
        return left

    def and_(self) -> Term:
        sp = self.span()
        left = self.cmp()
        if self.at("&&"):
            self.advance()
            return PrimOp("&&", (left, self.and_()), sp)
        return left

    def cmp(self) -> Term:
        sp = self.span()
        left = self.add()
        if self.tok.kind == "SYM" and self.tok.text in _CMP:
            op = self.advance().text
            return PrimOp(op, (left, self.add()), sp)
        if self.at("=="):
            self.advance()
            return SymEq(left, self.add(), sp)
        return left

    def add(self) -> Term:
        sp = self.span()
        left = self.app()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = PrimOp(op, (left, self.app()), sp)
        return left

    def _starts_arg(self) -> bool:
        t = self.tok
        if t.kind in ("INT", "IDENT"):
            return True
        if t.kind == "KW":
            return t.text in _ATOM_START_KW or t.text in _UNARY_KW
        return t.kind == "SYM" and t.text in ("(", "*", "!")

    def app(self) -> Term:
        sp = self.span()
        head = self.unary()
        args = []
        while self._starts_arg():
            args.append(self.unary())
        if args:
            return App(head, tuple(args), sp)
        return head

    def unary(self) -> Term:
        sp = self.span()
        if self.at("!"):
            self.advance()
            return Deref(self.unary(), sp)
        if self.at("ref"):
            self.advance()
            return MkRef(self.unary(), sp)
        if self.at("not"):
            self.advance()
            return PrimOp("not", (self.unary(),), sp)
        if self.at("assert"):
            self.advance()
            return If(self.unary(), Unit(sp), Fail(sp), sp)
        if self.at("raise"):
            self.advance()
            self.expect("[")
            ty = self.type_()
            self.expect("]")
            return Raise(ty, self.unary(), sp)
        if self.at("-") and self.peek().kind == "INT":
            self.advance()
            return Const(-int(self.advance().text), sp)
        return self.postfix()

    def postfix(self) -> Term:
        sp = self.span()
        t = self.atom()
        while self.at("."):
            self.advance()
            if self.tok.kind != "INT":
                self.error("expected projection index")
            idx = int(self.advance().text)
            if idx < 1:
                self.error("projection indices start at 1")
            t = Proj(t, idx, sp)
        return t

    def atom(self) -> Term:
        sp = self.span()
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return Const(int(t.text), sp)
        if t.kind == "KW":
            if t.text in ("true", "false"):
                self.advance()
                return Const(t.text == "true", sp)
            if t.text == "fail":
                self.advance()
                return Fail(sp)
            if t.text == "gensym":
                self.advance()
                return Gensym(sp)
        if t.kind == "IDENT":
            self.advance()
            if t.text in self.effects and self.at("("):
                self.advance()
                arg = self.expr()
                self.expect(";")
                cont = self.expr()
                self.expect(")")
                return Perform(t.text, arg, cont, sp)
            return Var(t.text, sp)
        if self.at("*"):
            self.advance()
            return AnyBase(sp)
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return Unit(sp)
            first = self.seq()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.seq())
                self.expect(")")
                return Tuple_(tuple(items), sp)
            self.expect(")")
            return first
        self.error(f"unexpected {t.text or 'end of input'!r}")


class _ParamList:
    """Parenthesised comma list in type position, only legal before an arrow."""

    def __init__(self, items):
        self.items = items


def parse_type(text: str) -> TyExpr:
    p = Parser(text)
    t = p.type_()
    if isinstance(t, _ParamList) or p.tok.kind != "EOF":
        p.error("malformed type")
    return t


def parse_term(text: str, effects: Optional[Dict[str, tuple]] = None) -> Term:
    """Parse without calculus-specific processing (no ANF, no validation)."""
    return Parser(text, effects).program()


def parse_source(text: str, calculus: Calculus = Calculus.REFL,
                 base: BaseKind = BaseKind.BOOL,
                 effects: Optional[Dict[str, tuple]] = None) -> Program:
    """Parse, expand sugar required by ``calculus``, and validate."""
    from .desugar import anf, desugar_letrec_all
    from .validate import validate

    p = Parser(text, effects)
    term = p.program()
    if calculus is Calculus.REFL:
        term = anf(desugar_letrec_all(term), p.fresh)
    validate(term, calculus, base, p.effects)
    return Program(term, calculus, base, p.effects)


def parse_program(text: str, calculus: Calculus = Calculus.REFL,
                  base: BaseKind = BaseKind.BOOL) -> Term:
    return parse_source(text, calculus, base).term
