"""Terms, concrete syntax, and desugaring for the whole calculus family."""
from .ast import *  # noqa: F401,F403
from .ast import BaseKind, Calculus, Program, Term
from .desugar import anf, desugar_letrec, desugar_letrec_all, unfold_letrec
from .lexer import ParseError
from .minsky import CondDec, Halt, Inc, MinskyMachine, parse_minsky
from .normalize import admin_normalize, alpha_equiv, equiv_mod_admin
from .ops import FreshNames, free_vars, rename_apart, subst
from .parser import parse_program, parse_source, parse_term, parse_type
from .printer import print_program, print_term, print_type
from .validate import IllFormed, is_anf, validate

__all__ = [
    "BaseKind", "Calculus", "Program", "Term", "anf", "desugar_letrec",
    "desugar_letrec_all", "unfold_letrec", "ParseError", "CondDec", "Halt", "Inc",
    "MinskyMachine", "admin_normalize", "alpha_equiv", "equiv_mod_admin", "parse_minsky", "FreshNames", "free_vars", "rename_apart",
    "subst", "parse_program", "parse_source", "parse_term", "parse_type",
    "print_program", "print_term", "print_type", "IllFormed", "is_anf", "validate",
]
