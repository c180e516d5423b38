"""Pick the interpreter for a language tag."""
from __future__ import annotations

from typing import Optional

from ..syntax.ast import Calculus, Term
from .bigstep import DEFAULT_FUEL, eval_source, eval_target
from .machine import DEEP, SHALLOW, eval_alg, eval_exn, eval_sym

LANGS = ("refl", "ref", "target", "exn", "alg-deep", "alg-shallow", "sym")

_DEFAULT_LANG = {
    Calculus.REFL: "refl",
    Calculus.REF: "ref",
    Calculus.CORE: "target",
    Calculus.EXN: "exn",
    Calculus.ALGEFF: "alg-deep",
    Calculus.SYM: "sym",
}


def lang_of(calculus: Calculus) -> str:
    return _DEFAULT_LANG[calculus]


def evaluate(t: Term, lang: str, fuel=DEFAULT_FUEL, oracle=None,
             env: Optional[dict] = None, heap: Optional[dict] = None, trace=None):
    if lang == "refl":
        return eval_source(t, env, heap, fuel=fuel, oracle=oracle, ownership=True)
    if lang == "ref":
        return eval_source(t, env, heap, fuel=fuel, oracle=oracle, ownership=False)
    if lang == "target":
        return eval_target(t, env, fuel=fuel, oracle=oracle)
    if lang == "exn":
        return eval_exn(t, fuel=fuel, oracle=oracle, trace=trace, env=env)
    if lang == "alg-deep":
        return eval_alg(t, DEEP, fuel=fuel, oracle=oracle, trace=trace, env=env)
    if lang == "alg-shallow":
        return eval_alg(t, SHALLOW, fuel=fuel, oracle=oracle, trace=trace, env=env)
    if lang == "sym":
        return eval_sym(t, fuel=fuel, oracle=oracle, trace=trace, env=env)
    raise ValueError(f"unknown language {lang!r}; expected one of {', '.join(LANGS)}")
