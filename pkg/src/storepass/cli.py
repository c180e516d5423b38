"""Command-line front end.

Exit codes: 0 success (accepted / safe / agreeing), 1 semantic rejection,
reachable ``fail`` or a disagreement, 2 usage or parse error, 3 internal
error.  ``--format json`` prints one report object carrying a ``schema``
field; the layout of each report is listed in README.md.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

from . import __version__
from .corpus import Entry, entries as corpus_entries
from .encode import TARGETS, agreement, encode
from .eval import LANGS, RandomOracle, domain_for, evaluate, initial_state, lang_of, render
from .eval.values import INT_DOMAIN, Oracle
from .reach import FAIL_REACHABLE, check_reach, diff_test, gen_well_typed
from .syntax import (
    BaseKind, Calculus, ParseError, Program, parse_minsky, parse_source, parse_type,
    print_program,
)
from .syntax.normalize import admin_normalize
from .translate import result_type, translate, translate_env
from .typecheck import (
    OwnershipError, SimpleTypeError, TypeEnv, from_annotation, typecheck_ext,
    typecheck_refl, typecheck_target,
)

SCHEMA = "storepass-report/1"

OK, REJECTED, USAGE, INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    paths: List[str] = field(default_factory=list)
    calculus: str = "refl"
    base: str = "bool"
    fuel: int = 100_000
    max_choices: int = 6
    format: str = "text"
    trace: bool = False
    seed: Optional[int] = None
    env: List[str] = field(default_factory=list)
    init: List[str] = field(default_factory=list)
    int_domain: Optional[List[int]] = None

    def __post_init__(self):
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")

    @property
    def base_kind(self) -> BaseKind:
        return BaseKind(self.base)

    @property
    def calc(self) -> Calculus:
        return Calculus(self.calculus)

    def domain(self) -> tuple:
        return domain_for(self.base_kind, self.int_domain or INT_DOMAIN)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load(cfg: RunConfig, path: str) -> Program:
    return parse_source(_read(path), cfg.calc, cfg.base_kind)


def _type_env(cfg: RunConfig) -> TypeEnv:
    binds = []
    for b in cfg.env:
        name, sep, ty = b.partition(":")
        if not sep:
            raise UsageError(f"--env expects name:type, got {b!r}")
        binds.append((name.strip(), from_annotation(parse_type(ty))))
    return TypeEnv(binds)


def _literal(s: str):
    s = s.strip()
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        raise UsageError(f"not a base value: {s!r}") from None


def _init_values(cfg: RunConfig) -> dict:
    out = {}
    for b in cfg.init:
        name, sep, v = b.partition("=")
        if not sep:
            raise UsageError(f"--init expects name=value, got {b!r}")
        out[name.strip()] = _literal(v)
    return out


def _report(cfg: RunConfig, result: dict) -> dict:
    conf = asdict(cfg)
    conf["version"] = __version__
    return {"schema": SCHEMA, "command": cfg.command, "config": conf, "result": result}


def _emit(cfg: RunConfig, result: dict, text: str, out=None):
    out = out or sys.stdout
    if cfg.format == "json":
        json.dump(_report(cfg, result), out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _rejection(e: Exception) -> dict:
    if isinstance(e, OwnershipError):
        return {"status": "rejected", **e.to_json()}
    return {"status": "rejected", "message": str(e)}


# --------------------------------------------------------------------------
# commands


def cmd_check(cfg: RunConfig) -> int:
    prog = _load(cfg, cfg.paths[0])
    try:
        if cfg.calc is Calculus.REFL:
            j = typecheck_refl(_type_env(cfg), prog.term)
            res = {"status": "accepted", "type": str(j.type), "post": str(j.post)}
            text = f"accepted: {j.type} (leaves {j.post})"
        elif cfg.calc is Calculus.CORE:
            ty = typecheck_target({}, prog.term)
            res, text = {"status": "accepted", "type": str(ty)}, f"accepted: {ty}"
        else:
            ty = typecheck_ext(prog.term, prog.signature)
            res, text = {"status": "accepted", "type": str(ty)}, f"accepted: {ty}"
    except (OwnershipError, SimpleTypeError) as e:
        _emit(cfg, _rejection(e), f"rejected: {e}")
        return REJECTED
    _emit(cfg, res, text)
    return OK


def cmd_translate(cfg: RunConfig, out_path: Optional[str], simplify: bool = False) -> int:
    if cfg.calc is not Calculus.REFL:
        raise UsageError("translate reads reference-language programs (--calculus refl)")
    prog = _load(cfg, cfg.paths[0])
    env = _type_env(cfg)
    try:
        target, ty, post = translate(env, prog.term, base=prog.base)
    except OwnershipError as e:
        _emit(cfg, _rejection(e), f"rejected: {e}")
        return REJECTED
    tty = typecheck_target(translate_env(env), target, result_type(ty, post))
    text = print_program(admin_normalize(target) if simplify else target)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    _emit(cfg, {"status": "translated", "program": text, "type": str(tty), "post": str(post)},
          text if not out_path else f"wrote {out_path} : {tty}")
    return OK


def _oracle(cfg: RunConfig, choices: Optional[str]):
    dom = cfg.domain()
    if choices:
        vals = [_literal(c) for c in choices.split(",") if c.strip()]
        return Oracle(vals, dom)
    if cfg.seed is not None:
        return RandomOracle(random.Random(cfg.seed), dom, limit=cfg.max_choices)
    return Oracle((), dom)


def cmd_run(cfg: RunConfig, lang: Optional[str], choices: Optional[str]) -> int:
    prog = _load(cfg, cfg.paths[0])
    lang = lang or lang_of(cfg.calc)
    events = []
    oracle = _oracle(cfg, choices)
    env, heap = None, None
    if lang in ("refl", "ref") and cfg.env:
        env, heap = initial_state(_type_env(cfg), cfg.base_kind, _init_values(cfg))
    trace = events.append if cfg.trace else None
    if trace is not None and lang in ("refl", "ref", "target"):
        raise UsageError("--trace is available for the small-step languages (exn, alg-*, sym)")
    out = evaluate(prog.term, lang, fuel=cfg.fuel, oracle=oracle, env=env, heap=heap, trace=trace)
    res = {"outcome": str(out), "kind": type(out).__name__.lower(),
           "choices": [render(c) for c in oracle.taken]}
    if cfg.trace:
        res["trace"] = [str(e) for e in events]
    text = str(out)
    if cfg.trace:
        text = "\n".join(res["trace"] + [text])
    _emit(cfg, res, text)
    return OK


def cmd_reach(cfg: RunConfig, lang: Optional[str], do_translate: bool) -> int:
    prog = _load(cfg, cfg.paths[0])
    term = prog.term
    lang = lang or lang_of(cfg.calc)
    if do_translate:
        if cfg.calc is not Calculus.REFL:
            raise UsageError("--translate needs a reference-language program")
        try:
            term, _, _ = translate(TypeEnv(), term, base=prog.base)
        except OwnershipError as e:
            _emit(cfg, _rejection(e), f"rejected: {e}")
            return REJECTED
        lang = "target"
    r = check_reach(term, lang, fuel=cfg.fuel, max_choices=cfg.max_choices, base=cfg.base_kind,
                    int_domain=cfg.int_domain or INT_DOMAIN)
    res = r.to_json()
    text = r.verdict
    if r.witness is not None:
        text += f" (choices: {', '.join(map(render, r.witness)) or 'none'})"
    text += f"\n{r.paths} paths, {r.out_of_fuel} out of fuel"
    _emit(cfg, res, text)
    return REJECTED if r.verdict == FAIL_REACHABLE else OK


def cmd_difftest(cfg: RunConfig) -> int:
    prog = _load(cfg, cfg.paths[0])
    try:
        rep = diff_test(prog.term, _type_env(cfg), fuel=cfg.fuel, max_choices=cfg.max_choices,
                        base=cfg.base_kind, int_domain=cfg.int_domain or INT_DOMAIN,
                        values=_init_values(cfg), monitor=True, name=cfg.paths[0])
    except OwnershipError as e:
        _emit(cfg, _rejection(e), f"rejected: {e}")
        return REJECTED
    res = rep.to_json()
    text = f"{rep.verdict}: {rep.paths} paths, {rep.out_of_fuel} out of fuel, " \
           f"{len(rep.violations)} monitor violations"
    for d in res["disagreements"]:
        text += f"\n  {d['choices']}: source {d['source']}, target {d['target']} ({d['note']})"
    _emit(cfg, res, text)
    return REJECTED if rep.disagreements or rep.violations else OK


def cmd_encode(cfg: RunConfig, target: str, out_path: Optional[str]) -> int:
    machine = parse_minsky(_read(cfg.paths[0]))
    prog = encode(machine, target)
    text = print_program(prog.term, prog.signature)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    _emit(cfg, {"target": target, "calculus": prog.calculus.value, "program": text},
          text if not out_path else f"wrote {out_path} ({prog.calculus.value})")
    return OK


def _corpus_entry(e: Entry, fuel: Optional[int]) -> dict:
    row = {"id": e.id, "group": e.group}
    ok = True
    if e.group == "machine":
        a = agreement(e.machine(), fuel=fuel or 200_000)
        row.update(expected=e.expected, halts=a.halts, trace=a.trace_matches,
                   encodings=",".join(sorted(set(a.outcomes.values()))))
        ok = a.ok and a.halts == (e.expected == "halts")
    elif e.group == "example":
        prog = e.program()
        if e.typing:
            try:
                typecheck_refl(e.type_env(), prog.term)
                got = "accept"
            except OwnershipError:
                got = "reject"
            row["typing"] = got
            ok &= got == e.typing
        if e.value is not None:
            out = evaluate(prog.term, lang_of(e.calculus), fuel=fuel or e.fuel)
            row["value"] = str(out)
            ok &= str(out) == e.value
    else:
        kw = dict(fuel=fuel or e.fuel, max_choices=e.max_choices, base=e.base,
                  int_domain=e.int_domain)
        want_fail = e.expected == "unsafe"
        runs = {"target": (e.program("target").term, "target")}
        if e.source:
            src = e.program("source").term
            runs["source"] = (src, "refl")
            runs["translated"] = (translate(TypeEnv(), src, base=e.base)[0], "target")
            d = diff_test(src, monitor=True, name=e.id, **kw)
            row["diff"] = d.verdict
            row["violations"] = len(d.violations)
            ok &= d.verdict == "agree" and not d.violations
        for k, (t, lang) in runs.items():
            r = check_reach(t, lang, **kw)
            row[k] = r.verdict
            ok &= (r.verdict == FAIL_REACHABLE) == want_fail
        row["expected"] = e.expected
    row["ok"] = bool(ok)
    return row


def cmd_corpus(cfg: RunConfig, group: Optional[str], jobs: int) -> int:
    entries = [e for e in corpus_entries() if group in (None, e.group)]
    t0 = time.perf_counter()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_corpus_entry, entries, [None] * len(entries)))
    else:
        rows = [_corpus_entry(e, None) for e in entries]
    bad = [r["id"] for r in rows if not r["ok"]]
    res = {"entries": rows, "failed": bad}
    lines = []
    for r in rows:
        info = ", ".join(f"{k}={v}" for k, v in r.items() if k not in ("id", "group", "ok"))
        lines.append(f"{'ok  ' if r['ok'] else 'FAIL'} {r['id']:22} {info}")
    lines.append(f"{len(rows) - len(bad)}/{len(rows)} as expected "
                 f"({time.perf_counter() - t0:.1f}s)")
    _emit(cfg, res, "\n".join(lines))
    return OK if not bad else REJECTED


def cmd_generate(cfg: RunConfig, size: int, count: int) -> int:
    seed = cfg.seed if cfg.seed is not None else 0
    progs = [print_program(gen_well_typed(seed + i, size, cfg.base_kind)) for i in range(count)]
    _emit(cfg, {"programs": progs, "seed": seed}, "\n\n".join(progs))
    return OK


# --------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--calculus", choices=[c.value for c in Calculus], default="refl")
    common.add_argument("--base", choices=["bool", "int"], default="bool")
    common.add_argument("--fuel", type=int, default=100_000, help="evaluation step budget per run")
    common.add_argument("--max-choices", type=int, default=6, help="bound on answered `*` per run")
    common.add_argument("--int-domain", type=lambda s: [int(x) for x in s.split(",")],
                        help="comma-separated sample set for `*` at int kind")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, help="seed for every random decision")
    common.add_argument("--env", action="append", default=[], metavar="NAME:TYPE",
                        help="free variable of an open program, e.g. 'y:ref bool'")
    common.add_argument("--init", action="append", default=[], metavar="NAME=VALUE",
                        help="initial content of a --env variable")

    p = argparse.ArgumentParser(prog="storepass", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="type-check a program")
    s.add_argument("path")
    s = sub.add_parser("translate", parents=[common], help="store-passing translation")
    s.add_argument("path")
    s.add_argument("-o", "--output")
    s.add_argument("--simplify", action="store_true",
                   help="inline administrative lets and pairs before printing")
    s = sub.add_parser("run", parents=[common], help="evaluate a program")
    s.add_argument("path")
    s.add_argument("--lang", choices=LANGS)
    s.add_argument("--choices", help="comma-separated answers for `*`, in order")
    s.add_argument("--trace", action="store_true")
    s = sub.add_parser("reach", parents=[common], help="bounded search for a run reaching fail")
    s.add_argument("path")
    s.add_argument("--lang", choices=LANGS)
    s.add_argument("--translate", action="store_true", help="search the translated program")
    s = sub.add_parser("difftest", parents=[common], help="compare a program with its translation")
    s.add_argument("path")
    s = sub.add_parser("encode", parents=[common], help="encode a Minsky machine")
    s.add_argument("path")
    s.add_argument("--target", choices=TARGETS, required=True)
    s.add_argument("-o", "--output")
    s = sub.add_parser("corpus", parents=[common], help="run the bundled programs")
    s.add_argument("--group", choices=["benchmark", "example", "machine"])
    s.add_argument("--jobs", type=int, default=1)
    s = sub.add_parser("generate", parents=[common], help="print random well-typed programs")
    s.add_argument("--size", type=int, default=30)
    s.add_argument("--count", type=int, default=1)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else OK
    try:
        cfg = RunConfig(
            command=args.command, paths=[args.path] if hasattr(args, "path") else [],
            calculus=args.calculus, base=args.base, fuel=args.fuel,
            max_choices=args.max_choices, format=args.format,
            trace=getattr(args, "trace", False), seed=args.seed, env=args.env,
            init=args.init, int_domain=args.int_domain,
        )
        c = args.command
        if c == "check":
            return cmd_check(cfg)
        if c == "translate":
            return cmd_translate(cfg, args.output, args.simplify)
        if c == "run":
            return cmd_run(cfg, args.lang, args.choices)
        if c == "reach":
            return cmd_reach(cfg, args.lang, args.translate)
        if c == "difftest":
            return cmd_difftest(cfg)
        if c == "encode":
            return cmd_encode(cfg, args.target, args.output)
        if c == "corpus":
            return cmd_corpus(cfg, args.group, args.jobs)
        if c == "generate":
            return cmd_generate(cfg, args.size, args.count)
    except (UsageError, ParseError, ValueError) as e:
        print(f"storepass: {e}", file=sys.stderr)
        return USAGE
    except Exception as e:  # noqa: BLE001
        print(f"storepass: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return INTERNAL
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
