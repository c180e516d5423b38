"""Bundled programs: the reference benchmarks, small typing examples, and
two-counter machines.

``manifest.json`` lists every program with its calculus, base kind, expected
verdicts, fuel and choice bounds; the program text lives in ``programs/``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import List, Optional, Tuple

from ..syntax import (
    BaseKind, Calculus, MinskyMachine, Program, parse_minsky, parse_source, parse_type,
)
from ..typecheck import TypeEnv, from_annotation

SCHEMA = "storepass-corpus/1"


@dataclass(frozen=True)
class Entry:
    id: str
    group: str                      # "benchmark" | "example" | "machine"
    base: BaseKind
    calculus: Calculus = Calculus.REFL
    file: Optional[str] = None      # examples
    source: Optional[str] = None    # benchmarks with a reference-language source
    target: Optional[str] = None    # hand-written store-passing version
    expected: Optional[str] = None  # "safe" | "unsafe" | "halts" | "diverges"
    typing: Optional[str] = None    # "accept" | "reject"
    value: Optional[str] = None
    env: Tuple[Tuple[str, str], ...] = ()
    fuel: int = 100_000
    max_choices: int = 6
    int_domain: Tuple[int, ...] = (-1, 0, 1, 2, 3)
    diverging_paths: bool = False
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def text(self, which: str = "file") -> str:
        name = getattr(self, which)
        if name is None:
            raise KeyError(f"{self.id} has no {which} program")
        return read_program(name)

    def program(self, which: str = "file") -> Program:
        calc = self.calculus if which == "file" else \
            (Calculus.REFL if which == "source" else Calculus.CORE)
        return parse_source(self.text(which), calc, self.base)

    def machine(self) -> MinskyMachine:
        return parse_minsky(self.text())

    def type_env(self) -> TypeEnv:
        return TypeEnv((x, from_annotation(parse_type(t))) for x, t in self.env)


def read_program(name: str) -> str:
    return resources.files(__package__).joinpath("programs", name).read_text()


_FIELDS = set(Entry.__dataclass_fields__)


def _entry(d: dict) -> Entry:
    kw = {k: v for k, v in d.items() if k in _FIELDS}
    kw["base"] = BaseKind(d.get("base", "bool"))
    kw["calculus"] = Calculus(d.get("calculus", "refl"))
    kw["env"] = tuple(tuple(b) for b in d.get("env", ()))
    if "int_domain" in d:
        kw["int_domain"] = tuple(d["int_domain"])
    kw["extra"] = {k: v for k, v in d.items() if k not in _FIELDS}
    return Entry(**kw)


@lru_cache(maxsize=None)
def load_manifest() -> Tuple[Entry, ...]:
    data = json.loads(resources.files(__package__).joinpath("manifest.json").read_text())
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported corpus schema {data.get('schema')!r}")
    return tuple(_entry(d) for d in data["programs"])


def entries(group: Optional[str] = None) -> List[Entry]:
    return [e for e in load_manifest() if group is None or e.group == group]


def get(id: str) -> Entry:
    for e in load_manifest():
        if e.id == id:
            return e
    raise KeyError(f"no corpus program named {id!r}")


def benchmarks() -> List[Entry]:
    return entries("benchmark")


def examples() -> List[Entry]:
    return entries("example")


def machines() -> List[Entry]:
    return entries("machine")
