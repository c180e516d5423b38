"""Two-counter Minsky machines: data types and the line-oriented text format.

    0: inc 0 goto 1
    1: if 0 then 2 else 1     # zero -> 2, otherwise decrement and go to 1
    2: halt

Instructions may also be separated by ``/`` on a single line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Union

from .lexer import ParseError


@dataclass(frozen=True)
class Inc:
    counter: int
    goto: int


@dataclass(frozen=True)
class CondDec:
    counter: int
    if_zero: int
    if_nonzero: int


@dataclass(frozen=True)
class Halt:
    pass


Instr = Union[Inc, CondDec, Halt]


@dataclass(frozen=True)
class MinskyMachine:
    program: Dict[int, Instr]

    def __post_init__(self):
        if 0 not in self.program:
            raise ValueError("machine has no instruction 0")
        for i, ins in self.program.items():
            targets = ()
            if isinstance(ins, Inc):
                targets = (ins.goto,)
                counters = (ins.counter,)
            elif isinstance(ins, CondDec):
                targets = (ins.if_zero, ins.if_nonzero)
                counters = (ins.counter,)
            else:
                counters = ()
            for c in counters:
                if c not in (0, 1):
                    raise ValueError(f"instruction {i}: counter {c} is not 0 or 1")
            for t in targets:
                if t not in self.program:
                    raise ValueError(f"instruction {i}: dangling jump target {t}")

    @property
    def indices(self):
        return sorted(self.program)

    def __hash__(self):
        return hash(tuple(sorted(self.program.items())))

    def to_text(self) -> str:
        lines = []
        for i in self.indices:
            ins = self.program[i]
            if isinstance(ins, Inc):
                lines.append(f"{i}: inc {ins.counter} goto {ins.goto}")
            elif isinstance(ins, CondDec):
                lines.append(f"{i}: if {ins.counter} then {ins.if_zero} else {ins.if_nonzero}")
            else:
                lines.append(f"{i}: halt")
        return "\n".join(lines) + "\n"


_LINE = re.compile(
    r"^(\d+)\s*:\s*(?:"
    r"(?P<inc>inc\s+(\d+)\s+goto\s+(\d+))"
    r"|(?P<if>if\s+(\d+)\s+then\s+(\d+)\s+else\s+(\d+))"
    r"|(?P<halt>halt)"
    r")$"
)


def parse_minsky(text: str) -> MinskyMachine:
    prog: Dict[int, Instr] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        for part in line.split("/"):
            part = part.strip()
            if not part:
                continue
            m = _LINE.match(part)
            if not m:
                raise ParseError(f"malformed instruction {part!r}", lineno, 1)
            g = m.groups()
            idx = int(g[0])
            if idx in prog:
                raise ParseError(f"duplicate instruction index {idx}", lineno, 1)
            if m.group("inc"):
                prog[idx] = Inc(int(g[2]), int(g[3]))
            elif m.group("if"):
                prog[idx] = CondDec(int(g[5]), int(g[6]), int(g[7]))
            else:
                prog[idx] = Halt()
    try:
        return MinskyMachine(prog)
    except ValueError as e:
        raise ParseError(str(e)) from None
