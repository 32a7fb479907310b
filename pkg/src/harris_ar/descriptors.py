"""Canonical text form for law descriptors.

A descriptor is ``tag(name=value, ...)`` where a value is a number, a bare
identifier, or another descriptor::

    harris_max_id(H=frechet(alpha=1),k=2)

``str(parse(text))`` is the canonical form: no whitespace, parameters in the
order written, integers kept as integers and floats printed with ``repr``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DescriptorError

Value = Union[int, float, str, "Descriptor"]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[+-]?(?:inf|nan|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")


@dataclass(frozen=True)
class Descriptor:
    tag: str
    params: tuple[tuple[str, Value], ...] = ()

    def __str__(self) -> str:
        inner = ",".join(f"{name}={format_value(v)}" for name, v in self.params)
        return f"{self.tag}({inner})"

    def __getitem__(self, name: str) -> Value:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    def get(self, name: str, default=None):
        try:
            return self[name]
        except KeyError:
            return default

    def as_dict(self) -> dict[str, Value]:
        return dict(self.params)


def make(tag: str, **params) -> Descriptor:
    return Descriptor(tag, tuple(params.items()))


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, char: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != char:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise DescriptorError(f"expected {char!r}, found {found!r}", self.pos)
        self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise DescriptorError("expected identifier", self.pos)
        self.pos = m.end()
        return m.group()

    def value(self) -> Value:
        self.skip_ws()
        start = self.pos
        if self.peek() and self.peek() in "+-.0123456789":
            m = _NUMBER.match(self.text, self.pos)
            if not m:
                raise DescriptorError("malformed number", start)
            self.pos = m.end()
            token = m.group()
            if re.fullmatch(r"[+-]?\d+", token):
                return int(token)
            return float(token)
        name = self.ident()
        if self.peek() == "(":
            return self.call(name)
        if name in ("inf", "nan"):
            return float(name)
        return name

    def call(self, tag: str) -> Descriptor:
        self.expect("(")
        params = []
        seen = set()
        if self.peek() == ")":
            self.pos += 1
            return Descriptor(tag, ())
        while True:
            start = self.pos
            name = self.ident()
            if name in seen:
                raise DescriptorError(f"duplicate parameter {name!r}", start)
            seen.add(name)
            self.expect("=")
            params.append((name, self.value()))
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect(")")
            return Descriptor(tag, tuple(params))


def parse(text: str | Descriptor) -> Descriptor:
    """Parse a descriptor string; a bare tag ``gumbel`` means ``gumbel()``."""
    if isinstance(text, Descriptor):
        return text
    p = _Parser(text)
    tag = p.ident()
    desc = p.call(tag) if p.peek() == "(" else Descriptor(tag, ())
    p.skip_ws()
    if p.pos != len(text):
        raise DescriptorError("trailing characters", p.pos)
    return desc


def canonical(text: str | Descriptor) -> str:
    return str(parse(text))
