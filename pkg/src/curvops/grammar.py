"""The shared expression grammar for elements.

Terms are `coeff * tree`; trees are `gen(child, child, ...)` with external
leaves written as positive integers.  Whitespace is insignificant.  Parsing
symmetric-mode input silently canonicalizes, so printing always yields the
canonical form; `0` denotes the zero element.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .errors import ParseError, UnknownGenerator
from .trees import Generator, OperadElement, RawNode, element, render_tree, zero

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()*,+-]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"bad character at {text[pos:]!r}")
        pos = m.end()
        for kind in ("number", "name", "punct"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val))
                break
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], gens: Mapping[str, Generator]):
        self.tokens = tokens
        self.pos = 0
        self.gens = gens

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of expression")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, got {val!r}")

    def parse_tree(self) -> RawNode:
        kind, val = self.take()
        if kind != "name":
            raise ParseError(f"expected generator name, got {val!r}")
        if val not in self.gens:
            raise UnknownGenerator(f"unknown generator {val!r}")
        gen = self.gens[val]
        children: list = []
        nxt = self.peek()
        if nxt is not None and nxt[1] == "(":
            self.take()
            while True:
                kind, val2 = self.take()
                if kind == "number":
                    if "/" in val2:
                        raise ParseError("leaf labels must be plain integers")
                    children.append(int(val2))
                elif kind == "name":
                    self.pos -= 1
                    children.append(self.parse_tree())
                else:
                    raise ParseError(f"expected child, got {val2!r}")
                kind, val2 = self.take()
                if val2 == ")":
                    break
                if val2 != ",":
                    raise ParseError(f"expected ',' or ')', got {val2!r}")
        if len(children) != gen.arity:
            raise ParseError(
                f"generator {gen.name} has arity {gen.arity}, got {len(children)} children"
            )
        return (gen, tuple(children))

    def parse_term(self) -> tuple[Fraction, RawNode | None]:
        coeff = Fraction(1)
        nxt = self.peek()
        if nxt is not None and nxt[0] == "number":
            self.take()
            coeff = Fraction(nxt[1])
            nxt = self.peek()
            if nxt is not None and nxt[1] == "*":
                self.take()
            else:
                # A bare rational constant is only legal as the zero element.
                if coeff != 0:
                    raise ParseError("a constant term must be 0")
                return Fraction(0), None
        return coeff, self.parse_tree()


def parse_element(text: str, gens: Mapping[str, Generator], mode: str) -> OperadElement:
    """Parse an expression over the given generator table."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, gens)
    total = zero(mode)
    sign = Fraction(1)
    nxt = parser.peek()
    if nxt is not None and nxt[1] in "+-":
        parser.take()
        sign = Fraction(-1) if nxt[1] == "-" else Fraction(1)
    while True:
        coeff, raw = parser.parse_term()
        if raw is not None:
            total = total + element(mode, raw, sign * coeff)
        nxt = parser.peek()
        if nxt is None:
            break
        if nxt[1] not in "+-":
            raise ParseError(f"expected '+' or '-', got {nxt[1]!r}")
        parser.take()
        sign = Fraction(-1) if nxt[1] == "-" else Fraction(1)
    return total


def render_element(x: OperadElement) -> str:
    """Deterministic canonical rendering; inverse to parse_element."""
    if x.is_zero:
        return "0"
    parts = []
    for t, c in x.sorted_terms():
        body = f"{abs(c)} * {render_tree(t)}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
