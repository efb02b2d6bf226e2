"""Derivations of free operads, the operadic bracket, and square-zero checks.

A derivation is determined by its values on generators and extended by the
Leibniz rule: applied to a tree, it is the signed sum over vertices of the
tree with the value substituted at that vertex, the sign being the parity
of the total degree of the vertices preceding it in depth-first order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    NonMixedDifferential,
    TruncationExceeded,
    UnknownGenerator,
)
from .trees import (
    Generator,
    OperadElement,
    Tree,
    canonical,
    compose,
    iter_vertices,
    split_by_vertex_count,
    substitute_vertex,
    total_compose,
    zero,
)


@dataclass(frozen=True)
class Derivation:
    """Values of a degree-(-1) derivation on the generators of a presentation.

    Generators missing from `values` are sent to zero.  Names listed in
    `truncated` have values that were cut off at the presentation's arity
    bound; by default applying the derivation through such a generator
    raises TruncationExceeded.
    """

    mode: str
    generators: Mapping[str, Generator]
    values: Mapping[str, OperadElement]
    truncated: frozenset[str] = frozenset()

    def value(self, name: str) -> OperadElement:
        if name not in self.generators:
            raise UnknownGenerator(f"generator {name!r} not in presentation")
        return self.values.get(name, zero(self.mode))

    def with_value(self, name: str, value: OperadElement) -> "Derivation":
        vals = dict(self.values)
        vals[name] = value
        return Derivation(self.mode, self.generators, vals, self.truncated)


def apply_derivation(
    D: Derivation, x: OperadElement, *, modulo_truncation: bool = False
) -> OperadElement:
    """Leibniz extension of D to an element.

    With `modulo_truncation`, truncated generator values are used as stored
    instead of raising; use `apply_derivation_traced` to learn whether a
    truncated value was touched.
    """
    result, _ = apply_derivation_traced(D, x, modulo_truncation=modulo_truncation)
    return result


def apply_derivation_traced(
    D: Derivation, x: OperadElement, *, modulo_truncation: bool = False
) -> tuple[OperadElement, bool]:
    """Apply D; also report whether any truncated generator value was used."""
    if x.mode != D.mode:
        raise UnknownGenerator(f"element mode {x.mode} does not match derivation mode {D.mode}")
    acc: dict[Tree, Fraction] = {}
    touched = False
    for t, c in x.terms.items():
        for path, gen, prefix in iter_vertices(t):
            if gen.name not in D.generators:
                raise UnknownGenerator(f"generator {gen.name!r} not in presentation")
            if gen.name in D.truncated:
                if not modulo_truncation:
                    raise TruncationExceeded(
                        f"value of {gen.name!r} is truncated at the arity bound"
                    )
                touched = True
            val = D.values.get(gen.name)
            if val is None or val.is_zero:
                continue
            vsign = -1 if prefix % 2 else 1
            for w, cw in val.terms.items():
                parity, raw = substitute_vertex(t, path, w)
                sign, tt = canonical(raw)
                if tt is None:
                    continue
                coeff = c * cw * sign * vsign
                if parity:
                    coeff = -coeff
                acc[tt] = acc.get(tt, Fraction(0)) + coeff
    return OperadElement(x.mode, acc), touched


def bracket(x: OperadElement, y: OperadElement) -> OperadElement:
    """Operadic bracket [x, y] = sum_i x o_i y - (-1)^{|x||y|} sum_i y o_i x."""
    if x.is_zero or y.is_zero:
        return zero(x.mode)
    first = total_compose(x, y)
    second = total_compose(y, x)
    if (x.degree % 2) and (y.degree % 2):
        return first + second
    return first - second


@dataclass(frozen=True)
class WeightSplitDerivation:
    """The weight-0 and weight-1 parts of a differential on Q0 v [kappa]."""

    d0: Derivation
    d1: Derivation
    kappa_name: str


def generator_weight(gen: Generator, kappa_name: str) -> int:
    return 1 if gen.name == kappa_name else 0


def split_by_weight(D: Derivation, kappa_name: str) -> WeightSplitDerivation:
    """Split D into weight-preserving and weight-raising parts.

    Raises NonMixedDifferential when some generator value has a component
    outside weights {w, w+1}, with w the generator's own weight.
    """
    d0_values: dict[str, OperadElement] = {}
    d1_values: dict[str, OperadElement] = {}
    for name, gen in D.generators.items():
        value = D.values.get(name)
        if value is None or value.is_zero:
            continue
        w = generator_weight(gen, kappa_name)
        parts = split_by_vertex_count(value, kappa_name)
        bad = [k for k in parts if k not in (w, w + 1)]
        if bad:
            raise NonMixedDifferential(
                f"d({name}) has weight components {sorted(bad)} outside {{{w},{w + 1}}}"
            )
        if w in parts:
            d0_values[name] = parts[w]
        if w + 1 in parts:
            d1_values[name] = parts[w + 1]
    d0 = Derivation(D.mode, D.generators, d0_values, D.truncated)
    d1 = Derivation(D.mode, D.generators, d1_values, D.truncated)
    return WeightSplitDerivation(d0, d1, kappa_name)


@dataclass(frozen=True)
class CheckLine:
    name: str
    ok: bool
    exact: bool
    residue: OperadElement | None = None

    def render(self) -> str:
        from .grammar import render_element

        if self.ok:
            return f"{self.name} PASS" + ("" if self.exact else " (modulo truncation)")
        return f"{self.name} FAIL residue={render_element(self.residue)}"


@dataclass
class Report:
    """Line-oriented verification report: one named PASS/FAIL per check."""

    lines: list[CheckLine] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    def add(self, name: str, residue: OperadElement, exact: bool = True) -> None:
        self.lines.append(CheckLine(name, residue.is_zero, exact, residue))

    def add_flag(self, name: str, ok: bool, exact: bool = True) -> None:
        self.lines.append(CheckLine(name, ok, exact))

    def render(self) -> str:
        return "\n".join(line.render() for line in self.lines)


def check_square_zero(
    D: Derivation, arity_bound: int, *, generators: Iterable[str] | None = None
) -> Report:
    """Verify D(D(g)) = 0 on every generator of arity <= arity_bound.

    Sufficient by the Leibniz rule.  Generators whose check had to use a
    truncated value are marked "(modulo truncation)".
    """
    report = Report()
    names = list(generators) if generators is not None else sorted(D.generators)
    for name in names:
        gen = D.generators[name]
        if gen.arity > arity_bound:
            continue
        dd, touched = apply_derivation_traced(D, D.value(name), modulo_truncation=True)
        exact = not (touched or name in D.truncated)
        report.add(name, dd, exact)
    return report
