"""Operad morphisms given by generator assignments, and chain-map checks.

A morphism is applied to a tree by substituting the image of every vertex
generator and composing along the tree; since images match their
generators' degrees, the only signs are the ones composition already
carries.  Targets completed in the adjoined degree-0 variable are handled
by truncating at the recorded precision after every composition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .derivations import Derivation, Report, apply_derivation_traced
from .errors import DegreeError, ModeMismatch, UnknownGenerator
from .presets import OperadPresentation
from .signs import Permutation
from .trees import (
    SYM,
    OperadElement,
    Tree,
    act,
    compose,
    split_by_vertex_count,
    truncate_by_count,
    zero,
)


@dataclass(frozen=True)
class OperadMorphism:
    """A generator-to-element assignment between presentations of one mode.

    `alpha_precision` is the truncation order when the target is a
    completed coproduct; None means no truncation.
    """

    source: OperadPresentation
    target: OperadPresentation
    assignment: Mapping[str, OperadElement]
    alpha_precision: int | None = None

    def __post_init__(self):
        if self.source.mode != self.target.mode:
            raise ModeMismatch("source and target modes differ")
        for name, val in self.assignment.items():
            gen = self.source.generator(name)
            if not val.is_zero and (val.arity != gen.arity or val.degree != gen.degree):
                raise DegreeError(
                    f"image of {name} has (arity, degree) ({val.arity}, {val.degree}), "
                    f"expected ({gen.arity}, {gen.degree})"
                )

    def value(self, name: str) -> OperadElement:
        if name not in self.assignment:
            raise UnknownGenerator(f"morphism has no value for generator {name!r}")
        return self.assignment[name]

    def piece(self, name: str, k: int) -> OperadElement:
        """The homogeneous part of the image with exactly k adjoined vertices."""
        alpha = self.target.alpha_name
        if alpha is None:
            return self.value(name) if k == 0 else zero(self.target.mode)
        return split_by_vertex_count(self.value(name), alpha).get(k, zero(self.target.mode))

    def with_precision(self, precision: int | None) -> "OperadMorphism":
        return replace(self, alpha_precision=precision)


# The adjunction-unit morphisms carry a per-generator split by the number of
# adjoined degree-0 vertices; `piece` exposes it.
TruncatedMorphism = OperadMorphism


def _truncate(m: OperadMorphism, x: OperadElement) -> OperadElement:
    if m.alpha_precision is None or m.target.alpha_name is None:
        return x
    return truncate_by_count(x, m.target.alpha_name, m.alpha_precision)


def apply_morphism(m: OperadMorphism, x: OperadElement) -> OperadElement:
    """Image of an element: substitute generator images and compose."""
    if x.mode != m.source.mode:
        raise ModeMismatch(f"element mode {x.mode} does not match morphism mode")
    total = zero(m.target.mode)
    for t, c in x.terms.items():
        total = total + c * _apply_to_tree(m, t)
    return _truncate(m, total)


def _apply_to_tree(m: OperadMorphism, t: Tree) -> OperadElement:
    def build(node: Tree) -> OperadElement:
        e = m.value(node.gen.name)
        for j in reversed(range(node.gen.arity)):
            child = node.children[j]
            if isinstance(child, Tree):
                e = _truncate(m, compose(e, j + 1, build(child)))
        return e

    result = build(t)
    labels = t.leaf_labels()
    if t.arity and labels != sorted(labels):
        if m.source.mode != SYM:
            raise ModeMismatch("planar-mode tree with non-planar labels")
        result = act(Permutation(labels), result)
    return result


def compose_morphisms(outer: OperadMorphism, inner: OperadMorphism) -> OperadMorphism:
    """Pointwise composite outer . inner on inner's source generators."""
    if inner.target.generators.keys() - outer.source.generators.keys():
        raise UnknownGenerator("inner morphism's target is not outer's source")
    assignment = {
        name: apply_morphism(outer, val) for name, val in inner.assignment.items()
    }
    precision = outer.alpha_precision
    if inner.alpha_precision is not None:
        precision = (
            inner.alpha_precision
            if precision is None
            else min(precision, inner.alpha_precision)
        )
    return OperadMorphism(inner.source, outer.target, assignment, precision)


def identity_morphism(P: OperadPresentation) -> OperadMorphism:
    return OperadMorphism(P, P, {name: P.element(name) for name in P.generators})


def verify_chain_map(
    m: OperadMorphism,
    arity_bound: int,
    *,
    d_source: Derivation | None = None,
    d_target: Derivation | None = None,
    alpha_compare: int | None = None,
) -> Report:
    """Report d(f(g)) - f(d(g)) for every source generator of arity <= bound.

    When the target is truncated at precision N, the residue is compared at
    adjoined-variable count <= alpha_compare (default N - 1, since the
    adjoined differential shifts that count down by one).
    """
    d_source = d_source or m.source.differential
    d_target = d_target or m.target.differential
    if alpha_compare is None and m.alpha_precision is not None:
        alpha_compare = m.alpha_precision - 1
    report = Report()
    for name in sorted(m.source.generators):
        gen = m.source.generators[name]
        if gen.arity > arity_bound:
            continue
        lhs, touched1 = apply_derivation_traced(
            d_target, m.value(name), modulo_truncation=True
        )
        rhs_src, touched2 = (d_source.value(name), name in d_source.truncated)
        rhs = apply_morphism(m, rhs_src)
        residue = _truncate(m, lhs - rhs)
        if alpha_compare is not None and m.target.alpha_name is not None:
            residue = truncate_by_count(residue, m.target.alpha_name, alpha_compare)
        report.add(name, residue, exact=not (touched1 or touched2))
    return report
