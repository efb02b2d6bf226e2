"""Finite-dimensional graded algebras, structure checks, and twisting.

An algebra structure is a graded rational vector space with a degree-(-1)
differential and finitely many degree-(-1) multilinear operations, one per
arity.  Operad elements are realized as multilinear maps by composing the
bound operations along trees; twisting by a degree-0 element pulls the
structure back along the explicit twisting morphism, with the adjoined
generators bound to the element and its differential.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .derivations import Report
from .errors import (
    DegreeError,
    ModeMismatch,
    NilpotencyExceeded,
    ParseError,
    PositionError,
    UnknownGenerator,
)
from .presets import build_preset
from .trees import NS, SYM, OperadElement, Tree
from .twisting import eta_value


@dataclass(frozen=True)
class GradedSpace:
    """An ordered basis of named homogeneous vectors."""

    basis: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.basis]
        if len(set(names)) != len(names):
            raise ParseError("basis names must be distinct")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.basis)

    def degree(self, name: str) -> int:
        for n, d in self.basis:
            if n == name:
                return d
        raise UnknownGenerator(f"no basis vector {name!r}")


@dataclass(frozen=True)
class Element:
    """A homogeneous vector, stored by sparse rational coordinates."""

    space: GradedSpace
    coords: Mapping[str, Fraction]
    degree: int

    def __post_init__(self):
        for name, c in self.coords.items():
            if c and self.space.degree(name) != self.degree:
                raise DegreeError(f"coordinate {name} breaks degree homogeneity")

    @property
    def is_zero(self) -> bool:
        return all(not c for c in self.coords.values())

    def __add__(self, other: "Element") -> "Element":
        coords = dict(self.coords)
        for n, c in other.coords.items():
            coords[n] = coords.get(n, Fraction(0)) + c
        return Element(self.space, {n: c for n, c in coords.items() if c}, self.degree)

    def __rmul__(self, scalar) -> "Element":
        s = Fraction(scalar)
        return Element(self.space, {n: s * c for n, c in self.coords.items() if s * c}, self.degree)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        names = set(self.coords) | set(other.coords)
        return self.space == other.space and all(
            self.coords.get(n, Fraction(0)) == other.coords.get(n, Fraction(0))
            for n in names
        )

    def __hash__(self) -> int:
        return hash((self.space, frozenset((n, c) for n, c in self.coords.items() if c)))


def zero_element(space: GradedSpace, degree: int) -> Element:
    return Element(space, {}, degree)


class MultilinearMap:
    """A degree-homogeneous multilinear map given by sparse coefficients.

    `coeffs[(out, ins)]` is the coefficient of the output basis vector in
    the image of the input basis tuple.
    """

    __slots__ = ("space", "arity", "degree", "coeffs")

    def __init__(
        self,
        space: GradedSpace,
        arity: int,
        degree: int,
        coeffs: Mapping[tuple[str, tuple[str, ...]], Fraction] | None = None,
    ):
        self.space = space
        self.arity = arity
        self.degree = degree
        clean: dict[tuple[str, tuple[str, ...]], Fraction] = {}
        for (out, ins), c in (coeffs or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if len(ins) != arity:
                raise PositionError(f"input tuple {ins} does not match arity {arity}")
            expected = degree + sum(space.degree(i) for i in ins)
            if space.degree(out) != expected:
                raise DegreeError(
                    f"coefficient ({out}, {ins}) breaks degree homogeneity"
                )
            clean[(out, ins)] = c
        self.coeffs = clean

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        if (self.arity, self.degree) != (other.arity, other.degree):
            raise DegreeError("adding maps of different arity or degree")
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
        return MultilinearMap(self.space, self.arity, self.degree, coeffs)

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "MultilinearMap":
        s = Fraction(scalar)
        return MultilinearMap(
            self.space, self.arity, self.degree, {k: s * c for k, c in self.coeffs.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultilinearMap)
            and self.arity == other.arity
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.arity, self.degree, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"MultilinearMap(arity={self.arity}, degree={self.degree}, {len(self.coeffs)} coeffs)"

    def apply(self, *inputs: Element) -> Element:
        if len(inputs) != self.arity:
            raise PositionError("wrong number of inputs")
        out_degree = self.degree + sum(e.degree for e in inputs)
        coords: dict[str, Fraction] = {}
        for (out, ins), c in self.coeffs.items():
            prod = c
            for basis_name, e in zip(ins, inputs):
                prod *= e.coords.get(basis_name, Fraction(0))
                if not prod:
                    break
            if prod:
                coords[out] = coords.get(out, Fraction(0)) + prod
        return Element(self.space, {n: c for n, c in coords.items() if c}, out_degree)


def zero_map(space: GradedSpace, arity: int, degree: int = -1) -> MultilinearMap:
    return MultilinearMap(space, arity, degree)


def element_as_map(e: Element) -> MultilinearMap:
    return MultilinearMap(
        e.space, 0, e.degree, {(n, ()): c for n, c in e.coords.items() if c}
    )


def endo_compose(f: MultilinearMap, i: int, g: MultilinearMap) -> MultilinearMap:
    """Partial composition in the endomorphism operad.

    The inner map passes the first i-1 inputs, picking up the Koszul sign
    (-1)^{|g| * (sum of their degrees)}.
    """
    if not 1 <= i <= f.arity:
        raise PositionError(f"slot {i} out of range for arity {f.arity}")
    if f.space != g.space:
        raise ModeMismatch("maps live on different spaces")
    space = f.space
    arity = f.arity + g.arity - 1
    degree = f.degree + g.degree
    coeffs: dict[tuple[str, tuple[str, ...]], Fraction] = {}
    for (out_f, ins_f), cf in f.coeffs.items():
        for (out_g, ins_g), cg in g.coeffs.items():
            if ins_f[i - 1] != out_g:
                continue
            ins = ins_f[: i - 1] + ins_g + ins_f[i:]
            c = cf * cg
            if g.degree % 2:
                passed = sum(space.degree(n) for n in ins_f[: i - 1])
                if passed % 2:
                    c = -c
            key = (out_f, ins)
            coeffs[key] = coeffs.get(key, Fraction(0)) + c
    return MultilinearMap(space, arity, degree, coeffs)


def permute_inputs(f: MultilinearMap, labels: list[int]) -> MultilinearMap:
    """The map g(x_1..x_n) = sign * f(x_{labels[0]}, ..., x_{labels[n-1]}),
    with the Koszul sign of the input rearrangement."""
    if sorted(labels) != list(range(1, f.arity + 1)):
        raise PositionError(f"labels must be a permutation of 1..{f.arity}")
    space = f.space
    coeffs: dict[tuple[str, tuple[str, ...]], Fraction] = {}
    for (out, ins), c in f.coeffs.items():
        # `ins` are the inputs of f in its own slot order; slot j receives
        # the outer input labelled labels[j-1].
        outer = [None] * f.arity
        for j, lab in enumerate(labels):
            outer[lab - 1] = ins[j]
        outer_t = tuple(outer)
        sign = 1
        degs = [space.degree(n) for n in outer_t]
        for a in range(f.arity):
            for b in range(a + 1, f.arity):
                if labels[a] > labels[b] and degs[labels[a] - 1] % 2 and degs[labels[b] - 1] % 2:
                    sign = -sign
        key = (out, outer_t)
        coeffs[key] = coeffs.get(key, Fraction(0)) + sign * c
    return MultilinearMap(space, f.arity, f.degree, coeffs)


def is_graded_symmetric(f: MultilinearMap) -> bool:
    """Invariance under adjacent input swaps (with Koszul signs)."""
    for i in range(1, f.arity):
        labels = list(range(1, f.arity + 1))
        labels[i - 1], labels[i] = labels[i], labels[i - 1]
        if permute_inputs(f, labels) != f:
            return False
    return True


def boundary(f: MultilinearMap, d: MultilinearMap) -> MultilinearMap:
    """The endomorphism-operad differential d f - (-1)^{|f|} f d."""
    total = endo_compose(d, 1, f)
    inner = zero_map(f.space, f.arity, f.degree + d.degree)
    for i in range(1, f.arity + 1):
        inner = inner + endo_compose(f, i, d)
    if f.degree % 2:
        return total + inner
    return total - inner


@dataclass(frozen=True)
class AlgebraStructure:
    """A finite-dimensional curved homotopy algebra.

    `ops[n]` is the arity-n structure operation (degree -1); missing
    arities act as zero.  All composites with more than `nilpotency_bound`
    operation applications must vanish; this keeps twisting sums finite.
    """

    mode: str
    space: GradedSpace
    differential: MultilinearMap
    ops: Mapping[int, MultilinearMap]
    nilpotency_bound: int
    elements: Mapping[str, Element] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in (NS, SYM):
            raise ModeMismatch(f"unknown mode {self.mode!r}")
        if self.differential.arity != 1 or self.differential.degree != -1:
            raise DegreeError("the differential must have arity 1 and degree -1")
        for n, op in self.ops.items():
            if op.arity != n or op.degree != -1:
                raise DegreeError(f"operation at key {n} has wrong arity or degree")
            if self.mode == SYM and not is_graded_symmetric(op):
                raise DegreeError(f"arity-{n} operation is not graded symmetric")

    @property
    def max_arity(self) -> int:
        return max((n for n, op in self.ops.items() if not op.is_zero), default=0)

    def op(self, n: int) -> MultilinearMap:
        return self.ops.get(n, zero_map(self.space, n))


def realize(
    structure: AlgebraStructure,
    x: OperadElement,
    bindings: Mapping[str, MultilinearMap] | None = None,
) -> MultilinearMap:
    """Realize an operad element as a multilinear map.

    Structure generators (mu_n / ell_n) are bound to the operations;
    `bindings` may add values for other generators (the adjoined pair in
    twisted contexts).
    """
    if x.mode != structure.mode:
        raise ModeMismatch("element mode does not match structure mode")
    prefix = "mu_" if structure.mode == NS else "ell_"
    bindings = bindings or {}

    def lookup(name: str, arity: int) -> MultilinearMap:
        if name in bindings:
            return bindings[name]
        if name.startswith(prefix):
            return structure.op(int(name[len(prefix):]))
        raise UnknownGenerator(f"no binding for generator {name!r}")

    arity = x.arity
    if arity is None:
        return zero_map(structure.space, 0, 0)
    total = zero_map(structure.space, arity, x.degree)

    def realize_tree(t: Tree) -> MultilinearMap:
        f = lookup(t.gen.name, t.gen.arity)
        for j in reversed(range(t.gen.arity)):
            child = t.children[j]
            if isinstance(child, Tree):
                f = endo_compose(f, j + 1, realize_tree(child))
        return f

    for t, c in x.terms.items():
        f = realize_tree(t)
        labels = t.leaf_labels()
        if labels != sorted(labels):
            f = permute_inputs(f, labels)
        total = total + c * f
    return total


def check_structure(structure: AlgebraStructure, arity_bound: int) -> Report:
    """Residues of the structure relations up to the arity bound.

    For each n, compares the realization of the preset differential value
    with the endomorphism-operad boundary of the arity-n operation.
    """
    preset = build_preset("cAinf" if structure.mode == NS else "cLinf", arity_bound + 1)
    report = Report()
    for n in range(0, arity_bound + 1):
        name = f"{'mu' if structure.mode == NS else 'ell'}_{n}"
        lhs = realize(structure, preset.differential.value(name))
        rhs = boundary(structure.op(n), structure.differential)
        residue = lhs - rhs
        if residue.is_zero:
            report.add_flag(name, True)
        else:
            from .derivations import CheckLine

            detail = ", ".join(
                f"{out}<-({','.join(ins)}): {c}"
                for (out, ins), c in sorted(residue.coeffs.items())
            )
            report.lines.append(CheckLine(f"{name} [{detail}]", False, True, None))
    return report


def _check_nilpotency(structure: AlgebraStructure, a: Element) -> None:
    """All twisting terms beyond the declared bound must vanish."""
    bound = structure.nilpotency_bound
    a_map = element_as_map(a)
    for n in range(0, structure.max_arity + 1):
        for k in range(bound + 1, structure.max_arity - n + 1):
            op = structure.op(n + k)
            if op.is_zero:
                continue
            probe = op
            for _ in range(k):
                probe = endo_compose(probe, 1, a_map)
            if not probe.is_zero:
                raise NilpotencyExceeded(
                    f"arity-{n + k} terms survive beyond the nilpotency bound {bound}"
                )


def curvature_of(structure: AlgebraStructure, a: Element) -> Element:
    """d(a) plus the sum of all operations applied to copies of a
    (1/k!-weighted in the symmetric flavour)."""
    if a.degree != 0:
        raise DegreeError("twisting elements must have degree 0")
    _check_nilpotency(structure, a)
    total = structure.differential.apply(a)
    a_map = element_as_map(a)
    for k in range(0, structure.nilpotency_bound + 1):
        op = structure.op(k)
        if op.is_zero:
            continue
        probe = op
        for _ in range(k):
            probe = endo_compose(probe, 1, a_map)
        term = Element(
            structure.space, {n: c for (n, _), c in probe.coeffs.items()}, total.degree
        )
        if structure.mode == SYM:
            term = Fraction(1, _factorial(k)) * term
        total = total + term
    return total


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def is_maurer_cartan(structure: AlgebraStructure, a: Element) -> bool:
    return curvature_of(structure, a).is_zero


def twist_algebra(structure: AlgebraStructure, a: Element) -> AlgebraStructure:
    """Pull the structure back along the explicit twisting morphism at a.

    The adjoined degree-0 generator is bound to a and the adjoined
    degree-(-1) generator to d(a); the new arity-0 operation is exactly the
    curvature of a, so a Maurer-Cartan element yields a flat structure.
    """
    if a.degree != 0:
        raise DegreeError("twisting elements must have degree 0")
    _check_nilpotency(structure, a)
    bindings = {
        "alpha": element_as_map(a),
        "kappa_T": element_as_map(structure.differential.apply(a)),
    }
    precision = structure.nilpotency_bound
    new_ops: dict[int, MultilinearMap] = {}
    for n in range(0, structure.max_arity + 1):
        value = eta_value(structure.mode, n, precision)
        new_op = realize(structure, value, bindings)
        if not new_op.is_zero:
            new_ops[n] = new_op
    return AlgebraStructure(
        structure.mode,
        structure.space,
        structure.differential,
        new_ops,
        structure.nilpotency_bound,
        structure.elements,
    )


# ---------------------------------------------------------------------------
# manifest io (JSON)


def _frac_str(c: Fraction) -> str:
    return str(c)


def structure_to_json(structure: AlgebraStructure) -> str:
    ops = {
        str(n): {
            f"{out}|{','.join(ins)}": _frac_str(c)
            for (out, ins), c in sorted(op.coeffs.items())
        }
        for n, op in sorted(structure.ops.items())
        if not op.is_zero
    }
    d = {
        f"{out}|{ins[0]}": _frac_str(c)
        for (out, ins), c in sorted(structure.differential.coeffs.items())
    }
    payload = {
        "mode": structure.mode,
        "basis": [[n, d_] for n, d_ in structure.space.basis],
        "differential": d,
        "ops": ops,
        "nilpotency_bound": structure.nilpotency_bound,
        "elements": {
            name: {n: _frac_str(c) for n, c in sorted(e.coords.items())}
            for name, e in sorted(structure.elements.items())
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def structure_from_json(text: str) -> AlgebraStructure:
    payload = json.loads(text)
    space = GradedSpace(tuple((n, int(d)) for n, d in payload["basis"]))
    d_coeffs = {}
    for key, c in payload.get("differential", {}).items():
        out, src = key.split("|")
        d_coeffs[(out, (src,))] = Fraction(c)
    differential = MultilinearMap(space, 1, -1, d_coeffs)
    ops = {}
    for n_str, table in payload.get("ops", {}).items():
        n = int(n_str)
        coeffs = {}
        for key, c in table.items():
            out, ins = key.split("|")
            ins_t = tuple(i for i in ins.split(",") if i) if ins else ()
            coeffs[(out, ins_t)] = Fraction(c)
        ops[n] = MultilinearMap(space, n, -1, coeffs)
    elements = {}
    for name, coords in payload.get("elements", {}).items():
        frac = {n: Fraction(c) for n, c in coords.items()}
        degrees = {space.degree(n) for n, c in frac.items() if c}
        degree = degrees.pop() if degrees else 0
        elements[name] = Element(space, frac, degree)
    return AlgebraStructure(
        payload["mode"],
        space,
        differential,
        ops,
        int(payload["nilpotency_bound"]),
        elements,
    )
