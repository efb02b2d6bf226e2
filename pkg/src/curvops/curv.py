"""Curved-operad quadruples: validation, solvers, initial and terminal maps.

A quadruple consists of a free presentation, a distinguished arity-0
degree-(-1) generator kappa generating the weight grading, and a
differential whose weight components are concentrated in weights 0 and 1
with the weight-1 part vanishing on kappa.  The initial-morphism
construction runs the inductive procedure that extracts the canonical
curved homotopy structure living inside any such quadruple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .derivations import (
    Derivation,
    Report,
    WeightSplitDerivation,
    apply_derivation,
    apply_derivation_traced,
    bracket,
    split_by_vertex_count,
)
from .errors import (
    ConsistencyFailure,
    ModeMismatch,
    NotClosed,
    NotSolvable,
    UnknownGenerator,
)
from .morphisms import OperadMorphism, verify_chain_map
from .presets import OperadPresentation, build_preset
from .signs import Permutation, enumerate_shuffles
from .trees import (
    NS,
    SYM,
    Generator,
    OperadElement,
    Tree,
    acted_by,
    act,
    canonical,
    compose,
    from_generator,
    iter_vertices,
    subtree_at,
    to_raw,
    truncate_by_count,
    zero,
)


@dataclass(frozen=True)
class CurvObject:
    """A presentation with distinguished kappa and weight-split differential."""

    presentation: OperadPresentation
    kappa_name: str
    split: WeightSplitDerivation

    @property
    def mode(self) -> str:
        return self.presentation.mode

    @property
    def kappa(self) -> Generator:
        return self.presentation.generator(self.kappa_name)

    @property
    def kappa_element(self) -> OperadElement:
        return from_generator(self.kappa, self.mode)

    @property
    def d0(self) -> Derivation:
        return self.split.d0

    @property
    def d1(self) -> Derivation:
        return self.split.d1

    def q0_names(self) -> list[str]:
        return [n for n in self.presentation.generators if n != self.kappa_name]


def curv_object(P: OperadPresentation, kappa_name: str | None = None) -> CurvObject:
    """Wrap a presentation as a quadruple, splitting its differential."""
    from .derivations import split_by_weight

    kappa = kappa_name or P.kappa_name
    if kappa is None:
        raise UnknownGenerator("presentation has no distinguished kappa generator")
    gen = P.generator(kappa)
    if gen.arity != 0 or gen.degree != -1:
        raise ConsistencyFailure(
            f"kappa must have arity 0 and degree -1, got ({gen.arity}, {gen.degree})"
        )
    split = split_by_weight(P.differential, kappa)
    return CurvObject(P, kappa, split)


@dataclass(frozen=True)
class CurvMorphism:
    """A morphism of quadruples; kappa maps to kappa by construction."""

    source: CurvObject
    target: CurvObject
    morphism: OperadMorphism

    def value(self, name: str) -> OperadElement:
        return self.morphism.value(name)


# ---------------------------------------------------------------------------
# validation


def validate_curv(
    Q: CurvObject, arity_bound: int, *, alpha_compare: int | None = None
) -> Report:
    """Check the quadruple conditions and the three split square-zero
    identities on generators of arity <= arity_bound.

    For presentations truncated in the adjoined variable, residues are
    compared at adjoined-count <= alpha_compare.
    """
    P = Q.presentation
    if alpha_compare is None and P.alpha_bound is not None:
        alpha_compare = P.alpha_bound - 1

    def cut(x: OperadElement) -> OperadElement:
        if alpha_compare is not None and P.alpha_name is not None:
            return truncate_by_count(x, P.alpha_name, alpha_compare)
        return x

    report = Report()
    kappa = P.generator(Q.kappa_name)
    report.add_flag("kappa.shape", kappa.arity == 0 and kappa.degree == -1)

    d = P.differential
    for name in sorted(P.generators):
        gen = P.generators[name]
        value = d.values.get(name)
        if value is None or value.is_zero:
            continue
        w = 1 if name == Q.kappa_name else 0
        parts = split_by_vertex_count(value, Q.kappa_name)
        ok = all(k in (w, w + 1) for k in parts)
        report.add_flag(f"weights.{name}", ok)
        report.add_flag(f"degree.{name}", value.degree == gen.degree - 1)

    report.add("condition3.d1_kappa", Q.d1.value(Q.kappa_name))

    for name in sorted(P.generators):
        if P.generators[name].arity > arity_bound:
            continue
        exact = name not in d.truncated
        d0g, d1g = Q.d0.value(name), Q.d1.value(name)
        a, t1 = apply_derivation_traced(Q.d0, d0g, modulo_truncation=True)
        b, t2 = apply_derivation_traced(Q.d0, d1g, modulo_truncation=True)
        c, t3 = apply_derivation_traced(Q.d1, d0g, modulo_truncation=True)
        e, t4 = apply_derivation_traced(Q.d1, d1g, modulo_truncation=True)
        exact = exact and not (t1 or t2 or t3 or t4)
        report.add(f"d0d0.{name}", cut(a), exact)
        report.add(f"d0d1+d1d0.{name}", cut(b + c), exact)
        report.add(f"d1d1.{name}", cut(e), exact)
    return report


# ---------------------------------------------------------------------------
# peeling solvers


def _peel_tree(
    t: Tree, kappa_name: str, slot: int, occurrence_path: Sequence[int]
) -> tuple[int, "RawNode"]:
    """Remove the kappa vertex at `occurrence_path` and open a new leaf
    labelled `slot` there; existing labels >= slot shift up by one."""

    def rebuild(node: Tree, depth: int):
        kids = []
        for idx, c in enumerate(node.children):
            on_path = depth < len(occurrence_path) and idx == occurrence_path[depth]
            if isinstance(c, int):
                kids.append(c if c < slot else c + 1)
            elif on_path and depth + 1 == len(occurrence_path) and c.gen.name == kappa_name:
                kids.append(slot)
            elif on_path:
                kids.append(rebuild(c, depth + 1))
            else:
                kids.append(_shift_labels(c, slot))
        return (node.gen, tuple(kids))

    return 0, rebuild(t, 0)


def _shift_labels(node: Tree, slot: int):
    kids = []
    for c in node.children:
        if isinstance(c, int):
            kids.append(c if c < slot else c + 1)
        else:
            kids.append(_shift_labels(c, slot))
    return (node.gen, tuple(kids))


def _kappa_occurrences(t: Tree, kappa_name: str) -> list[tuple[int, ...]]:
    return [path for path, gen, _ in iter_vertices(t) if gen.name == kappa_name]


def _leaves_before(t: Tree, path: Sequence[int]) -> int:
    """Number of external leaves strictly before the vertex at `path` in
    planar depth-first order."""
    count = 0
    node = t
    for idx in path:
        for c in node.children[:idx]:
            count += 1 if isinstance(c, int) else c.arity
        node = node.children[idx]
    return count


def _peel_contribution(
    x_tree: Tree,
    coeff: Fraction,
    kappa: Generator,
    slot: int,
    path: Sequence[int],
    mode: str,
) -> tuple[Tree, Fraction]:
    """The unique u with u o_slot kappa = +/- x_tree, and its coefficient."""
    _, raw = _peel_tree(x_tree, kappa.name, slot, path)
    sign, u = canonical(raw)
    if u is None:
        raise NotSolvable("peeled tree canonicalizes to zero")
    u_elem = OperadElement(mode, {u: Fraction(1)})
    back = compose(u_elem, slot, from_generator(kappa, mode))
    s2 = back.coefficient(x_tree)
    if not s2:
        raise NotSolvable("peeled candidate does not recompose to the input tree")
    return u, coeff / s2


def solve_compose_slot1(
    p: OperadElement, kappa: Generator, *, reverse_order: bool = False
) -> OperadElement:
    """Solve q o_1 kappa = p for weight-one p (freeness in kappa).

    Every term must contain exactly one kappa vertex; it is deleted and a
    fresh leaf labelled 1 opened in its place.
    """
    if p.is_zero:
        return p
    acc: dict[Tree, Fraction] = {}
    items = p.sorted_terms()
    if reverse_order:
        items = list(reversed(items))
    for t, c in items:
        occ = _kappa_occurrences(t, kappa.name)
        if len(occ) != 1:
            raise NotSolvable(
                f"expected exactly one {kappa.name} vertex per term, got {len(occ)}"
            )
        u, cu = _peel_contribution(t, c, kappa, 1, occ[0], p.mode)
        acc[u] = acc.get(u, Fraction(0)) + cu
    q = OperadElement(p.mode, acc)
    if compose(q, 1, from_generator(kappa, p.mode)) != p:
        raise NotSolvable("slot-1 decomposition does not reproduce the input")
    return q


def solve_bracket_kappa(
    p: OperadElement,
    kappa: Generator,
    *,
    check_closed: bool = True,
    reverse_order: bool = False,
) -> OperadElement:
    """Solve [q, kappa] = p in planar mode for weight-one closed p.

    Terms are grouped by the slot their kappa occupies (number of leaves
    before it, plus one); the per-slot peels must all agree, and the common
    value is returned.  Weight-zero closed input of positive arity must be
    zero, in which case zero is returned.
    """
    if p.mode != NS:
        raise ModeMismatch("the bracket solver is planar-mode only")
    kappa_elem = from_generator(kappa, p.mode)
    if check_closed and not bracket(p, kappa_elem).is_zero:
        raise NotClosed("input is not closed under bracketing with kappa")
    if p.is_zero:
        return p
    if p.arity == 0:
        raise NotSolvable("bracket solving needs positive arity")
    weights = {t.vertex_count(kappa.name) for t in p.terms}
    if weights == {0}:
        # Closed weight-zero elements of positive arity vanish; a nonzero
        # one signals an invalid input.
        raise NotSolvable("nonzero weight-zero input is not a bracket image")
    if weights != {1}:
        raise NotSolvable(f"need weight-one input, got weights {sorted(weights)}")
    n = p.arity
    slots: dict[int, dict[Tree, Fraction]] = {}
    items = p.sorted_terms()
    if reverse_order:
        items = list(reversed(items))
    for t, c in items:
        path = _kappa_occurrences(t, kappa.name)[0]
        slot = _leaves_before(t, path) + 1
        u, cu = _peel_contribution(t, c, kappa, slot, path, p.mode)
        bucket = slots.setdefault(slot, {})
        bucket[u] = bucket.get(u, Fraction(0)) + cu
    parts = [OperadElement(p.mode, slots.get(i, {})) for i in range(1, n + 2)]
    first = parts[0]
    if any(part != first for part in parts[1:]):
        raise NotSolvable("slot components disagree; input is not a bracket image")
    if bracket(first, kappa_elem) != p:
        raise NotSolvable("candidate does not bracket back to the input")
    return first


# ---------------------------------------------------------------------------
# initial morphism


def _plus_formula(
    nus: Sequence[OperadElement], k: int, mode: str
) -> OperadElement:
    """The expected weight-preserving differential value on the k-th element:
    the augmented structure relation evaluated on nu_1 .. nu_{k+1}."""
    total = zero(mode)
    if mode == NS:
        for pp in range(0, k + 1):
            for q in range(1, k - pp + 1):
                r = k - pp - q
                outer = nus[pp + 1 + r]
                inner = nus[q]
                if outer.is_zero or inner.is_zero:
                    continue
                total = total - compose(outer, pp + 1, inner)
        return total
    for pp in range(0, k):
        q = k - pp
        if q < 1:
            continue
        outer, inner = nus[pp + 1], nus[q]
        if outer.is_zero or inner.is_zero:
            continue
        base = compose(outer, 1, inner)
        for tau in enumerate_shuffles(q, pp):
            total = total - act(tau, base)
    return total


@dataclass(frozen=True)
class InitialMorphismResult:
    nus: list[OperadElement]
    morphism: CurvMorphism


def construct_initial_morphism(
    Q: CurvObject,
    arity_bound: int,
    *,
    reverse_order: bool = False,
    validate: bool = True,
) -> InitialMorphismResult:
    """Run the inductive construction of the unique structure map into Q.

    Returns the elements nu_0..nu_{arity_bound} (nu_0 is kappa) together
    with the morphism from the curved preset of Q's mode.  Verifies at each
    stage that the weight-0 differential obeys the augmented structure
    relation, and, in symmetric mode, that each nu_j is invariant.
    """
    if validate:
        rep = validate_curv(Q, arity_bound + 1)
        if not rep.ok:
            raise ConsistencyFailure(
                "quadruple fails validation:\n"
                + "\n".join(l.render() for l in rep.lines if not l.ok)
            )
    mode = Q.mode
    kappa = Q.kappa
    nus: list[OperadElement] = [Q.kappa_element]

    d0_kappa = Q.d0.value(Q.kappa_name)
    nus.append(solve_compose_slot1(-d0_kappa, kappa, reverse_order=reverse_order))

    for k in range(1, arity_bound + 1):
        d1_nu = apply_derivation(Q.d1, nus[k], modulo_truncation=True)
        if mode == NS:
            nxt = solve_bracket_kappa(
                -d1_nu, kappa, check_closed=False, reverse_order=reverse_order
            )
        else:
            nxt = solve_compose_slot1(-d1_nu, kappa, reverse_order=reverse_order)
        nus.append(nxt)

    alpha_bound = Q.presentation.alpha_bound
    alpha_name = Q.presentation.alpha_name
    for k in range(1, arity_bound + 1):
        d0_nu = apply_derivation(Q.d0, nus[k], modulo_truncation=True)
        expected = _plus_formula(nus, k, mode)
        if alpha_bound is not None and alpha_name is not None:
            # Stage k is only recovered to truncation order alpha_bound - k,
            # so the relation can only be compared there.
            cut = max(alpha_bound - k, 0)
            d0_nu = truncate_by_count(d0_nu, alpha_name, cut)
            expected = truncate_by_count(expected, alpha_name, cut)
        if d0_nu != expected:
            raise ConsistencyFailure(
                f"weight-0 differential of stage {k} violates the augmented relation"
            )
        if mode == SYM and not nus[k].is_zero:
            for i in range(1, k):
                tau = Permutation.transposition(k, i, i + 1)
                if act(tau, nus[k]) != nus[k]:
                    raise ConsistencyFailure(f"stage-{k} element is not invariant")

    source_preset = build_preset("cAinf" if mode == NS else "cLinf", arity_bound)
    source = curv_object(source_preset)
    prefix = "mu_" if mode == NS else "ell_"
    assignment = {f"{prefix}{j}": nus[j] for j in range(0, arity_bound + 1)}
    morphism = OperadMorphism(
        source_preset, Q.presentation, assignment, Q.presentation.alpha_bound
    )
    return InitialMorphismResult(nus, CurvMorphism(source, Q, morphism))


# ---------------------------------------------------------------------------
# terminal morphism


def terminal_morphism(Q: CurvObject, *, check: bool = True) -> CurvMorphism:
    """The unique morphism to the terminal quadruple.

    kappa maps to kappa; an arity-0 degree-0 generator with weight-raising
    differential c * kappa maps to c * alpha; everything else maps to zero.
    """
    target_preset = build_preset("T", 0, Q.mode)
    target = curv_object(target_preset)
    alpha = from_generator(target_preset.generator("alpha"), Q.mode)
    kappa_t = from_generator(target_preset.generator("kappa"), Q.mode)
    bare_kappa = next(iter(Q.kappa_element.terms))

    assignment: dict[str, OperadElement] = {Q.kappa_name: kappa_t}
    for name in Q.q0_names():
        gen = Q.presentation.generators[name]
        if gen.arity == 0 and gen.degree == 0:
            c = Q.d1.value(name).coefficient(bare_kappa)
            assignment[name] = c * alpha
        else:
            assignment[name] = zero(Q.mode)
    morphism = OperadMorphism(Q.presentation, target_preset, assignment)
    if check:
        report = verify_chain_map(morphism, max(g.arity for g in Q.presentation.generators.values()))
        if not report.ok:
            raise ConsistencyFailure(
                "terminal assignment is not a chain map:\n"
                + "\n".join(l.render() for l in report.lines if not l.ok)
            )
    return CurvMorphism(Q, target, morphism)
