"""Twisting morphisms, the adjoined-pair right adjoint, and the unit.

The explicit twisting morphisms send each structure generator to the sum
of all its decorations by the adjoined degree-0 generator (with 1/k!
weights in the symmetric flavour).  The right adjoint rebases the
completed coproduct so that the shifted curvature element becomes a
single formal generator, and the unit of the adjunction is constructed
inductively, one adjoined-count stage at a time, by inverting the pair's
differential on weight-one cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .curv import CurvObject, curv_object
from .derivations import Derivation, apply_derivation, bracket
from .errors import (
    ConsistencyFailure,
    ModeMismatch,
    NotClosed,
    NotInImage,
    TruncationExceeded,
)
from .linalg import RationalMatrix, solve_linear
from .morphisms import (
    OperadMorphism,
    TruncatedMorphism,
    apply_morphism,
    identity_morphism,
    verify_chain_map,
)
from .presets import (
    OperadPresentation,
    alpha_gen,
    coproduct_with_T,
    d_p_only,
    d_t_only,
    ell_gen,
    kappa_gen,
    mu_gen,
)
from .signs import factorial_inverse
from .trees import (
    NS,
    SYM,
    Generator,
    OperadElement,
    Tree,
    canonical,
    compose,
    from_generator,
    split_by_vertex_count,
    to_raw,
    truncate_by_count,
    zero,
)

_ALPHA = alpha_gen("alpha")
_KAPPA_T = kappa_gen("kappa_T")


# ---------------------------------------------------------------------------
# the explicit twisting morphisms


def _alpha_vectors(slots: int, total_max: int):
    """All nonnegative integer vectors of the given length with sum <= max."""
    if slots == 0:
        yield ()
        return
    for first in range(total_max + 1):
        for rest in _alpha_vectors(slots - 1, total_max - first):
            yield (first,) + rest


def eta_cAinf(n: int, alpha_precision: int) -> OperadElement:
    """Planar twisting morphism value on the arity-n generator.

    Arity 0: kappa_T plus every generator with all slots filled by alpha;
    arity n: the sum over all ways of interleaving up to `alpha_precision`
    alphas between the n retained slots.  All coefficients are +1.
    """
    if n < 0 or alpha_precision < 0:
        raise TruncationExceeded("arity and precision must be nonnegative")
    total = zero(NS)
    if n == 0:
        total = total + from_generator(_KAPPA_T, NS)
        for k in range(alpha_precision + 1):
            root = mu_gen(k)
            raw = (root, tuple((_ALPHA, ()) for _ in range(k)))
            _, t = canonical(raw)
            total = total + OperadElement(NS, {t: Fraction(1)})
        return total
    for vec in _alpha_vectors(n + 1, alpha_precision):
        k = sum(vec)
        root = mu_gen(n + k)
        children: list = []
        leaf = 1
        for j, count in enumerate(vec):
            children.extend((_ALPHA, ()) for _ in range(count))
            if j < n:
                children.append(leaf)
                leaf += 1
        _, t = canonical((root, tuple(children)))
        total = total + OperadElement(NS, {t: Fraction(1)})
    return total


def eta_cLinf(n: int, alpha_precision: int) -> OperadElement:
    """Symmetric twisting morphism value on the arity-n generator.

    Each stage k contributes the generator of arity k+n with k alpha slots,
    weighted by 1/k!.
    """
    if n < 0 or alpha_precision < 0:
        raise TruncationExceeded("arity and precision must be nonnegative")
    total = zero(SYM)
    if n == 0:
        total = total + from_generator(_KAPPA_T, SYM)
    for k in range(alpha_precision + 1):
        if n == 0 and k == 0:
            root = ell_gen(0)
            _, t = canonical((root, ()))
            total = total + OperadElement(SYM, {t: Fraction(1)})
            continue
        if n == 0:
            root = ell_gen(k)
            raw = (root, tuple((_ALPHA, ()) for _ in range(k)))
        else:
            root = ell_gen(k + n)
            raw = (
                root,
                tuple((_ALPHA, ()) for _ in range(k)) + tuple(range(1, n + 1)),
            )
        sign, t = canonical(raw)
        total = total + OperadElement(SYM, {t: factorial_inverse(k) * sign})
    return total


def eta_value(mode: str, n: int, alpha_precision: int) -> OperadElement:
    return eta_cAinf(n, alpha_precision) if mode == NS else eta_cLinf(n, alpha_precision)


def eta_morphism(
    P: OperadPresentation,
    PT: OperadPresentation,
    alpha_precision: int,
    max_arity: int | None = None,
) -> TruncatedMorphism:
    """The twisting morphism as a generator assignment P -> P v T.

    Assignments are produced for generators of arity <= max_arity (default:
    every generator whose image fits under the arity bound).
    """
    assignment: dict[str, OperadElement] = {}
    for name in sorted(P.generators):
        gen = P.generators[name]
        if max_arity is not None and gen.arity > max_arity:
            continue
        if gen.arity + alpha_precision > PT.arity_bound:
            continue
        assignment[name] = eta_value(P.mode, gen.arity, alpha_precision)
    return OperadMorphism(P, PT, assignment, alpha_precision)


def section_sigma(
    P: OperadPresentation, PT: OperadPresentation | None = None
) -> TruncatedMorphism:
    """The section of the counit: every generator goes to itself."""
    PT = PT or coproduct_with_T(P, 0)
    assignment = {name: PT.element(name) for name in P.generators}
    return OperadMorphism(P, PT, assignment, None)


def counit(
    P: OperadPresentation, PT: OperadPresentation | None = None
) -> OperadMorphism:
    """The counit: identity on P, zero on the adjoined pair."""
    PT = PT or coproduct_with_T(P, 0)
    assignment = {name: P.element(name) for name in P.generators}
    assignment[PT.alpha_name] = zero(P.mode)
    assignment[PT.kappa_t_name] = zero(P.mode)
    return OperadMorphism(PT, P, assignment, None)


# ---------------------------------------------------------------------------
# the right adjoint


def _fill_with_alpha(x: OperadElement, k: int) -> OperadElement:
    """Plug the adjoined degree-0 generator into the first k slots."""
    a = from_generator(_ALPHA, x.mode)
    for _ in range(k):
        x = compose(x, 1, a)
    return x


def curvature_series(
    structural: Mapping[int, OperadElement], mode: str, alpha_precision: int
) -> OperadElement:
    """Sum over k of the arity-k structural image with all slots alpha,
    1/k!-weighted in the symmetric flavour (without the kappa_T summand)."""
    total = zero(mode)
    for k in range(alpha_precision + 1):
        img = structural.get(k)
        if img is None:
            raise TruncationExceeded(
                f"structural image of the arity-{k} generator is needed at this precision"
            )
        if img.is_zero:
            continue
        coeff = factorial_inverse(k) if mode == SYM else Fraction(1)
        total = total + coeff * _fill_with_alpha(img, k)
    return total


@dataclass(frozen=True)
class RBundle:
    """The rebased right-adjoint object together with its two basis changes."""

    curv: CurvObject
    coproduct: OperadPresentation
    to_old: OperadMorphism
    to_new: OperadMorphism
    distinguished_old: OperadElement


def structural_images(f: OperadMorphism, alpha_precision: int) -> dict[int, OperadElement]:
    """Images of the curved-preset generators under f, indexed by arity."""
    prefix = "mu_" if f.source.mode == NS else "ell_"
    out = {}
    for k in range(alpha_precision + 1):
        name = f"{prefix}{k}"
        if name not in f.source.generators:
            raise TruncationExceeded(
                f"structural morphism source lacks {name}; raise its arity bound"
            )
        out[k] = f.value(name)
    return out


def build_r_object(
    f: OperadMorphism, alpha_precision: int, *, validate_bound: int | None = 2
) -> RBundle:
    """Apply the right adjoint to a structural morphism into P.

    Returns the quadruple on P v T rebased so that the distinguished element
    (kappa_T plus the alpha-decorated curvature series) is a single formal
    generator, plus the mutually inverse basis-change morphisms.
    """
    P = f.target
    mode = P.mode
    PT = coproduct_with_T(P, alpha_precision)
    # The adjoined differential lowers the alpha count by one, so the series
    # must be known one order deeper to make d(kappa_hat) exact at the
    # working precision.
    images = structural_images(f, alpha_precision + 1)
    series = curvature_series(images, mode, alpha_precision)
    series_plus = curvature_series(images, mode, alpha_precision + 1)
    kappa_hat = kappa_gen("kappa_hat")
    kappa_t_elem = from_generator(PT.generator(PT.kappa_t_name), mode)
    distinguished_old = kappa_t_elem + series

    gens = [g for g in P.generators.values()] + [alpha_gen(PT.alpha_name), kappa_hat]
    from .presets import _make_presentation

    # Assemble the rebased presentation with a placeholder differential so
    # that the basis-change morphisms can be written down first.
    def make(values: dict[str, OperadElement], truncated: set[str]) -> OperadPresentation:
        return _make_presentation(
            mode,
            gens,
            values,
            truncated,
            P.arity_bound,
            kappa_name="kappa_hat",
            alpha_name=PT.alpha_name,
            alpha_bound=alpha_precision,
        )

    R0 = make({}, set())
    to_old = OperadMorphism(
        R0,
        PT,
        {
            **{name: PT.element(name) for name in P.generators},
            PT.alpha_name: PT.element(PT.alpha_name),
            "kappa_hat": distinguished_old,
        },
        alpha_precision,
    )
    to_new = OperadMorphism(
        PT,
        R0,
        {
            **{name: R0.element(name) for name in P.generators},
            PT.alpha_name: R0.element(PT.alpha_name),
            PT.kappa_t_name: from_generator(kappa_hat, mode) - series,
        },
        alpha_precision,
    )

    values: dict[str, OperadElement] = dict(d_p_only(P).values)
    values[PT.alpha_name] = from_generator(kappa_hat, mode) - series
    d_old_kappa_hat = apply_derivation(
        PT.differential, kappa_t_elem + series_plus, modulo_truncation=True
    )
    d_old_kappa_hat = truncate_by_count(d_old_kappa_hat, PT.alpha_name, alpha_precision)
    values["kappa_hat"] = apply_morphism(to_new, d_old_kappa_hat)
    R = make(values, set(P.differential.truncated))

    to_old = OperadMorphism(R, PT, to_old.assignment, alpha_precision)
    to_new = OperadMorphism(PT, R, to_new.assignment, alpha_precision)
    curv = curv_object(R)
    if validate_bound is not None:
        from .curv import validate_curv

        report = validate_curv(curv, validate_bound)
        if not report.ok:
            raise ConsistencyFailure(
                "right-adjoint object fails validation:\n"
                + "\n".join(l.render() for l in report.lines if not l.ok)
            )
    return RBundle(curv, PT, to_old, to_new, distinguished_old)


def apply_R(f: OperadMorphism, alpha_precision: int) -> CurvObject:
    """The right adjoint on objects (see build_r_object for the full bundle)."""
    return build_r_object(f, alpha_precision).curv


# ---------------------------------------------------------------------------
# inverting the adjoined differential


def _substitute_generator(t: Tree, path: Sequence[int], replacement: Generator):
    def rebuild(node: Tree, depth: int):
        kids = []
        for idx, c in enumerate(node.children):
            on_path = depth < len(path) and idx == path[depth]
            if isinstance(c, int):
                kids.append(c)
            elif on_path and depth + 1 == len(path):
                kids.append((replacement, ()))
            elif on_path:
                kids.append(rebuild(c, depth + 1))
            else:
                kids.append(to_raw(c))
        return (node.gen, tuple(kids))

    if not path:
        # The whole term is the bare distinguished vertex.
        return (replacement, ())
    return rebuild(t, 0)


def _kappa_paths(t: Tree, name: str) -> list[tuple[int, ...]]:
    from .trees import iter_vertices

    return [p for p, g, _ in iter_vertices(t) if g.name == name]


def solve_dT(
    lam: OperadElement,
    PT: OperadPresentation,
    *,
    reverse_order: bool = False,
) -> OperadElement:
    """Invert the adjoined-pair differential on a closed element of
    distinguished-weight at most one.

    Weight zero with positive adjoined count certifies lam = 0 (a nonzero
    input raises NotInImage).  Weight one returns the unique preimage: in
    the symmetric flavour by the closed per-term formula with denominator
    (number of alphas + 1), in the planar flavour by an exact triangular
    solve over the candidates obtained by relabelling the distinguished
    vertex.
    """
    alpha_name, kappa_name = PT.alpha_name, PT.kappa_t_name
    if alpha_name is None or kappa_name is None:
        raise ModeMismatch("presentation has no adjoined pair")
    alpha = PT.generators[alpha_name]
    dT = d_t_only(PT)
    if lam.is_zero:
        return lam
    if not apply_derivation(dT, lam).is_zero:
        raise NotClosed("input is not closed under the adjoined differential")
    weights = {t.vertex_count(kappa_name) for t in lam.terms}
    if weights == {0}:
        raise NotInImage("a nonzero weight-zero cycle of positive filtration")
    if weights != {1}:
        raise NotInImage(f"need weight-one input, got weights {sorted(weights)}")

    items = lam.sorted_terms()
    if reverse_order:
        items = list(reversed(items))

    if PT.mode == SYM:
        total = zero(SYM)
        top_sign = -1 if (lam.degree + 1) % 2 else 1
        for t, c in items:
            path = _kappa_paths(t, kappa_name)[0]
            k = t.vertex_count(alpha_name)
            post = _degree_after_vertex(t, path)
            sign, tt = canonical(_substitute_generator(t, path, alpha))
            if tt is None:
                raise NotInImage("candidate term vanishes after substitution")
            coeff = c * sign * Fraction(top_sign) / (k + 1)
            if post % 2:
                coeff = -coeff
            total = total + OperadElement(SYM, {tt: coeff})
        if apply_derivation(dT, total) != lam:
            raise NotInImage("closed formula does not invert the input")
        return total

    # planar flavour: exact solve over the relabelled candidates
    candidates: list[Tree] = []
    seen = set()
    for t, _ in items:
        path = _kappa_paths(t, kappa_name)[0]
        sign, tt = canonical(_substitute_generator(t, path, alpha))
        if tt is not None and tt not in seen:
            seen.add(tt)
            candidates.append(tt)
    images = [
        apply_derivation(dT, OperadElement(NS, {u: Fraction(1)})) for u in candidates
    ]
    row_trees: list[Tree] = sorted(
        {t for img in images for t in img.terms} | {t for t, _ in items},
        key=lambda t: t.key,
    )
    row_index = {t: i for i, t in enumerate(row_trees)}
    M = RationalMatrix(len(row_trees), len(candidates))
    for j, img in enumerate(images):
        for t, c in img.terms.items():
            M[row_index[t], j] = c
    b = [Fraction(0)] * len(row_trees)
    for t, c in items:
        b[row_index[t]] = c
    x = solve_linear(M, b)
    if x is None:
        raise NotInImage("input is not a boundary of the adjoined differential")
    total = OperadElement(NS, {u: c for u, c in zip(candidates, x) if c})
    if apply_derivation(dT, total) != lam:
        raise NotInImage("solved candidate does not reproduce the input")
    return total


def _degree_after_vertex(t: Tree, path: Sequence[int]) -> int:
    """Total degree of the vertices strictly after `path` in depth-first order."""
    from .trees import iter_vertices

    seen = False
    acc = 0
    target = tuple(path)
    for p, g, _ in iter_vertices(t):
        if seen:
            acc += g.degree
        elif p == target:
            seen = True
    if not seen:
        raise NotInImage("vertex path not found")
    return acc


# ---------------------------------------------------------------------------
# the unit of the adjunction


def construct_unit(
    Q: CurvObject,
    f: OperadMorphism,
    alpha_precision: int,
    *,
    structural: Mapping[int, OperadElement] | None = None,
    arity_bound: int | None = None,
    reverse_order: bool = False,
    alpha_name: str = "alpha",
    kappa_t_name: str = "kappa_T",
) -> TruncatedMorphism:
    """Build the unit morphism into the right adjoint applied to f's target.

    Stage k defines the (k+1)-alpha piece on each generator by inverting
    the adjoined differential on the defect of the stage-k chain property.
    `structural` supplies the arity-indexed images of the curved preset in
    the target (default: computed from f composed with the initial morphism
    of Q); `arity_bound` restricts which generators receive full-precision
    values (default: everything the truncation data allows).
    """
    if f.source is not Q.presentation and f.source.generators.keys() != Q.presentation.generators.keys():
        raise ConsistencyFailure("f must be defined on Q's presentation")
    P = f.target
    mode = P.mode
    PT = coproduct_with_T(P, alpha_precision, alpha_name, kappa_t_name)

    if structural is None:
        from .curv import construct_initial_morphism

        init = construct_initial_morphism(Q, alpha_precision, validate=False)
        structural = {
            k: apply_morphism(f, init.nus[k]) for k in range(alpha_precision + 1)
        }
    series = curvature_series(structural, mode, alpha_precision)
    kappa_image = from_generator(PT.generator(PT.kappa_t_name), mode) + series

    q0 = [n for n in Q.presentation.generators if n != Q.kappa_name]
    q0.sort(key=lambda n: (Q.presentation.generators[n].arity, n))
    if reverse_order:
        q0 = list(reversed(q0))

    max_arity = max((Q.presentation.generators[n].arity for n in q0), default=0)
    cap = arity_bound if arity_bound is not None else max_arity

    assignment: dict[str, OperadElement] = {Q.kappa_name: kappa_image}
    max_piece: dict[str, int] = {Q.kappa_name: alpha_precision}
    for name in q0:
        assignment[name] = apply_morphism(f, Q.presentation.element(name))
        max_piece[name] = 0

    d_q = Q.presentation.differential
    d_p = d_p_only(PT)
    dT = d_t_only(PT)

    for k in range(alpha_precision):
        stage_cap = cap + (alpha_precision - 1 - k)
        phi = OperadMorphism(Q.presentation, PT, dict(assignment), alpha_precision)
        for name in q0:
            gen = Q.presentation.generators[name]
            if gen.arity > stage_cap or max_piece[name] < k:
                continue
            if name in d_q.truncated:
                max_piece[name] = k
                continue
            d_value = d_q.value(name)
            needed = {g.name for g in d_value.generators()}
            if any(max_piece.get(g, -1) < k for g in needed):
                max_piece[name] = k
                continue
            lam = split_by_vertex_count(
                apply_morphism(phi, d_value), PT.alpha_name
            ).get(k, zero(mode)) - split_by_vertex_count(
                apply_derivation(d_p, assignment[name], modulo_truncation=True),
                PT.alpha_name,
            ).get(k, zero(mode))
            w = split_by_vertex_count(lam, PT.kappa_t_name)
            if any(weight > 1 for weight in w):
                raise ConsistencyFailure(
                    f"stage-{k} defect of {name} has weight above one"
                )
            w0 = w.get(0, zero(mode))
            if not w0.is_zero:
                raise NotInImage(
                    f"stage-{k} defect of {name} has a nonzero weight-zero part"
                )
            rho = solve_dT(w.get(1, zero(mode)), PT, reverse_order=reverse_order)
            assignment[name] = assignment[name] + rho
            max_piece[name] = k + 1

    short = [n for n in q0 if Q.presentation.generators[n].arity <= cap and max_piece[n] < alpha_precision]
    if short:
        raise TruncationExceeded(
            f"could not reach precision {alpha_precision} for {short}; "  # noqa: ISC003
            + "raise the source arity bound"
        )
    final = {Q.kappa_name: kappa_image}
    for name in q0:
        if Q.presentation.generators[name].arity <= cap:
            final[name] = assignment[name]
    return OperadMorphism(Q.presentation, PT, final, alpha_precision)


__all__ = [
    "eta_cAinf",
    "eta_cLinf",
    "eta_value",
    "eta_morphism",
    "section_sigma",
    "counit",
    "apply_R",
    "build_r_object",
    "RBundle",
    "structural_images",
    "curvature_series",
    "solve_dT",
    "construct_unit",
    "verify_chain_map",
    "TruncatedMorphism",
]
