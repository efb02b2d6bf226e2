"""Homology window checks for the bracket and adjoined-pair differentials.

The bracket differential acts on the free planar operad on one binary
degree-(-1) generator adjoined with the distinguished arity-0 generator;
the adjoined-pair differential acts on the coproduct of the free binary
operad with the acyclic pair.  Both complexes are checked on exhaustively
enumerated slices by exact rank computations; slices beyond the dense
threshold use the sparse block elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

from .derivations import Report, apply_derivation, bracket
from .linalg import (
    BasisSlice,
    RationalMatrix,
    enumerate_slice,
    homology_dimension,
    kernel_rank,
    matrix_of,
    sparse_matrix_of,
)
from .presets import coproduct_with_T, d_t_only, free_presentation
from .trees import NS, SYM, Generator, from_generator

_DENSE_LIMIT = 600


def binary_generator(mode: str) -> Generator:
    return Generator("b", 2, -1, invariant=(mode == SYM))


@dataclass(frozen=True)
class SliceCheck:
    label: str
    dims: tuple[int, int, int]
    homology: int


def _rank(map_fn, domain: BasisSlice, codomain: BasisSlice) -> int:
    if domain.dim == 0:
        return 0
    if max(domain.dim, codomain.dim) <= _DENSE_LIMIT:
        rank, _ = kernel_rank(matrix_of(map_fn, domain, codomain))
        return rank
    return sparse_matrix_of(map_fn, domain, codomain).rank()


def bracket_homology_report(mode: str, max_arity: int, max_weight: int) -> Report:
    """Homology of bracketing with the distinguished generator vanishes on
    every positive-arity slice of the window."""
    b = binary_generator(mode)
    kappa = Generator("kappa", 0, -1)
    gens = [b, kappa]
    kappa_elem = from_generator(kappa, mode)

    def slice_at(n: int, w: int) -> BasisSlice | None:
        v = n + w - 1
        if n < 0 or w < 0 or v < 0:
            return None
        return enumerate_slice(mode, gens, n, {"b": v, "kappa": w})

    def d(x):
        return bracket(x, kappa_elem)

    report = Report()
    for n in range(1, max_arity + 1):
        for w in range(0, max_weight + 1):
            mid = slice_at(n, w)
            up = slice_at(n + 1, w - 1)
            down = slice_at(n - 1, w + 1)
            dim_mid = mid.dim if mid else 0
            rank_in = _rank(d, up, mid) if (up and mid) else 0
            if mid and down and mid.dim:
                rank_out = _rank(d, mid, down)
            else:
                rank_out = 0
            h = (dim_mid - rank_out) - rank_in
            report.add_flag(f"bracket.arity{n}.weight{w} H={h}", h == 0)
    return report


def dt_homology_report(mode: str, max_arity: int, max_alpha: int) -> Report:
    """Weight-0 kernel triviality (positive filtration) and weight-1
    homology vanishing for the adjoined-pair differential."""
    b = binary_generator(mode)
    P = free_presentation(mode, [b])
    PT = coproduct_with_T(P, max_alpha + 1)
    dT = d_t_only(PT)
    gens = list(PT.generators.values())

    def slice_at(n: int, a: int, w: int) -> BasisSlice | None:
        v = n + a + w - 1
        if a < 0 or w < 0 or v < 0:
            return None
        return enumerate_slice(mode, gens, n, {"b": v, "alpha": a, "kappa_T": w})

    def d(x):
        return apply_derivation(dT, x)

    report = Report()
    for n in range(1, max_arity + 1):
        for a in range(1, max_alpha + 1):
            dom = slice_at(n, a, 0)
            cod = slice_at(n, a - 1, 1)
            if dom is None or dom.dim == 0:
                report.add_flag(f"dT.kernel0.arity{n}.alpha{a} dim=0", True)
                continue
            rank = _rank(d, dom, cod)
            nullity = dom.dim - rank
            report.add_flag(
                f"dT.kernel0.arity{n}.alpha{a} nullity={nullity}", nullity == 0
            )
    for n in range(1, max_arity + 1):
        for a in range(0, max_alpha + 1):
            mid = slice_at(n, a, 1)
            up = slice_at(n, a + 1, 0)
            down = slice_at(n, a - 1, 2)
            dim_mid = mid.dim if mid else 0
            rank_in = _rank(d, up, mid) if (up and mid) else 0
            if mid and down and mid.dim:
                rank_out = _rank(d, mid, down)
            else:
                rank_out = 0
            h = (dim_mid - rank_out) - rank_in
            report.add_flag(f"dT.weight1.arity{n}.alpha{a} H={h}", h == 0)
    return report
