"""The named operad presentations and the coproduct with the acyclic pair.

A presentation records a generator table, a differential given on
generators, the arity bound it was built at, and (for coproducts) the
adjoined degree-0/degree-(-1) pair together with its truncation order.
Differential values that would need generators above the arity bound are
cut off and flagged, never dropped silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .derivations import Derivation
from .errors import NameCollision, PositionError, UnknownGenerator
from .signs import Permutation, enumerate_shuffles
from .trees import (
    NS,
    SYM,
    Generator,
    OperadElement,
    act,
    compose,
    from_generator,
    zero,
)

PRESET_NAMES = ("Ainf", "AinfPlus", "cAinf", "Linf", "LinfPlus", "cLinf", "T")


def mu_gen(n: int) -> Generator:
    return Generator(f"mu_{n}", n, -1)


def ell_gen(n: int) -> Generator:
    return Generator(f"ell_{n}", n, -1, invariant=True)


def alpha_gen(name: str = "alpha") -> Generator:
    return Generator(name, 0, 0)


def kappa_gen(name: str = "kappa") -> Generator:
    return Generator(name, 0, -1)


@dataclass(frozen=True)
class OperadPresentation:
    """A free operad presentation with differential, bounds and marked roles."""

    mode: str
    generators: Mapping[str, Generator]
    differential: Derivation
    arity_bound: int
    kappa_name: str | None = None
    alpha_name: str | None = None
    kappa_t_name: str | None = None
    alpha_bound: int | None = None

    def generator(self, name: str) -> Generator:
        if name not in self.generators:
            raise UnknownGenerator(f"generator {name!r} not in presentation")
        return self.generators[name]

    def element(self, name: str) -> OperadElement:
        return from_generator(self.generator(name), self.mode)

    def with_differential(self, d: Derivation) -> "OperadPresentation":
        return replace(self, differential=d)


def _make_presentation(
    mode: str,
    gens: list[Generator],
    values: dict[str, OperadElement],
    truncated: set[str],
    arity_bound: int,
    **roles,
) -> OperadPresentation:
    table: dict[str, Generator] = {}
    for g in gens:
        if g.name in table:
            raise NameCollision(f"duplicate generator name {g.name!r}")
        table[g.name] = g
    diff = Derivation(mode, table, values, frozenset(truncated))
    return OperadPresentation(mode, table, diff, arity_bound, **roles)


def _d_mu(n: int, q_min: int, outer_min: int, arity_bound: int) -> tuple[OperadElement, bool]:
    """-sum over p+q+r=n of mu_{p+1+r} o_{p+1} mu_q, with the given lower
    bounds on the inner arity q and the outer arity p+1+r."""
    total = zero(NS)
    truncated = False
    for p in range(0, n + 1):
        for q in range(0, n - p + 1):
            r = n - p - q
            outer = p + 1 + r
            if q < q_min or outer < outer_min:
                continue
            if outer > arity_bound or q > arity_bound:
                truncated = True
                continue
            total = total - compose(from_generator(mu_gen(outer), NS), p + 1, from_generator(mu_gen(q), NS))
    return total, truncated


def _d_ell(n: int, q_min: int, p_plus1_min: int, arity_bound: int) -> tuple[OperadElement, bool]:
    """-sum over p+q=n and block shuffles of (ell_{p+1} o_1 ell_q) acted on.

    The inner generator sits on leaves 1..q, so the label redistributions
    are the shuffles monotone on blocks of sizes (q, p).
    """
    total = zero(SYM)
    truncated = False
    for p in range(0, n + 1):
        q = n - p
        if q < q_min or p + 1 < p_plus1_min:
            continue
        if p + 1 > arity_bound or q > arity_bound:
            truncated = True
            continue
        base = compose(from_generator(ell_gen(p + 1), SYM), 1, from_generator(ell_gen(q), SYM))
        for tau in enumerate_shuffles(q, p):
            total = total - act(tau, base)
    return total, truncated


def build_preset(name: str, arity_bound: int, mode: str | None = None) -> OperadPresentation:
    """Construct one of the named presentations at the given arity bound.

    All structure generators have degree -1; the adjoined pair of `T` has
    degrees 0 and -1 with the degree-0 generator mapping to the other.
    """
    if arity_bound < 0:
        raise PositionError("arity bound must be nonnegative")
    if name == "T":
        a, k = alpha_gen(), kappa_gen()
        values = {a.name: from_generator(k, mode or NS)}
        return _make_presentation(
            mode or NS, [a, k], values, set(), arity_bound, kappa_name=k.name
        )

    if name in ("Ainf", "AinfPlus", "cAinf"):
        n_min = {"Ainf": 2, "AinfPlus": 1, "cAinf": 0}[name]
        q_min = n_min
        gens = [mu_gen(n) for n in range(n_min, arity_bound + 1)]
        values: dict[str, OperadElement] = {}
        truncated: set[str] = set()
        for n in range(n_min, arity_bound + 1):
            val, cut = _d_mu(n, q_min, max(n_min, 1), arity_bound)
            values[f"mu_{n}"] = val
            if cut:
                truncated.add(f"mu_{n}")
        kappa = "mu_0" if name == "cAinf" else None
        return _make_presentation(NS, gens, values, truncated, arity_bound, kappa_name=kappa)

    if name in ("Linf", "LinfPlus", "cLinf"):
        n_min = {"Linf": 2, "LinfPlus": 1, "cLinf": 0}[name]
        gens = [ell_gen(n) for n in range(n_min, arity_bound + 1)]
        values = {}
        truncated = set()
        for n in range(n_min, arity_bound + 1):
            val, cut = _d_ell(n, n_min, max(n_min, 1), arity_bound)
            values[f"ell_{n}"] = val
            if cut:
                truncated.add(f"ell_{n}")
        kappa = "ell_0" if name == "cLinf" else None
        return _make_presentation(SYM, gens, values, truncated, arity_bound, kappa_name=kappa)

    raise UnknownGenerator(f"unknown preset {name!r}; choose one of {PRESET_NAMES}")


def free_presentation(
    mode: str, gens: list[Generator], values: dict[str, OperadElement] | None = None,
    arity_bound: int = 0, **roles,
) -> OperadPresentation:
    """A user-assembled presentation (differential defaults to zero)."""
    bound = max([arity_bound] + [g.arity for g in gens]) if gens else arity_bound
    return _make_presentation(mode, list(gens), dict(values or {}), set(), bound, **roles)


def coproduct_with_T(
    P: OperadPresentation,
    alpha_trunc: int,
    alpha_name: str = "alpha",
    kappa_t_name: str = "kappa_T",
) -> OperadPresentation:
    """The presentation P v T: adjoin the acyclic degree-0/degree-(-1) pair.

    The differential is d_P + d_T with d_T(alpha) = kappa_T.  Elements of
    the result are meant to be used modulo alpha-count > alpha_trunc; the
    bound is recorded on the presentation.
    """
    if alpha_name in P.generators or kappa_t_name in P.generators:
        raise NameCollision(
            f"presentation already has a generator named {alpha_name!r} or {kappa_t_name!r}"
        )
    a, k = alpha_gen(alpha_name), kappa_gen(kappa_t_name)
    gens = list(P.generators.values()) + [a, k]
    values = dict(P.differential.values)
    values[alpha_name] = from_generator(k, P.mode)
    return _make_presentation(
        P.mode,
        gens,
        values,
        set(P.differential.truncated),
        P.arity_bound,
        kappa_name=P.kappa_name,
        alpha_name=alpha_name,
        kappa_t_name=kappa_t_name,
        alpha_bound=alpha_trunc,
    )


def d_t_only(P: OperadPresentation) -> Derivation:
    """The part of the differential sending alpha to kappa_T and all else to 0."""
    if P.alpha_name is None or P.kappa_t_name is None:
        raise UnknownGenerator("presentation has no adjoined pair")
    return Derivation(
        P.mode,
        P.generators,
        {P.alpha_name: from_generator(P.generators[P.kappa_t_name], P.mode)},
    )


def d_p_only(P: OperadPresentation) -> Derivation:
    """The differential of the P-part, zero on the adjoined pair."""
    values = {
        name: val
        for name, val in P.differential.values.items()
        if name != P.alpha_name
    }
    return Derivation(P.mode, P.generators, values, P.differential.truncated)
