"""Command-line front end.

Subcommands: verify-presets, verify-eta, construct-unit, twist, homology,
parse.  Every check prints its estimated combinatorial size first and
refuses (exit 2) without --force when the estimate exceeds 10^7 terms.
Exit status 0 means every asserted identity was exactly zero; 1 signals an
identity failure; 2 a configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .curv import construct_initial_morphism, curv_object, validate_curv
from .derivations import check_square_zero
from .errors import CurvopsError
from .grammar import parse_element, render_element
from .homology import bracket_homology_report, dt_homology_report
from .manifests import curv_from_text, morphism_to_text
from .morphisms import OperadMorphism, verify_chain_map
from .presets import PRESET_NAMES, build_preset, coproduct_with_T
from .trees import NS, SYM
from .twisting import counit, curvature_series, eta_morphism, construct_unit

TERM_LIMIT = 10_000_000


class ConfigError(Exception):
    pass


def _too_big(estimate: int, force: bool, out) -> bool:
    print(f"estimated term count: {estimate}", file=out)
    if estimate > TERM_LIMIT and not force:
        print(
            f"refusing: estimate exceeds {TERM_LIMIT} (pass --force to override)",
            file=out,
        )
        return True
    return False


def _preset_terms(name: str, arity: int) -> int:
    # Rough per-generator differential sizes; symmetric flavours carry the
    # shuffle counts.
    total = 0
    symmetric = name.startswith("L") or name.startswith("cL")
    for n in range(0, arity + 1):
        if symmetric:
            total += sum(math.comb(n, p) for p in range(n + 1))
        else:
            total += (n + 1) * (n + 2) // 2
    return total


def cmd_verify_presets(args, out) -> int:
    if args.preset not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {args.preset!r}; choose from {PRESET_NAMES}")
    if args.preset == "T":
        preset = build_preset("T", args.arity)
        report = check_square_zero(preset.differential, args.arity)
        print(report.render(), file=out)
        return 0 if report.ok else 1
    est = _preset_terms(args.preset, args.arity + 2) ** 2
    if _too_big(est, args.force, out):
        return 2
    preset = build_preset(args.preset, args.arity + 2)
    names = [n for n, g in preset.generators.items() if g.arity <= args.arity]
    report = check_square_zero(preset.differential, args.arity, generators=sorted(names))
    print(report.render(), file=out)
    return 0 if report.ok else 1


def cmd_verify_eta(args, out) -> int:
    mode = NS if args.mode == "ns" else SYM
    bound = args.arity + args.alpha + 2
    est = (_preset_terms("cAinf" if mode == NS else "cLinf", bound) * (args.alpha + 2)) ** 2
    if _too_big(est, args.force, out):
        return 2
    P = build_preset("cAinf" if mode == NS else "cLinf", bound)
    PT = coproduct_with_T(P, args.alpha + 1)
    m = eta_morphism(P, PT, args.alpha + 1, max_arity=args.arity + 1)
    report = verify_chain_map(m, args.arity, alpha_compare=args.alpha)
    print(report.render(), file=out)
    return 0 if report.ok else 1


def cmd_construct_unit(args, out) -> int:
    text = Path(args.manifest).read_text()
    Q = curv_from_text(text)
    report = validate_curv(Q, args.arity + 1)
    if not report.ok:
        print(report.render(), file=out)
        print("manifest fails the quadruple conditions", file=out)
        return 1
    alpha_name, kappa_t_name = "alpha", "kappa_T"
    if alpha_name in Q.presentation.generators or kappa_t_name in Q.presentation.generators:
        alpha_name, kappa_t_name = "alpha_T", "kappa_TT"
    init = construct_initial_morphism(Q, args.alpha + 1, validate=False)
    structural = {k: init.nus[k] for k in range(args.alpha + 2)}
    f = OperadMorphism(
        Q.presentation,
        Q.presentation,
        {name: Q.presentation.element(name) for name in Q.presentation.generators},
    )
    phi = construct_unit(
        Q,
        f,
        args.alpha,
        structural=structural,
        arity_bound=args.arity,
        alpha_name=alpha_name,
        kappa_t_name=kappa_t_name,
    )
    text_out = morphism_to_text(phi)
    if args.out:
        Path(args.out).write_text(text_out)
        print(f"wrote {args.out}", file=out)
    else:
        print(text_out, end="", file=out)
    return 0


def cmd_twist(args, out) -> int:
    from .algebras import (
        check_structure,
        curvature_of,
        structure_from_json,
        structure_to_json,
        twist_algebra,
    )

    structure = structure_from_json(Path(args.manifest).read_text())
    if args.element not in structure.elements:
        raise ConfigError(f"no element named {args.element!r} in the manifest")
    a = structure.elements[args.element]
    if a.degree != 0:
        raise ConfigError("twisting elements must have degree 0")
    curv = curvature_of(structure, a)
    print(f"curvature is zero: {curv.is_zero}", file=out)
    twisted = twist_algebra(structure, a)
    report = check_structure(twisted, max(structure.max_arity + 1, 2))
    if not report.ok:
        print(report.render(), file=out)
        return 1
    text_out = structure_to_json(twisted)
    if args.out:
        Path(args.out).write_text(text_out)
        print(f"wrote {args.out}", file=out)
    else:
        print(text_out, end="", file=out)
    return 0


def cmd_homology(args, out) -> int:
    mode = NS if args.mode == "ns" else SYM
    if args.lemma == "2.6":
        est = (4 ** (args.arity + args.weight)) * math.factorial(max(args.arity, 1))
        if _too_big(est, args.force, out):
            return 2
        report = bracket_homology_report(mode, args.arity, args.weight)
    elif args.lemma == "4.2":
        est = (4 ** (args.arity + args.alpha + 2)) * math.factorial(max(args.arity, 1)) * 40
        if _too_big(est, args.force, out):
            return 2
        report = dt_homology_report(mode, args.arity, args.alpha)
    else:
        raise ConfigError("lemma must be one of: 2.6, 4.2")
    print(report.render(), file=out)
    return 0 if report.ok else 1


def cmd_parse(args, out) -> int:
    mode = NS if args.mode == "ns" else SYM
    if args.preset:
        P = build_preset(args.preset, args.arity)
        if args.with_t:
            P = coproduct_with_T(P, args.alpha)
        gens = P.generators
        if P.mode != mode:
            raise ConfigError(f"preset {args.preset} lives in mode {P.mode}")
    else:
        raise ConfigError("parse needs --preset to resolve generator names")
    element = parse_element(args.expression, gens, mode)
    print(render_element(element), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvops",
        description="Exact calculus for curved homotopy operads and twisting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-presets", help="square-zero checks for a named presentation")
    p.add_argument("--preset", required=True)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("verify-eta", help="chain-map check for the twisting morphism")
    p.add_argument("--mode", choices=["ns", "sym"], default="ns")
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--alpha", type=int, default=3)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("construct-unit", help="build the adjunction unit from a quadruple manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--alpha", type=int, default=3)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("twist", help="twist an algebra manifest by a named element")
    p.add_argument("--manifest", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("homology", help="exact homology window checks")
    p.add_argument("--lemma", required=True)
    p.add_argument("--mode", choices=["ns", "sym"], default="ns")
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--weight", type=int, default=2)
    p.add_argument("--alpha", type=int, default=3)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("parse", help="round-trip an expression through the canonical form")
    p.add_argument("--mode", choices=["ns", "sym"], default="ns")
    p.add_argument("--preset", required=False)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--alpha", type=int, default=3)
    p.add_argument("--with-t", action="store_true")
    p.add_argument("expression")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    handlers = {
        "verify-presets": cmd_verify_presets,
        "verify-eta": cmd_verify_eta,
        "construct-unit": cmd_construct_unit,
        "twist": cmd_twist,
        "homology": cmd_homology,
        "parse": cmd_parse,
    }
    try:
        return handlers[args.command](args, sys.stdout)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CurvopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
