"""Plain-text manifests for presentations, quadruples, and morphisms.

Presentation manifests list the generator table and the differential in
the shared expression grammar; quadruple manifests add a `kappa =` line
and give the differential as separate `d0` / `d1` blocks.  Morphism
manifests carry a `precision =` header and one assignment per line.
All writers are deterministic.
"""

from __future__ import annotations

from fractions import Fraction

from .curv import CurvObject, curv_object
from .derivations import Derivation
from .errors import ParseError
from .grammar import parse_element, render_element
from .morphisms import OperadMorphism
from .presets import OperadPresentation, _make_presentation
from .trees import Generator, OperadElement, zero


def presentation_to_text(P: OperadPresentation, *, split_kappa: bool = False) -> str:
    """Serialize a presentation; with split_kappa, write d0/d1 blocks."""
    lines = [f"mode = {P.mode}", f"arity_bound = {P.arity_bound}"]
    if P.alpha_bound is not None:
        lines.append(f"alpha_bound = {P.alpha_bound}")
    if P.alpha_name is not None:
        lines.append(f"alpha = {P.alpha_name}")
    if P.kappa_t_name is not None:
        lines.append(f"kappa_t = {P.kappa_t_name}")
    if P.kappa_name is not None:
        lines.append(f"kappa = {P.kappa_name}")
    for name in sorted(P.generators):
        g = P.generators[name]
        inv = " invariant" if g.invariant else ""
        lines.append(f"gen {g.name} arity={g.arity} degree={g.degree}{inv}")
    if split_kappa:
        if P.kappa_name is None:
            raise ParseError("split differential output needs a kappa generator")
        from .derivations import split_by_weight

        split = split_by_weight(P.differential, P.kappa_name)
        for tag, deriv in (("d0", split.d0), ("d1", split.d1)):
            for name in sorted(P.generators):
                value = deriv.values.get(name)
                if value is not None and not value.is_zero:
                    flag = " truncated" if name in P.differential.truncated else ""
                    lines.append(f"{tag} {name}{flag} = {render_element(value)}")
    else:
        for name in sorted(P.generators):
            value = P.differential.values.get(name)
            if value is not None and not value.is_zero:
                flag = " truncated" if name in P.differential.truncated else ""
                lines.append(f"d {name}{flag} = {render_element(value)}")
    return "\n".join(lines) + "\n"


def curv_to_text(Q: CurvObject) -> str:
    return presentation_to_text(Q.presentation, split_kappa=True)


def _parse_gen_line(rest: str) -> Generator:
    parts = rest.split()
    if not parts:
        raise ParseError("empty generator line")
    name = parts[0]
    arity = degree = None
    invariant = False
    for tok in parts[1:]:
        if tok == "invariant":
            invariant = True
        elif tok.startswith("arity="):
            arity = int(tok[len("arity="):])
        elif tok.startswith("degree="):
            degree = int(tok[len("degree="):])
        else:
            raise ParseError(f"bad generator attribute {tok!r}")
    if arity is None or degree is None:
        raise ParseError(f"generator {name} needs arity= and degree=")
    return Generator(name, arity, degree, invariant)


def presentation_from_text(text: str) -> OperadPresentation:
    """Parse a presentation manifest (accepts both d and d0/d1 blocks)."""
    mode = None
    arity_bound = None
    alpha_bound = None
    roles: dict[str, str] = {}
    gens: list[Generator] = []
    d_lines: list[tuple[str, str, bool, str]] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and line.split()[0] in ("mode", "arity_bound", "alpha_bound", "alpha", "kappa_t", "kappa"):
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "mode":
                mode = value
            elif key == "arity_bound":
                arity_bound = int(value)
            elif key == "alpha_bound":
                alpha_bound = int(value)
            else:
                roles[key] = value
            continue
        head, _, rest = line.partition(" ")
        if head == "gen":
            gens.append(_parse_gen_line(rest.strip()))
        elif head in ("d", "d0", "d1"):
            name_part, _, expr = rest.partition("=")
            tokens = name_part.split()
            if not tokens or not expr:
                raise ParseError(f"line {lineno}: bad differential line")
            name = tokens[0]
            truncated = "truncated" in tokens[1:]
            d_lines.append((head, name, truncated, expr.strip()))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    if mode is None:
        raise ParseError("manifest needs a mode line")
    if arity_bound is None:
        arity_bound = max((g.arity for g in gens), default=0)
    table = {g.name: g for g in gens}
    values: dict[str, OperadElement] = {}
    truncated_names: set[str] = set()
    for _, name, truncated, expr in d_lines:
        if name not in table:
            raise ParseError(f"differential for unknown generator {name!r}")
        value = parse_element(expr, table, mode)
        values[name] = values.get(name, zero(mode)) + value
        if truncated:
            truncated_names.add(name)
    return _make_presentation(
        mode,
        gens,
        values,
        truncated_names,
        arity_bound,
        kappa_name=roles.get("kappa"),
        alpha_name=roles.get("alpha"),
        kappa_t_name=roles.get("kappa_t"),
        alpha_bound=alpha_bound,
    )


def curv_from_text(text: str) -> CurvObject:
    P = presentation_from_text(text)
    if P.kappa_name is None:
        raise ParseError("quadruple manifest needs a kappa line")
    return curv_object(P)


def morphism_to_text(m: OperadMorphism) -> str:
    lines = []
    if m.alpha_precision is not None:
        lines.append(f"precision = {m.alpha_precision}")
    for name in sorted(m.assignment):
        lines.append(f"map {name} = {render_element(m.assignment[name])}")
    return "\n".join(lines) + "\n"


def morphism_from_text(
    text: str, source: OperadPresentation, target: OperadPresentation
) -> OperadMorphism:
    precision = None
    assignment: dict[str, OperadElement] = {}
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("precision"):
            precision = int(line.partition("=")[2])
            continue
        if not line.startswith("map "):
            raise ParseError(f"bad morphism line {line!r}")
        rest = line[4:]
        name, _, expr = rest.partition("=")
        assignment[name.strip()] = parse_element(expr.strip(), target.generators, target.mode)
    return OperadMorphism(source, target, assignment, precision)
