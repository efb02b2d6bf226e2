"""Canonical tree representation of free (non)symmetric operad elements.

An element is a rational combination of decorated trees.  The vertex
decorations of a tree are implicitly ordered by the planar depth-first
traversal; every Koszul sign in the package is the sign of reordering
that sequence.  Composition carries the block-insertion sign, and the
canonical form sorts children at fully-invariant vertices (leaf-bearing
children by least leaf, nullary children afterwards by structure), with
one sign per adjacent transposition of odd-degree subtrees.  A tree with
two identical odd nullary children is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence, Union

from .errors import DegreeError, ModeMismatch, ParseError, PositionError
from .signs import Permutation, sort_sign

NS = "ns"
SYM = "sym"
MODES = (NS, SYM)


@dataclass(frozen=True)
class Generator:
    """A free-operad generator: name, arity, homological degree, symmetry.

    `invariant` marks generators fixed by the whole symmetric group action;
    it is only meaningful in symmetric mode.
    """

    name: str
    arity: int
    degree: int
    invariant: bool = False

    def __post_init__(self):
        if self.arity < 0:
            raise PositionError(f"generator {self.name} has negative arity")


# A child of a tree vertex: an external leaf label (int) or a subtree.
Node = Union[int, "Tree"]
# Raw (not yet canonical) trees used during grafting and substitution.
RawNode = Union[int, tuple]


class Tree:
    """An immutable decorated tree, assumed to be in canonical form.

    Build trees through `canonical` / `compose` / the element constructors;
    the constructor itself performs no reordering.
    """

    __slots__ = ("gen", "children", "arity", "degree", "min_leaf", "key", "_hash")

    def __init__(self, gen: Generator, children: tuple[Node, ...]):
        if len(children) != gen.arity:
            raise PositionError(
                f"generator {gen.name} has arity {gen.arity}, got {len(children)} children"
            )
        self.gen = gen
        self.children = children
        arity = 0
        degree = gen.degree
        min_leaf = None
        for c in children:
            if isinstance(c, int):
                arity += 1
                min_leaf = c if min_leaf is None else min(min_leaf, c)
            else:
                arity += c.arity
                degree += c.degree
                if c.min_leaf is not None:
                    min_leaf = c.min_leaf if min_leaf is None else min(min_leaf, c.min_leaf)
        self.arity = arity
        self.degree = degree
        self.min_leaf = min_leaf
        self.key = (
            1,
            gen.name,
            tuple((0, c, ()) if isinstance(c, int) else c.key for c in children),
        )
        self._hash = hash((gen, children))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Tree)
            and self._hash == other._hash
            and self.gen == other.gen
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Tree({render_tree(self)})"

    def leaf_labels(self) -> list[int]:
        """Leaf labels in planar (depth-first) order."""
        out: list[int] = []
        _collect_leaves(self, out)
        return out

    def vertex_count(self, name: str) -> int:
        """Number of vertices decorated by the generator called `name`."""
        n = 1 if self.gen.name == name else 0
        for c in self.children:
            if isinstance(c, Tree):
                n += c.vertex_count(name)
        return n

    def generators(self) -> set[Generator]:
        out = {self.gen}
        for c in self.children:
            if isinstance(c, Tree):
                out |= c.generators()
        return out


def _collect_leaves(t: Tree, out: list[int]) -> None:
    for c in t.children:
        if isinstance(c, int):
            out.append(c)
        else:
            _collect_leaves(c, out)


def render_tree(t: Tree) -> str:
    """Deterministic textual form, `gen(child, ...)` with integer leaves."""
    if t.gen.arity == 0:
        return t.gen.name
    parts = [str(c) if isinstance(c, int) else render_tree(c) for c in t.children]
    return f"{t.gen.name}({', '.join(parts)})"


# ---------------------------------------------------------------------------
# canonical form


def _child_degree(c: Node) -> int:
    return 0 if isinstance(c, int) else c.degree


def _child_sort_key(c: Node):
    # Leaf-bearing children first, ordered by least leaf; nullary children
    # afterwards, ordered by structure.
    if isinstance(c, int):
        return (0, c)
    if c.min_leaf is not None:
        return (0, c.min_leaf)
    return (1, c.key)


def _canonical_vertex(gen: Generator, children: tuple[Node, ...]) -> tuple[int, Tree | None]:
    """Sort already-canonical children at one vertex.  Returns (sign, tree),
    with tree None when the vertex vanishes (identical odd nullary children)."""
    if gen.invariant and gen.arity > 1:
        keys = [_child_sort_key(c) for c in children]
        degrees = [_child_degree(c) for c in children]
        sign, order = sort_sign(keys, degrees)
        children = tuple(children[i] for i in order)
        for a, b in zip(children, children[1:]):
            if isinstance(a, Tree) and a == b and a.degree % 2:
                return 1, None
    else:
        sign = 1
    return sign, Tree(gen, children)


def canonical(raw: RawNode) -> tuple[int, Tree | None]:
    """Canonicalize a raw tree `(gen, children)` bottom-up.

    The accumulated sign is the Koszul sign of reordering the depth-first
    decoration sequence into the canonical one.
    """
    gen, raw_children = raw
    sign = 1
    kids: list[Node] = []
    for c in raw_children:
        if isinstance(c, int):
            kids.append(c)
        elif isinstance(c, Tree):
            kids.append(c)
        else:
            s, t = canonical(c)
            if t is None:
                return 1, None
            sign *= s
            kids.append(t)
    s, t = _canonical_vertex(gen, tuple(kids))
    return sign * s, t


def to_raw(t: Tree) -> RawNode:
    return (t.gen, tuple(c if isinstance(c, int) else to_raw(c) for c in t.children))


# ---------------------------------------------------------------------------
# elements


class OperadElement:
    """A homogeneous rational combination of canonical trees.

    All terms share one arity and one total degree.  The zero element has
    empty terms and indeterminate arity/degree.
    """

    __slots__ = ("mode", "terms")

    def __init__(self, mode: str, terms: Mapping[Tree, Fraction] | None = None):
        if mode not in MODES:
            raise ModeMismatch(f"unknown mode {mode!r}")
        self.mode = mode
        clean: dict[Tree, Fraction] = {}
        arity = degree = None
        for t, c in (terms or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if arity is None:
                arity, degree = t.arity, t.degree
            elif t.arity != arity or t.degree != degree:
                raise DegreeError(
                    f"mixed terms: ({t.arity},{t.degree}) vs ({arity},{degree})"
                )
            clean[t] = c
        self.terms = clean

    # -- basic structure ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def arity(self) -> int | None:
        for t in self.terms:
            return t.arity
        return None

    @property
    def degree(self) -> int | None:
        for t in self.terms:
            return t.degree
        return None

    def sorted_terms(self) -> list[tuple[Tree, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].key)

    def coefficient(self, t: Tree) -> Fraction:
        return self.terms.get(t, Fraction(0))

    def generators(self) -> set[Generator]:
        out: set[Generator] = set()
        for t in self.terms:
            out |= t.generators()
        return out

    def map_terms(self, f: Callable[[Tree, Fraction], Fraction]) -> "OperadElement":
        return OperadElement(self.mode, {t: f(t, c) for t, c in self.terms.items()})

    # -- arithmetic ----------------------------------------------------------

    def _check_mode(self, other: "OperadElement") -> None:
        if self.mode != other.mode:
            raise ModeMismatch(f"{self.mode} vs {other.mode}")

    def __add__(self, other: "OperadElement") -> "OperadElement":
        self._check_mode(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, Fraction(0)) + c
        return OperadElement(self.mode, out)

    def __sub__(self, other: "OperadElement") -> "OperadElement":
        return self + (-other)

    def __neg__(self) -> "OperadElement":
        return OperadElement(self.mode, {t: -c for t, c in self.terms.items()})

    def __rmul__(self, scalar) -> "OperadElement":
        s = Fraction(scalar)
        return OperadElement(self.mode, {t: s * c for t, c in self.terms.items()})

    def __mul__(self, scalar) -> "OperadElement":
        return self.__rmul__(scalar)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OperadElement)
            and self.mode == other.mode
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.mode, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        from .grammar import render_element

        return f"<{self.mode} {render_element(self)}>"


def zero(mode: str) -> OperadElement:
    return OperadElement(mode, {})


def from_generator(gen: Generator, mode: str) -> OperadElement:
    """The generator itself, leaves labelled 1..arity in planar order."""
    return OperadElement(mode, {Tree(gen, tuple(range(1, gen.arity + 1))): Fraction(1)})


def element(mode: str, raw: RawNode, coeff=Fraction(1)) -> OperadElement:
    """Canonicalize one raw tree into an element (the public `canonicalize`)."""
    _validate_raw_leaves(raw, mode)
    sign, t = canonical(raw)
    if t is None:
        return zero(mode)
    return OperadElement(mode, {t: Fraction(coeff) * sign})


canonicalize = element


def _validate_raw_leaves(raw: RawNode, mode: str) -> None:
    labels: list[int] = []

    def walk(node: RawNode) -> None:
        if isinstance(node, int):
            labels.append(node)
            return
        if isinstance(node, Tree):
            labels.extend(node.leaf_labels())
            return
        for c in node[1]:
            walk(c)

    walk(raw)
    if sorted(labels) != list(range(1, len(labels) + 1)):
        raise ParseError(f"leaf labels must be exactly 1..n, got {labels}")
    if mode == NS and labels != sorted(labels):
        raise ParseError("planar-mode leaves must appear in increasing order")


# ---------------------------------------------------------------------------
# traversal helpers


def _dfs_events(node: Node, out: list[tuple[int, int]]) -> None:
    """Append (1, degree) for vertices and (0, label) for leaves, DFS order."""
    if isinstance(node, int):
        out.append((0, node))
        return
    out.append((1, node.gen.degree))
    for c in node.children:
        _dfs_events(c, out)


def degree_after_leaf(t: Tree, label: int) -> int:
    """Total degree of vertices strictly after the given leaf in DFS order."""
    events: list[tuple[int, int]] = []
    _dfs_events(t, events)
    seen = False
    acc = 0
    for tag, val in events:
        if seen and tag == 1:
            acc += val
        elif tag == 0 and val == label:
            seen = True
    if not seen:
        raise PositionError(f"no leaf labelled {label}")
    return acc


def iter_vertices(t: Tree) -> Iterator[tuple[tuple[int, ...], Generator, int]]:
    """Yield (path, generator, prefix_degree) for each vertex in DFS order.

    `path` lists 0-based child indices from the root; `prefix_degree` is the
    degree sum of the vertices strictly before this one.
    """
    state = {"acc": 0}

    def walk(node: Tree, path: tuple[int, ...]) -> Iterator:
        yield path, node.gen, state["acc"]
        state["acc"] += node.gen.degree
        for idx, c in enumerate(node.children):
            if isinstance(c, Tree):
                yield from walk(c, path + (idx,))

    yield from walk(t, ())


def subtree_at(t: Tree, path: Sequence[int]) -> Tree:
    node = t
    for idx in path:
        node = node.children[idx]
    return node


# ---------------------------------------------------------------------------
# composition


def _shift_raw(node: Node, offset: int) -> RawNode:
    if isinstance(node, int):
        return node + offset
    return (node.gen, tuple(_shift_raw(c, offset) for c in node.children))


def _graft_raw(t: Tree, i: int, y: Tree) -> RawNode:
    """Raw tree with leaf i of t replaced by y; block relabelling of leaves."""
    m = y.arity

    def build(node: Node) -> RawNode:
        if isinstance(node, int):
            if node == i:
                return _shift_raw(y, i - 1)
            return node if node < i else node + m - 1
        return (node.gen, tuple(build(c) for c in node.children))

    return build(t)


def compose(x: OperadElement, i: int, y: OperadElement) -> OperadElement:
    """Partial composition: graft y into the i-th leaf of x.

    Bilinear; the only signs are the Koszul block-insertion sign and the
    canonical-form reordering signs.
    """
    if x.mode != y.mode:
        raise ModeMismatch(f"{x.mode} vs {y.mode}")
    if x.is_zero or y.is_zero:
        if not x.is_zero and not 1 <= i <= x.arity:
            raise PositionError(f"slot {i} out of range for arity {x.arity}")
        return zero(x.mode)
    if not 1 <= i <= x.arity:
        raise PositionError(f"slot {i} out of range for arity {x.arity}")
    acc: dict[Tree, Fraction] = {}
    for tx, cx in x.terms.items():
        after = degree_after_leaf(tx, i)
        for ty, cy in y.terms.items():
            coeff = cx * cy
            if (ty.degree % 2) and (after % 2):
                coeff = -coeff
            sign, t = canonical(_graft_raw(tx, i, ty))
            if t is None:
                continue
            acc[t] = acc.get(t, Fraction(0)) + coeff * sign
    return OperadElement(x.mode, acc)


def total_compose(x: OperadElement, y: OperadElement) -> OperadElement:
    """Sum of x composed with y over every slot of x."""
    if x.is_zero or y.is_zero:
        return zero(x.mode)
    out = zero(x.mode)
    for i in range(1, x.arity + 1):
        out = out + compose(x, i, y)
    return out


# ---------------------------------------------------------------------------
# symmetric group action


def _relabel_raw(node: Node, relabel: Callable[[int], int]) -> RawNode:
    if isinstance(node, int):
        return relabel(node)
    return (node.gen, tuple(_relabel_raw(c, relabel) for c in node.children))


def act(sigma: Permutation, x: OperadElement) -> OperadElement:
    """Left symmetric-group action: leaf l is relabelled sigma(l).

    act(sigma, act(tau, x)) == act(sigma * tau, x).
    """
    if x.mode != SYM:
        raise ModeMismatch("the symmetric-group action needs symmetric mode")
    if x.is_zero:
        return x
    if sigma.size != x.arity:
        raise PositionError(
            f"permutation size {sigma.size} does not match arity {x.arity}"
        )
    if sigma.is_identity():
        return x
    acc: dict[Tree, Fraction] = {}
    for tx, cx in x.terms.items():
        sign, t = canonical(_relabel_raw(tx, sigma))
        if t is None:
            continue
        acc[t] = acc.get(t, Fraction(0)) + cx * sign
    return OperadElement(SYM, acc)


def acted_by(x: OperadElement, sigma: Permutation) -> OperadElement:
    """Right action x^sigma (precomposition convention): act(sigma^-1, x)."""
    return act(sigma.inverse(), x)


# ---------------------------------------------------------------------------
# vertex substitution (used by derivations and morphisms)


def substitute_vertex(t: Tree, path: Sequence[int], w: Tree) -> tuple[int, RawNode]:
    """Replace the generator at `path` by the tree w, attaching the original
    children of the vertex at w's correspondingly-labelled leaves.

    Returns (sign_parity, raw): the Koszul parity of moving the children
    blocks from their original positions (directly after the old vertex)
    into w's leaf slots, and the resulting raw tree.
    """
    v = subtree_at(t, path)
    if w.arity != v.gen.arity:
        raise PositionError(
            f"substitute arity mismatch: value has arity {w.arity}, vertex needs {v.gen.arity}"
        )
    children = v.children
    child_deg = [_child_degree(c) for c in children]

    # Koszul parity of interleaving: walk w's DFS; a child block C_j must
    # cross every w-vertex after its leaf and every earlier-positioned block
    # C_j' with j' > j.
    events: list[tuple[int, int]] = []
    _dfs_events(w, events)
    parity = 0
    w_deg_after = 0
    leaf_positions: list[int] = []  # labels in DFS order
    for tag, val in reversed(events):
        if tag == 1:
            w_deg_after += val
        else:
            if child_deg[val - 1] % 2 and w_deg_after % 2:
                parity ^= 1
            leaf_positions.append(val)
    leaf_positions.reverse()
    for a in range(len(leaf_positions)):
        for b in range(a + 1, len(leaf_positions)):
            j1, j2 = leaf_positions[a], leaf_positions[b]
            if j1 > j2 and child_deg[j1 - 1] % 2 and child_deg[j2 - 1] % 2:
                parity ^= 1

    def build_value(node: Node) -> RawNode:
        if isinstance(node, int):
            child = children[node - 1]
            return child if isinstance(child, int) else to_raw(child)
        return (node.gen, tuple(build_value(c) for c in node.children))

    replacement = build_value(w)

    def rebuild(node: Tree, depth: int) -> RawNode:
        if depth == len(path):
            return replacement
        kids = []
        for idx, c in enumerate(node.children):
            if idx == path[depth] and isinstance(c, Tree):
                kids.append(rebuild(c, depth + 1))
            else:
                kids.append(c if isinstance(c, int) else to_raw(c))
        return (node.gen, tuple(kids))

    return parity, rebuild(t, 0)


# ---------------------------------------------------------------------------
# gradings


def split_by_vertex_count(x: OperadElement, name: str) -> dict[int, OperadElement]:
    """Partition terms by the number of vertices labelled `name`."""
    buckets: dict[int, dict[Tree, Fraction]] = {}
    for t, c in x.terms.items():
        buckets.setdefault(t.vertex_count(name), {})[t] = c
    return {k: OperadElement(x.mode, d) for k, d in sorted(buckets.items())}


def kappa_weight_split(x: OperadElement, kappa_name: str) -> dict[int, OperadElement]:
    """Split by the weight grading: number of distinguished arity-0 vertices."""
    return split_by_vertex_count(x, kappa_name)


def alpha_filtration_split(x: OperadElement, alpha_name: str = "alpha") -> dict[int, OperadElement]:
    """Split by the adjoined-variable filtration: number of alpha vertices."""
    return split_by_vertex_count(x, alpha_name)


def weight_part(x: OperadElement, name: str, k: int) -> OperadElement:
    return split_by_vertex_count(x, name).get(k, zero(x.mode))


def truncate_by_count(x: OperadElement, name: str, bound: int) -> OperadElement:
    """Drop terms with more than `bound` vertices labelled `name`."""
    return OperadElement(
        x.mode, {t: c for t, c in x.terms.items() if t.vertex_count(name) <= bound}
    )
