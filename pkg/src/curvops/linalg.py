"""Exact rational linear algebra on finite graded slices of free operads.

Matrices hold exact rationals; elimination is fraction-free (Bareiss) on
denominator-cleared integer rows, so ranks, kernels and homology
dimensions are exact.  Slices are enumerated exhaustively from a vertex
budget and never cached across presentations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from .errors import ImageEscapesSlice, NotAComplex, PositionError
from .trees import (
    NS,
    SYM,
    Generator,
    OperadElement,
    Tree,
    canonical,
)


class RationalMatrix:
    """A dense matrix of exact rationals (rows may be empty)."""

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence] | None = None):
        if rows < 0 or cols < 0:
            raise PositionError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.entries = [[Fraction(0)] * cols for _ in range(rows)]
        else:
            if len(entries) != rows or any(len(r) != cols for r in entries):
                raise PositionError("entry grid does not match declared shape")
            self.entries = [[Fraction(e) for e in row] for row in entries]

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        m = cls(n, n)
        for i in range(n):
            m.entries[i][i] = Fraction(1)
        return m

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        return self.entries[idx[0]][idx[1]]

    def __setitem__(self, idx: tuple[int, int], value) -> None:
        self.entries[idx[0]][idx[1]] = Fraction(value)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise PositionError("matrix shapes do not compose")
        out = RationalMatrix(self.rows, other.cols)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.entries[i][k]
                if not a:
                    continue
                for j in range(other.cols):
                    b = other.entries[k][j]
                    if b:
                        out.entries[i][j] += a * b
        return out

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def apply(self, vector: Sequence) -> list[Fraction]:
        if len(vector) != self.cols:
            raise PositionError("vector length does not match column count")
        return [
            sum((row[j] * Fraction(vector[j]) for j in range(self.cols)), Fraction(0))
            for row in self.entries
        ]

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols})"


def _integer_rows(M: RationalMatrix) -> list[list[int]]:
    """Clear denominators row by row (rank and kernel are unchanged)."""
    out = []
    for row in M.entries:
        scale = 1
        for e in row:
            scale = scale * e.denominator // gcd(scale, e.denominator)
        out.append([int(e * scale) for e in row])
    return out


def _bareiss(rows: list[list[int]], cols: int) -> tuple[int, list[list[int]], list[int]]:
    """Fraction-free elimination to row echelon form.

    Returns (rank, echelon_rows, pivot_columns).  Intermediate divisions are
    exact by the Bareiss identity.
    """
    m = [row[:] for row in rows]
    n_rows = len(m)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, n_rows):
            if m[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        for i in range(r + 1, n_rows):
            for j in range(c + 1, cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        pivots.append(c)
        r += 1
    return r, m[:r], pivots


def kernel_rank(M: RationalMatrix) -> tuple[int, list[list[Fraction]]]:
    """Exact rank and a basis of the right kernel.

    Kernel vectors are reduced (integer entries with content 1).
    """
    if M.cols == 0:
        return 0, []
    rank, echelon, pivots = _bareiss(_integer_rows(M), M.cols)
    pivot_set = set(pivots)
    free_cols = [c for c in range(M.cols) if c not in pivot_set]
    basis: list[list[Fraction]] = []
    for fc in free_cols:
        v = [Fraction(0)] * M.cols
        v[fc] = Fraction(1)
        for r in range(rank - 1, -1, -1):
            pc = pivots[r]
            s = sum(
                (Fraction(echelon[r][j]) * v[j] for j in range(pc + 1, M.cols)),
                Fraction(0),
            )
            v[pc] = -s / Fraction(echelon[r][pc])
        scale = 1
        for e in v:
            scale = scale * e.denominator // gcd(scale, e.denominator)
        ints = [int(e * scale) for e in v]
        content = 0
        for e in ints:
            content = gcd(content, abs(e))
        if content > 1:
            ints = [e // content for e in ints]
        basis.append([Fraction(e) for e in ints])
    return rank, basis


def solve_linear(M: RationalMatrix, b: Sequence) -> list[Fraction] | None:
    """One exact solution of M x = b, or None when inconsistent."""
    if len(b) != M.rows:
        raise PositionError("right-hand side length does not match row count")
    aug = [row[:] + [Fraction(b[i])] for i, row in enumerate(M.entries)]
    n_rows, n_cols = M.rows, M.cols
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n_cols):
        pivot_row = None
        for i in range(r, n_rows):
            if aug[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        pv = aug[r][c]
        aug[r] = [e / pv for e in aug[r]]
        for i in range(n_rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * p for a, p in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
    for i in range(r, n_rows):
        if aug[i][n_cols]:
            return None
    x = [Fraction(0)] * n_cols
    for row, col in pivots:
        x[col] = aug[row][n_cols]
    return x


class SparseMatrix:
    """Row-sparse exact matrix used for the large homology slices.

    Stores one dict per row; supports only what the rank computation needs.
    """

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.data: list[dict[int, Fraction]] = [dict() for _ in range(rows)]

    def set(self, i: int, j: int, value: Fraction) -> None:
        if value:
            self.data[i][j] = Fraction(value)
        else:
            self.data[i].pop(j, None)

    def rank(self) -> int:
        """Exact rank: split into connected components of the support graph
        and eliminate each small block densely."""
        parent = list(range(self.rows + self.cols))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x: int, y: int) -> None:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for i, row in enumerate(self.data):
            for j in row:
                union(i, self.rows + j)

        blocks: dict[int, tuple[list[int], set[int]]] = {}
        for i, row in enumerate(self.data):
            if not row:
                continue
            root = find(i)
            rows_in, cols_in = blocks.setdefault(root, ([], set()))
            rows_in.append(i)
            cols_in.update(row)

        total = 0
        for rows_in, cols_in in blocks.values():
            col_index = {c: k for k, c in enumerate(sorted(cols_in))}
            dense = [
                [self.data[i].get(c, Fraction(0)) for c in sorted(cols_in)]
                for i in rows_in
            ]
            total += _dense_rank(dense, len(col_index))
        return total


def _dense_rank(rows: list[list[Fraction]], cols: int) -> int:
    """Plain exact elimination rank for small dense blocks."""
    rows = [r[:] for r in rows]
    rank = 0
    for c in range(cols):
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def sparse_matrix_of(
    map_fn: Callable[[OperadElement], OperadElement],
    domain: "BasisSlice",
    codomain: "BasisSlice",
) -> SparseMatrix:
    """Sparse analogue of matrix_of for large slices."""
    index = codomain.index()
    M = SparseMatrix(codomain.dim, domain.dim)
    for j, t in enumerate(domain.trees):
        image = map_fn(OperadElement(domain.mode, {t: Fraction(1)}))
        for tt, c in image.terms.items():
            if tt not in index:
                raise ImageEscapesSlice(f"image tree outside codomain slice: {tt!r}")
            M.set(index[tt], j, c)
    return M


def homology_dimension(d_in: RationalMatrix, d_out: RationalMatrix) -> int:
    """dim ker(d_out) - rank(d_in) for a two-step complex at the middle slot."""
    if d_in.rows != d_out.cols:
        raise NotAComplex(
            f"middle dimensions disagree: d_in lands in {d_in.rows}, d_out starts from {d_out.cols}"
        )
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise NotAComplex("d_out . d_in is nonzero")
    rank_in, _ = kernel_rank(d_in)
    rank_out, _ = kernel_rank(d_out)
    nullity_out = d_out.cols - rank_out
    return nullity_out - rank_in


# ---------------------------------------------------------------------------
# basis slices


@dataclass(frozen=True)
class BasisSlice:
    """An ordered basis of canonical trees with a fixed vertex budget.

    The filter is (mode, arity, exact vertex count per generator); arity and
    the budget determine the degree.  Order is by structure key, so the
    basis is deterministic.
    """

    mode: str
    arity: int
    counts: tuple[tuple[str, int], ...]
    trees: tuple[Tree, ...]

    @property
    def dim(self) -> int:
        return len(self.trees)

    def index(self) -> dict[Tree, int]:
        return {t: i for i, t in enumerate(self.trees)}

    def element(self, coords: Sequence) -> OperadElement:
        terms = {t: Fraction(c) for t, c in zip(self.trees, coords) if c}
        return OperadElement(self.mode, terms)


def _distributions(items: list[tuple[Generator, int]], parts: int):
    """All ways to split a generator multiset into `parts` ordered multisets."""
    if parts == 0:
        if not any(c for _, c in items):
            yield []
        return
    if parts == 1:
        yield [items]
        return
    gen_counts = items

    def rec(idx: int, current: list[tuple[Generator, int]], remaining):
        if idx == len(gen_counts):
            rest = [(g, c) for g, c in remaining if c > 0]
            for tail in _distributions(rest, parts - 1):
                yield [current[:]] + tail
            return
        g, c = gen_counts[idx]
        for take in range(c + 1):
            if take:
                current.append((g, take))
            new_remaining = [(gg, cc - take) if gg == g else (gg, cc) for gg, cc in remaining]
            yield from rec(idx + 1, current, new_remaining)
            if take:
                current.pop()

    yield from rec(0, [], list(gen_counts))


def _raw_trees(multiset: list[tuple[Generator, int]], arity: int, cache=None):
    """All raw planar trees using exactly the given vertex multiset, with
    `arity` unlabeled leaf slots (leaves encoded as 0 placeholders)."""
    if cache is None:
        cache = {}
    key = (tuple(sorted(multiset, key=lambda gc: gc[0].name)), arity)
    hit = cache.get(key)
    if hit is not None:
        return hit
    out: list = []
    total = sum(c for _, c in multiset)
    if total:
        for root, count in multiset:
            rest = [(g, c - 1 if g == root else c) for g, c in multiset]
            rest = [(g, c) for g, c in rest if c > 0]
            for child_sets in _distributions(rest, root.arity):
                out.extend(_attach(root, child_sets, arity, 0, [], cache))
    cache[key] = out
    return out


def _attach(root: Generator, child_sets, arity: int, idx: int, acc: list, cache):
    if idx == len(child_sets):
        if arity == 0:
            yield (root, tuple(acc))
        return
    part = child_sets[idx]
    size = sum(c for _, c in part)
    if size == 0:
        # this child is a bare leaf (consumes one arity unit)
        if arity >= 1:
            acc.append(0)
            yield from _attach(root, child_sets, arity - 1, idx + 1, acc, cache)
            acc.pop()
        return
    for child_arity in range(0, arity + 1):
        for sub in _raw_trees(part, child_arity, cache):
            acc.append(sub)
            yield from _attach(root, child_sets, arity - child_arity, idx + 1, acc, cache)
            acc.pop()


def _label_leaves(raw, labels: list[int], pos: list[int]):
    if isinstance(raw, int):
        label = labels[pos[0]]
        pos[0] += 1
        return label
    gen, children = raw
    return (gen, tuple(_label_leaves(c, labels, pos) for c in children))


def enumerate_slice(
    mode: str, generators: Sequence[Generator], arity: int, counts: dict[str, int]
) -> BasisSlice:
    """Enumerate the canonical trees with the exact vertex budget `counts`."""
    by_name = {g.name: g for g in generators}
    multiset = [(by_name[name], c) for name, c in sorted(counts.items()) if c > 0]
    seen: set[Tree] = set()
    labelings = (
        [list(range(1, arity + 1))]
        if mode == NS
        else [list(p) for p in itertools.permutations(range(1, arity + 1))]
    )
    for raw in _raw_trees(multiset, arity):
        for labels in labelings:
            labeled = _label_leaves(raw, labels, [0])
            _, t = canonical(labeled)
            if t is not None:
                seen.add(t)
    trees = tuple(sorted(seen, key=lambda t: t.key))
    return BasisSlice(mode, arity, tuple(sorted(counts.items())), trees)


def matrix_of(
    map_fn: Callable[[OperadElement], OperadElement],
    domain: BasisSlice,
    codomain: BasisSlice,
) -> RationalMatrix:
    """Matrix of a linear operation in the slice bases (columns = images)."""
    index = codomain.index()
    M = RationalMatrix(codomain.dim, domain.dim)
    for j, t in enumerate(domain.trees):
        image = map_fn(OperadElement(domain.mode, {t: Fraction(1)}))
        for tt, c in image.terms.items():
            if tt not in index:
                raise ImageEscapesSlice(f"image tree outside codomain slice: {tt!r}")
            M[index[tt], j] = c
    return M


def element_coordinates(x: OperadElement, slice_: BasisSlice) -> list[Fraction]:
    index = slice_.index()
    coords = [Fraction(0)] * slice_.dim
    for t, c in x.terms.items():
        if t not in index:
            raise ImageEscapesSlice(f"element tree outside slice: {t!r}")
        coords[index[t]] = c
    return coords
