"""Exact coefficients, permutations, shuffles and Koszul signs.

Every other module reduces its sign bookkeeping to the two primitives
defined here: `koszul_sign` for permutations of graded objects and the
lexicographic shuffle enumeration used by the symmetric differentials.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PositionError

# Coefficients are exact rationals throughout the package.  The stdlib
# Fraction already maintains the invariants we need (lowest terms,
# positive denominator, arbitrary precision).
Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def factorial_inverse(k: int) -> Fraction:
    """Return 1/k! as an exact rational."""
    if k < 0:
        raise PositionError(f"factorial_inverse needs k >= 0, got {k}")
    return Fraction(1, math.factorial(k))


class Permutation:
    """A permutation of {1..n}, stored by its tuple of images.

    `p(i)` is the image of i.  Composition `p * q` means "apply q first":
    (p * q)(i) = p(q(i)).
    """

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        n = len(images)
        if sorted(images) != list(range(1, n + 1)):
            raise PositionError(f"not a permutation of 1..{n}: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
        return cls(images)

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.size != other.size:
            raise PositionError("composing permutations of different sizes")
        return Permutation(self(other(i)) for i in range(1, self.size + 1))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Permutation(inv)

    def permute(self, seq: Sequence) -> list:
        """Move seq[i-1] to position self(i)-1."""
        if len(seq) != self.size:
            raise PositionError("sequence length does not match permutation size")
        out = [None] * self.size
        for i, x in enumerate(seq, start=1):
            out[self(i) - 1] = x
        return out

    def is_identity(self) -> bool:
        return all(self(i) == i for i in range(1, self.size + 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"Permutation{self.images}"


def is_block_monotone(perm: Permutation, p: int, q: int) -> bool:
    """True when perm is increasing on {1..p} and on {p+1..p+q}."""
    im = perm.images
    return all(im[i] < im[i + 1] for i in range(p - 1)) and all(
        im[p + i] < im[p + i + 1] for i in range(q - 1)
    )


def enumerate_shuffles(p: int, q: int) -> list[Permutation]:
    """All (p,q)-shuffles of {1..p+q}, in lexicographic order."""
    if p < 0 or q < 0:
        raise PositionError("shuffle block sizes must be nonnegative")
    n = p + q
    out = []
    for first_block in itertools.combinations(range(1, n + 1), p):
        rest = sorted(set(range(1, n + 1)) - set(first_block))
        out.append(Permutation(list(first_block) + rest))
    out.sort()
    return out


def enumerate_inverse_shuffles(p: int, q: int) -> list[Permutation]:
    """Inverses of all (p,q)-shuffles, in lexicographic order."""
    out = [s.inverse() for s in enumerate_shuffles(p, q)]
    out.sort()
    return out


def koszul_sign(sigma: Permutation, degrees: Sequence[int]) -> int:
    """Sign picked up when graded objects of the given degrees are rearranged
    so that the object at position i moves to position sigma(i).

    Equal to the product of (-1)^(d_i * d_j) over the inversions of sigma.
    """
    if len(degrees) != sigma.size:
        raise PositionError("degree list length does not match permutation size")
    sign = 1
    n = sigma.size
    for i in range(n):
        if degrees[i] % 2 == 0:
            continue
        for j in range(i + 1, n):
            if degrees[j] % 2 and sigma(i + 1) > sigma(j + 1):
                sign = -sign
    return sign


def sort_sign(keys: Sequence, degrees: Sequence[int]) -> tuple[int, list[int]]:
    """Koszul sign of stably sorting items by `keys`, plus the sorted order.

    Returns (sign, order) where order[k] is the original index of the item
    that ends up in position k.  Each adjacent swap of odd-degree items
    contributes -1.
    """
    order = list(range(len(keys)))
    sign = 1
    # Insertion sort; stable, never swaps equal keys.
    for i in range(1, len(order)):
        j = i
        while j > 0 and keys[order[j]] < keys[order[j - 1]]:
            if degrees[order[j]] % 2 and degrees[order[j - 1]] % 2:
                sign = -sign
            order[j], order[j - 1] = order[j - 1], order[j]
            j -= 1
    return sign, order
