import random

import pytest

from curvops import NS, SYM, Generator, Permutation, act, compose, from_generator


def make_pool(mode):
    """A small mixed pool of generators for randomized structure tests."""
    return [
        Generator("a", 2, -1, invariant=(mode == SYM)),
        Generator("c", 1, 0),
        Generator("u", 0, -1),
        Generator("e", 0, 0),
    ]


def random_element(rng, mode, gens, max_vertices=3, allow_relabel=True):
    """A random canonical element built by composing generators."""
    positive = [g for g in gens if g.arity > 0]
    x = from_generator(rng.choice(positive), mode)
    for _ in range(rng.randint(0, max_vertices - 1)):
        if x.arity == 0:
            break
        h = rng.choice(gens)
        x = compose(x, rng.randint(1, x.arity), from_generator(h, mode))
        if x.is_zero:
            return None
    if mode == SYM and allow_relabel and x.arity and rng.random() < 0.7:
        perm = list(range(1, x.arity + 1))
        rng.shuffle(perm)
        x = act(Permutation(perm), x)
    return None if x.is_zero else x


@pytest.fixture
def rng():
    return random.Random(20260810)
