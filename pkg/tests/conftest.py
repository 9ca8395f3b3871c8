import numpy as np
import pytest

from lecplast import (
    INFINITE,
    ContinuousPart,
    Direction,
    EigenAtom,
    EigenSequence,
    SpectralDescriptor,
    canonicalize,
)


def atom(value, mult=1):
    return EigenAtom(value, mult)


def seq(limit, direction, offset=1.0, ratio=0.5, mult=1):
    return EigenSequence(limit, Direction(direction), offset, ratio, mult)


def density(a, b, coeffs=(1.0,)):
    return ContinuousPart("density", (a, b), coeffs=tuple(coeffs))


def cantor(a, b, mass=1.0):
    return ContinuousPart("cantor", (a, b), mass=mass)


def descriptor(atoms=(), sequences=(), continuous=()):
    return canonicalize(SpectralDescriptor(tuple(atoms), tuple(sequences), tuple(continuous)))


def random_descriptor(rng, allow_continuous=True):
    """Small random canonical descriptor for property tests."""
    atoms = []
    for _ in range(rng.integers(0, 3)):
        value = float(rng.integers(1, 9)) / 2.0
        mult = INFINITE if rng.random() < 0.4 else int(rng.integers(1, 4))
        atoms.append(EigenAtom(value, mult))
    sequences = []
    for _ in range(rng.integers(0, 3)):
        direction = Direction.INCREASING if rng.random() < 0.5 else Direction.DECREASING
        limit = float(rng.integers(2, 9)) / 2.0
        offset = min(1.0, limit / 2.0)
        sequences.append(EigenSequence(limit, direction, offset, 0.5, int(rng.integers(1, 3))))
    continuous = []
    if allow_continuous and rng.random() < 0.25:
        continuous.append(density(1.0, 2.0))
    d = SpectralDescriptor(tuple(atoms), tuple(sequences), tuple(continuous))
    return canonicalize(d)


@pytest.fixture
def lebesgue_12():
    from lecplast import MeasureSpec

    return MeasureSpec((density(1.0, 2.0),))


@pytest.fixture
def cantor_01():
    from lecplast import MeasureSpec

    return MeasureSpec((cantor(0.0, 1.0),))


def cantor_oracle(x, depth=22):
    """Independent Cantor-function evaluation via the self-similar recursion.

    Distinct from the library's iterative digit walk; error <= 2**-depth.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    if depth == 0:
        return np.clip(x, 0.0, 1.0)
    out = np.empty_like(x)
    left = x < 1.0 / 3.0
    right = x > 2.0 / 3.0
    mid = ~(left | right)
    out[left] = 0.5 * cantor_oracle(3.0 * x[left], depth - 1)
    out[mid] = 0.5
    out[right] = 0.5 + 0.5 * cantor_oracle(3.0 * x[right] - 2.0, depth - 1)
    return out
