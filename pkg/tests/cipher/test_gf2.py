"""Tests GF(2) matrix helpers."""

import numpy as np
import pytest

import setfalab
from setfalab.cipher.gf2 import apply, compose, identity, matrix_of, rank


def random_invertible(rng: np.random.Generator, n: int) -> np.ndarray:
    lower = np.tril(rng.integers(0, 2, size=(n, n), dtype=np.uint8), k=-1) | identity(n)
    upper = np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8), k=1) | identity(n)
    return compose(lower, upper)


def test_invert_identity() -> None:
    assert (setfalab.invert_map(identity()) == identity()).all()


@pytest.mark.parametrize("n", [8, 160])
def test_invert_random(rng: np.random.Generator, n: int) -> None:
    m = random_invertible(rng, n)
    inv = setfalab.invert_map(m)
    assert (compose(m, inv) == identity(n)).all()
    assert (compose(inv, m) == identity(n)).all()


def test_singular() -> None:
    m = identity(16)
    m[5] = m[3] ^ m[7]
    assert rank(m) == 15
    with pytest.raises(setfalab.MaskNotInvertibleError, match="mask layer not invertible"):
        setfalab.invert_map(m)


def test_non_square() -> None:
    with pytest.raises(ValueError):
        setfalab.invert_map(np.zeros((4, 5), dtype=np.uint8))


def test_matrix_of_linear_function(rng: np.random.Generator) -> None:
    m = random_invertible(rng, 160)
    fn = lambda x: apply(m, x)  # noqa: E731
    assert (matrix_of(fn) == m).all()
    x = rng.integers(0, 2, size=(5, 160), dtype=np.uint8)
    assert (apply(m, x) == np.stack([apply(m, row) for row in x])).all()
