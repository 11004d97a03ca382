import math

import numpy as np
import pytest

import cliffspec as cs


def brute_blade_product(gens_a, gens_b):
    """Multiply two basis blades given as generator index tuples.

    Independent oracle: concatenate, bubble-sort counting swaps, cancel
    adjacent equal generators with a -1 each.
    """
    word = list(gens_a) + list(gens_b)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
    reduced = []
    i = 0
    while i < len(word):
        if i + 1 < len(word) and word[i] == word[i + 1]:
            sign = -sign
            i += 2
        else:
            reduced.append(word[i])
            i += 1
    return sign, tuple(reduced)


def mask_to_gens(mask):
    return tuple(i for i in range(8) if mask >> i & 1)


def gens_to_mask(gens):
    out = 0
    for g in gens:
        out |= 1 << g
    return out


def random_clifford(rng, n):
    return cs.CliffordNum(n, rng.standard_normal(1 << n))


def random_paravector(rng, n):
    return cs.Paravector(rng.standard_normal(), rng.standard_normal(n))


def random_vector(rng, n, m):
    return cs.ModuleVector(n, m, rng.standard_normal((m, 1 << n)))


def random_operator(rng, n, m):
    return cs.CliffordOperator(n, m, rng.standard_normal((m, m, 1 << n)))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def diag12():
    return cs.CliffordOperator.from_real_matrix([[1.0, 0.0], [0.0, 2.0]], n=1)


@pytest.fixture
def diag1m2():
    return cs.CliffordOperator.from_real_matrix([[1.0, 0.0], [0.0, -2.0]], n=1)


@pytest.fixture
def jordan():
    return cs.CliffordOperator.from_real_matrix([[1.0, 1.0], [0.0, 1.0]], n=1)


@pytest.fixture
def e1_id():
    return cs.CliffordOperator(1, 1, np.array([[[0.0, 1.0]]]))


OMEGA = math.pi / 12
THETA = math.pi / 4


@pytest.fixture(scope="session")
def reports():
    """Bisectoriality certificates for the three calculus test operators."""
    ops = {
        "diag12": cs.CliffordOperator.from_real_matrix([[1.0, 0.0], [0.0, 2.0]], n=1),
        "diag1m2": cs.CliffordOperator.from_real_matrix([[1.0, 0.0], [0.0, -2.0]], n=1),
        "jordan": cs.CliffordOperator.from_real_matrix([[1.0, 1.0], [0.0, 1.0]], n=1),
    }
    return {k: (T, cs.check_bisectorial(T, OMEGA)) for k, T in ops.items()}
