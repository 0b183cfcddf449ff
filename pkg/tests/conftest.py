"""Shared randomized generators for the test suite.

Everything is seeded explicitly at the call site so failures reproduce.
"""

import math
import random
from fractions import Fraction

import pytest

from mominq.exact import make_rational_law
from mominq.laws import make_law
from mominq.measures import make_distribution, pair_of

VALUE_LOG_LO = math.log(1e-3)
VALUE_LOG_HI = math.log(1e3)


def random_law(rng: random.Random, n_min: int = 2, n_max: int = 8):
    n = rng.randint(n_min, n_max)
    values = [math.exp(rng.uniform(VALUE_LOG_LO, VALUE_LOG_HI)) for _ in range(n)]
    masses = [rng.uniform(0.01, 1.0) for _ in range(n)]
    return make_law(list(zip(values, masses)), auto_normalize=True)


def random_rational_law(rng: random.Random, n_min: int = 2, n_max: int = 5,
                        max_int: int = 100):
    n = rng.randint(n_min, n_max)
    values = [Fraction(rng.randint(1, max_int), rng.randint(1, max_int))
              for _ in range(n)]
    weights = [rng.randint(1, max_int) for _ in range(n)]
    return make_rational_law(list(zip(values, weights)))


def random_pair(rng: random.Random, n_min: int = 2, n_max: int = 8):
    n = rng.randint(n_min, n_max)
    p = [rng.uniform(0.01, 1.0) for _ in range(n)]
    q = [rng.uniform(0.01, 1.0) for _ in range(n)]
    return pair_of(make_distribution(p, normalize=True),
                   make_distribution(q, normalize=True))


@pytest.fixture
def half_half_law():
    """The two-atom law at values 1 and 2 with equal masses."""
    return make_law([(1.0, 0.5), (2.0, 0.5)])


@pytest.fixture
def one_atom_law():
    return make_law([(3.0, 1.0)])
