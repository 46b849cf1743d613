import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bbinterp.instances import cross_polytope_factor, cross_polytope_fixture


@pytest.fixture(scope="session")
def cross_factor():
    return cross_polytope_factor()


@pytest.fixture(scope="session")
def cross_fixture():
    return cross_polytope_fixture()


def random_system(rng: random.Random, n: int, extra_rows: int):
    """A 0/1-bounded system with a few random integral rows."""
    from bbinterp.linsys import LinSystem

    rows, rhs = [], []
    for j in range(n):
        unit = [0] * n
        unit[j] = 1
        rows.append(tuple(unit))
        rhs.append(1)
        rows.append(tuple(-v for v in unit))
        rhs.append(0)
    for _ in range(extra_rows):
        rows.append(tuple(rng.randint(-3, 3) for _ in range(n)))
        rhs.append(rng.randint(-3, 3))
    return LinSystem(n, rows, rhs)
