import random

import pytest

from cse_kit.gaussq import QQi
from cse_kit.newton import diagonal_intersection, newton_polyhedron
from cse_kit.nondegeneracy import is_nondegenerate
from cse_kit.polyparse import SparsePolynomial


def random_nondegenerate(count: int, seed: int = 2024, max_deg: int = 7):
    """``count`` random nondegenerate polynomials in two variables with ``d0 > 1``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(1, 5)
        pts = {(rng.randint(0, max_deg), rng.randint(0, max_deg)) for _ in range(k)}
        pts = {p for p in pts if sum(p) >= 2}
        if not pts:
            continue
        terms = {p: QQi(rng.randint(-4, 4) or 1, rng.randint(-2, 2)) for p in pts}
        f = SparsePolynomial(2, terms)
        if diagonal_intersection(newton_polyhedron(f), 0).d <= 1:
            continue
        if is_nondegenerate(f).ok:
            out.append(f)
    return out


@pytest.fixture(scope="session")
def corpus200():
    return random_nondegenerate(200)
