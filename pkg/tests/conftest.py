import itertools
import math
import random

import pytest
from hypothesis import HealthCheck, settings

from primalcurv.objectives import build
from primalcurv.validate import FAMILIES, build_any, random_description

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def naive_ratio(num, den, tol=1e-12):
    if den > tol:
        return num / den
    return math.inf if num > tol else 1.0


def naive_gamma_hat(f, S, k):
    """Γ̂(S) by listing every subset D of the free elements and every ordering of D."""
    S = tuple(sorted(S))
    free = [x for x in range(f.n) if x not in S]
    fS = f.evaluate(S)
    single = {x: f.evaluate(S + (x,)) - fS for x in free}
    best = 0.0
    for size in range(1, min(k, len(free)) + 1):
        for D in itertools.combinations(free, size):
            for order in itertools.permutations(D):
                total = 0.0
                base = S
                prev = fS
                for j in order:
                    base = tuple(sorted(base + (j,)))
                    cur = f.evaluate(base)
                    total += naive_ratio(cur - prev, single[j])
                    prev = cur
                best = max(best, total)
    return best


def naive_optimum(f, k):
    return max(f.evaluate(c) for c in itertools.combinations(range(f.n), k))


def random_instance(seed, max_n=8, families=FAMILIES):
    rng = random.Random(seed)
    family = rng.choice(families)
    n = rng.randint(3, max_n)
    desc = random_description(family, n, rng)
    return desc, build_any(desc)


@pytest.fixture
def coverage_abc():
    # A = {1,2}, B = {2,3}, C = {3,4}
    return build({"type": "coverage", "n": 3, "sets": [[1, 2], [2, 3], [3, 4]]})


@pytest.fixture
def square4():
    from primalcurv.objectives import square_cardinality

    return build(square_cardinality(4))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
