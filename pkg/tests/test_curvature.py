import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from conftest import naive_gamma_hat, random_instance
from primalcurv.curvature import (
    EXACT,
    SAMPLED,
    elemental_curvature,
    gamma_hat_exact,
    gamma_hat_sampled,
    gamma_product,
    gamma_terms,
    max_single_tpc,
    primal_curvature,
    total_curvature,
    total_primal_curvature,
)
from primalcurv.errors import EnumerationInfeasibleError, InputError
from primalcurv.objectives import build, square_cardinality
from primalcurv.oracle import random_monotone_function
from primalcurv.setfn import UniformMatroid


def _triple(rng, n):
    x = rng.randrange(n)
    rest = [e for e in range(n) if e != x]
    T = sorted(rng.sample(rest, rng.randint(0, len(rest))))
    S = sorted(rng.sample(T, rng.randint(0, len(T))))
    return x, T, S


def test_primal_curvature_square():
    # f_i(S) = 2|S| + 1 for f = |S|^2
    f = build(square_cardinality(4))
    assert primal_curvature(f, 0, 1) == 3.0
    assert primal_curvature(f, 0, 1, (2,)) == 5.0 / 3.0


def test_primal_curvature_zero_conventions(coverage_abc):
    # A and B share item 2; C is disjoint from A
    f = build({"type": "coverage", "n": 3, "sets": [[1], [1], [2]]})
    assert primal_curvature(f, 0, 1) == 0.0
    assert primal_curvature(f, 0, 1, (2,)) == 0.0
    g = build({"type": "synergy", "n": 2, "weights": [0, 0], "synergy": [[0, 1], [1, 0]]})
    assert primal_curvature(g, 0, 1) == math.inf
    h = build({"type": "modular", "n": 2, "weights": [0, 1]})
    assert primal_curvature(h, 0, 1) == 1.0


def test_primal_curvature_rejects_bad_args(coverage_abc):
    with pytest.raises(InputError):
        primal_curvature(coverage_abc, 0, 0)
    with pytest.raises(InputError):
        primal_curvature(coverage_abc, 0, 1, (1,))


@given(st.integers(0, 10**6))
def test_gamma_identity(seed):
    rng = random.Random(seed)
    f = random_monotone_function(rng.randint(2, 8), seed=seed)
    x, T, S = _triple(rng, f.n)
    closed = total_primal_curvature(f, x, T, S)
    if f.marginal_gain(x, S) > 1e-12 and all(
        f.marginal_gain(x, S + [t for t in T if t not in S][:i]) > 1e-12 for i in range(len(T) - len(S))
    ):
        prod = gamma_product(f, x, [t for t in T if t not in S], S)
        assert abs(prod - closed) <= 1e-9


def _positive_along(f, x, order, S):
    base = list(S)
    for t in order:
        if f.marginal_gain(x, base) <= 1e-12:
            return False
        base.append(t)
    return True


@given(st.integers(0, 10**6))
def test_order_independence(seed):
    rng = random.Random(seed)
    f = random_monotone_function(rng.randint(2, 7), seed=seed, density=0.6)
    x, T, S = _triple(rng, f.n)
    diff = [t for t in T if t not in S][:5]
    T = sorted(S + diff)
    prods = [
        gamma_product(f, x, o, S)
        for o in itertools.permutations(diff)
        if _positive_along(f, x, o, S)
    ]
    if prods:
        assert max(prods) - min(prods) <= 1e-9
        assert abs(prods[0] - total_primal_curvature(f, x, T, S, debug=True)) <= 1e-9


def test_debug_mode_checks_product():
    f = random_monotone_function(6, seed=3, density=0.8)
    assert total_primal_curvature(f, 0, (1, 2, 4), (1,), debug=True) > 0


@given(st.integers(0, 10**6))
def test_telescoping(seed):
    rng = random.Random(seed)
    f = random_monotone_function(rng.randint(2, 8), seed=seed)
    _, T, S = _triple(rng, f.n)
    order = [t for t in T if t not in S]
    rng.shuffle(order)
    single = [f.marginal_gain(j, S) for j in order]
    terms = gamma_terms(f, order, S)
    if all(g > 1e-12 for g in single):
        lhs = f.evaluate(T) - f.evaluate(S)
        rhs = math.fsum(g * s for g, s in zip(terms, single))
        assert abs(lhs - rhs) <= 1e-9


def test_gamma_hat_square():
    f = build(square_cardinality(4))
    m = UniformMatroid(f.ground, 2)
    cert = gamma_hat_exact(f, (0, 1), m)
    assert cert.value == pytest.approx(2.4, abs=1e-12)
    assert cert.provenance == EXACT and cert.certified


@given(st.integers(0, 10**6))
def test_gamma_hat_matches_permutation_oracle(seed):
    desc, f = random_instance(seed, max_n=7)
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    S = tuple(sorted(rng.sample(range(f.n), rng.randint(0, min(k, f.n - 1)))))
    got = gamma_hat_exact(f, S, UniformMatroid(f.ground, k)).value
    want = naive_gamma_hat(f, S, k)
    assert got == want or abs(got - want) <= 1e-12 * max(1.0, abs(want))


@given(st.integers(0, 10**6))
def test_submodular_gamma_hat_at_most_k(seed):
    desc, f = random_instance(seed, max_n=8, families=("coverage", "modular"))
    k = 1 + seed % 3
    k = min(k, f.n)
    assert gamma_hat_exact(f, (), UniformMatroid(f.ground, k)).value <= k + 1e-12


def test_sampled_never_exceeds_exact():
    for seed in range(30):
        desc, f = random_instance(seed, max_n=8)
        m = UniformMatroid(f.ground, min(3, f.n))
        ex = gamma_hat_exact(f, (), m).value
        sm = gamma_hat_sampled(f, (), m, trials=200, seed=seed)
        assert sm.provenance == SAMPLED and not sm.certified
        assert sm.value <= ex


def test_gamma_hat_cap():
    f = build(square_cardinality(12))
    with pytest.raises(EnumerationInfeasibleError):
        gamma_hat_exact(f, (), UniformMatroid(f.ground, 6), cap=100)


def test_gamma_hat_sparse_path_agrees():
    # 22 free elements forces the dictionary DP
    f = build({"type": "modular", "n": 22, "weights": [1.0 + i for i in range(22)]})
    cert = gamma_hat_exact(f, (), UniformMatroid(f.ground, 2))
    assert cert.value == 2.0


def test_elemental_curvature_square():
    assert elemental_curvature(build(square_cardinality(4))) == pytest.approx(3.0)


def test_elemental_curvature_submodular_at_most_one():
    for seed in range(10):
        desc, f = random_instance(seed, max_n=7, families=("coverage",))
        assert elemental_curvature(f) <= 1.0 + 1e-12


def test_elemental_sampled_below_exact():
    f = random_monotone_function(7, seed=5)
    assert elemental_curvature(f, "sampled", trials=500) <= elemental_curvature(f) + 1e-12


def test_total_curvature():
    # A={1,2}, B={2,3}: f_A(X∖A) = 1 of f_A(∅) = 2
    f = build({"type": "coverage", "n": 2, "sets": [[1, 2], [2, 3]]})
    assert total_curvature(f) == 0.5
    assert total_curvature(build({"type": "modular", "n": 3, "weights": [1, 2, 3]})) == 0.0


def test_max_single_tpc_square():
    # f_x(S ∪ A)/f_x(S) = (2|S|+2|A|+1)/(2|S|+1)
    f = build(square_cardinality(5))
    assert max_single_tpc(f, (0,), 1) == 5.0 / 3.0
    assert max_single_tpc(f, tuple(range(5)), 1) == 0.0
