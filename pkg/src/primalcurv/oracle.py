"""Brute-force ground truth and random monotone test functions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInstanceError, EnumerationInfeasibleError, InputError
from .greedy import GreedyChain
from .setfn import DENSE_TABLE_MAX_BITS, SetFunctionHandle, UniformMatroid, from_mask

DEFAULT_ORACLE_CAP = 10**6


@dataclass(frozen=True)
class OracleResult:
    optimum: tuple
    value: float
    enumerated: int


def brute_force_optimum(
    f: SetFunctionHandle, m: UniformMatroid, cap: int = DEFAULT_ORACLE_CAP, backend=None
) -> OracleResult:
    """Best size-k set by enumeration; ties go to the lexicographically first set.

    Size-k sets suffice because f is monotone.
    """
    n, k = m.n, m.k
    count = math.comb(n, k)
    if count > cap:
        raise EnumerationInfeasibleError("brute-force optimum", count, cap)
    if n <= DENSE_TABLE_MAX_BITS:
        table = f.local_table((), range(n), k)
        mask = kernels.best_subset(table, n, k, backend=backend)
        return OracleResult(from_mask(mask), float(table[mask]), count)
    best, best_val = None, -math.inf
    for combo in itertools.combinations(range(n), k):
        v = f.evaluate(combo)
        if v > best_val:
            best, best_val = combo, v
    return OracleResult(best, best_val, count)


def exact_ratio(chain: GreedyChain, opt: OracleResult) -> float:
    if opt.value <= 0:
        raise DegenerateInstanceError("f(S*) = 0: exact ratio undefined")
    return chain.value / opt.value


@dataclass(frozen=True)
class RandomMonotoneSpec:
    """Parameters that regenerate a random monotone function bit-for-bit."""

    n: int
    density: float = 0.25
    seed: int = 0
    max_order: int = 3

    def to_dict(self):
        return {
            "type": "random_monotone",
            "n": self.n,
            "density": self.density,
            "seed": self.seed,
            "max_order": self.max_order,
        }


def subset_weights(spec: RandomMonotoneSpec):
    """Non-negative weight per bitmask; nonzero only on sizes ``1..max_order``."""
    n = spec.n
    rng = np.random.default_rng(spec.seed)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for j in range(n):
        sizes += (masks >> j) & 1
    eligible = (sizes >= 1) & (sizes <= spec.max_order)
    keep = rng.random(masks.shape) < spec.density
    vals = rng.random(masks.shape)
    return np.where(eligible & keep, vals, 0.0)


def random_monotone_function(
    n: int, density: float = 0.25, seed: int = 0, max_order: int = 3, backend=None
) -> SetFunctionHandle:
    """``f(S) = sum of w_R over nonempty R ⊆ S`` with random ``w_R >= 0``.

    Monotone, normalized and supermodular by construction (nonnegative
    interaction weights only raise marginal gains); modular when
    ``max_order == 1``.
    """
    if n > 12:
        raise InputError(f"random monotone functions are tabulated; n={n} > 12")
    spec = RandomMonotoneSpec(n, density, seed, max_order)
    table = kernels.subset_sum(subset_weights(spec), n, backend=backend)
    table.setflags(write=False)

    def value(subset):
        mask = 0
        for x in subset:
            mask |= 1 << x
        return float(table[mask])

    f = SetFunctionHandle(n, value, submodular=max_order <= 1, name="random_monotone")
    f.spec = spec
    return f
