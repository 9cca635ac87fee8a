"""Primal curvature, total primal curvature, the Γ̂ estimators and classical curvatures.

All curvature ratios share one zero-denominator rule: a gain ``<= ZERO_TOL``
is treated as zero, ``0/0`` is 1 and ``positive/0`` is ``math.inf``
(unbounded).
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass

from . import kernels
from .errors import EnumerationInfeasibleError, InputError
from .kernels import ZERO_TOL
from .setfn import DENSE_TABLE_MAX_BITS, SetFunctionHandle, UniformMatroid, canonical

log = logging.getLogger(__name__)

DEFAULT_GAMMA_CAP = 10**7
DEFAULT_ELEMENTAL_CAP = 5 * 10**7

EXACT = "exact"
SAMPLED = "sampled-heuristic"
SUBMODULAR = "submodular-assumption"


def curvature_ratio(num: float, den: float, tol: float = ZERO_TOL) -> float:
    if den > tol:
        return num / den
    return math.inf if num > tol else 1.0


@dataclass(frozen=True)
class CurvatureCertificate:
    """An upper bound Γ̂(S) on the Γ-sum over feasible sets, with its provenance."""

    value: float
    provenance: str
    base: tuple
    k: int

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.value)

    @property
    def certified(self) -> bool:
        return self.provenance in (EXACT, SUBMODULAR)

    def to_dict(self):
        return {
            "value": "unbounded" if self.unbounded else self.value,
            "provenance": self.provenance,
            "base": list(self.base),
            "k": self.k,
        }


def submodular_certificate(S, k) -> CurvatureCertificate:
    """Γ̂ = k, valid for any submodular objective since every Γ term is at most 1."""
    return CurvatureCertificate(float(k), SUBMODULAR, canonical(S), k)


def primal_curvature(f: SetFunctionHandle, i: int, j: int, S=()) -> float:
    """``f_i(S ∪ {j}) / f_i(S)``; ``math.inf`` when only the denominator vanishes."""
    S = canonical(S)
    if i == j:
        raise InputError("primal curvature needs i != j")
    if i in S or j in S:
        raise InputError(f"i={i} and j={j} must lie outside S={list(S)}")
    den = f.marginal_gain(i, S)
    num = f.marginal_gain(i, S + (j,))
    return curvature_ratio(num, den)


def gamma_product(f: SetFunctionHandle, x: int, ordering, S=()) -> float:
    """Explicit product of primal curvatures along ``ordering`` (the elements of T∖S)."""
    base = list(canonical(S))
    prod = 1.0
    for t in ordering:
        prod *= primal_curvature(f, x, t, base)
        base.append(t)
    return prod


def total_primal_curvature(
    f: SetFunctionHandle, x: int, T, S=(), debug: bool = False, ordering=None
) -> float:
    """Γ(x | T, S) via the closed form ``f_x(S ∪ T) / f_x(S)``.

    With ``debug=True`` the explicit primal-curvature product is also
    evaluated (over ``ordering``, default sorted T∖S) and must agree within
    1e-9 whenever every intermediate gain is positive.
    """
    S, T = canonical(S), canonical(T)
    if not set(S) <= set(T):
        raise InputError(f"S={list(S)} is not a subset of T={list(T)}")
    if x in T:
        raise InputError(f"x={x} must lie outside T")
    den = f.marginal_gain(x, S)
    num = f.marginal_gain(x, T)
    closed = curvature_ratio(num, den)
    if debug:
        diff = [t for t in T if t not in S]
        order = list(ordering) if ordering is not None else diff
        if sorted(order) != diff:
            raise InputError("ordering must be a permutation of T∖S")
        gains = []
        base = list(S)
        for t in order:
            gains.append(f.marginal_gain(x, base))
            base.append(t)
        if all(g > ZERO_TOL for g in gains):
            prod = gamma_product(f, x, order, S)
            if abs(prod - closed) > 1e-9 * max(1.0, abs(closed)):
                raise AssertionError(
                    f"Γ product {prod!r} disagrees with closed form {closed!r}"
                )
    return closed


def gamma_terms(f: SetFunctionHandle, ordering, S=()):
    """Per-element terms ``Γ(j_t | S_{t-1}, S) = f_{j_t}(S_{t-1}) / f_{j_t}(S)``."""
    S = canonical(S)
    base = list(S)
    out = []
    for j in ordering:
        out.append(curvature_ratio(f.marginal_gain(j, base), f.marginal_gain(j, S)))
        base.append(j)
    return out


def _free(f, S):
    s = set(S)
    return tuple(x for x in range(f.n) if x not in s)


def _dp_work(r, k):
    return sum(math.comb(r, s) * s for s in range(min(k, r) + 1))


def _gamma_sum_sparse(f, S, free, k):
    """Dictionary DP for free sets too large for a dense bitmask table."""
    idx = {x: i for i, x in enumerate(free)}
    vals = {0: f.evaluate(S)}
    single = {}
    for x in free:
        vals[1 << idx[x]] = f.evaluate(S + (x,))
        single[x] = vals[1 << idx[x]] - vals[0]
    best = {0: 0.0}
    out = 0.0
    for size in range(1, min(k, len(free)) + 1):
        for combo in itertools.combinations(free, size):
            mask = 0
            for x in combo:
                mask |= 1 << idx[x]
            if mask not in vals:
                vals[mask] = f.evaluate(S + combo)
            b = -math.inf
            for x in combo:
                prev = mask ^ (1 << idx[x])
                v = best[prev] + curvature_ratio(vals[mask] - vals[prev], single[x])
                b = max(b, v)
            best[mask] = b
            out = max(out, b)
    return out


def gamma_hat_exact(
    f: SetFunctionHandle,
    S,
    m: UniformMatroid,
    cap: int = DEFAULT_GAMMA_CAP,
    backend=None,
) -> CurvatureCertificate:
    """Exact Γ̂(S): max over feasible T and orderings of T∖S of the Γ-sum.

    T ranges over every set with ``|T| <= k`` (so T∖S is any subset of the
    free elements of size ``<= k``). The ordering max is computed by a DP on
    the subset lattice; ``cap`` bounds its transition count.
    """
    S = canonical(S)
    free = _free(f, S)
    r = len(free)
    work = _dp_work(r, m.k)
    if work > cap:
        raise EnumerationInfeasibleError("exact Γ̂", work, cap)
    if r <= DENSE_TABLE_MAX_BITS:
        table = f.local_table(S, free, m.k)
        value = kernels.gamma_sum(table, r, m.k, backend=backend)
    else:
        value = _gamma_sum_sparse(f, S, free, m.k)
    return CurvatureCertificate(value, EXACT, S, m.k)


def gamma_hat_sampled(
    f: SetFunctionHandle, S, m: UniformMatroid, trials: int = 1000, seed: int = 0
) -> CurvatureCertificate:
    """Max of the Γ-sum over random (T∖S, ordering) draws. A heuristic, not a bound."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    S = canonical(S)
    free = _free(f, S)
    rng = random.Random(seed)
    best = 0.0
    top = min(m.k, len(free))
    if top == 0:
        return CurvatureCertificate(0.0, SAMPLED, S, m.k)
    fS = f.evaluate(S)
    single = {}
    for _ in range(trials):
        order = rng.sample(free, rng.randint(1, top))
        total = 0.0
        base = S
        prev = fS
        for j in order:
            if j not in single:
                single[j] = f.evaluate(S + (j,)) - fS
            base = base + (j,)
            cur = f.evaluate(base)
            total += curvature_ratio(cur - prev, single[j])
            prev = cur
        best = max(best, total)
    return CurvatureCertificate(best, SAMPLED, S, m.k)


def max_single_tpc(f: SetFunctionHandle, S, max_extra: int, backend=None) -> float:
    """Max of Γ(x | T, S) over ``T ⊇ S`` with ``|T∖S| <= max_extra`` and ``x ∉ T``.

    Deterministic counterpart of the adaptive Γ̂(ψ). Returns 0.0 when no
    element lies outside S.
    """
    S = canonical(S)
    free = _free(f, S)
    r = len(free)
    if r == 0:
        return 0.0
    table = f.local_table(S, free, max_extra + 1)
    return kernels.max_single_tpc(table, r, max_extra, backend=backend)


def elemental_curvature(
    f: SetFunctionHandle,
    mode: str = "exact",
    cap: int = DEFAULT_ELEMENTAL_CAP,
    trials: int = 10000,
    seed: int = 0,
    backend=None,
) -> float:
    """Max primal curvature over all ``(S, i, j)``.

    ``mode="sampled"`` draws random triples and returns a lower estimate.
    """
    n = f.n
    if mode == "exact":
        need = (1 << n) * n * n
        if need > cap:
            raise EnumerationInfeasibleError("exact elemental curvature", need, cap)
        return kernels.elemental(f.full_table(), n, backend=backend)
    if mode != "sampled":
        raise InputError(f"unknown mode {mode!r}")
    if n < 2:
        return 0.0
    rng = random.Random(seed)
    best = 0.0
    for _ in range(trials):
        i, j = rng.sample(range(n), 2)
        rest = [x for x in range(n) if x not in (i, j)]
        S = rng.sample(rest, rng.randint(0, len(rest)))
        best = max(best, primal_curvature(f, i, j, S))
    return best


def total_curvature(f: SetFunctionHandle) -> float:
    """Conforti-Cornuéjols total curvature ``max_j 1 - f_j(X∖{j}) / f_j(∅)``.

    Elements with ``f({j}) = f(∅)`` are skipped with a warning; returns 0.0
    if every element is skipped.
    """
    X = tuple(range(f.n))
    fX = f.evaluate(X)
    f0 = f.evaluate(())
    best = None
    for j in X:
        den = f.evaluate((j,)) - f0
        if den <= ZERO_TOL:
            log.warning("total curvature: element %d has zero singleton gain, skipped", j)
            continue
        rest = tuple(x for x in X if x != j)
        c = 1.0 - (fX - f.evaluate(rest)) / den
        best = c if best is None else max(best, c)
    return 0.0 if best is None else best
