"""Ground set, uniform matroid and the counted set-function handle."""

from __future__ import annotations

import itertools
import math
import random
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EnumerationInfeasibleError, InputError, ObjectiveFaultError

MONOTONE_TOL = 1e-12
DENSE_TABLE_MAX_BITS = 20


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"ground set needs n >= 1, got {self.n}")

    @property
    def elements(self) -> range:
        return range(self.n)


@dataclass(frozen=True)
class UniformMatroid:
    ground: GroundSet
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.ground.n:
            raise InputError(f"need 1 <= k <= n, got k={self.k}, n={self.ground.n}")

    @property
    def n(self) -> int:
        return self.ground.n

    def is_feasible(self, subset: Iterable[int]) -> bool:
        return len(set(subset)) <= self.k


@dataclass(frozen=True)
class MarginalGain:
    element: int
    base: tuple
    value: float


def canonical(subset: Iterable[int]) -> tuple:
    """Sorted, de-duplicated tuple of ids."""
    return tuple(sorted(set(int(x) for x in subset)))


def to_mask(subset: Iterable[int]) -> int:
    m = 0
    for x in subset:
        m |= 1 << int(x)
    return m


def from_mask(mask: int) -> tuple:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


class SetFunctionHandle:
    """Black-box objective ``f: 2^X -> R`` with an evaluation counter.

    The raw ``f(∅)`` is evaluated once at construction and subtracted from
    every later value, so ``evaluate(())`` is always 0. That registration call
    is not counted.

    Parameters
    ----------
    n : int
        Ground set size; ids are ``0..n-1``.
    evaluator : callable
        Maps a sorted tuple of ids to a real value.
    submodular : bool
        Declared property of the family. Only used to allow lazy greedy and
        the ``Γ̂ = k`` shortcut; never verified here.
    name : str
        Label for reports.
    normalize : bool
        Subtract the raw ``f(∅)``. Off only for auditing raw callables.
    """

    def __init__(
        self,
        n: int,
        evaluator: Callable[[tuple], float],
        *,
        submodular: bool = False,
        name: str = "f",
        normalize: bool = True,
    ):
        self.ground = GroundSet(n)
        self._evaluator = evaluator
        self.submodular = submodular
        self.name = name
        self._lock = threading.Lock()
        self._count = 0
        offset = float(evaluator(())) if normalize else 0.0
        if not math.isfinite(offset):
            raise ObjectiveFaultError((), offset)
        self._offset = offset
        self._tables: dict = {}

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def eval_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def _check(self, subset: tuple) -> None:
        for x in subset:
            if not 0 <= x < self.n:
                raise InputError(f"element id {x} out of range 0..{self.n - 1}")

    def evaluate(self, subset: Iterable[int]) -> float:
        s = canonical(subset)
        self._check(s)
        with self._lock:
            self._count += 1
        value = float(self._evaluator(s)) - self._offset
        if not math.isfinite(value):
            raise ObjectiveFaultError(s, value)
        return value

    __call__ = evaluate

    def marginal_gain(self, x: int, subset: Iterable[int]) -> float:
        s = canonical(subset)
        if x in s:
            raise InputError(f"element {x} already in base set {list(s)}")
        self._check((x,))
        return self.evaluate(s + (x,)) - self.evaluate(s)

    def local_table(self, base: Sequence[int], free: Sequence[int], max_size: int):
        """Tabulate ``f(base | A)`` for ``A`` over subsets of ``free``.

        Entry ``mask`` corresponds to ``A = {free[j] : bit j of mask}``; only
        subsets with ``|A| <= max_size`` are evaluated, the rest are NaN.
        """
        base = canonical(base)
        free = tuple(free)
        r = len(free)
        if r > DENSE_TABLE_MAX_BITS:
            raise EnumerationInfeasibleError("dense table", 1 << r, 1 << DENSE_TABLE_MAX_BITS)
        key = (base, free, max_size)
        cached = self._tables.get(key)
        if cached is not None:
            return cached
        table = np.full(1 << r, np.nan)
        for size in range(min(max_size, r) + 1):
            for combo in itertools.combinations(range(r), size):
                mask = 0
                for j in combo:
                    mask |= 1 << j
                table[mask] = self.evaluate(base + tuple(free[j] for j in combo))
        table.setflags(write=False)
        self._tables[key] = table
        return table

    def full_table(self):
        """``f`` on every subset of the ground set, indexed by bitmask."""
        return self.local_table((), range(self.n), self.n)


def evaluate(f: SetFunctionHandle, subset: Iterable[int]) -> float:
    return f.evaluate(subset)


def marginal_gain(f: SetFunctionHandle, x: int, subset: Iterable[int]) -> float:
    return f.marginal_gain(x, subset)


@dataclass
class Violation:
    kind: str
    base: tuple
    element: int | None
    drop: float


@dataclass
class AuditReport:
    exhaustive: bool
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_function(
    f,
    ground: GroundSet | None = None,
    trials: int = 1000,
    seed: int = 0,
    tol: float = MONOTONE_TOL,
) -> AuditReport:
    """Look for monotonicity violations ``f(S ∪ {x}) < f(S) - tol``.

    Every ``(S, x)`` pair is checked when ``2^n <= 4096``; otherwise
    ``trials`` random pairs are drawn. ``f`` may be a bare callable on
    sorted tuples (then ``ground`` is required), in which case its raw
    ``f(∅)`` is also checked against zero.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    if not isinstance(f, SetFunctionHandle):
        if ground is None:
            raise InputError("a bare callable needs an explicit ground set")
        f = SetFunctionHandle(ground.n, f, normalize=False)
    n = (ground or f.ground).n
    report = AuditReport(exhaustive=(1 << n) <= 4096, checked=0)
    empty = f.evaluate(())
    if abs(empty) > tol:
        report.violations.append(Violation("nonzero-empty", (), None, empty))

    def check(s, x):
        drop = f.evaluate(s) - f.evaluate(s + (x,))
        report.checked += 1
        if drop > tol:
            report.violations.append(Violation("monotonicity", s, x, drop))

    if report.exhaustive:
        table = f.full_table()
        for mask in range(1 << n):
            for x in range(n):
                bit = 1 << x
                if mask & bit:
                    continue
                report.checked += 1
                drop = table[mask] - table[mask | bit]
                if drop > tol:
                    report.violations.append(
                        Violation("monotonicity", from_mask(mask), x, float(drop))
                    )
    else:
        rng = random.Random(seed)
        for _ in range(trials):
            size = rng.randrange(n)
            s = tuple(sorted(rng.sample(range(n), size)))
            rest = [x for x in range(n) if x not in s]
            check(s, rng.choice(rest))
    return report
