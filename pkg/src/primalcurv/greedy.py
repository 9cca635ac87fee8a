"""Deterministic greedy on a k-uniform matroid.

Ties go to the lowest element id. Greedy fills all ``k`` slots even when the
best gain is zero.

Evaluation accounting for exhaustive mode: one call for ``f(S_0)`` plus one
per candidate scanned, i.e. ``1 + sum(n - l for l in range(k))`` without the
extension and another ``n - k`` with it.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, replace

from .errors import InputError, SupermatroidUndefinedError
from .setfn import SetFunctionHandle, UniformMatroid

log = logging.getLogger(__name__)

LAZY_SLACK = 1e-9


@dataclass(frozen=True)
class GreedyChain:
    picks: tuple  # g_1..g_k
    gains: tuple  # f_{g_{l+1}}(S_l)
    values: tuple  # f(S_0)..f(S_k)
    k: int
    n: int
    ext_element: int | None = None
    ext_value: float | None = None

    @property
    def solutions(self):
        """``S_0 .. S_k`` as sorted tuples."""
        return tuple(tuple(sorted(self.picks[:l])) for l in range(self.k + 1))

    @property
    def solution(self):
        return tuple(sorted(self.picks))

    @property
    def value(self):
        return self.values[-1]

    @property
    def has_extension(self):
        return self.ext_element is not None

    @property
    def ext_gain(self):
        return None if self.ext_value is None else self.ext_value - self.values[-1]


def _step_exhaustive(f, current, value):
    best_x, best_gain, best_val = None, None, None
    for x in range(f.n):
        if x in current:
            continue
        v = f.evaluate(current | {x})
        gain = v - value
        if best_gain is None or gain > best_gain:
            best_x, best_gain, best_val = x, gain, v
    return best_x, best_gain, best_val


class _LazyScanner:
    """CELF-style scanner: stale gains are upper bounds under submodularity.

    Rounding can lift a recomputed gain a few ulps above its stale bound, so
    every entry whose bound is within ``LAZY_SLACK`` of the best fresh gain is
    recomputed before the tie rule is applied.
    """

    def __init__(self, f):
        self.f = f
        self.heap = []  # (-bound, id, value)

    def step(self, current, value):
        f = self.f
        if not self.heap and not current:
            fresh = [(f.evaluate({x}) - value, x, None) for x in range(f.n)]
            fresh = [(g, x, g + value) for g, x, _ in fresh]
        else:
            fresh = []
            best = -math.inf
            while self.heap:
                bound = -self.heap[0][0]
                if fresh and bound < best - LAZY_SLACK * max(1.0, abs(best)):
                    break
                _, x, _ = heapq.heappop(self.heap)
                v = f.evaluate(current | {x})
                fresh.append((v - value, x, v))
                best = max(best, v - value)
        top = max(g for g, _, _ in fresh)
        pick = min(x for g, x, _ in fresh if g == top)
        chosen = None
        for g, x, v in fresh:
            if x == pick:
                chosen = (x, g, v)
            else:
                heapq.heappush(self.heap, (-g, x, v))
        return chosen


def greedy_maximize(
    f: SetFunctionHandle,
    m: UniformMatroid,
    mode: str = "exhaustive",
    extend: bool = True,
) -> GreedyChain:
    """Run greedy for ``m.k`` steps, plus the ``(k+1)``-th step when ``k < n``.

    ``mode="lazy"`` uses stale-bound priority scanning; it is only valid for
    submodular objectives and falls back to exhaustive scanning (with a
    warning) when ``f.submodular`` is false. Both modes return identical
    chains.
    """
    if mode not in ("exhaustive", "lazy"):
        raise InputError(f"unknown greedy mode {mode!r}")
    if m.n != f.n:
        raise InputError(f"matroid ground size {m.n} != objective ground size {f.n}")
    if mode == "lazy" and not f.submodular:
        log.warning("lazy greedy needs a submodular objective; scanning exhaustively")
        mode = "exhaustive"

    current = set()
    value = f.evaluate(())
    picks, gains, values = [], [], [value]
    lazy = _LazyScanner(f) if mode == "lazy" else None

    def step():
        if lazy is not None:
            return lazy.step(current, value)
        return _step_exhaustive(f, current, value)

    for _ in range(m.k):
        x, gain, v = step()
        picks.append(x)
        gains.append(gain)
        values.append(v)
        current.add(x)
        value = v

    chain = GreedyChain(tuple(picks), tuple(gains), tuple(values), m.k, m.n)
    if extend and m.k < m.n:
        x, _, v = step()
        chain = replace(chain, ext_element=x, ext_value=v)
    return chain


def extend_chain(chain: GreedyChain, f: SetFunctionHandle, m: UniformMatroid) -> GreedyChain:
    """One more greedy step on top of ``S_k``."""
    if m.k >= m.n:
        raise SupermatroidUndefinedError(
            f"k = n = {m.n}: no (k+1)-uniform supermatroid exists"
        )
    if chain.has_extension:
        raise InputError("chain already carries its extension")
    x, _, v = _step_exhaustive(f, set(chain.picks), chain.values[-1])
    return replace(chain, ext_element=x, ext_value=v)
