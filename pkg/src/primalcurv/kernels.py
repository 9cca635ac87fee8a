"""Bitmask kernels over tabulated set functions.

Every kernel takes a float64 table indexed by subset bitmask (bit ``j`` set
means element ``j`` is present) and has two implementations: a loop version
compiled with numba, and a vectorized numpy version. Both produce
bit-identical results; the active one is chosen by :func:`set_backend`, the
``backend=`` keyword, or the ``PRIMALCURV_NO_NUMBA`` environment flag.

Zero-denominator convention for curvature ratios: a denominator ``<= tol``
counts as zero, ``0/0`` maps to 1 and ``positive/0`` maps to ``inf``.
"""

import numpy as np

from ._accel import HAVE_NUMBA, default_backend, njit

ZERO_TOL = 1e-12

_backend = default_backend()


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def get_backend():
    return _backend


def _pick(backend):
    name = backend or _backend
    if name == "numba" and not HAVE_NUMBA:
        name = "numpy"
    return name


# ---------------------------------------------------------------------------
# numba loop kernels


@njit(cache=True)
def _ratio_nb(num, den, tol):
    if den > tol:
        return num / den
    if num > tol:
        return np.inf
    return 1.0


@njit(cache=True)
def _popcount_nb(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _gamma_sum_nb(table, r, k, tol):
    size = 1 << r
    best = np.full(size, -np.inf)
    best[0] = 0.0
    out = 0.0
    base = table[0]
    for mask in range(1, size):
        if _popcount_nb(mask) > k:
            continue
        b = -np.inf
        for j in range(r):
            bit = 1 << j
            if mask & bit:
                prev = mask ^ bit
                term = _ratio_nb(table[mask] - table[prev], table[bit] - base, tol)
                v = best[prev] + term
                if v > b:
                    b = v
        best[mask] = b
        if b > out:
            out = b
    return out


@njit(cache=True)
def _max_single_tpc_nb(table, r, max_extra, tol):
    size = 1 << r
    base = table[0]
    out = 0.0
    for mask in range(size):
        if _popcount_nb(mask) > max_extra:
            continue
        for x in range(r):
            bit = 1 << x
            if mask & bit:
                continue
            v = _ratio_nb(table[mask | bit] - table[mask], table[bit] - base, tol)
            if v > out:
                out = v
    return out


@njit(cache=True)
def _elemental_nb(table, n, tol):
    size = 1 << n
    out = 0.0
    for s in range(size):
        for i in range(n):
            bi = 1 << i
            if s & bi:
                continue
            den = table[s | bi] - table[s]
            for j in range(n):
                bj = 1 << j
                if j == i or (s & bj):
                    continue
                v = _ratio_nb(table[s | bi | bj] - table[s | bj], den, tol)
                if v > out:
                    out = v
    return out


@njit(cache=True)
def _reverse_bits_nb(x, n):
    y = 0
    for j in range(n):
        if x & (1 << j):
            y |= 1 << (n - 1 - j)
    return y


@njit(cache=True)
def _best_subset_nb(table, n, k):
    size = 1 << n
    best_mask = -1
    best_val = -np.inf
    best_key = -1
    for mask in range(size):
        if _popcount_nb(mask) != k:
            continue
        v = table[mask]
        key = _reverse_bits_nb(mask, n)
        if v > best_val or (v == best_val and key > best_key):
            best_val = v
            best_mask = mask
            best_key = key
    return best_mask


@njit(cache=True)
def _subset_sum_nb(weights, n):
    f = weights.copy()
    size = 1 << n
    for j in range(n):
        bit = 1 << j
        for mask in range(size):
            if mask & bit:
                f[mask] += f[mask ^ bit]
    return f


# ---------------------------------------------------------------------------
# numpy fallbacks


def _ratio_np(num, den, tol):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = num / np.where(den > tol, den, 1.0)
    zero = np.where(num > tol, np.inf, 1.0)
    return np.where(den > tol, q, zero)


def _popcounts(r):
    masks = np.arange(1 << r, dtype=np.int64)
    pc = np.zeros(masks.shape, dtype=np.int64)
    for j in range(r):
        pc += (masks >> j) & 1
    return masks, pc


def _gamma_sum_np(table, r, k, tol):
    masks, pc = _popcounts(r)
    best = np.full(masks.shape, -np.inf)
    best[0] = 0.0
    base = table[0]
    for s in range(1, min(k, r) + 1):
        layer = masks[pc == s]
        b = np.full(layer.shape, -np.inf)
        for j in range(r):
            bit = 1 << j
            has = (layer & bit) != 0
            m = layer[has]
            prev = m ^ bit
            term = _ratio_np(table[m] - table[prev], table[bit] - base, tol)
            b[has] = np.maximum(b[has], best[prev] + term)
        best[layer] = b
    return float(max(0.0, best[pc <= k].max()))


def _max_single_tpc_np(table, r, max_extra, tol):
    masks, pc = _popcounts(r)
    base = table[0]
    out = 0.0
    eligible = masks[pc <= max_extra]
    for x in range(r):
        bit = 1 << x
        m = eligible[(eligible & bit) == 0]
        if m.size == 0:
            continue
        v = _ratio_np(table[m | bit] - table[m], table[bit] - base, tol)
        out = max(out, float(v.max()))
    return out


def _elemental_np(table, n, tol):
    masks = np.arange(1 << n, dtype=np.int64)
    out = 0.0
    for i in range(n):
        bi = 1 << i
        si = masks[(masks & bi) == 0]
        den = table[si | bi] - table[si]
        for j in range(n):
            bj = 1 << j
            if j == i:
                continue
            keep = (si & bj) == 0
            s = si[keep]
            if s.size == 0:
                continue
            v = _ratio_np(table[s | bi | bj] - table[s | bj], den[keep], tol)
            out = max(out, float(v.max()))
    return out


def _best_subset_np(table, n, k):
    masks, pc = _popcounts(n)
    cand = masks[pc == k]
    vals = table[cand]
    top = cand[vals == vals.max()]
    rev = np.zeros(top.shape, dtype=np.int64)
    for j in range(n):
        rev |= ((top >> j) & 1) << (n - 1 - j)
    return int(top[np.argmax(rev)])


def _subset_sum_np(weights, n):
    f = np.array(weights, dtype=np.float64, copy=True)
    for j in range(n):
        view = f.reshape(-1, 2, 1 << j)
        view[:, 1, :] += view[:, 0, :]
    return f


# ---------------------------------------------------------------------------
# dispatch


def _as_table(table):
    return np.ascontiguousarray(table, dtype=np.float64)


def gamma_sum(table, r, k, tol=ZERO_TOL, backend=None):
    """Max over subsets ``A`` (``|A| <= k``) and orderings of the ratio sum.

    ``table[A]`` holds ``f(S | A)`` for a fixed base ``S`` and ``A`` ranging
    over the ``r`` free elements. Each term is ``f_j(S | prefix) / f_j(S)``.
    The max over orderings is a longest-path DP on the subset lattice.
    """
    table = _as_table(table)
    if r == 0 or k == 0:
        return 0.0
    if _pick(backend) == "numba":
        return float(_gamma_sum_nb(table, r, k, tol))
    return _gamma_sum_np(table, r, k, tol)


def max_single_tpc(table, r, max_extra, tol=ZERO_TOL, backend=None):
    """Max of ``f_x(S | A) / f_x(S)`` over ``|A| <= max_extra``, ``x`` not in ``A``.

    Returns 0.0 when no free element exists.
    """
    table = _as_table(table)
    if r == 0:
        return 0.0
    if _pick(backend) == "numba":
        return float(_max_single_tpc_nb(table, r, max_extra, tol))
    return _max_single_tpc_np(table, r, max_extra, tol)


def elemental(table, n, tol=ZERO_TOL, backend=None):
    """Max primal curvature over all ``(S, i, j)`` with ``i != j``, both outside ``S``."""
    table = _as_table(table)
    if n < 2:
        return 0.0
    if _pick(backend) == "numba":
        return float(_elemental_nb(table, n, tol))
    return _elemental_np(table, n, tol)


def best_subset(table, n, k, backend=None):
    """Bitmask of the best size-``k`` set; ties go to the lexicographically first."""
    table = _as_table(table)
    if _pick(backend) == "numba":
        return int(_best_subset_nb(table, n, k))
    return _best_subset_np(table, n, k)


def subset_sum(weights, n, backend=None):
    """Zeta transform: ``out[S] = sum(weights[R] for R subset of S)``."""
    weights = _as_table(weights)
    if _pick(backend) == "numba":
        return _subset_sum_nb(weights, n)
    return _subset_sum_np(weights, n)
