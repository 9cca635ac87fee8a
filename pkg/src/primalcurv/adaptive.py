"""Stochastic items, the adaptive greedy policy and its curvature certificate.

Items carry independent finite state distributions. A realization ``phi`` is
a tuple of state indices (one per item); a partial realization ``psi`` is a
tuple of ``(item, state_index)`` pairs in observation order. Every
expectation is an exact enumeration over the realizations consistent with
``psi`` (zero-probability states are skipped) summed with :func:`math.fsum`.

Instance JSON::

    {"type": "adaptive",
     "items": [{"states": ["live", "dead"], "probs": [0.5, 0.5]}, ...],
     "objective": {"family": "modular", "values": [[1, 0], ...]}}

Objective families (tables are indexed ``[item][state]``):

* ``modular``: ``sum(values[e][phi[e]])``
* ``coverage``: weighted union of ``covers[e][phi[e]]``, optional
  ``item_weights`` and exponent ``p`` (default 1)
* ``synergy``: ``sum(values[e][s_e]) + sum(synergy[x][y] * values[x][s_x] * values[y][s_y])``
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .curvature import EXACT, CurvatureCertificate, curvature_ratio
from .errors import EnumerationInfeasibleError, InputError, SchemaError, UnsupportedFamilyError
from .objectives import (
    CoverageInstance,
    ModularInstance,
    PowerCoverageInstance,
    SynergyInstance,
    _nonneg_list,
    _number,
    coverage_value,
)
from .ratios import clamp01, geometric_ratio

log = logging.getLogger(__name__)

DEFAULT_ADAPTIVE_CAP = 10**6
PROB_TOL = 1e-12


@dataclass(frozen=True)
class StochasticItem:
    states: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.states) < 1 or len(self.states) != len(self.probs):
            raise InputError("an item needs >= 1 state and one probability per state")
        if any(not 0 <= p <= 1 for p in self.probs):
            raise InputError(f"probabilities must lie in [0, 1]: {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise InputError(f"probabilities must sum to 1: {self.probs}")

    @property
    def support(self):
        return tuple(s for s, p in enumerate(self.probs) if p > 0)


# ---------------------------------------------------------------------------
# objective families


@dataclass(frozen=True)
class StateModular:
    values: tuple

    def __call__(self, E, phi):
        return math.fsum(self.values[e][phi[e]] for e in E)

    def induced(self):
        return ModularInstance(tuple(v[0] for v in self.values))

    def to_dict(self):
        return {"family": "modular", "values": [list(v) for v in self.values]}


@dataclass(frozen=True)
class StateCoverage:
    covers: tuple
    item_weights: tuple | None = None
    p: float = 1.0

    def __call__(self, E, phi):
        return coverage_value((self.covers[e][phi[e]] for e in E), self.item_weights, self.p)

    def induced(self):
        cov = CoverageInstance(tuple(c[0] for c in self.covers), self.item_weights)
        return cov if self.p == 1 else PowerCoverageInstance(cov, self.p)

    def to_dict(self):
        d = {"family": "coverage", "covers": [[list(s) for s in c] for c in self.covers]}
        if self.item_weights is not None:
            d["item_weights"] = list(self.item_weights)
        if self.p != 1:
            d["p"] = self.p
        return d


@dataclass(frozen=True)
class StateSynergy:
    values: tuple
    synergy: tuple

    def __call__(self, E, phi):
        v, b = self.values, self.synergy
        terms = [v[e][phi[e]] for e in E]
        terms.extend(b[x][y] * v[x][phi[x]] * v[y][phi[y]] for x, y in itertools.combinations(E, 2))
        return math.fsum(terms)

    def induced(self):
        n = len(self.values)
        w = tuple(v[0] for v in self.values)
        rows = [[0.0] * n for _ in range(n)]
        for x, y in itertools.combinations(range(n), 2):
            rows[x][y] = rows[y][x] = self.synergy[x][y] * w[x] * w[y]
        return SynergyInstance(w, tuple(tuple(r) for r in rows))

    def to_dict(self):
        return {
            "family": "synergy",
            "values": [list(v) for v in self.values],
            "synergy": [list(r) for r in self.synergy],
        }


@dataclass(frozen=True)
class AdaptiveInstance:
    items: tuple
    objective: object

    @property
    def n(self):
        return len(self.items)

    @property
    def deterministic(self):
        return all(len(it.states) == 1 for it in self.items)

    def value(self, E, phi):
        return float(self.objective(E, phi))

    def induced_instance(self):
        """The deterministic family instance when every item has one state."""
        if not self.deterministic:
            raise InputError("induced deterministic instance needs single-state items")
        return self.objective.induced()

    def to_dict(self):
        return {
            "type": "adaptive",
            "items": [{"states": list(it.states), "probs": list(it.probs)} for it in self.items],
            "objective": self.objective.to_dict(),
        }


def _state_table(field_name, table, items, convert):
    if not isinstance(table, list) or len(table) != len(items):
        raise SchemaError(field_name, f"expected one row per item ({len(items)})")
    out = []
    for e, row in enumerate(table):
        if not isinstance(row, list) or len(row) != len(items[e].states):
            raise SchemaError(f"{field_name}[{e}]", "expected one entry per state")
        out.append(tuple(convert(f"{field_name}[{e}][{s}]", v) for s, v in enumerate(row)))
    return tuple(out)


def _nonneg(name, v):
    v = _number(name, v)
    if v < 0:
        raise SchemaError(name, f"must be >= 0, got {v}")
    return v


def _cover_list(name, v):
    if not isinstance(v, list) or any(isinstance(u, bool) or not isinstance(u, int) or u < 0 for u in v):
        raise SchemaError(name, "expected a list of non-negative item ids")
    return tuple(v)


def parse_adaptive(d) -> AdaptiveInstance:
    if not isinstance(d, dict) or d.get("type") != "adaptive":
        raise UnsupportedFamilyError("type", "expected type 'adaptive'")
    raw_items = d.get("items")
    if not isinstance(raw_items, list) or not raw_items:
        raise SchemaError("items", "expected a non-empty list")
    items = []
    for e, it in enumerate(raw_items):
        if not isinstance(it, dict) or "states" not in it or "probs" not in it:
            raise SchemaError(f"items[{e}]", "needs 'states' and 'probs'")
        probs = _nonneg_list(f"items[{e}].probs", it["probs"])
        try:
            items.append(StochasticItem(tuple(it["states"]), tuple(probs)))
        except InputError as exc:
            raise SchemaError(f"items[{e}]", str(exc)) from exc
    items = tuple(items)
    obj = d.get("objective")
    if not isinstance(obj, dict):
        raise SchemaError("objective", "expected an object")
    fam = obj.get("family")
    if fam == "modular":
        objective = StateModular(_state_table("objective.values", obj.get("values"), items, _nonneg))
    elif fam == "coverage":
        covers = _state_table("objective.covers", obj.get("covers"), items, _cover_list)
        weights = obj.get("item_weights")
        if weights is not None:
            weights = tuple(_nonneg_list("objective.item_weights", weights))
            top = max((u for c in covers for s in c for u in s), default=-1)
            if top >= len(weights):
                raise SchemaError("objective.item_weights", f"item id {top} has no weight")
        p = _number("objective.p", obj.get("p", 1.0))
        if p < 1:
            raise SchemaError("objective.p", f"must be >= 1, got {p}")
        objective = StateCoverage(covers, weights, p)
    elif fam == "synergy":
        values = _state_table("objective.values", obj.get("values"), items, _nonneg)
        syn = obj.get("synergy")
        n = len(items)
        if not isinstance(syn, list) or len(syn) != n:
            raise SchemaError("objective.synergy", f"expected an {n}x{n} matrix")
        rows = tuple(tuple(_nonneg_list(f"objective.synergy[{i}]", r, n)) for i, r in enumerate(syn))
        for i in range(n):
            if rows[i][i] != 0:
                raise SchemaError(f"objective.synergy[{i}][{i}]", "diagonal must be zero")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise SchemaError(f"objective.synergy[{i}][{j}]", "matrix must be symmetric")
        objective = StateSynergy(values, rows)
    else:
        raise UnsupportedFamilyError("objective.family", f"unsupported family {fam!r}")
    return AdaptiveInstance(items, objective)


def load_adaptive(path) -> AdaptiveInstance:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("<file>", f"invalid JSON: {exc}") from exc
    return parse_adaptive(raw)


def save_adaptive(inst: AdaptiveInstance, path):
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# expectations


def _canon(psi):
    return tuple(sorted(psi))


def _dom(psi):
    return tuple(sorted(i for i, _ in psi))


class AdaptiveModel:
    """Exact-enumeration evaluator for one instance, with memoized expectations."""

    def __init__(self, inst: AdaptiveInstance, cap: int = DEFAULT_ADAPTIVE_CAP):
        self.inst = inst
        self.cap = cap
        total = math.prod(len(it.support) for it in inst.items)
        if total > cap:
            raise EnumerationInfeasibleError("realizations", total, cap)
        self._delta = {}
        self._value = {}

    @property
    def n(self):
        return self.inst.n

    def consistent(self, psi):
        """``(phi, P(phi | psi))`` for every realization agreeing with ``psi``."""
        fixed = dict(psi)
        free = [j for j in range(self.n) if j not in fixed]
        supports = [self.inst.items[j].support for j in free]
        for combo in itertools.product(*supports):
            phi = [0] * self.n
            for j, s in fixed.items():
                phi[j] = s
            p = 1.0
            for j, s in zip(free, combo):
                phi[j] = s
                p *= self.inst.items[j].probs[s]
            yield tuple(phi), p

    def expected_value(self, psi):
        """``E[f(dom(psi), Phi) | psi]``."""
        key = _canon(psi)
        if key not in self._value:
            E = _dom(psi)
            self._value[key] = math.fsum(p * self.inst.value(E, phi) for phi, p in self.consistent(key))
        return self._value[key]

    def delta(self, i, psi):
        """Conditional expected marginal gain Δ(i | psi)."""
        key = (i, _canon(psi))
        if key not in self._delta:
            if i in dict(psi):
                raise InputError(f"item {i} already observed in psi")
            E = _dom(psi)
            Ei = tuple(sorted(E + (i,)))
            v = self.inst.value
            self._delta[key] = math.fsum(
                p * (v(Ei, phi) - v(E, phi)) for phi, p in self.consistent(key[1])
            )
        return self._delta[key]


def _model(obj, cap=DEFAULT_ADAPTIVE_CAP):
    return obj if isinstance(obj, AdaptiveModel) else AdaptiveModel(obj, cap)


def conditional_expected_gain(
    obj, i, psi=(), method="exact", samples=10000, seed=0
) -> float:
    """Δ(i | psi). ``method="monte_carlo"`` is an explicit, uncertified estimate."""
    if method == "exact":
        return _model(obj).delta(i, psi)
    if method != "monte_carlo":
        raise InputError(f"unknown method {method!r}")
    inst = obj.inst if isinstance(obj, AdaptiveModel) else obj
    rng = random.Random(seed)
    fixed = dict(psi)
    if i in fixed:
        raise InputError(f"item {i} already observed in psi")
    E = _dom(psi)
    Ei = tuple(sorted(E + (i,)))
    total = 0.0
    for _ in range(samples):
        phi = tuple(
            fixed[j] if j in fixed else rng.choices(range(len(it.probs)), weights=it.probs)[0]
            for j, it in enumerate(inst.items)
        )
        total += inst.value(Ei, phi) - inst.value(E, phi)
    return total / samples


def adaptive_primal_curvature(obj, i, j, psi=()) -> float:
    """``E_s[Δ(i | psi ∪ {(j, s)}) / Δ(i | psi)]`` over the states ``s`` of item ``j``."""
    model = _model(obj)
    observed = dict(psi)
    if i == j or i in observed or j in observed:
        raise InputError("need distinct items i, j outside dom(psi)")
    base = model.delta(i, psi)
    item = model.inst.items[j]
    terms = []
    for s in item.support:
        r = curvature_ratio(model.delta(i, tuple(psi) + ((j, s),)), base)
        terms.append(item.probs[s] * r)
    return math.fsum(terms)


def adaptive_tpc(obj, i, psi_prime, psi=(), debug=False) -> float:
    """Γ(i | psi', psi) as ``Δ(i | psi') / Δ(i | psi)``.

    With ``debug=True`` the ordering-averaged product of adaptive primal
    curvatures is also evaluated and the discrepancy logged.
    """
    model = _model(obj)
    _check_extension(psi_prime, psi)
    if i in dict(psi_prime):
        raise InputError(f"item {i} must lie outside dom(psi')")
    closed = curvature_ratio(model.delta(i, psi_prime), model.delta(i, psi))
    if debug:
        rd = tpc_readings(model, i, psi_prime, psi)
        log.info("adaptive Γ readings for item %d: %s", i, rd)
    return closed


def _check_extension(psi_prime, psi):
    big = dict(psi_prime)
    for j, s in psi:
        if big.get(j) != s:
            raise InputError("psi must be contained in psi'")


@dataclass(frozen=True)
class TPCReadings:
    closed_form: float
    sequence_form: float
    discrepancy: float


def tpc_readings(obj, i, psi_prime, psi=()) -> TPCReadings:
    """Compare the Δ-ratio with the ordering-averaged ∇-product reading."""
    model = _model(obj)
    _check_extension(psi_prime, psi)
    closed = curvature_ratio(model.delta(i, psi_prime), model.delta(i, psi))
    have = dict(psi)
    added = [(j, s) for j, s in psi_prime if j not in have]
    products = []
    for order in itertools.permutations(added):
        prod = 1.0
        cur = tuple(psi)
        for j, s in order:
            prod *= adaptive_primal_curvature(model, i, j, cur)
            cur = cur + ((j, s),)
        products.append(prod)
    seq = math.fsum(products) / len(products) if products else 1.0
    if math.isinf(closed) or math.isinf(seq):
        disc = 0.0 if closed == seq else math.inf
    else:
        disc = abs(closed - seq)
    return TPCReadings(closed, seq, disc)


def _extensions(model, psi, max_extra):
    """Every positive-probability extension of psi by at most ``max_extra`` items."""
    observed = dict(psi)
    free = [j for j in range(model.n) if j not in observed]
    psi = tuple(psi)
    for size in range(min(max_extra, len(free)) + 1):
        for group in itertools.combinations(free, size):
            for states in itertools.product(*(model.inst.items[j].support for j in group)):
                yield psi + tuple(zip(group, states))


def adaptive_gamma_hat(obj, psi, k, max_extra=None) -> CurvatureCertificate:
    """Γ̂(psi): max Γ(i | psi', psi) over extensions psi' and items i outside dom(psi').

    Extensions add at most ``max_extra`` items (default ``k - 1``, the most an
    optimal k-step policy can observe before the item whose gain is being
    bounded). Returns 0.0 when no item is left.
    """
    model = _model(obj)
    extra = k - 1 if max_extra is None else max_extra
    best = 0.0
    for ext in _extensions(model, psi, extra):
        seen = dict(ext)
        for i in range(model.n):
            if i in seen:
                continue
            r = curvature_ratio(model.delta(i, ext), model.delta(i, psi))
            if r > best:
                best = r
    return CurvatureCertificate(best, EXACT, _canon(psi), k)


def adaptive_ratio(gamma_hat_k: float, k: int) -> float:
    """``1 - (1 - 1/(k Γ̂_k))^k``, clamped to [0, 1]."""
    if k < 1:
        raise InputError("k must be >= 1")
    if not gamma_hat_k > 0:
        raise InputError(f"Γ̂_k must be positive, got {gamma_hat_k}")
    if math.isinf(gamma_hat_k):
        return 0.0
    return clamp01(geometric_ratio(k * gamma_hat_k, k))


# ---------------------------------------------------------------------------
# policies


@dataclass
class PolicyNode:
    psi: tuple
    prob: float
    item: int | None
    delta: float | None


@dataclass
class PolicyTrace:
    """Greedy decision tree, truncated values and curvature per level."""

    k: int
    levels: list  # levels[l] = nodes reachable after l selections
    f_avg: list
    delta_avg: list
    gamma_hat_levels: list = field(default_factory=list)

    @property
    def gamma_hat_k(self):
        return max(self.gamma_hat_levels) if self.gamma_hat_levels else None

    def chain_picks(self):
        """Selected items along the first branch (the only one for single-state items)."""
        return tuple(level[0].item for level in self.levels[:-1])


def _check_tree_size(n, k, items, cap):
    width = max((len(it.support) for it in items), default=1)
    nodes = 0
    for l in range(k + 1):
        nodes += math.perm(n, l) * width**l
    if nodes > cap:
        raise EnumerationInfeasibleError("policy tree", nodes, cap)


def adaptive_greedy(obj, k, with_gamma=True, max_extra=None, cap=DEFAULT_ADAPTIVE_CAP) -> PolicyTrace:
    """Expand the greedy policy tree to depth ``k`` (ties to the lowest item id)."""
    model = _model(obj, cap)
    n = model.n
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= {n}, got {k}")
    _check_tree_size(n, k, model.inst.items, model.cap)
    levels = [[PolicyNode((), 1.0, None, None)]]
    for _ in range(k):
        nxt = []
        for node in levels[-1]:
            seen = dict(node.psi)
            best_i, best_d = None, None
            for i in range(n):
                if i in seen:
                    continue
                d = model.delta(i, node.psi)
                if best_d is None or d > best_d:
                    best_i, best_d = i, d
            node.item, node.delta = best_i, best_d
            item = model.inst.items[best_i]
            for s in item.support:
                nxt.append(PolicyNode(node.psi + ((best_i, s),), node.prob * item.probs[s], None, None))
        levels.append(nxt)
    f_avg = [math.fsum(nd.prob * model.expected_value(nd.psi) for nd in level) for level in levels]
    delta_avg = [f_avg[l + 1] - f_avg[l] for l in range(k)]
    trace = PolicyTrace(k, levels, f_avg, delta_avg)
    if with_gamma:
        trace.gamma_hat_levels = [
            max(adaptive_gamma_hat(model, nd.psi, k, max_extra).value for nd in level)
            for level in levels
        ]
    return trace


def optimal_policy_bruteforce(obj, k, cap=DEFAULT_ADAPTIVE_CAP) -> float:
    """Best expected value over all adaptive k-step policies (backward induction)."""
    model = _model(obj, cap)
    if not 1 <= k <= model.n:
        raise InputError(f"need 1 <= k <= {model.n}, got {k}")
    _check_tree_size(model.n, k, model.inst.items, model.cap)
    memo = {}

    def value(psi, left):
        key = (_canon(psi), left)
        if key in memo:
            return memo[key]
        if left == 0:
            out = model.expected_value(psi)
        else:
            seen = dict(psi)
            out = -math.inf
            for i in range(model.n):
                if i in seen:
                    continue
                item = model.inst.items[i]
                v = math.fsum(item.probs[s] * value(psi + ((i, s),), left - 1) for s in item.support)
                out = max(out, v)
        memo[key] = out
        return out

    return value((), k)


def policy_values_exhaustive(obj, k, cap=DEFAULT_ADAPTIVE_CAP) -> list:
    """Expected value of every deterministic k-step decision tree (no max inside)."""
    model = _model(obj, cap)

    def values(psi, left):
        if left == 0:
            return [model.expected_value(psi)]
        seen = dict(psi)
        out = []
        for i in range(model.n):
            if i in seen:
                continue
            item = model.inst.items[i]
            branches = [values(psi + ((i, s),), left - 1) for s in item.support]
            for combo in itertools.product(*branches):
                out.append(math.fsum(item.probs[s] * v for s, v in zip(item.support, combo)))
        return out

    width = max(len(it.support) for it in model.inst.items)

    def count(r, left):
        return 1 if left == 0 else r * count(r - 1, left - 1) ** width

    total = count(model.n, k)
    if total > cap:
        raise EnumerationInfeasibleError("policy enumeration", total, cap)
    return values((), k)


@dataclass
class AdaptiveReport:
    k: int
    n: int
    f_avg: list
    delta_avg: list
    gamma_hat_levels: list
    gamma_hat_k: float
    adaptive_ratio: float
    optimal_value: float | None
    bound_holds: bool | None
    greedy_picks_first_branch: list

    def to_dict(self):
        from dataclasses import asdict

        d = asdict(self)
        if isinstance(d["gamma_hat_k"], float) and math.isinf(d["gamma_hat_k"]):
            d["gamma_hat_k"] = "unbounded"
        d["gamma_hat_levels"] = ["unbounded" if math.isinf(g) else g for g in d["gamma_hat_levels"]]
        return d


def analyze_adaptive(inst: AdaptiveInstance, k: int, cap=DEFAULT_ADAPTIVE_CAP, with_optimum=True):
    """Greedy trace, Γ̂_k, adaptive ratio and (optionally) the optimal-policy check."""
    model = AdaptiveModel(inst, cap)
    trace = adaptive_greedy(model, k)
    g = trace.gamma_hat_k
    ratio = adaptive_ratio(g, k) if g > 0 else 0.0
    opt = optimal_policy_bruteforce(model, k) if with_optimum else None
    holds = None if opt is None else ratio * opt <= trace.f_avg[-1] + 1e-9
    return AdaptiveReport(
        k=k,
        n=inst.n,
        f_avg=list(trace.f_avg),
        delta_avg=list(trace.delta_avg),
        gamma_hat_levels=list(trace.gamma_hat_levels),
        gamma_hat_k=g,
        adaptive_ratio=ratio,
        optimal_value=opt,
        bound_holds=holds,
        greedy_picks_first_branch=list(trace.chain_picks()),
    )
