"""Seeded property sweep: bound validity and Γ identities against brute force.

Each instance is described by a small picklable job so the sweep can run in
a process pool; results come back in input order.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import adaptive as ad
from .curvature import gamma_product, gamma_terms, total_primal_curvature
from .greedy import greedy_maximize
from .kernels import ZERO_TOL
from .objectives import (
    CoverageInstance,
    ModularInstance,
    PowerCoverageInstance,
    SynergyInstance,
    build,
    parse_instance,
    square_cardinality,
)
from .oracle import RandomMonotoneSpec, random_monotone_function
from .pipeline import analyze
from .setfn import UniformMatroid

TOL = 1e-9
FAMILIES = ("coverage", "modular", "power_coverage", "synergy", "random_monotone")
MUTATIONS = ("off-by-one-k",)


# ---------------------------------------------------------------------------
# instance generators


def random_description(family, n, rng: random.Random):
    """A random instance dict for one of the deterministic families."""
    if family in ("coverage", "power_coverage"):
        m = rng.randint(3, 2 * n + 2)
        sets = [sorted(rng.sample(range(m), rng.randint(1, min(3, m)))) for _ in range(n)]
        d = {"type": family, "n": n, "sets": sets}
        if rng.random() < 0.5:
            d["item_weights"] = [round(rng.uniform(0.5, 3.0), 3) for _ in range(m)]
        if family == "power_coverage":
            d["p"] = 2.0
        return d
    if family == "modular":
        return {"type": "modular", "n": n, "weights": [round(rng.uniform(0, 5), 3) for _ in range(n)]}
    if family == "synergy":
        syn = [[0.0] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            if rng.random() < 0.4:
                syn[i][j] = syn[j][i] = round(rng.uniform(0, 2), 3)
        return {
            "type": "synergy",
            "n": n,
            "weights": [round(rng.uniform(0, 2), 3) for _ in range(n)],
            "synergy": syn,
        }
    if family == "random_monotone":
        return RandomMonotoneSpec(n, 0.25, rng.randrange(2**31)).to_dict()
    raise ValueError(family)


def build_any(desc):
    if desc["type"] == "random_monotone":
        return random_monotone_function(
            desc["n"], desc["density"], desc["seed"], desc.get("max_order", 3)
        )
    return build(parse_instance(desc))


def fixed_descriptions():
    """Hand-checkable instances that are always part of the sweep."""
    coverage = CoverageInstance(((1, 2), (2, 3), (3, 4)))
    out = [
        (coverage.to_dict(), 2),
        (ModularInstance((5.0, 3.0, 1.0)).to_dict(), 2),
        (square_cardinality(4).to_dict(), 2),
        (
            SynergyInstance(
                (1.0, 1.0, 1.01),
                ((0.0, 10.0, 0.0), (10.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
            ).to_dict(),
            2,
        ),
        (PowerCoverageInstance(coverage, 2.0).to_dict(), 2),
    ]
    return out


def random_adaptive(rng: random.Random, n_items=None, k=None):
    """Random adaptive instance: <= 5 items, <= 2 states, mixed families."""
    n = n_items or rng.randint(2, 5)
    items = []
    for _ in range(n):
        if rng.random() < 0.2:
            items.append(ad.StochasticItem(("only",), (1.0,)))
        else:
            p = round(rng.uniform(0.1, 0.9), 3)
            items.append(ad.StochasticItem(("live", "dead"), (p, round(1.0 - p, 3))))
    fam = rng.choice(("modular", "coverage", "power", "synergy"))
    if fam == "modular":
        obj = ad.StateModular(
            tuple(tuple(round(rng.uniform(0, 3), 3) for _ in it.states) for it in items)
        )
    elif fam in ("coverage", "power"):
        m = rng.randint(3, 8)
        covers = tuple(
            tuple(tuple(sorted(rng.sample(range(m), rng.randint(0, 3)))) for _ in it.states)
            for it in items
        )
        obj = ad.StateCoverage(covers, None, 2.0 if fam == "power" else 1.0)
    else:
        values = tuple(
            tuple(1.0 if s == 0 else round(rng.uniform(0, 0.5), 3) for s in range(len(it.states)))
            for it in items
        )
        syn = [[0.0] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            if rng.random() < 0.6:
                syn[i][j] = syn[j][i] = round(rng.uniform(0, 3), 3)
        obj = ad.StateSynergy(values, tuple(tuple(r) for r in syn))
    inst = ad.AdaptiveInstance(tuple(items), obj)
    return inst, k or rng.randint(1, min(2, n))


# ---------------------------------------------------------------------------
# checks


@dataclass
class InstanceResult:
    index: int
    family: str
    checks: dict = field(default_factory=dict)  # name -> number of assertions run
    violations: list = field(default_factory=list)


def _identity_checks(f, rng, res, samples=5):
    """Γ closed form vs explicit product, ordering invariance and telescoping."""
    n = f.n
    for _ in range(samples):
        T = sorted(rng.sample(range(n), rng.randint(1, min(n - 1, 5))))
        S = sorted(rng.sample(T, rng.randint(0, len(T) - 1))) if len(T) > 1 else []
        outside = [x for x in range(n) if x not in T]
        diff = [t for t in T if t not in S]
        x = rng.choice(outside)
        if f.marginal_gain(x, S) > ZERO_TOL:
            closed = total_primal_curvature(f, x, T, S)
            order = diff[:]
            rng.shuffle(order)
            gains = [f.marginal_gain(x, list(S) + order[:t]) for t in range(len(order))]
            if all(g > ZERO_TOL for g in gains):
                prod = gamma_product(f, x, order, S)
                res.checks["gamma_identity"] = res.checks.get("gamma_identity", 0) + 1
                if abs(prod - closed) > TOL * max(1.0, abs(closed)):
                    res.violations.append(("gamma_identity", {"x": x, "S": S, "T": T, "product": prod, "closed": closed}))
        order = diff[:]
        rng.shuffle(order)
        terms = gamma_terms(f, order, S)
        lhs = f.evaluate(T) - f.evaluate(S)
        rhs = 0.0
        base = list(S)
        for j, g in zip(order, terms):
            gain_s = f.marginal_gain(j, S)
            rhs += f.marginal_gain(j, base) if gain_s <= ZERO_TOL else g * gain_s
            base.append(j)
        res.checks["telescoping"] = res.checks.get("telescoping", 0) + 1
        if abs(lhs - rhs) > TOL * max(1.0, abs(lhs)):
            res.violations.append(("telescoping", {"S": S, "T": T, "order": order, "lhs": lhs, "rhs": rhs}))


def run_deterministic(job):
    index, desc, k, seed, mutation = job
    rng = random.Random(seed)
    f = build_any(desc)
    res = InstanceResult(index, desc["type"])
    _identity_checks(f, rng, res)
    an = analyze(f, k, wang_literal=(mutation == "off-by-one-k"))
    rep = an.report
    fS = rep.greedy_value
    opt = rep.optimum_value if rep.optimum_value is not None else 0.0

    def bound(name, ratio):
        res.checks[name] = res.checks.get(name, 0) + 1
        if ratio is not None and ratio * opt > fS + TOL:
            res.violations.append((name, {"ratio": ratio, "optimum": opt, "greedy": fS}))

    res.checks["oracle_dominance"] = 1
    if opt + TOL < fS:
        res.violations.append(("oracle_dominance", {"optimum": opt, "greedy": fS}))
    if rep.certified("primal_ratio"):
        bound("primal_bound", rep.primal_ratio)
    if rep.certified("fixed_gamma_ratio"):
        bound("fixed_gamma_bound", rep.fixed_gamma_ratio)
    if rep.certified("wang_ratio"):
        bound("wang_bound", rep.wang_ratio)
    if rep.conforti_ratio is not None:
        bound("conforti_bound", rep.conforti_ratio)
        bound("conforti_uniform_bound", rep.conforti_uniform_ratio)
    if f.submodular:
        m = UniformMatroid(f.ground, k)
        lazy = greedy_maximize(f, m, mode="lazy")
        res.checks["lazy_equivalence"] = 1
        if lazy != an.chain:
            res.violations.append(("lazy_equivalence", {"lazy": list(lazy.picks), "exhaustive": list(an.chain.picks)}))
        res.checks["submodular_gamma"] = 1
        worst = max(c.value for c in an.certificates)
        if worst > k + TOL:
            res.violations.append(("submodular_gamma", {"gamma_hat_max": worst}))
    return res, desc, k


def run_adaptive(job):
    index, seed = job
    rng = random.Random(seed)
    inst, k = random_adaptive(rng)
    res = InstanceResult(index, "adaptive")
    rep = ad.analyze_adaptive(inst, k)
    res.checks["adaptive_bound"] = 1
    if not rep.bound_holds:
        res.violations.append(("adaptive_bound", {"ratio": rep.adaptive_ratio, "optimum": rep.optimal_value, "greedy": rep.f_avg[-1]}))
    res.checks["adaptive_monotone"] = 1
    if any(b + TOL < a for a, b in zip(rep.f_avg, rep.f_avg[1:])):
        res.violations.append(("adaptive_monotone", {"f_avg": rep.f_avg}))
    return res, inst.to_dict(), k


# ---------------------------------------------------------------------------
# driver


@dataclass
class ValidationSummary:
    seed: int
    count: int
    adaptive_count: int
    checks: dict
    violations: int
    by_check: dict
    replay_files: list

    @property
    def passed(self):
        return self.violations == 0

    def to_json(self):
        return json.dumps(
            {
                "seed": self.seed,
                "instances": self.count,
                "adaptive_instances": self.adaptive_count,
                "checks": self.checks,
                "violations": self.violations,
                "violations_by_check": self.by_check,
                "replay_files": self.replay_files,
                "status": "pass" if self.passed else "fail",
            },
            indent=2,
            sort_keys=True,
        )


def deterministic_jobs(seed, count, max_n=10, max_k=3, mutation=None):
    rng = random.Random(seed)
    jobs = []
    for desc, k in fixed_descriptions():
        jobs.append((len(jobs), desc, k, rng.randrange(2**31), mutation))
    while len(jobs) < count:
        family = FAMILIES[len(jobs) % len(FAMILIES)]
        n = rng.randint(3, max_n)
        k = rng.randint(1, min(max_k, n - 1))
        desc = random_description(family, n, rng)
        jobs.append((len(jobs), desc, k, rng.randrange(2**31), mutation))
    return jobs[:count]


def adaptive_jobs(seed, count):
    rng = random.Random(seed ^ 0x5EED)
    return [(i, rng.randrange(2**31)) for i in range(count)]


def run_validation(
    seed=0,
    count=500,
    adaptive_count=50,
    max_n=10,
    max_k=3,
    out_dir=None,
    jobs=1,
    mutation=None,
) -> ValidationSummary:
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    det = deterministic_jobs(seed, count, max_n, max_k, mutation)
    adp = adaptive_jobs(seed, adaptive_count)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_deterministic, det)) + list(pool.map(run_adaptive, adp))
    else:
        results = [run_deterministic(j) for j in det] + [run_adaptive(j) for j in adp]

    checks, by_check, replay = {}, {}, []
    total = 0
    for res, desc, k in results:
        for name, c in res.checks.items():
            checks[name] = checks.get(name, 0) + c
        for name, detail in res.violations:
            total += 1
            by_check[name] = by_check.get(name, 0) + 1
            if out_dir is not None:
                path = Path(out_dir) / f"violation-{len(replay):04d}.json"
                path.parent.mkdir(parents=True, exist_ok=True)
                payload = {
                    "check": name,
                    "family": res.family,
                    "index": res.index,
                    "k": k,
                    "instance": desc,
                    "mutation": mutation,
                    "detail": _jsonable(detail),
                }
                path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
                replay.append(path.name)
    return ValidationSummary(seed, len(det), len(adp), checks, total, by_check, replay)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def replay(path):
    """Re-run the check recorded in a violation file; returns the fresh result."""
    payload = json.loads(Path(path).read_text())
    if payload["family"] == "adaptive":
        inst = ad.parse_adaptive(payload["instance"])
        return ad.analyze_adaptive(inst, payload["k"])
    f = build_any(payload["instance"])
    return analyze(f, payload["k"], wang_literal=payload.get("mutation") == "off-by-one-k").report

