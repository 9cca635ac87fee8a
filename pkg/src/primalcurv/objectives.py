"""Closed-form benchmark objectives and their JSON instance files.

Four families share one JSON schema, discriminated by ``"type"``::

    {"type": "coverage", "n": 3, "sets": [[1, 2], [2, 3], [3, 4]],
     "item_weights": [...]}                       # optional, default 1.0
    {"type": "modular", "n": 3, "weights": [5, 3, 1]}
    {"type": "power_coverage", "n": 3, "sets": [...], "p": 2.0}
    {"type": "synergy", "n": 2, "weights": [1, 1], "synergy": [[0, 2], [2, 0]]}

Covered items are non-negative integer labels; ``item_weights`` (when given)
is indexed by label. All sums use :func:`math.fsum`, so values do not depend
on iteration order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .errors import SchemaError, UnsupportedFamilyError
from .setfn import SetFunctionHandle

FAMILIES = ("coverage", "modular", "power_coverage", "synergy")


def coverage_value(covered, item_weights=None, p=1.0):
    """Weighted size of the union of ``covered`` (iterable of item lists), to the power ``p``."""
    union = set()
    for items in covered:
        union.update(items)
    if item_weights is None:
        total = float(len(union))
    else:
        total = math.fsum(item_weights[u] for u in union)
    return total if p == 1 else total**p


def synergy_value(weights, synergy, subset):
    terms = [weights[x] for x in subset]
    terms.extend(synergy[x][y] for x, y in combinations(subset, 2))
    return math.fsum(terms)


def _number(field, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(field, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise SchemaError(field, f"non-finite value {v!r}")
    return float(v)


def _nonneg_list(field, values, length=None):
    if not isinstance(values, list):
        raise SchemaError(field, "expected a list")
    out = [_number(f"{field}[{i}]", v) for i, v in enumerate(values)]
    for i, v in enumerate(out):
        if v < 0:
            raise SchemaError(f"{field}[{i}]", f"must be >= 0, got {v}")
    if length is not None and len(out) != length:
        raise SchemaError(field, f"expected {length} entries, got {len(out)}")
    return out


def _int(field, v, minimum=0):
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(field, f"expected an integer, got {v!r}")
    if v < minimum:
        raise SchemaError(field, f"must be >= {minimum}, got {v}")
    return v


@dataclass(frozen=True)
class CoverageInstance:
    sets: tuple
    item_weights: tuple | None = None

    @property
    def n(self):
        return len(self.sets)

    @property
    def m(self):
        return len({u for s in self.sets for u in s})

    @property
    def submodular(self):
        return True

    def value(self, subset):
        return coverage_value((self.sets[x] for x in subset), self.item_weights)

    def to_dict(self):
        d = {"type": "coverage", "n": self.n, "sets": [list(s) for s in self.sets]}
        if self.item_weights is not None:
            d["item_weights"] = list(self.item_weights)
        return d


@dataclass(frozen=True)
class ModularInstance:
    weights: tuple

    @property
    def n(self):
        return len(self.weights)

    @property
    def submodular(self):
        return True

    def value(self, subset):
        return math.fsum(self.weights[x] for x in subset)

    def to_dict(self):
        return {"type": "modular", "n": self.n, "weights": list(self.weights)}


@dataclass(frozen=True)
class PowerCoverageInstance:
    coverage: CoverageInstance
    p: float

    @property
    def n(self):
        return self.coverage.n

    @property
    def submodular(self):
        return self.p == 1

    def value(self, subset):
        c = self.coverage
        return coverage_value((c.sets[x] for x in subset), c.item_weights, self.p)

    def to_dict(self):
        d = self.coverage.to_dict()
        d["type"] = "power_coverage"
        d["p"] = self.p
        return d


@dataclass(frozen=True)
class SynergyInstance:
    weights: tuple
    synergy: tuple

    @property
    def n(self):
        return len(self.weights)

    @property
    def submodular(self):
        return not any(v > 0 for row in self.synergy for v in row)

    def value(self, subset):
        return synergy_value(self.weights, self.synergy, subset)

    def to_dict(self):
        return {
            "type": "synergy",
            "n": self.n,
            "weights": list(self.weights),
            "synergy": [list(r) for r in self.synergy],
        }


def square_cardinality(n):
    """``f(S) = |S|^2`` as a synergy instance (unit weights, pairwise bonus 2)."""
    syn = tuple(tuple(0.0 if i == j else 2.0 for j in range(n)) for i in range(n))
    return SynergyInstance(weights=(1.0,) * n, synergy=syn)


def _parse_sets(d, n):
    sets = d.get("sets")
    if not isinstance(sets, list):
        raise SchemaError("sets", "expected a list of item lists")
    if len(sets) != n:
        raise SchemaError("sets", f"expected {n} entries, got {len(sets)}")
    out = []
    for i, s in enumerate(sets):
        if not isinstance(s, list):
            raise SchemaError(f"sets[{i}]", "expected a list of item ids")
        out.append(tuple(_int(f"sets[{i}]", u) for u in s))
    weights = d.get("item_weights")
    if weights is not None:
        weights = tuple(_nonneg_list("item_weights", weights))
        top = max((u for s in out for u in s), default=-1)
        if top >= len(weights):
            raise SchemaError("item_weights", f"item id {top} has no weight")
    return CoverageInstance(tuple(out), weights)


def parse_instance(d):
    """Validate a description dict and return the family dataclass."""
    if not isinstance(d, dict):
        raise SchemaError("<root>", "expected a JSON object")
    kind = d.get("type")
    if kind not in FAMILIES:
        raise UnsupportedFamilyError("type", f"unsupported family {kind!r}")
    if "n" not in d:
        raise SchemaError("n", "missing")
    n = _int("n", d["n"], minimum=1)
    if kind == "coverage":
        return _parse_sets(d, n)
    if kind == "power_coverage":
        if "p" not in d:
            raise SchemaError("p", "missing")
        p = _number("p", d["p"])
        if p < 1:
            raise SchemaError("p", f"must be >= 1, got {p}")
        return PowerCoverageInstance(_parse_sets(d, n), p)
    if "weights" not in d:
        raise SchemaError("weights", "missing")
    weights = tuple(_nonneg_list("weights", d["weights"], n))
    if kind == "modular":
        return ModularInstance(weights)
    syn = d.get("synergy")
    if not isinstance(syn, list) or len(syn) != n:
        raise SchemaError("synergy", f"expected an {n}x{n} matrix")
    rows = tuple(tuple(_nonneg_list(f"synergy[{i}]", r, n)) for i, r in enumerate(syn))
    for i in range(n):
        if rows[i][i] != 0:
            raise SchemaError(f"synergy[{i}][{i}]", "diagonal must be zero")
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise SchemaError(f"synergy[{i}][{j}]", "matrix must be symmetric")
    return SynergyInstance(weights, rows)


def build(instance) -> SetFunctionHandle:
    """Wrap a family instance (or a raw description dict) as a counted handle."""
    if isinstance(instance, dict):
        instance = parse_instance(instance)
    return SetFunctionHandle(
        instance.n,
        instance.value,
        submodular=instance.submodular,
        name=type(instance).__name__,
    )


def load_instance(path):
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("<file>", f"invalid JSON: {exc}") from exc
    return parse_instance(raw)


def save_instance(instance, path):
    Path(path).write_text(json.dumps(instance.to_dict(), indent=2, sort_keys=True) + "\n")
