"""Closed-form approximation ratios and the per-instance ratio report."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .curvature import SAMPLED, CurvatureCertificate
from .errors import DegenerateInstanceError, InputError, SupermatroidUndefinedError
from .greedy import GreedyChain

RATIO_NAMES = (
    "primal_ratio",
    "fixed_gamma_ratio",
    "wang_ratio",
    "conforti_ratio",
    "conforti_uniform_ratio",
    "classic_ratio",
    "exact_ratio",
)


def clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def geometric_ratio(g: float, k: int) -> float:
    """``1 - (1 - 1/g)^k``, the recurrence bound shared by every Γ̂-style ratio."""
    return 1.0 - (1.0 - 1.0 / g) ** k


def classic_ratio(k: int) -> float:
    if k < 1:
        raise InputError("k must be >= 1")
    return geometric_ratio(float(k), k)


def primal_ratio_raw(chain: GreedyChain, cert: CurvatureCertificate) -> float:
    """``1 / (1 + (f(S⁺)/f(S) - 1) Γ̂(S))`` before clamping."""
    if not chain.has_extension:
        raise SupermatroidUndefinedError("chain has no (k+1)-th greedy extension")
    if cert.base != chain.solution:
        raise InputError(f"certificate base {list(cert.base)} is not S_k {list(chain.solution)}")
    fs = chain.value
    if fs <= 0:
        raise DegenerateInstanceError("f(S) = 0: the primal ratio is undefined")
    if cert.unbounded:
        # f(S⁺) = f(S) does not help: pairs can still gain where singles do not
        return 0.0
    growth = chain.ext_value / fs - 1.0
    if growth == 0:
        return 1.0
    return 1.0 / (1.0 + growth * cert.value)


def primal_ratio(chain: GreedyChain, cert: CurvatureCertificate) -> float:
    return clamp01(primal_ratio_raw(chain, cert))


def fixed_gamma_ratio(gamma_hat: float, k: int) -> float:
    """``1 - (1 - 1/Γ̂)^k`` for a Γ̂ that bounds every greedy prefix."""
    if k < 1:
        raise InputError("k must be >= 1")
    if not gamma_hat >= 1:
        raise InputError(f"Γ̂ must be >= 1, got {gamma_hat}")
    if math.isinf(gamma_hat):
        return 0.0
    return geometric_ratio(gamma_hat, k)


def _geometric_sum(alpha, lo, hi):
    """``sum(alpha**i for i in range(lo, hi + 1))``; ``inf`` on overflow."""
    if hi < lo:
        return 0.0
    if alpha == 1:
        return float(hi - lo + 1)
    try:
        return (alpha ** (hi + 1) - alpha**lo) / (alpha - 1)
    except OverflowError:
        return math.inf


def wang_ratio(alpha: float, k: int, literal: bool = False) -> float:
    """Elemental-curvature ratio ``1 - (1 - 1/A_k)^k``.

    By default ``A_k = sum(alpha**i for i in range(k))`` so that ``alpha = 1``
    gives the classical ``1 - (1 - 1/k)^k``. ``literal=True`` starts the sum
    at ``i = 1`` instead, which overstates the ratio (it gives 1 at ``k = 2``
    for submodular objectives) and is undefined at ``k = 1``.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if not alpha >= 0:
        raise InputError(f"alpha must be >= 0, got {alpha}")
    if math.isinf(alpha):
        return 0.0
    a_k = _geometric_sum(alpha, 1, k - 1) if literal else _geometric_sum(alpha, 0, k - 1)
    if a_k <= 0:
        raise InputError(f"A_k = {a_k} for alpha={alpha}, k={k}: ratio undefined")
    if math.isinf(a_k):
        return 0.0
    return clamp01(geometric_ratio(a_k, k))


def conforti_ratios(c: float, k: int | None = None) -> tuple:
    """``(1/(1+c), (1/c)(1 - e^{-c}))`` for total curvature ``c`` in [0, 1]."""
    if not 0 <= c <= 1:
        raise InputError(f"total curvature must lie in [0, 1], got {c}")
    uniform = 1.0 if c == 0 else -math.expm1(-c) / c
    return 1.0 / (1.0 + c), uniform


@dataclass
class RatioReport:
    k: int
    n: int
    greedy_value: float
    picks: list = field(default_factory=list)
    chain_values: list = field(default_factory=list)
    extension_value: float | None = None
    optimum_value: float | None = None
    gamma_hat: float | None = None
    gamma_hat_max: float | None = None
    alpha: float | None = None
    total_curvature: float | None = None
    primal_ratio: float | None = None
    fixed_gamma_ratio: float | None = None
    wang_ratio: float | None = None
    conforti_ratio: float | None = None
    conforti_uniform_ratio: float | None = None
    classic_ratio: float | None = None
    exact_ratio: float | None = None
    raw: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    absent: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def certified(self, name):
        return self.provenance.get(name) == "certified"

    def to_dict(self):
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, float) and math.isinf(val):
                d[key] = "unbounded"
        return d


def build_report(
    chain: GreedyChain,
    certificates=None,
    *,
    alpha: float | None = None,
    alpha_exact: bool = True,
    total_curv: float | None = None,
    optimum: float | None = None,
    wang_literal: bool = False,
    notes=(),
) -> RatioReport:
    """Assemble every computable ratio for one greedy run.

    ``certificates`` lists Γ̂ certificates for the prefixes ``S_0..S_k`` (the
    last one belongs to ``S_k``); ``None`` entries mean "not computed".
    Missing ratios land in ``report.absent`` with a reason.
    """
    k = chain.k
    rep = RatioReport(
        k=k,
        n=chain.n,
        greedy_value=chain.value,
        picks=list(chain.picks),
        chain_values=list(chain.values),
    )
    rep.flags.extend(notes)
    rep.extension_value = chain.ext_value
    rep.classic_ratio = classic_ratio(k)
    rep.provenance["classic_ratio"] = "formula"
    certs = list(certificates or [])

    def tag(cert_list):
        if any(c.provenance == SAMPLED for c in cert_list):
            return "empirical"
        return "certified"

    last = certs[-1] if len(certs) == k + 1 else None
    if last is not None:
        rep.gamma_hat = last.value
    if not chain.has_extension:
        rep.absent["primal_ratio"] = "supermatroid undefined"
    elif last is None:
        rep.absent["primal_ratio"] = "no certificate for S_k"
    else:
        try:
            raw = primal_ratio_raw(chain, last)
        except DegenerateInstanceError as exc:
            rep.absent["primal_ratio"] = str(exc)
        else:
            rep.raw["primal_ratio"] = raw
            rep.primal_ratio = clamp01(raw)
            rep.provenance["primal_ratio"] = tag([last])
            if last.unbounded:
                rep.flags.append("primal_ratio uninformative: Γ̂(S) unbounded")

    if len(certs) == k + 1 and all(c is not None for c in certs):
        gmax = max(c.value for c in certs)
        rep.gamma_hat_max = gmax
        if gmax >= 1:
            rep.fixed_gamma_ratio = fixed_gamma_ratio(gmax, k)
            rep.provenance["fixed_gamma_ratio"] = tag(certs)
        else:
            rep.absent["fixed_gamma_ratio"] = f"max Γ̂ = {gmax} < 1"
    else:
        rep.absent["fixed_gamma_ratio"] = "prefix certificates missing"

    if alpha is None:
        rep.absent["wang_ratio"] = "elemental curvature not computed"
    else:
        rep.alpha = alpha
        try:
            rep.wang_ratio = wang_ratio(alpha, k, literal=wang_literal)
        except InputError as exc:
            rep.absent["wang_ratio"] = str(exc)
        else:
            rep.provenance["wang_ratio"] = "certified" if alpha_exact else "empirical"
        if alpha > 1:
            rep.flags.append("alpha > 1: objective is not submodular")

    if total_curv is None:
        rep.absent["conforti_ratio"] = rep.absent["conforti_uniform_ratio"] = (
            "total curvature not computed"
        )
    else:
        rep.total_curvature = total_curv
        if alpha is not None and alpha > 1:
            reason = "total-curvature ratios assume submodularity (alpha > 1)"
            rep.absent["conforti_ratio"] = rep.absent["conforti_uniform_ratio"] = reason
        else:
            try:
                a, b = conforti_ratios(total_curv, k)
            except InputError as exc:
                rep.absent["conforti_ratio"] = rep.absent["conforti_uniform_ratio"] = str(exc)
            else:
                rep.conforti_ratio, rep.conforti_uniform_ratio = a, b
                rep.provenance["conforti_ratio"] = "formula"
                rep.provenance["conforti_uniform_ratio"] = "formula"

    if optimum is None:
        rep.absent["exact_ratio"] = "no oracle"
    elif optimum <= 0:
        rep.absent["exact_ratio"] = "f(S*) = 0"
    else:
        rep.optimum_value = optimum
        rep.exact_ratio = chain.value / optimum
        rep.provenance["exact_ratio"] = "oracle"
    return rep
