import json
import math

import pytest
from hypothesis import assume, given, strategies as st

from conftest import naive_gamma_hat
from primalcurv.curvature import CurvatureCertificate, gamma_hat_exact
from primalcurv.errors import InputError, SupermatroidUndefinedError
from primalcurv.greedy import greedy_maximize
from primalcurv.objectives import build, square_cardinality
from primalcurv.ratios import (
    build_report,
    classic_ratio,
    conforti_ratios,
    fixed_gamma_ratio,
    primal_ratio,
    primal_ratio_raw,
    wang_ratio,
)
from primalcurv.setfn import UniformMatroid


def test_classic_values():
    assert classic_ratio(1) == 1.0
    assert classic_ratio(2) == 0.75
    assert classic_ratio(3) == pytest.approx(19 / 27, abs=1e-15)


@pytest.mark.parametrize("k", range(1, 30))
def test_fixed_gamma_at_k_is_classic(k):
    assert fixed_gamma_ratio(float(k), k) == classic_ratio(k)


def test_fixed_gamma_edges():
    assert fixed_gamma_ratio(1.0, 5) == 1.0
    assert fixed_gamma_ratio(math.inf, 5) == 0.0
    with pytest.raises(InputError):
        fixed_gamma_ratio(0.5, 3)


@pytest.mark.parametrize("k", range(1, 30))
def test_wang_submodular_is_classic(k):
    assert wang_ratio(1.0, k) == pytest.approx(classic_ratio(k), abs=1e-15)


def test_wang_literal_index_range():
    # A_k = alpha + ... + alpha^{k-1}: at alpha = 1, k = 2 the ratio is 1
    assert wang_ratio(1.0, 2, literal=True) == 1.0
    with pytest.raises(InputError):
        wang_ratio(1.0, 1, literal=True)


def test_wang_square_instance():
    # alpha = 3, k = 2: A_2 = 4, ratio = 1 - (3/4)^2
    assert wang_ratio(3.0, 2) == 0.4375


def test_wang_overflow_is_zero():
    assert wang_ratio(1e6, 500) == 0.0
    assert wang_ratio(math.inf, 3) == 0.0


def test_conforti():
    assert conforti_ratios(0.0) == (1.0, 1.0)
    a, b = conforti_ratios(1.0)
    assert a == 0.5 and b == pytest.approx(1 - math.exp(-1), abs=1e-15)
    with pytest.raises(InputError):
        conforti_ratios(1.5)


@given(st.floats(1.0, 1e3), st.floats(1.0, 1e3), st.integers(1, 50))
def test_fixed_gamma_decreasing(g1, g2, k):
    lo, hi = sorted((g1, g2))
    assert fixed_gamma_ratio(hi, k) <= fixed_gamma_ratio(lo, k) + 1e-15


@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.integers(1, 40))
def test_wang_decreasing_in_alpha(a1, a2, k):
    lo, hi = sorted((a1, a2))
    assert wang_ratio(hi, k) <= wang_ratio(lo, k) + 1e-12


def _chain(f, k):
    return greedy_maximize(f, UniformMatroid(f.ground, k))


@given(st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_primal_ratio_decreasing_in_gamma_hat(g1, g2):
    f = build(square_cardinality(4))
    chain = _chain(f, 2)
    lo, hi = sorted((g1, g2))
    r_lo = primal_ratio(chain, CurvatureCertificate(lo, "exact", chain.solution, 2))
    r_hi = primal_ratio(chain, CurvatureCertificate(hi, "exact", chain.solution, 2))
    assert r_hi <= r_lo


def test_primal_ratio_coverage(coverage_abc):
    chain = _chain(coverage_abc, 2)
    cert = gamma_hat_exact(coverage_abc, chain.solution, UniformMatroid(coverage_abc.ground, 2))
    assert primal_ratio(chain, cert) == 1.0


def test_primal_ratio_square():
    f = build(square_cardinality(4))
    chain = _chain(f, 2)
    cert = gamma_hat_exact(f, chain.solution, UniformMatroid(f.ground, 2))
    assert primal_ratio(chain, cert) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_square_gamma_hat_closed_form(k):
    # Γ̂(S_k) = sum over t < k of (2k + 2t + 1)/(2k + 1) = 3k^2/(2k + 1)
    f = build(square_cardinality(2 * k))
    chain = _chain(f, k)
    want = naive_gamma_hat(f, chain.solution, k)
    assert want == pytest.approx(3 * k * k / (2 * k + 1), abs=1e-12)
    got = gamma_hat_exact(f, chain.solution, UniformMatroid(f.ground, k)).value
    assert got == pytest.approx(want, abs=1e-12)
    assert primal_ratio(chain, CurvatureCertificate(got, "exact", chain.solution, k)) == pytest.approx(
        0.25, abs=1e-12
    )


def test_primal_ratio_needs_extension():
    f = build(square_cardinality(2))
    chain = _chain(f, 2)
    with pytest.raises(SupermatroidUndefinedError):
        primal_ratio_raw(chain, CurvatureCertificate(1.0, "exact", chain.solution, 2))


def test_primal_ratio_wrong_base(coverage_abc):
    chain = _chain(coverage_abc, 2)
    with pytest.raises(InputError):
        primal_ratio_raw(chain, CurvatureCertificate(1.0, "exact", (0, 1), 2))


def test_unbounded_gamma_gives_zero():
    f = build(square_cardinality(4))
    chain = _chain(f, 2)
    cert = CurvatureCertificate(math.inf, "exact", chain.solution, 2)
    assert primal_ratio(chain, cert) == 0.0


def test_report_absent_and_json():
    f = build(square_cardinality(2))
    rep = build_report(_chain(f, 2), None, alpha=math.inf)
    assert rep.primal_ratio is None
    assert rep.absent["primal_ratio"] == "supermatroid undefined"
    d = rep.to_dict()
    json.dumps(d)
    assert d["alpha"] == "unbounded"


@given(st.floats(1.0, 50.0), st.integers(1, 30))
def test_ratios_in_unit_interval(g, k):
    assume(math.isfinite(g))
    assert 0.0 <= fixed_gamma_ratio(g, k) <= 1.0
    assert 0.0 <= wang_ratio(g, k) <= 1.0


def test_unbounded_wins_over_zero_growth():
    # greedy stalls at {0, 1}; only the pair {3, 4} unlocks the bonus
    from primalcurv.pipeline import analyze
    from primalcurv.setfn import SetFunctionHandle

    f = SetFunctionHandle(5, lambda s: (1.0 if s else 0.0) + (10.0 if {3, 4} <= set(s) else 0.0))
    rep = analyze(f, 2).report
    assert rep.extension_value == rep.greedy_value == 1.0
    assert math.isinf(rep.gamma_hat)
    assert rep.primal_ratio == 0.0
    assert any("uninformative" in fl for fl in rep.flags)
    assert rep.exact_ratio == pytest.approx(1 / 11)
