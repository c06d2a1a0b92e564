import math

import pytest

from hlbounds.certify import (
    ReportOptions,
    build_report,
    certified_t2_estimate,
    quotient_lower_bound,
    report_to_dict,
    report_to_text,
    reports_from_json,
    reports_to_csv,
    reports_to_json,
    verify_theorem_pop,
)
from hlbounds.closed_forms import HLParams, lower_bound_001, lower_bound_step4, upper_const_known
from hlbounds.errors import CertificationError, DomainError
from hlbounds.forms import SparseMultilinearForm, make_T2, make_Tm
from hlbounds.norm_engine import NormEstimate, norm_upper_T2p_certified


def _est(upper):
    return NormEstimate(1.0, upper, "test", "test", certified_upper=True)


def test_quotient_examples():
    assert quotient_lower_bound(make_T2(), HLParams(2, 4), _est(1.7331)) == pytest.approx(2 / 1.7331, rel=1e-15)
    assert quotient_lower_bound(make_T2(), HLParams(2, math.inf), _est(2.0)) == pytest.approx(math.sqrt(2), rel=1e-15)


@pytest.mark.parametrize("m", range(2, 9))
def test_quotient_at_extreme_point(m):
    # (4^(m-1))^(1/2) / 2^(m-2) = 2, so the quotient is 2 / U
    u2 = 1.7331
    value = quotient_lower_bound(make_Tm(m), HLParams(m, 2 * m), _est(2.0 ** (m - 2) * u2))
    assert value == pytest.approx(2 / u2, rel=1e-13)


def test_quotient_rejects_zero_form():
    with pytest.raises(DomainError):
        quotient_lower_bound(SparseMultilinearForm((2, 2)), HLParams(2, 4), _est(1.0))


def test_verify_small_cases():
    r2 = verify_theorem_pop(2)
    assert r2.theorem_pop_holds
    assert r2.quotient.value == pytest.approx(2 / r2.norm_t2.upper, rel=1e-15)
    assert r2.quotient.value >= 2 / 1.7331
    r3 = verify_theorem_pop(3)
    assert r3.norm_t2.upper < 2
    assert r3.quotient.value == pytest.approx(2 / r3.norm_t2.upper, rel=1e-14)
    assert r3.quotient.value > 1
    r10 = verify_theorem_pop(10)
    assert 1 < r10.quotient.value < r3.quotient.value


def test_verify_refines_gap():
    # starting from a coarse gap, the bracket is halved until it is tight enough
    report = verify_theorem_pop(2, gap=0.5)
    assert report.quotient.value - 1 > 2 * report.norm_t2.width


def test_verify_unreachable_gap():
    with pytest.raises(CertificationError):
        verify_theorem_pop(2, gap=1e-9)
    with pytest.raises(CertificationError):
        verify_theorem_pop(10, gap=0.5, max_halvings=0)


def test_report_2_4():
    r = build_report(HLParams(2, 4))
    assert r.lower_001.value == 1
    assert r.quotient.value == pytest.approx(1.1547, abs=1e-4)
    assert r.quotient.certified and not r.quotient.conditional
    assert r.upper_known == pytest.approx(math.sqrt(2), rel=1e-15)
    assert r.best_lower == r.quotient.value
    assert r.quotient_interpolation is None
    assert r.theorem_pop_holds


def test_report_bh_case():
    r = build_report(HLParams(2, math.inf))
    assert r.quotient.value == pytest.approx(math.sqrt(2), abs=1e-12)
    assert r.lower_001.value == pytest.approx(math.sqrt(2), abs=1e-15)
    assert r.lower_step4 is None
    assert r.norm_t2.method_upper == "extreme-points"


def test_report_3_8():
    r = build_report(HLParams(3, 8))
    assert r.lower_step4 is not None and r.quotient_interpolation is not None
    assert r.lower_step4.conditional and r.quotient_interpolation.conditional
    assert r.best_lower > 1
    assert r.best_method in ("quotient", "lower_001")


@pytest.mark.parametrize("m", range(2, 8))
def test_extreme_point_improvement(m):
    r = build_report(HLParams(m, 2 * m))
    assert r.lower_001.value == 1.0
    assert r.quotient.value > 1.0
    assert r.best_lower == r.quotient.value


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_step4_algebra_self_consistent(m):
    for p in (2 * m + 1, 4 * m, m * m + 3):
        if p <= 4:
            continue
        r = build_report(HLParams(m, p))
        assert r.lower_step4.value > r.lower_001.value
        # the interpolation-route quotient is exactly the step-4 closed form
        assert r.quotient_interpolation.value == pytest.approx(lower_bound_step4(HLParams(m, p)), abs=1e-10)
        # with a certified ||T_2|| < 2 the quotient beats the closed form
        assert r.quotient.value > lower_bound_001(HLParams(m, p))


@pytest.mark.parametrize("m", range(2, 14))
def test_best_below_known_upper(m):
    for p in (2 * m, 4 * m, m * m, 10 * m * m):
        r = build_report(HLParams(m, p))
        assert r.best_lower <= upper_const_known(HLParams(m, p))
        assert r.norm_t2.upper < 2


def test_best_excludes_conditional():
    r = build_report(HLParams(3, 6))
    assert r.lower_step4.value > r.quotient.value
    assert r.best_lower == r.quotient.value


def test_step4_certified_only_at_seed_exponent():
    assert build_report(HLParams(2, 4)).lower_step4.certified
    assert not build_report(HLParams(2, 6)).lower_step4.certified


def test_reports_deterministic():
    a = reports_to_json([build_report(HLParams(3, 6)), build_report(HLParams(2, math.inf))])
    b = reports_to_json([build_report(HLParams(3, 6)), build_report(HLParams(2, math.inf))])
    assert a == b


def test_json_roundtrip():
    reports = [build_report(HLParams(m, p)) for m, p in [(2, 4), (3, 9), (2, math.inf)]]
    text = reports_to_json(reports)
    assert reports_to_json(reports_from_json(text)) == text
    d = report_to_dict(reports[2])
    assert d["p"] == "inf"


def test_csv_and_text():
    reports = [build_report(HLParams(2, 4)), build_report(HLParams(2, math.inf))]
    csv_text = reports_to_csv(reports)
    lines = csv_text.split("\n")
    assert lines[0].startswith("m,p,rho,")
    assert lines[2].startswith("2,inf,")
    assert "\r" not in csv_text
    text = report_to_text(reports[0])
    assert "quotient=1.1546" in text and "certified=true" in text


def test_certified_t2_estimate_nonstrict_returns_last():
    # acceptance never met; the coarse last estimate comes back without raising
    est = certified_t2_estimate(6, 1e-2, accept=lambda e: False, max_halvings=2)
    assert est.width <= 2.5e-3
    assert est == norm_upper_T2p_certified(6, 2.5e-3)


def test_options_gap_respected():
    r = build_report(HLParams(2, 4), ReportOptions(gap=1e-3))
    assert r.norm_t2.width <= 1e-3
