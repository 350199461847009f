from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from aihm.assessment import (
    AssessmentPlan,
    MeasuredValue,
    QualitativeReviewCriterion,
    RelativeDegradationCriterion,
    ReviewInput,
    ReviewOutcome,
    Signoff,
    ThresholdCriterion,
    Verdict,
    check_plan_mode,
    criterion_from_dict,
    evaluate_criterion,
    input_from_dict,
)
from aihm.catalog import HazardMode
from aihm.errors import HazardManagementError

decimals = st.decimals(min_value=-1000, max_value=1000, allow_nan=False, allow_infinity=False, places=6)


def test_threshold_below_bound_tolerable():
    criterion = ThresholdCriterion("false-negative-rate", "<=", Decimal("0.05"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.04"))) is Verdict.TOLERABLE


def test_threshold_strict_comparators():
    criterion = ThresholdCriterion("m", "<", Decimal("0.05"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.05"))) is Verdict.NON_TOLERABLE
    criterion = ThresholdCriterion("m", ">", Decimal("0.05"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.06"))) is Verdict.TOLERABLE


def test_relative_degradation_non_tolerable():
    criterion = RelativeDegradationCriterion("acc", Decimal("0.95"), Decimal("0.03"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.90"))) is Verdict.NON_TOLERABLE


def test_relative_degradation_zero_decrease_tolerable():
    criterion = RelativeDegradationCriterion("acc", Decimal("0.95"), Decimal("0.03"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.95"))) is Verdict.TOLERABLE


def test_relative_degradation_boundary_is_inclusive():
    criterion = RelativeDegradationCriterion("acc", Decimal("0.95"), Decimal("0.03"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.92"))) is Verdict.TOLERABLE


def test_relative_degradation_improvement_tolerable():
    criterion = RelativeDegradationCriterion("acc", Decimal("0.95"), Decimal("0"))
    assert evaluate_criterion(criterion, MeasuredValue(Decimal("0.99"))) is Verdict.TOLERABLE


def test_review_pass_fail():
    criterion = QualitativeReviewCriterion(("item",))
    assert evaluate_criterion(criterion, ReviewInput(ReviewOutcome.PASS, "ok", "r")) is Verdict.TOLERABLE
    assert evaluate_criterion(criterion, ReviewInput(ReviewOutcome.FAIL, "bad", "r")) is Verdict.NON_TOLERABLE


def test_kind_mismatch_rejected():
    criterion = QualitativeReviewCriterion(("item",))
    with pytest.raises(HazardManagementError) as err:
        evaluate_criterion(criterion, MeasuredValue(Decimal("1")))
    assert err.value.code == "kind-mismatch"
    with pytest.raises(HazardManagementError) as err:
        evaluate_criterion(ThresholdCriterion("m", "<=", Decimal("1")), ReviewInput(ReviewOutcome.PASS, "", "r"))
    assert err.value.code == "kind-mismatch"


def test_non_finite_rejected():
    with pytest.raises(HazardManagementError) as err:
        MeasuredValue(Decimal("NaN"))
    assert err.value.code == "non-finite-value"
    with pytest.raises(HazardManagementError):
        criterion_from_dict({"kind": "threshold", "metricName": "m", "comparator": "<=", "bound": "inf"})


def test_negative_max_decrease_rejected():
    with pytest.raises(HazardManagementError) as err:
        RelativeDegradationCriterion("m", Decimal("1"), Decimal("-0.1"))
    assert err.value.code == "criterion-invalid"


@given(baseline=decimals, value=decimals, max_decrease=decimals.filter(lambda d: d >= 0), shift=decimals)
def test_relative_degradation_translation_consistent(baseline, value, max_decrease, shift):
    criterion = RelativeDegradationCriterion("m", baseline, max_decrease)
    shifted = RelativeDegradationCriterion("m", baseline + shift, max_decrease)
    original = evaluate_criterion(criterion, MeasuredValue(value))
    translated = evaluate_criterion(shifted, MeasuredValue(value + shift))
    assert original is translated


@given(bound=decimals, value=decimals, comparator=st.sampled_from(["<=", ">=", "<", ">"]))
def test_threshold_deterministic_and_consistent(bound, value, comparator):
    criterion = ThresholdCriterion("m", comparator, bound)
    first = evaluate_criterion(criterion, MeasuredValue(value))
    second = evaluate_criterion(criterion, MeasuredValue(value))
    assert first is second
    holds = {"<=": value <= bound, ">=": value >= bound, "<": value < bound, ">": value > bound}[comparator]
    assert (first is Verdict.TOLERABLE) == holds


@pytest.mark.parametrize(
    "criterion",
    [
        ThresholdCriterion("m", "<=", Decimal("0.01")),
        RelativeDegradationCriterion("m", Decimal("0.95"), Decimal("0.03")),
        QualitativeReviewCriterion(("a", "b")),
    ],
)
def test_criterion_roundtrip_through_dict(criterion):
    assert criterion_from_dict(criterion.to_dict()) == criterion


def test_input_roundtrip():
    measured = MeasuredValue(Decimal("0.93"))
    assert input_from_dict(measured.to_dict()) == measured
    review = ReviewInput(ReviewOutcome.FAIL, "notes", "richter")
    assert input_from_dict(review.to_dict()) == review


def quantitative_plan(**overrides):
    kwargs = dict(
        criterion=ThresholdCriterion("m", "<=", Decimal("0.1")),
        method="measure it",
        planned_by=("maier",),
        signoffs=(),
        assigned_reviewer=None,
    )
    kwargs.update(overrides)
    return AssessmentPlan(**kwargs)


def test_mode_gate_technical_accepts_quantitative():
    check_plan_mode(quantitative_plan(), HazardMode.TECHNICAL)


def test_mode_gate_technical_rejects_review():
    plan = quantitative_plan(criterion=QualitativeReviewCriterion(("x",)), assigned_reviewer="richter")
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(plan, HazardMode.TECHNICAL)
    assert err.value.code == "mode-mismatch"


def test_mode_gate_procedural_requires_review_criterion():
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(quantitative_plan(), HazardMode.PROCEDURAL)
    assert err.value.code == "mode-mismatch"


def test_mode_gate_procedural_requires_second_person():
    plan = quantitative_plan(criterion=QualitativeReviewCriterion(("x",)), assigned_reviewer=None)
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(plan, HazardMode.PROCEDURAL)
    assert err.value.code == "reviewer-required"
    plan = quantitative_plan(criterion=QualitativeReviewCriterion(("x",)), assigned_reviewer="maier")
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(plan, HazardMode.PROCEDURAL)
    assert err.value.code == "reviewer-required"


def test_mode_gate_socio_technical_requires_signoff():
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(quantitative_plan(), HazardMode.SOCIO_TECHNICAL)
    assert err.value.code == "signoff-required"
    check_plan_mode(
        quantitative_plan(signoffs=(Signoff("brandt", "agreed"),)), HazardMode.SOCIO_TECHNICAL
    )


def test_mode_gate_socio_technical_rejects_review_criterion():
    plan = quantitative_plan(
        criterion=QualitativeReviewCriterion(("x",)),
        signoffs=(Signoff("brandt", "agreed"),),
        assigned_reviewer="richter",
    )
    with pytest.raises(HazardManagementError) as err:
        check_plan_mode(plan, HazardMode.SOCIO_TECHNICAL)
    assert err.value.code == "mode-mismatch"
