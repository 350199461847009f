"""Assessment plans, acceptance criteria and computed verdicts.

Verdicts are never entered by hand: they are a pure function of the plan's
criterion and the recorded input, so any stored verdict can be re-derived and
checked. Numeric bounds and measurements use exact decimal arithmetic; a
degradation exactly equal to the allowed maximum is tolerable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Any, Union

from .catalog import HazardMode
from .errors import HazardManagementError


class Verdict(str, Enum):
    TOLERABLE = "tolerable"
    NON_TOLERABLE = "non-tolerable"


class ReviewOutcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"


COMPARATORS = ("<=", ">=", "<", ">")

# Criterion kinds a plan may use, per hazard mode.
MODE_CRITERION_KINDS: dict[HazardMode, tuple[str, ...]] = {
    HazardMode.TECHNICAL: ("threshold", "relative-degradation"),
    HazardMode.SOCIO_TECHNICAL: ("threshold", "relative-degradation"),
    HazardMode.PROCEDURAL: ("qualitative-review",),
}


def _decimal(value: Any, what: str, code: str = "criterion-invalid") -> Decimal:
    try:
        dec = Decimal(str(value))
    except (InvalidOperation, ValueError, TypeError):
        raise HazardManagementError(code, f"{what} is not a decimal number: {value!r}") from None
    if not dec.is_finite():
        raise HazardManagementError("non-finite-value", f"{what} must be finite, got {value!r}")
    return dec


@dataclass(frozen=True)
class ThresholdCriterion:
    """Tolerable iff the measured value satisfies `value <comparator> bound`."""

    metric_name: str
    comparator: str
    bound: Decimal

    kind = "threshold"

    def __post_init__(self) -> None:
        if not self.metric_name.strip():
            raise HazardManagementError("criterion-invalid", "threshold criterion needs a metric name")
        if self.comparator not in COMPARATORS:
            raise HazardManagementError(
                "criterion-invalid", f"comparator must be one of {COMPARATORS}, got {self.comparator!r}"
            )
        object.__setattr__(self, "bound", _decimal(self.bound, "bound"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "metricName": self.metric_name,
            "comparator": self.comparator,
            "bound": str(self.bound),
        }


@dataclass(frozen=True)
class RelativeDegradationCriterion:
    """Tolerable iff (baseline - value) <= maxDecrease; equality counts."""

    metric_name: str
    baseline_value: Decimal
    max_decrease: Decimal

    kind = "relative-degradation"

    def __post_init__(self) -> None:
        if not self.metric_name.strip():
            raise HazardManagementError("criterion-invalid", "relative-degradation criterion needs a metric name")
        object.__setattr__(self, "baseline_value", _decimal(self.baseline_value, "baselineValue"))
        object.__setattr__(self, "max_decrease", _decimal(self.max_decrease, "maxDecrease"))
        if self.max_decrease < 0:
            raise HazardManagementError("criterion-invalid", "maxDecrease must be >= 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "metricName": self.metric_name,
            "baselineValue": str(self.baseline_value),
            "maxDecrease": str(self.max_decrease),
        }


@dataclass(frozen=True)
class QualitativeReviewCriterion:
    """Tolerable iff a second-person review passes every checklist item."""

    review_checklist: tuple[str, ...]

    kind = "qualitative-review"

    def __post_init__(self) -> None:
        object.__setattr__(self, "review_checklist", tuple(self.review_checklist))
        if not self.review_checklist or any(not item.strip() for item in self.review_checklist):
            raise HazardManagementError("criterion-invalid", "review checklist must contain non-empty items")

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "reviewChecklist": list(self.review_checklist)}


AcceptanceCriterion = Union[ThresholdCriterion, RelativeDegradationCriterion, QualitativeReviewCriterion]

QUANTITATIVE_KINDS = ("threshold", "relative-degradation")


def criterion_from_dict(raw: dict[str, Any]) -> AcceptanceCriterion:
    kind = raw.get("kind")
    if kind == "threshold":
        return ThresholdCriterion(
            metric_name=str(raw.get("metricName", "")),
            comparator=str(raw.get("comparator", "")),
            bound=_decimal(raw.get("bound"), "bound"),
        )
    if kind == "relative-degradation":
        return RelativeDegradationCriterion(
            metric_name=str(raw.get("metricName", "")),
            baseline_value=_decimal(raw.get("baselineValue"), "baselineValue"),
            max_decrease=_decimal(raw.get("maxDecrease"), "maxDecrease"),
        )
    if kind == "qualitative-review":
        checklist = raw.get("reviewChecklist")
        if not isinstance(checklist, list):
            raise HazardManagementError("criterion-invalid", "reviewChecklist must be a list")
        return QualitativeReviewCriterion(review_checklist=tuple(str(i) for i in checklist))
    raise HazardManagementError("criterion-invalid", f"unknown criterion kind {kind!r}")


@dataclass(frozen=True)
class MeasuredValue:
    value: Decimal

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _decimal(self.value, "measuredValue", code="non-finite-value"))

    def to_dict(self) -> dict[str, Any]:
        return {"measuredValue": str(self.value)}


@dataclass(frozen=True)
class ReviewInput:
    outcome: ReviewOutcome
    notes: str
    reviewer: str

    def to_dict(self) -> dict[str, Any]:
        return {"reviewOutcome": self.outcome.value, "reviewNotes": self.notes, "reviewer": self.reviewer}


AssessmentInput = Union[MeasuredValue, ReviewInput]


def input_from_dict(raw: dict[str, Any]) -> AssessmentInput:
    if "measuredValue" in raw:
        return MeasuredValue(value=raw["measuredValue"])
    if "reviewOutcome" in raw:
        outcome = raw.get("reviewOutcome")
        if outcome not in (ReviewOutcome.PASS.value, ReviewOutcome.FAIL.value):
            raise HazardManagementError("kind-mismatch", f"review outcome must be pass or fail, got {outcome!r}")
        return ReviewInput(
            outcome=ReviewOutcome(outcome),
            notes=str(raw.get("reviewNotes", "")),
            reviewer=str(raw.get("reviewer", "")),
        )
    raise HazardManagementError("kind-mismatch", "input must carry measuredValue or reviewOutcome")


def evaluate_criterion(criterion: AcceptanceCriterion, value: AssessmentInput) -> Verdict:
    """Deterministic, total verdict function on well-kinded inputs."""
    if isinstance(criterion, (ThresholdCriterion, RelativeDegradationCriterion)):
        if not isinstance(value, MeasuredValue):
            raise HazardManagementError(
                "kind-mismatch", f"{criterion.kind} criterion needs a measured value, got a review"
            )
        measured = value.value
        if isinstance(criterion, ThresholdCriterion):
            ok = {
                "<=": measured <= criterion.bound,
                ">=": measured >= criterion.bound,
                "<": measured < criterion.bound,
                ">": measured > criterion.bound,
            }[criterion.comparator]
        else:
            ok = (criterion.baseline_value - measured) <= criterion.max_decrease
        return Verdict.TOLERABLE if ok else Verdict.NON_TOLERABLE
    if isinstance(criterion, QualitativeReviewCriterion):
        if not isinstance(value, ReviewInput):
            raise HazardManagementError("kind-mismatch", "qualitative-review criterion needs a review input")
        return Verdict.TOLERABLE if value.outcome is ReviewOutcome.PASS else Verdict.NON_TOLERABLE
    raise HazardManagementError("criterion-invalid", f"unsupported criterion {criterion!r}")


@dataclass(frozen=True)
class Signoff:
    participant: str
    statement: str

    def to_dict(self) -> dict[str, Any]:
        return {"participant": self.participant, "statement": self.statement}


@dataclass(frozen=True)
class AssessmentPlan:
    """How a hazard instance will be measured or reviewed, and by whom."""

    criterion: AcceptanceCriterion
    method: str
    planned_by: tuple[str, ...]
    signoffs: tuple[Signoff, ...] = ()
    assigned_reviewer: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion.to_dict(),
            "method": self.method,
            "plannedBy": list(self.planned_by),
            "signoffs": [s.to_dict() for s in self.signoffs],
            "assignedReviewer": self.assigned_reviewer,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "AssessmentPlan":
        return cls(
            criterion=criterion_from_dict(raw.get("criterion", {})),
            method=str(raw.get("method", "")),
            planned_by=tuple(raw.get("plannedBy", [])),
            signoffs=tuple(
                Signoff(participant=str(s.get("participant", "")), statement=str(s.get("statement", "")))
                for s in raw.get("signoffs", [])
            ),
            assigned_reviewer=raw.get("assignedReviewer"),
        )


def check_plan_mode(plan: AssessmentPlan, mode: HazardMode) -> None:
    """Enforce the mode-compatibility invariant for a plan.

    technical -> quantitative criterion; procedural -> qualitative review by a
    second person; socio-technical -> quantitative criterion plus >= 1 signoff.
    """
    kind = plan.criterion.kind
    allowed = MODE_CRITERION_KINDS[mode]
    if kind not in allowed:
        raise HazardManagementError(
            "mode-mismatch",
            f"criterion kind {kind} is not allowed for {mode.value} hazards (allowed: {', '.join(allowed)})",
            details={"mode": mode.value, "kind": kind, "allowed": list(allowed)},
        )
    if not plan.method.strip():
        raise HazardManagementError("criterion-invalid", "plan needs a method description")
    if not plan.planned_by:
        raise HazardManagementError("criterion-invalid", "plan needs at least one author in plannedBy")
    if mode is HazardMode.PROCEDURAL:
        if not plan.assigned_reviewer:
            raise HazardManagementError(
                "reviewer-required", "procedural hazards need an assigned reviewer for the qualitative review"
            )
        if plan.assigned_reviewer in plan.planned_by:
            raise HazardManagementError(
                "reviewer-required",
                f"reviewer {plan.assigned_reviewer} must be a second person, not a plan author",
            )
    if mode is HazardMode.SOCIO_TECHNICAL and not plan.signoffs:
        raise HazardManagementError(
            "signoff-required", "socio-technical hazards need at least one signoff on the plan"
        )
    for signoff in plan.signoffs:
        if not signoff.participant or not signoff.statement.strip():
            raise HazardManagementError("signoff-required", "signoffs need a participant and a statement")


@dataclass
class AssessmentRecord:
    """One measurement or review against the instance's current plan."""

    at: str
    input: AssessmentInput
    verdict: Verdict
    stale: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "at": self.at,
            "input": self.input.to_dict(),
            "verdict": self.verdict.value,
            "stale": self.stale,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "AssessmentRecord":
        return cls(
            at=str(raw.get("at", "")),
            input=input_from_dict(raw.get("input", {})),
            verdict=Verdict(raw.get("verdict")),
            stale=bool(raw.get("stale", False)),
        )
