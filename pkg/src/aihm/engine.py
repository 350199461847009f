"""Stage-gated hazard management engine.

One project = one serialized writer. Every mutating operation validates its
preconditions, appends one or more audit events, and only then applies the
change, so the audit log is always the authoritative history: replaying it
through the same transition function reconstructs the live state exactly.

Process shape per lifecycle stage: open the stage (candidates are the catalog
hazards that can occur at that stage), triage each candidate in or out with a
justified team decision, plan and record assessments for included hazards,
treat non-tolerable ones (which invalidates dependent verdicts along declared
trade-off links), flag what cannot be reduced as residual, then close the
stage. Stages open strictly in order 1..5 and only after the previous stage
closed.
"""

from __future__ import annotations

import copy
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

from .assessment import (
    AssessmentInput,
    AssessmentPlan,
    AssessmentRecord,
    ReviewInput,
    Verdict,
    check_plan_mode,
    evaluate_criterion,
    input_from_dict,
)
from .auditlog import AuditLog, EventDraft
from .catalog import Catalog, HazardLevel, LifecycleStage, bundled_catalog, hazard_sort_key
from .errors import HazardManagementError

ROLE_DATA_SCIENTIST = "data-scientist"
ROLE_DOMAIN_EXPERT = "domain-expert"
ROLE_BUSINESS_REPRESENTATIVE = "business-representative"
ROLE_REVIEWER = "reviewer"


class InstanceStatus(str, Enum):
    CANDIDATE = "candidate"
    EXCLUDED = "excluded"
    INCLUDED = "included"
    PLANNED = "planned"
    ASSESSED = "assessed"
    TREATED = "treated"
    RESIDUAL = "residual"


class StageStatus(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


# Conditions that keep a stage from closing, keyed for error reporting.
BLOCK_AWAITING_TRIAGE = "awaiting-triage"
BLOCK_AWAITING_PLAN = "awaiting-plan"
BLOCK_AWAITING_RESULT = "awaiting-result"
BLOCK_REASSESSMENT_PENDING = "re-assessment-pending"
BLOCK_NON_TOLERABLE = "non-tolerable-verdict"


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class Participant:
    name: str
    role: str

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "role": self.role}


@dataclass
class TriageDecision:
    decision: str  # include | exclude
    justification: str
    decided_by: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "decision": self.decision,
            "justification": self.justification,
            "decidedBy": list(self.decided_by),
        }


@dataclass
class TreatmentRecord:
    description: str
    technique: str
    applied_by: str
    applied_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "description": self.description,
            "technique": self.technique,
            "appliedBy": self.applied_by,
            "appliedAt": self.applied_at,
        }


@dataclass
class TradeoffLink:
    from_id: str
    to_id: str
    rationale: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "fromDefinitionId": self.from_id,
            "toDefinitionId": self.to_id,
            "rationale": self.rationale,
        }


@dataclass
class DeveloperAlert:
    recipients: tuple[str, ...]
    justification: str
    at: str

    def to_dict(self) -> dict[str, Any]:
        return {"recipients": list(self.recipients), "justification": self.justification, "at": self.at}


@dataclass
class StageClosure:
    closed_at: str
    summary: str
    residual_ids: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"closedAt": self.closed_at, "summary": self.summary, "residualIds": list(self.residual_ids)}


@dataclass
class HazardInstance:
    """A catalog hazard instantiated for one project stage."""

    definition_id: str
    stage: int
    status: InstanceStatus = InstanceStatus.CANDIDATE
    triage: TriageDecision | None = None
    plan: AssessmentPlan | None = None
    records: list[AssessmentRecord] = field(default_factory=list)
    treatments: list[TreatmentRecord] = field(default_factory=list)
    prior_stage: int | None = None
    alert: DeveloperAlert | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "definitionId": self.definition_id,
            "stage": self.stage,
            "status": self.status.value,
            "triage": self.triage.to_dict() if self.triage else None,
            "plan": self.plan.to_dict() if self.plan else None,
            "records": [r.to_dict() for r in self.records],
            "treatments": [t.to_dict() for t in self.treatments],
            "priorStage": self.prior_stage,
            "alert": self.alert.to_dict() if self.alert else None,
        }


@dataclass
class StageRun:
    stage: int
    status: StageStatus = StageStatus.OPEN
    instances: dict[str, HazardInstance] = field(default_factory=dict)
    closure: StageClosure | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage": self.stage,
            "status": self.status.value,
            "instances": {k: v.to_dict() for k, v in self.instances.items()},
            "closure": self.closure.to_dict() if self.closure else None,
        }


@dataclass
class Project:
    id: str
    name: str
    use_case_context: str
    participants: list[Participant]
    stage_runs: dict[int, StageRun] = field(default_factory=dict)
    tradeoff_links: list[TradeoffLink] = field(default_factory=list)
    catalog_version: str = ""

    def participant(self, name: str) -> Participant:
        for person in self.participants:
            if person.name == name:
                return person
        raise HazardManagementError("unknown-participant", f"{name} is not a project participant")

    def roles_of(self, names: Iterable[str]) -> set[str]:
        return {self.participant(n).role for n in names}

    def open_stage_ordinal(self) -> int | None:
        for ordinal, run in self.stage_runs.items():
            if run.status is StageStatus.OPEN:
                return ordinal
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "useCaseContext": self.use_case_context,
            "participants": [p.to_dict() for p in self.participants],
            "stageRuns": {str(k): v.to_dict() for k, v in sorted(self.stage_runs.items())},
            "tradeoffLinks": [l.to_dict() for l in self.tradeoff_links],
            "catalogVersion": self.catalog_version,
        }


def verdict_of(instance: HazardInstance) -> Verdict | None:
    """Latest non-stale record's verdict; None while pending."""
    for record in reversed(instance.records):
        if not record.stale:
            return record.verdict
    return None


def verdict_label(instance: HazardInstance) -> str:
    verdict = verdict_of(instance)
    return verdict.value if verdict else "pending"


def instance_blocker(instance: HazardInstance) -> str | None:
    """The condition keeping this instance unresolved, if any."""
    status = instance.status
    if status is InstanceStatus.CANDIDATE:
        return BLOCK_AWAITING_TRIAGE
    if status is InstanceStatus.INCLUDED:
        return BLOCK_AWAITING_PLAN
    if status is InstanceStatus.PLANNED:
        if any(r.stale for r in instance.records):
            return BLOCK_REASSESSMENT_PENDING
        return BLOCK_AWAITING_RESULT
    if status is InstanceStatus.TREATED:
        return BLOCK_REASSESSMENT_PENDING
    if status is InstanceStatus.ASSESSED:
        if verdict_of(instance) is not Verdict.TOLERABLE:
            return BLOCK_NON_TOLERABLE
        return None
    return None  # excluded, residual: resolved


def stage_blockers(run: StageRun) -> list[dict[str, str]]:
    blockers = []
    for definition_id in sorted(run.instances, key=hazard_sort_key):
        condition = instance_blocker(run.instances[definition_id])
        if condition:
            blockers.append({"definitionId": definition_id, "condition": condition})
    return blockers


# ---------------------------------------------------------------------------
# Event validation and application (shared by live operations and replay)
# ---------------------------------------------------------------------------


def _require(condition: bool, code: str, message: str, details: dict[str, Any] | None = None) -> None:
    if not condition:
        raise HazardManagementError(code, message, details)


def _get_open_run(project: Project, stage: Any) -> StageRun:
    _require(isinstance(stage, int) and 1 <= stage <= 5, "unknown-stage", f"stage must be 1..5, got {stage!r}")
    run = project.stage_runs.get(stage)
    _require(run is not None, "stage-not-open", f"stage {stage} has not been opened")
    assert run is not None
    _require(run.status is StageStatus.OPEN, "stage-not-open", f"stage {stage} is already closed")
    return run


def _get_instance(run: StageRun, definition_id: str) -> HazardInstance:
    instance = run.instances.get(definition_id)
    _require(
        instance is not None,
        "unknown-hazard",
        f"{definition_id} is not an instantiated hazard in stage {run.stage}",
    )
    assert instance is not None
    return instance


def _check_participants(project: Project, names: Iterable[str]) -> None:
    for name in names:
        project.participant(name)


def validate_event(project: Project | None, catalog: Catalog, kind: str, payload: dict[str, Any], actor: str) -> None:
    """Raise HazardManagementError unless the event is applicable to state."""
    if kind == "project-created":
        _require(project is None, "event-invalid", "project-created must be the first event")
        _require(bool(str(payload.get("projectId", "")).strip()), "event-invalid", "project id required")
        _require(bool(str(payload.get("name", "")).strip()), "name-required", "project name must be non-empty")
        participants = payload.get("participants")
        _require(
            isinstance(participants, list) and len(participants) > 0,
            "participants-required",
            "a project needs at least one participant",
        )
        names = []
        for person in participants:
            name = str(person.get("name", "")).strip() if isinstance(person, dict) else ""
            role = str(person.get("role", "")).strip() if isinstance(person, dict) else ""
            _require(bool(name) and bool(role), "invalid-participant", "participants need a name and a role")
            names.append(name)
        _require(len(set(names)) == len(names), "invalid-participant", "participant names must be unique")
        return

    _require(project is not None, "event-invalid", f"{kind} requires an existing project")
    assert project is not None

    if kind == "stage-opened":
        stage = payload.get("stage")
        _require(isinstance(stage, int) and 1 <= stage <= 5, "unknown-stage", f"stage must be 1..5, got {stage!r}")
        assert isinstance(stage, int)
        opened = sorted(project.stage_runs)
        highest = opened[-1] if opened else 0
        _require(stage > highest, "stage-already-opened", f"stage {stage} was already opened")
        _require(
            stage == highest + 1,
            "stage-out-of-order",
            f"stage {stage} cannot open before stage {highest + 1}",
        )
        if highest:
            _require(
                project.stage_runs[highest].status is StageStatus.CLOSED,
                "stage-not-closed",
                f"stage {highest} not closed",
            )
        expected = [h.id for h in catalog.filter_by_stage(stage)]
        _require(
            payload.get("candidates") == expected,
            "event-invalid",
            f"candidate snapshot for stage {stage} does not match the catalog (version skew?)",
            details={"expected": expected, "recorded": payload.get("candidates")},
        )
        return

    if kind == "hazard-triaged":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            instance.status is InstanceStatus.CANDIDATE,
            "not-a-candidate",
            f"{instance.definition_id} in stage {run.stage} was already triaged ({instance.status.value}); "
            "triage decisions are immutable",
        )
        decision = payload.get("decision")
        _require(decision in ("include", "exclude"), "event-invalid", f"triage decision must be include or exclude")
        _require(
            bool(str(payload.get("justification", "")).strip()),
            "justification-required",
            f"triage of {instance.definition_id} needs a non-empty justification",
        )
        decided_by = payload.get("decidedBy") or []
        _require(bool(decided_by), "participant-role-required", "triage needs named deciders")
        _check_participants(project, decided_by)
        roles = project.roles_of(decided_by)
        definition = catalog.get(instance.definition_id)
        missing = [
            role for role in (ROLE_DOMAIN_EXPERT, ROLE_DATA_SCIENTIST) if role not in roles
        ]
        if missing:
            note = ""
            if definition.level is HazardLevel.APPLICATION and ROLE_DOMAIN_EXPERT in missing:
                note = f" ({instance.definition_id} acts at application level, so a domain expert is mandatory)"
            raise HazardManagementError(
                "participant-role-required",
                f"triage deciders must include {' and '.join(missing)}{note}",
                details={"missingRoles": missing},
            )
        return

    if kind == "tradeoff-linked":
        from_id = str(payload.get("fromDefinitionId"))
        to_id = str(payload.get("toDefinitionId"))
        catalog.get(from_id)
        catalog.get(to_id)
        _require(from_id != to_id, "self-link", f"a trade-off link cannot point from {from_id} to itself")
        _require(
            bool(str(payload.get("rationale", "")).strip()),
            "justification-required",
            "trade-off links need a rationale",
        )
        return

    if kind == "assessment-planned":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            instance.status in (InstanceStatus.INCLUDED, InstanceStatus.PLANNED),
            "invalid-status",
            f"{instance.definition_id} is {instance.status.value}; plans can only be set on included or "
            "re-opened (planned) instances",
        )
        plan = AssessmentPlan.from_dict(payload.get("plan", {}))
        definition = catalog.get(instance.definition_id)
        check_plan_mode(plan, definition.mode)
        _check_participants(project, plan.planned_by)
        _check_participants(project, (s.participant for s in plan.signoffs))
        if plan.assigned_reviewer:
            _check_participants(project, [plan.assigned_reviewer])
        return

    if kind == "result-recorded":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        if instance.plan is None:
            raise HazardManagementError(
                "no-plan", f"{instance.definition_id} has no assessment plan to record a result against"
            )
        _require(
            instance.status in (InstanceStatus.PLANNED, InstanceStatus.TREATED),
            "invalid-status",
            f"{instance.definition_id} is {instance.status.value}; results can only be recorded while "
            "planned or after a treatment",
        )
        value = input_from_dict(payload.get("input", {}))
        if isinstance(value, ReviewInput):
            _require(bool(value.reviewer), "reviewer-required", "qualitative reviews need a named reviewer")
            _check_participants(project, [value.reviewer])
            _require(
                value.reviewer not in instance.plan.planned_by,
                "reviewer-required",
                f"reviewer {value.reviewer} must be a second person, not a plan author",
            )
        verdict = evaluate_criterion(instance.plan.criterion, value)
        _require(
            payload.get("verdict") == verdict.value,
            "event-invalid",
            f"stored verdict {payload.get('verdict')!r} does not match recomputation {verdict.value!r}",
        )
        return

    if kind == "treatment-recorded":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            verdict_of(instance) is Verdict.NON_TOLERABLE,
            "no-nontolerable-verdict",
            f"{instance.definition_id} has no live non-tolerable verdict to treat "
            f"(current: {verdict_label(instance)})",
        )
        treatment = payload.get("treatment", {})
        _require(
            bool(str(treatment.get("description", "")).strip()),
            "event-invalid",
            "treatments need a description",
        )
        _require(
            bool(str(treatment.get("technique", "")).strip()),
            "event-invalid",
            "treatments need a technique label",
        )
        _check_participants(project, [str(treatment.get("appliedBy", ""))])
        return

    if kind == "verdict-invalidated":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            instance.status is InstanceStatus.ASSESSED,
            "event-invalid",
            f"cannot invalidate {instance.definition_id}: status is {instance.status.value}, not assessed",
        )
        cause = payload.get("causedBy", {})
        from_id = str(cause.get("definitionId"))
        _require(
            any(l.from_id == from_id and l.to_id == instance.definition_id for l in project.tradeoff_links),
            "event-invalid",
            f"no trade-off link from {from_id} to {instance.definition_id}",
        )
        return

    if kind == "residual-flagged":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            verdict_of(instance) is Verdict.NON_TOLERABLE,
            "no-nontolerable-verdict",
            f"{instance.definition_id} can only be flagged residual while its verdict is non-tolerable "
            f"(current: {verdict_label(instance)})",
        )
        _require(
            bool(str(payload.get("justification", "")).strip()),
            "justification-required",
            "residual flags need a justification for why reduction is impossible",
        )
        return

    if kind == "developer-alerted":
        run = _get_open_run(project, payload.get("stage"))
        instance = _get_instance(run, str(payload.get("definitionId")))
        _require(
            instance.status is InstanceStatus.RESIDUAL,
            "event-invalid",
            f"developer alerts accompany residual flags; {instance.definition_id} is {instance.status.value}",
        )
        recipients = payload.get("recipients") or []
        _require(bool(recipients), "recipients-required", "alert requires >=1 recipient")
        _require(
            all(str(r).strip() for r in recipients),
            "recipients-required",
            "alert recipients must be non-empty names",
        )
        return

    if kind == "stage-closed":
        run = _get_open_run(project, payload.get("stage"))
        blockers = stage_blockers(run)
        if blockers:
            stale = [b for b in blockers if b["condition"] == BLOCK_REASSESSMENT_PENDING]
            code = "stale-verdict" if stale else "unresolved-instances"
            listing = "; ".join(f"{b['definitionId']} {b['condition']}" for b in blockers)
            raise HazardManagementError(
                code,
                f"stage {run.stage} cannot close: {listing}",
                details={"stage": run.stage, "blocking": blockers},
            )
        _require(
            bool(str(payload.get("summary", "")).strip()),
            "justification-required",
            "stage closure needs a summary",
        )
        expected_residuals = sorted(
            (i.definition_id for i in run.instances.values() if i.status is InstanceStatus.RESIDUAL),
            key=hazard_sort_key,
        )
        _require(
            payload.get("residualIds") == expected_residuals,
            "event-invalid",
            "closure residual list does not match residual-flagged instances",
            details={"expected": expected_residuals, "recorded": payload.get("residualIds")},
        )
        return

    raise HazardManagementError("event-invalid", f"unknown event kind {kind!r}")


def apply_event(
    project: Project | None, catalog: Catalog, kind: str, payload: dict[str, Any], at: str, actor: str
) -> Project:
    """Apply a validated event; returns the (possibly new) project state."""
    if kind == "project-created":
        return Project(
            id=payload["projectId"],
            name=payload["name"],
            use_case_context=payload.get("useCaseContext", ""),
            participants=[Participant(p["name"], p["role"]) for p in payload["participants"]],
            catalog_version=payload.get("catalogVersion", ""),
        )

    assert project is not None

    if kind == "stage-opened":
        stage = payload["stage"]
        run = StageRun(stage=stage)
        for definition_id in payload["candidates"]:
            prior = None
            for earlier in sorted(project.stage_runs, reverse=True):
                if earlier < stage and definition_id in project.stage_runs[earlier].instances:
                    prior = earlier
                    break
            run.instances[definition_id] = HazardInstance(
                definition_id=definition_id, stage=stage, prior_stage=prior
            )
        project.stage_runs[stage] = run
        return project

    if kind == "hazard-triaged":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        instance.triage = TriageDecision(
            decision=payload["decision"],
            justification=payload["justification"],
            decided_by=tuple(payload["decidedBy"]),
        )
        instance.status = (
            InstanceStatus.INCLUDED if payload["decision"] == "include" else InstanceStatus.EXCLUDED
        )
        return project

    if kind == "tradeoff-linked":
        project.tradeoff_links.append(
            TradeoffLink(
                from_id=payload["fromDefinitionId"],
                to_id=payload["toDefinitionId"],
                rationale=payload["rationale"],
            )
        )
        return project

    if kind == "assessment-planned":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        instance.plan = AssessmentPlan.from_dict(payload["plan"])
        instance.status = InstanceStatus.PLANNED
        return project

    if kind == "result-recorded":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        instance.records.append(
            AssessmentRecord(at=at, input=input_from_dict(payload["input"]), verdict=Verdict(payload["verdict"]))
        )
        instance.status = InstanceStatus.ASSESSED
        return project

    if kind == "treatment-recorded":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        treatment = payload["treatment"]
        instance.treatments.append(
            TreatmentRecord(
                description=treatment["description"],
                technique=treatment["technique"],
                applied_by=treatment["appliedBy"],
                applied_at=treatment.get("appliedAt", at),
            )
        )
        for record in instance.records:
            record.stale = True
        instance.status = InstanceStatus.TREATED
        return project

    if kind == "verdict-invalidated":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        for record in instance.records:
            record.stale = True
        instance.status = InstanceStatus.PLANNED
        return project

    if kind == "residual-flagged":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        instance.status = InstanceStatus.RESIDUAL
        return project

    if kind == "developer-alerted":
        instance = project.stage_runs[payload["stage"]].instances[payload["definitionId"]]
        instance.alert = DeveloperAlert(
            recipients=tuple(payload["recipients"]),
            justification=payload.get("justification", ""),
            at=at,
        )
        return project

    if kind == "stage-closed":
        run = project.stage_runs[payload["stage"]]
        run.status = StageStatus.CLOSED
        run.closure = StageClosure(
            closed_at=at, summary=payload["summary"], residual_ids=tuple(payload["residualIds"])
        )
        return project

    raise HazardManagementError("event-invalid", f"unknown event kind {kind!r}")


# ---------------------------------------------------------------------------
# Engine facade
# ---------------------------------------------------------------------------


class ProjectEngine:
    """Serialized writer over one project's state and audit log."""

    def __init__(self, catalog: Catalog, log: AuditLog, project: Project | None):
        self.catalog = catalog
        self.log = log
        self.project = project

    # -- construction -------------------------------------------------------

    @classmethod
    def create(
        cls,
        name: str,
        context: str,
        participants: Sequence[tuple[str, str] | dict[str, str] | Participant],
        actor: str,
        *,
        at: str | None = None,
        project_id: str | None = None,
        catalog: Catalog | None = None,
        log_path: str | Path | None = None,
    ) -> "ProjectEngine":
        catalog = catalog or bundled_catalog()
        project_id = project_id or uuid.uuid4().hex
        people = []
        for person in participants:
            if isinstance(person, Participant):
                people.append({"name": person.name, "role": person.role})
            elif isinstance(person, dict):
                people.append({"name": person.get("name", ""), "role": person.get("role", "")})
            else:
                pname, prole = person
                people.append({"name": pname, "role": prole})
        engine = cls(catalog, AuditLog(project_id, path=log_path), None)
        engine._commit(
            [
                (
                    "project-created",
                    {
                        "projectId": project_id,
                        "name": name,
                        "useCaseContext": context,
                        "participants": people,
                        "catalogVersion": catalog.version,
                    },
                )
            ],
            actor=actor,
            at=at,
        )
        return engine

    @classmethod
    def from_log(cls, log: AuditLog, catalog: Catalog | None = None) -> "ProjectEngine":
        """Rebuild live state by replaying a verified log."""
        catalog = catalog or bundled_catalog()
        verification = log.verify()
        if not verification.ok:
            raise HazardManagementError(
                "chain-broken",
                f"audit chain broken at event {verification.broken_at} ({verification.reason})",
                details=verification.to_dict(),
            )
        project: Project | None = None
        for event in log.events:
            try:
                validate_event(project, catalog, event.event_kind, event.payload, event.actor)
                project = apply_event(project, catalog, event.event_kind, event.payload, event.at, event.actor)
            except HazardManagementError as exc:
                raise HazardManagementError(
                    "replay-failed",
                    f"event {event.sequence} ({event.event_kind}) cannot replay: {exc.message}",
                    details={"sequence": event.sequence, "cause": exc.to_dict()},
                ) from exc
        if project is None:
            raise HazardManagementError("replay-failed", "log contains no project-created event")
        return cls(catalog, log, project)

    # -- commit machinery ----------------------------------------------------

    def _commit(self, drafts: list[tuple[str, dict[str, Any]]], actor: str, at: str | None) -> list:
        """Validate and apply drafts on a working copy, then persist.

        The audit write happens before the live state is swapped, so a storage
        failure leaves the engine state unchanged.
        """
        if not actor or not str(actor).strip():
            raise HazardManagementError("actor-required", "mutating operations need an actor")
        timestamp = at or utc_now()
        working = copy.deepcopy(self.project)
        event_drafts = []
        for kind, payload in drafts:
            validate_event(working, self.catalog, kind, payload, actor)
            working = apply_event(working, self.catalog, kind, payload, timestamp, actor)
            event_drafts.append(EventDraft(event_kind=kind, payload=payload, actor=actor, at=timestamp))
        sealed = self.log.seal(event_drafts)
        self.log.extend(sealed)
        self.project = working
        return sealed

    def _open_run(self, stage: int | None) -> StageRun:
        assert self.project is not None
        if stage is None:
            stage = self.project.open_stage_ordinal()
            if stage is None:
                raise HazardManagementError("stage-not-open", "no stage is currently open")
        return _get_open_run(self.project, int(stage))

    # -- operations ----------------------------------------------------------

    def open_stage(self, stage: int, actor: str, at: str | None = None) -> StageRun:
        candidates = [h.id for h in self.catalog.filter_by_stage(stage)] if 1 <= int(stage) <= 5 else []
        self._commit([("stage-opened", {"stage": int(stage), "candidates": candidates})], actor, at)
        assert self.project is not None
        return self.project.stage_runs[int(stage)]

    def triage(
        self,
        definition_id: str,
        decision: str,
        justification: str,
        decided_by: Sequence[str],
        actor: str,
        at: str | None = None,
        stage: int | None = None,
    ) -> HazardInstance:
        run = self._open_run(stage)
        payload = {
            "stage": run.stage,
            "definitionId": definition_id,
            "decision": decision,
            "justification": justification,
            "decidedBy": list(decided_by),
        }
        self._commit([("hazard-triaged", payload)], actor, at)
        return self._instance(run.stage, definition_id)

    def add_tradeoff_link(
        self, from_id: str, to_id: str, rationale: str, actor: str, at: str | None = None
    ) -> TradeoffLink:
        payload = {"fromDefinitionId": from_id, "toDefinitionId": to_id, "rationale": rationale}
        self._commit([("tradeoff-linked", payload)], actor, at)
        assert self.project is not None
        return self.project.tradeoff_links[-1]

    def plan_assessment(
        self,
        definition_id: str,
        plan: AssessmentPlan | dict[str, Any],
        actor: str,
        at: str | None = None,
        stage: int | None = None,
    ) -> HazardInstance:
        run = self._open_run(stage)
        plan_dict = plan.to_dict() if isinstance(plan, AssessmentPlan) else AssessmentPlan.from_dict(plan).to_dict()
        payload = {"stage": run.stage, "definitionId": definition_id, "plan": plan_dict}
        self._commit([("assessment-planned", payload)], actor, at)
        return self._instance(run.stage, definition_id)

    def record_result(
        self,
        definition_id: str,
        value: AssessmentInput | dict[str, Any],
        actor: str,
        at: str | None = None,
        stage: int | None = None,
    ) -> AssessmentRecord:
        run = self._open_run(stage)
        instance = _get_instance(run, definition_id)
        if instance.plan is None:
            raise HazardManagementError(
                "no-plan", f"{definition_id} has no assessment plan to record a result against"
            )
        assessment_input = value if not isinstance(value, dict) else input_from_dict(value)
        verdict = evaluate_criterion(instance.plan.criterion, assessment_input)
        payload = {
            "stage": run.stage,
            "definitionId": definition_id,
            "input": assessment_input.to_dict(),
            "verdict": verdict.value,
        }
        self._commit([("result-recorded", payload)], actor, at)
        return self._instance(run.stage, definition_id).records[-1]

    def record_treatment(
        self,
        definition_id: str,
        description: str,
        technique: str,
        applied_by: str,
        actor: str,
        at: str | None = None,
        stage: int | None = None,
    ) -> HazardInstance:
        run = self._open_run(stage)
        assert self.project is not None
        timestamp = at or utc_now()
        drafts: list[tuple[str, dict[str, Any]]] = [
            (
                "treatment-recorded",
                {
                    "stage": run.stage,
                    "definitionId": definition_id,
                    "treatment": {
                        "description": description,
                        "technique": technique,
                        "appliedBy": applied_by,
                        "appliedAt": timestamp,
                    },
                },
            )
        ]
        # One-hop trade-off propagation: live assessed instances of successor
        # definitions in open stage runs lose their verdicts.
        successors: dict[str, str] = {}
        for link in self.project.tradeoff_links:
            if link.from_id == definition_id and link.to_id not in successors:
                successors[link.to_id] = link.rationale
        targets = []
        for ordinal in sorted(self.project.stage_runs):
            open_run = self.project.stage_runs[ordinal]
            if open_run.status is not StageStatus.OPEN:
                continue
            for to_id, rationale in successors.items():
                target = open_run.instances.get(to_id)
                if target is not None and target.status is InstanceStatus.ASSESSED:
                    targets.append((ordinal, to_id, rationale))
        for ordinal, to_id, rationale in sorted(targets, key=lambda t: (t[0], hazard_sort_key(t[1]))):
            drafts.append(
                (
                    "verdict-invalidated",
                    {
                        "stage": ordinal,
                        "definitionId": to_id,
                        "causedBy": {"definitionId": definition_id, "stage": run.stage},
                        "rationale": rationale,
                    },
                )
            )
        self._commit(drafts, actor, timestamp)
        return self._instance(run.stage, definition_id)

    def mark_residual(
        self,
        definition_id: str,
        justification: str,
        alert_recipients: Sequence[str],
        actor: str,
        at: str | None = None,
        stage: int | None = None,
    ) -> HazardInstance:
        run = self._open_run(stage)
        drafts = [
            (
                "residual-flagged",
                {"stage": run.stage, "definitionId": definition_id, "justification": justification},
            ),
            (
                "developer-alerted",
                {
                    "stage": run.stage,
                    "definitionId": definition_id,
                    "recipients": list(alert_recipients),
                    "justification": justification,
                },
            ),
        ]
        self._commit(drafts, actor, at)
        return self._instance(run.stage, definition_id)

    def close_stage(self, summary: str, actor: str, at: str | None = None, stage: int | None = None) -> StageClosure:
        run = self._open_run(stage)
        residuals = sorted(
            (i.definition_id for i in run.instances.values() if i.status is InstanceStatus.RESIDUAL),
            key=hazard_sort_key,
        )
        payload = {"stage": run.stage, "summary": summary, "residualIds": residuals}
        self._commit([("stage-closed", payload)], actor, at)
        assert self.project is not None
        closure = self.project.stage_runs[run.stage].closure
        assert closure is not None
        return closure

    # -- reads ---------------------------------------------------------------

    def _instance(self, stage: int, definition_id: str) -> HazardInstance:
        assert self.project is not None
        return self.project.stage_runs[stage].instances[definition_id]

    def status(self) -> dict[str, Any]:
        assert self.project is not None
        return project_status(self.project)

    def stage_hazards(self, stage: int) -> list[dict[str, Any]]:
        """Register card data for one stage (must have been opened)."""
        assert self.project is not None
        run = self.project.stage_runs.get(int(stage))
        if run is None:
            raise HazardManagementError("stage-never-opened", f"stage {stage} has never been opened")
        return [
            instance_summary(run.instances[definition_id], self.catalog)
            for definition_id in sorted(run.instances, key=hazard_sort_key)
        ]


def instance_summary(instance: HazardInstance, catalog: Catalog) -> dict[str, Any]:
    definition = catalog.get(instance.definition_id)
    blocker = instance_blocker(instance)
    return {
        "definitionId": instance.definition_id,
        "title": definition.title,
        "stage": instance.stage,
        "taxonomy": {
            "stages": sorted(int(s) for s in definition.stages),
            "mode": definition.mode.value,
            "level": definition.level.value,
        },
        "status": instance.status.value,
        "verdict": verdict_label(instance),
        "stale": blocker == BLOCK_REASSESSMENT_PENDING,
        "blocker": blocker,
        "triage": instance.triage.to_dict() if instance.triage else None,
        "plan": instance.plan.to_dict() if instance.plan else None,
        "records": [r.to_dict() for r in instance.records],
        "treatments": [t.to_dict() for t in instance.treatments],
        "priorStage": instance.prior_stage,
        "alert": instance.alert.to_dict() if instance.alert else None,
    }


def project_status(project: Project) -> dict[str, Any]:
    """Per-stage counts, blocking conditions and residual list; pure read."""
    stages = []
    residuals = []
    for stage in LifecycleStage:
        ordinal = int(stage)
        run = project.stage_runs.get(ordinal)
        counts = {status.value: 0 for status in InstanceStatus}
        entry: dict[str, Any] = {
            "stage": ordinal,
            "name": stage.slug,
            "status": "unopened",
            "counts": counts,
            "blocking": [],
            "staleCount": 0,
            "residualIds": [],
            "closureSummary": None,
            "closedAt": None,
        }
        if run is not None:
            entry["status"] = run.status.value
            for instance in run.instances.values():
                counts[instance.status.value] += 1
                if instance.status is InstanceStatus.RESIDUAL:
                    entry["residualIds"].append(instance.definition_id)
                    residuals.append(
                        {
                            "stage": ordinal,
                            "definitionId": instance.definition_id,
                            "recipients": list(instance.alert.recipients) if instance.alert else [],
                        }
                    )
            entry["residualIds"].sort(key=hazard_sort_key)
            blockers = stage_blockers(run) if run.status is StageStatus.OPEN else []
            entry["blocking"] = blockers
            entry["staleCount"] = sum(
                1 for b in blockers if b["condition"] == BLOCK_REASSESSMENT_PENDING
            )
            if run.closure is not None:
                entry["closureSummary"] = run.closure.summary
                entry["closedAt"] = run.closure.closed_at
        stages.append(entry)

    residuals.sort(key=lambda r: (r["stage"], hazard_sort_key(r["definitionId"])))
    return {
        "projectId": project.id,
        "name": project.name,
        "useCaseContext": project.use_case_context,
        "catalogVersion": project.catalog_version,
        "participants": [p.to_dict() for p in project.participants],
        "stages": stages,
        "openStage": project.open_stage_ordinal(),
        "tradeoffLinks": [l.to_dict() for l in project.tradeoff_links],
        "residuals": residuals,
        "complete": all(
            project.stage_runs.get(int(s)) is not None
            and project.stage_runs[int(s)].status is StageStatus.CLOSED
            for s in LifecycleStage
        ),
    }
