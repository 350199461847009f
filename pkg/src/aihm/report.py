"""Deterministic audit reports generated from the event log.

A report is a pure function of the event-log prefix it covers: the same log
always renders to byte-identical output, and the document embeds the hash of
the last covered event so an auditor can bind it to a verified chain. Two
formats: human-readable markdown and a structured JSON mirror.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .auditlog import AuditLog
from .catalog import Catalog, LifecycleStage, bundled_catalog, hazard_sort_key
from .engine import InstanceStatus, Project, StageRun, verdict_label
from .errors import HazardManagementError
from .replay import replay_log

FORMATS = ("markdown", "structured")


@dataclass
class ReportDocument:
    scope: dict[str, Any]
    title: str
    source_log_hash: str
    event_count: int
    sections: list[dict[str, Any]] = field(default_factory=list)

    def add(self, heading: str, blocks: list[str]) -> None:
        self.sections.append({"heading": heading, "blocks": blocks})

    def to_dict(self) -> dict[str, Any]:
        return {
            "scope": self.scope,
            "title": self.title,
            "sourceLogHash": self.source_log_hash,
            "eventCount": self.event_count,
            "sections": self.sections,
        }

    def render_markdown(self) -> str:
        lines = [f"# {self.title}", ""]
        lines.append(f"Source log: `{self.source_log_hash}` ({self.event_count} events, sha256 chain)")
        lines.append("")
        for section in self.sections:
            lines.append(f"## {section['heading']}")
            lines.append("")
            for block in section["blocks"]:
                lines.append(block)
                lines.append("")
        return "\n".join(lines).rstrip("\n") + "\n"

    def render_structured(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "markdown":
            return self.render_markdown()
        if fmt == "structured":
            return self.render_structured()
        raise HazardManagementError("event-invalid", f"unknown report format {fmt!r} (use markdown or structured)")


def _criterion_text(criterion: dict[str, Any]) -> str:
    kind = criterion.get("kind")
    if kind == "threshold":
        return f"threshold: {criterion['metricName']} {criterion['comparator']} {criterion['bound']}"
    if kind == "relative-degradation":
        return (
            f"relative degradation on {criterion['metricName']}: tolerable while decrease from baseline "
            f"{criterion['baselineValue']} stays within {criterion['maxDecrease']}"
        )
    if kind == "qualitative-review":
        checklist = "; ".join(criterion.get("reviewChecklist", []))
        return f"qualitative review: {checklist}"
    return f"unknown criterion kind {kind!r}"


def _plan_lines(plan: dict[str, Any]) -> list[str]:
    lines = [f"- Plan: {_criterion_text(plan['criterion'])}"]
    lines.append(f"  - Method: {plan['method']}")
    lines.append(f"  - Planned by: {', '.join(plan['plannedBy'])}")
    if plan.get("assignedReviewer"):
        lines.append(f"  - Assigned reviewer: {plan['assignedReviewer']}")
    for signoff in plan.get("signoffs", []):
        lines.append(f"  - Signoff ({signoff['participant']}): {signoff['statement']}")
    return lines


def _instance_block(project: Project, run: StageRun, definition_id: str, events: list, catalog: Catalog) -> str:
    instance = run.instances[definition_id]
    definition = catalog.get(definition_id)
    stages = ", ".join(str(s) for s in sorted(int(x) for x in definition.stages))
    lines = [f"#### {definition_id}: {definition.title}"]
    lines.append(f"- Taxonomy: stages {stages}; mode {definition.mode.value}; level {definition.level.value}")
    status_line = f"- Status: {instance.status.value}"
    if instance.records or instance.status in (InstanceStatus.PLANNED, InstanceStatus.TREATED):
        status_line += f"; verdict: {verdict_label(instance)}"
    lines.append(status_line)
    if instance.prior_stage is not None:
        lines.append(f"- Carried forward from stage {instance.prior_stage}")

    record_index = 0
    for event in events:
        payload = event.payload
        if payload.get("definitionId") != definition_id or payload.get("stage") != run.stage:
            continue
        kind = event.event_kind
        if kind == "hazard-triaged":
            deciders = ", ".join(payload["decidedBy"])
            lines.append(f"- Triage: {payload['decision']}d by {deciders}: {payload['justification']}")
        elif kind == "assessment-planned":
            lines.extend(_plan_lines(payload["plan"]))
        elif kind == "result-recorded":
            record = instance.records[record_index]
            record_index += 1
            marker = " [superseded]" if record.stale else ""
            raw_input = payload["input"]
            if "measuredValue" in raw_input:
                what = f"measured {raw_input['measuredValue']}"
            else:
                what = (
                    f"review {raw_input['reviewOutcome']} by {raw_input['reviewer']}: "
                    f"{raw_input['reviewNotes']}"
                )
            lines.append(f"- Result ({event.at}): {what} -> {payload['verdict']}{marker}")
        elif kind == "treatment-recorded":
            treatment = payload["treatment"]
            lines.append(
                f"- Treatment ({event.at}): {treatment['description']} "
                f"(technique: {treatment['technique']}; applied by {treatment['appliedBy']})"
            )
        elif kind == "verdict-invalidated":
            cause = payload["causedBy"]
            lines.append(
                f"- Verdict invalidated ({event.at}): treatment of {cause['definitionId']} "
                f"(stage {cause['stage']}) requires re-assessment: {payload['rationale']}"
            )
        elif kind == "residual-flagged":
            lines.append(f"- Residual risk: {payload['justification']}")
        elif kind == "developer-alerted":
            lines.append(f"- Developer alert sent to {', '.join(payload['recipients'])}")
    return "\n".join(lines)


def _stage_section(project: Project, stage: int, events: list, catalog: Catalog) -> tuple[str, list[str]]:
    run = project.stage_runs[stage]
    heading = f"Stage {stage}: {LifecycleStage(stage).slug} ({run.status.value})"
    blocks: list[str] = []
    summary = [f"Hazards instantiated at opening: {len(run.instances)}."]
    if run.closure is not None:
        summary.append(f"Closed at {run.closure.closed_at}: {run.closure.summary}")
        if run.closure.residual_ids:
            summary.append(f"Residual hazards: {', '.join(run.closure.residual_ids)}.")
        else:
            summary.append("Residual hazards: none.")
    blocks.append("\n".join(summary))
    for definition_id in sorted(run.instances, key=hazard_sort_key):
        blocks.append(_instance_block(project, run, definition_id, events, catalog))
    return heading, blocks


def _project_header_blocks(project: Project) -> list[str]:
    lines = [
        f"- Project: {project.name} (`{project.id}`)",
        f"- Use-case context: {project.use_case_context}",
        f"- Catalog version: {project.catalog_version}",
    ]
    participant_lines = ["Participants:"]
    participant_lines += [f"- {p.name} ({p.role})" for p in project.participants]
    link_lines = ["Trade-off links:"]
    if project.tradeoff_links:
        link_lines += [f"- {l.from_id} -> {l.to_id}: {l.rationale}" for l in project.tradeoff_links]
    else:
        link_lines.append("- none declared")
    return ["\n".join(lines), "\n".join(participant_lines), "\n".join(link_lines)]


def _residual_summary_block(project: Project) -> str:
    lines = ["Residual hazard summary:"]
    found = False
    for stage in sorted(project.stage_runs):
        run = project.stage_runs[stage]
        for definition_id in sorted(run.instances, key=hazard_sort_key):
            instance = run.instances[definition_id]
            if instance.status is InstanceStatus.RESIDUAL:
                found = True
                recipients = ", ".join(instance.alert.recipients) if instance.alert else "nobody"
                justification = instance.alert.justification if instance.alert else ""
                lines.append(
                    f"- {definition_id} (stage {stage}): alert sent to {recipients}: {justification}"
                )
    if not found:
        lines.append("- none: every included hazard was reduced to a tolerable level")
    return "\n".join(lines)


def generate_stage_report(log: AuditLog, stage: int, catalog: Catalog | None = None) -> ReportDocument:
    """Audit report for one stage; errors if the stage was never opened."""
    catalog = catalog or bundled_catalog()
    project = replay_log(log, catalog)
    if int(stage) not in project.stage_runs:
        raise HazardManagementError("stage-never-opened", f"stage {stage} has never been opened")
    document = ReportDocument(
        scope={"stage": int(stage)},
        title=f"Hazard management report: {project.name}, stage {int(stage)}",
        source_log_hash=log.last_hash,
        event_count=len(log),
    )
    heading, blocks = _stage_section(project, int(stage), log.events, catalog)
    document.add(heading, blocks)
    return document


def generate_project_report(log: AuditLog, catalog: Catalog | None = None) -> ReportDocument:
    """Whole-project report: header plus every opened stage's section."""
    catalog = catalog or bundled_catalog()
    project = replay_log(log, catalog)
    if not project.stage_runs:
        raise HazardManagementError("nothing-to-report", "no stage has been opened yet; nothing to report")
    document = ReportDocument(
        scope={"wholeProject": True},
        title=f"Hazard management report: {project.name}",
        source_log_hash=log.last_hash,
        event_count=len(log),
    )
    header_blocks = _project_header_blocks(project)
    header_blocks.append(_residual_summary_block(project))
    document.add("Project", header_blocks)
    for stage in sorted(project.stage_runs):
        heading, blocks = _stage_section(project, stage, log.events, catalog)
        document.add(heading, blocks)
    return document
