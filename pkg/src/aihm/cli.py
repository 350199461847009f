"""Command-line front end for the hazard management workbench.

The CLI is a thin adapter: every mutating command maps to exactly one engine
operation, loads the project by replaying its audit log, takes the writer lock,
appends, and reports the post-mutation state. Exit codes: 0 success, 1 domain
error (one machine-parseable line on stderr: ``error: <code>: <message>``),
2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Sequence

import click

from .assessment import AssessmentPlan
from .catalog import bundled_catalog, load_catalog
from .engine import ProjectEngine, instance_summary, project_status
from .errors import HazardManagementError
from .projectdir import ProjectDirectory
from .report import FORMATS, generate_project_report, generate_stage_report
from .replay import verify_chain


def _fail(exc: HazardManagementError) -> None:
    click.echo(f"error: {exc.code}: {exc.message}", err=True)
    sys.exit(1)


def _emit(payload: dict[str, Any], as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(human)


def _split_pair(raw: str, what: str) -> tuple[str, str]:
    if ":" not in raw:
        raise click.UsageError(f"{what} must look like name:value, got {raw!r}")
    name, value = raw.split(":", 1)
    return name.strip(), value.strip()


class Workbench:
    """Shared CLI context: project directory and catalog source."""

    def __init__(self, project_dir: Path, catalog_path: Path | None):
        self.directory = ProjectDirectory(project_dir)
        self.catalog = load_catalog(catalog_path) if catalog_path else bundled_catalog()

    def engine(self) -> ProjectEngine:
        return self.directory.load_engine(self.catalog)


pass_workbench = click.make_pass_decorator(Workbench)


@click.group()
@click.option(
    "--project-dir",
    "-C",
    envvar="AIHM_PROJECT_DIR",
    type=click.Path(path_type=Path),
    default=Path("."),
    show_default=True,
    help="Project directory (or set AIHM_PROJECT_DIR).",
)
@click.option(
    "--catalog",
    "catalog_path",
    envvar="AIHM_CATALOG",
    type=click.Path(path_type=Path, exists=True),
    default=None,
    help="Alternative hazard catalog JSON (defaults to the bundled one).",
)
@click.version_option(package_name="aihm")
@click.pass_context
def cli(ctx: click.Context, project_dir: Path, catalog_path: Path | None) -> None:
    """Stage-gated AI hazard management workbench."""
    try:
        ctx.obj = Workbench(project_dir, catalog_path)
    except HazardManagementError as exc:
        _fail(exc)


def _mutation_options(fn):
    fn = click.option("--actor", required=True, help="Participant performing this operation.")(fn)
    fn = click.option("--at", default=None, help="Event timestamp (ISO-8601 UTC); defaults to now.")(fn)
    fn = click.option("--json", "as_json", is_flag=True, help="Print the post-mutation status as JSON.")(fn)
    return fn


# -- project ----------------------------------------------------------------


@cli.command()
@click.option("--name", required=True)
@click.option("--context", default="", help="Use-case context description.")
@click.option("--participant", "participants", multiple=True, required=True, help="name:role, repeatable.")
@click.option("--project-id", default=None, help="Explicit project id (defaults to a random token).")
@_mutation_options
@pass_workbench
def init(
    wb: Workbench,
    name: str,
    context: str,
    participants: Sequence[str],
    project_id: str | None,
    actor: str,
    at: str | None,
    as_json: bool,
) -> None:
    """Create a project in the project directory."""
    people = [_split_pair(p, "--participant") for p in participants]
    try:
        with wb.directory.lock():
            log_path = wb.directory.prepare_new()
            engine = ProjectEngine.create(
                name,
                context,
                people,
                actor,
                at=at,
                project_id=project_id,
                catalog=wb.catalog,
                log_path=log_path,
            )
        status = engine.status()
        _emit(status, as_json, f"project {status['projectId']} created in {wb.directory.path}")
    except HazardManagementError as exc:
        _fail(exc)


# -- stage ------------------------------------------------------------------


@cli.group()
def stage() -> None:
    """Open, close and inspect lifecycle stages."""


@stage.command("open")
@click.argument("ordinal", type=int)
@_mutation_options
@pass_workbench
def stage_open(wb: Workbench, ordinal: int, actor: str, at: str | None, as_json: bool) -> None:
    """Open stage ORDINAL and instantiate its candidate hazards."""
    try:
        with wb.directory.lock():
            engine = wb.engine()
            run = engine.open_stage(ordinal, actor, at)
        _emit(engine.status(), as_json, f"stage {ordinal} opened with {len(run.instances)} candidate hazards")
    except HazardManagementError as exc:
        _fail(exc)


@stage.command("close")
@click.argument("ordinal", type=int, required=False)
@click.option("--summary", required=True, help="Closure summary for the audit record.")
@_mutation_options
@pass_workbench
def stage_close(
    wb: Workbench, ordinal: int | None, summary: str, actor: str, at: str | None, as_json: bool
) -> None:
    """Close a stage (the open one unless ORDINAL is given)."""
    try:
        with wb.directory.lock():
            engine = wb.engine()
            closure = engine.close_stage(summary, actor, at, stage=ordinal)
        residuals = ", ".join(closure.residual_ids) if closure.residual_ids else "none"
        _emit(engine.status(), as_json, f"stage closed at {closure.closed_at}; residual hazards: {residuals}")
    except HazardManagementError as exc:
        _fail(exc)


@stage.command("status")
@click.argument("ordinal", type=int, required=False)
@click.option("--json", "as_json", is_flag=True)
@pass_workbench
def stage_status(wb: Workbench, ordinal: int | None, as_json: bool) -> None:
    """Project status, or one stage's hazard register when ORDINAL is given."""
    try:
        engine = wb.engine()
        if ordinal is not None:
            rows = engine.stage_hazards(ordinal)
            if as_json:
                click.echo(json.dumps(rows, indent=2, sort_keys=True))
                return
            for row in rows:
                stale = " [stale]" if row["stale"] else ""
                click.echo(
                    f"{row['definitionId']:>6}  {row['status']:<10} {row['verdict']:<14}{stale}  {row['title']}"
                )
            return
        status = project_status(engine.project)
        if as_json:
            click.echo(json.dumps(status, indent=2, sort_keys=True))
            return
        for entry in status["stages"]:
            line = f"stage {entry['stage']} {entry['name']:<33} {entry['status']}"
            if entry["status"] == "open":
                line += f"  blocking: {len(entry['blocking'])}, stale: {entry['staleCount']}"
            if entry["residualIds"]:
                line += f"  residual: {', '.join(entry['residualIds'])}"
            click.echo(line)
        click.echo(f"complete: {str(status['complete']).lower()}")
    except HazardManagementError as exc:
        _fail(exc)


# -- catalog ----------------------------------------------------------------


@cli.group()
def hazards() -> None:
    """Query the hazard catalog."""


@hazards.command("list")
@click.option("--stage", type=int, default=None)
@click.option("--mode", type=click.Choice(["procedural", "technical", "socio-technical"]), default=None)
@click.option("--level", type=click.Choice(["system", "application"]), default=None)
@click.option("--json", "as_json", is_flag=True)
@pass_workbench
def hazards_list(wb: Workbench, stage: int | None, mode: str | None, level: str | None, as_json: bool) -> None:
    """List catalog hazards, optionally filtered by taxonomy axes."""
    try:
        hits = wb.catalog.query(stage=stage, mode=mode, level=level)
    except HazardManagementError as exc:
        _fail(exc)
        return
    if as_json:
        click.echo(json.dumps([h.to_dict() for h in hits], indent=2, sort_keys=True))
        return
    for h in hits:
        stages = ",".join(str(int(s)) for s in sorted(h.stages))
        click.echo(f"{h.id:>6}  stages {stages:<9} {h.mode.value:<16} {h.level.value:<12} {h.title}")


@hazards.command("show")
@click.argument("hazard_id")
@click.option("--json", "as_json", is_flag=True)
@pass_workbench
def hazards_show(wb: Workbench, hazard_id: str, as_json: bool) -> None:
    """Show one catalog hazard in full."""
    try:
        definition = wb.catalog.get(hazard_id)
    except HazardManagementError as exc:
        _fail(exc)
        return
    if as_json:
        click.echo(json.dumps(definition.to_dict(), indent=2, sort_keys=True))
        return
    stages = ", ".join(str(int(s)) for s in sorted(definition.stages))
    click.echo(f"{definition.id}: {definition.title}")
    click.echo(f"stages: {stages}; mode: {definition.mode.value}; level: {definition.level.value}")
    click.echo(definition.description)
    if definition.references:
        click.echo("references: " + "; ".join(definition.references))


# -- triage -----------------------------------------------------------------


@cli.group()
def triage() -> None:
    """Include or exclude candidate hazards for the open stage."""


def _triage_command(decision: str):
    @click.argument("hazard_id")
    @click.option("--justification", required=True)
    @click.option("--by", "decided_by", multiple=True, required=True, help="Deciding participant, repeatable.")
    @_mutation_options
    @pass_workbench
    def command(
        wb: Workbench,
        hazard_id: str,
        justification: str,
        decided_by: Sequence[str],
        actor: str,
        at: str | None,
        as_json: bool,
    ) -> None:
        try:
            with wb.directory.lock():
                engine = wb.engine()
                instance = engine.triage(hazard_id, decision, justification, list(decided_by), actor, at)
            _emit(engine.status(), as_json, f"{hazard_id} {instance.status.value} in stage {instance.stage}")
        except HazardManagementError as exc:
            _fail(exc)

    command.__name__ = f"triage_{decision}"
    return command


triage.command("include", help="Include a candidate hazard (justification required).")(_triage_command("include"))
triage.command("exclude", help="Exclude a candidate hazard (justification required).")(_triage_command("exclude"))


# -- trade-off links ---------------------------------------------------------


@cli.group()
def link() -> None:
    """Declare trade-off interactions between hazards."""


@link.command("add")
@click.argument("from_id")
@click.argument("to_id")
@click.option("--rationale", required=True)
@_mutation_options
@pass_workbench
def link_add(
    wb: Workbench, from_id: str, to_id: str, rationale: str, actor: str, at: str | None, as_json: bool
) -> None:
    """Record that treating FROM_ID invalidates TO_ID's assessments."""
    try:
        with wb.directory.lock():
            engine = wb.engine()
            engine.add_tradeoff_link(from_id, to_id, rationale, actor, at)
        _emit(engine.status(), as_json, f"trade-off link {from_id} -> {to_id} recorded")
    except HazardManagementError as exc:
        _fail(exc)


# -- assessment ---------------------------------------------------------------


@cli.group()
def plan() -> None:
    """Set assessment plans for included hazards."""


@plan.command("set")
@click.argument("hazard_id")
@click.option(
    "--criterion",
    "kind",
    required=True,
    type=click.Choice(["threshold", "relative-degradation", "qualitative-review"]),
)
@click.option("--metric", default=None, help="Metric name (quantitative criteria).")
@click.option("--comparator", type=click.Choice(["<=", ">=", "<", ">"]), default=None)
@click.option("--bound", default=None, help="Threshold bound (decimal).")
@click.option("--baseline", default=None, help="Baseline value (relative degradation).")
@click.option("--max-decrease", default=None, help="Maximal tolerable decrease (relative degradation).")
@click.option("--check", "checks", multiple=True, help="Review checklist item, repeatable.")
@click.option("--method", required=True, help="How the measurement or review is produced.")
@click.option("--planned-by", "planned_by", multiple=True, required=True)
@click.option("--reviewer", default=None, help="Assigned reviewer (procedural hazards).")
@click.option("--signoff", "signoffs", multiple=True, help="participant:statement, repeatable.")
@_mutation_options
@pass_workbench
def plan_set(
    wb: Workbench,
    hazard_id: str,
    kind: str,
    metric: str | None,
    comparator: str | None,
    bound: str | None,
    baseline: str | None,
    max_decrease: str | None,
    checks: Sequence[str],
    method: str,
    planned_by: Sequence[str],
    reviewer: str | None,
    signoffs: Sequence[str],
    actor: str,
    at: str | None,
    as_json: bool,
) -> None:
    """Attach an acceptance criterion and method to HAZARD_ID."""
    if kind == "threshold":
        if metric is None or comparator is None or bound is None:
            raise click.UsageError("threshold criteria need --metric, --comparator and --bound")
        criterion: dict[str, Any] = {
            "kind": kind,
            "metricName": metric,
            "comparator": comparator,
            "bound": bound,
        }
    elif kind == "relative-degradation":
        if metric is None or baseline is None or max_decrease is None:
            raise click.UsageError("relative-degradation criteria need --metric, --baseline and --max-decrease")
        criterion = {"kind": kind, "metricName": metric, "baselineValue": baseline, "maxDecrease": max_decrease}
    else:
        if not checks:
            raise click.UsageError("qualitative-review criteria need at least one --check item")
        criterion = {"kind": kind, "reviewChecklist": list(checks)}
    plan_dict = {
        "criterion": criterion,
        "method": method,
        "plannedBy": list(planned_by),
        "signoffs": [dict(zip(("participant", "statement"), _split_pair(s, "--signoff"))) for s in signoffs],
        "assignedReviewer": reviewer,
    }
    try:
        with wb.directory.lock():
            engine = wb.engine()
            instance = engine.plan_assessment(hazard_id, plan_dict, actor, at)
        _emit(engine.status(), as_json, f"{hazard_id} planned ({kind}) in stage {instance.stage}")
    except HazardManagementError as exc:
        _fail(exc)


@cli.group()
def result() -> None:
    """Record measurements and review outcomes."""


@result.command("record")
@click.argument("hazard_id")
@click.option("--value", default=None, help="Measured value (quantitative criteria).")
@click.option("--review", type=click.Choice(["pass", "fail"]), default=None, help="Review outcome.")
@click.option("--notes", default="", help="Review notes.")
@click.option("--reviewer", default=None, help="Reviewing participant.")
@_mutation_options
@pass_workbench
def result_record(
    wb: Workbench,
    hazard_id: str,
    value: str | None,
    review: str | None,
    notes: str,
    reviewer: str | None,
    actor: str,
    at: str | None,
    as_json: bool,
) -> None:
    """Record an assessment result for HAZARD_ID; the verdict is computed."""
    if (value is None) == (review is None):
        raise click.UsageError("provide exactly one of --value or --review")
    if value is not None:
        raw: dict[str, Any] = {"measuredValue": value}
    else:
        if reviewer is None:
            raise click.UsageError("--review needs --reviewer")
        raw = {"reviewOutcome": review, "reviewNotes": notes, "reviewer": reviewer}
    try:
        with wb.directory.lock():
            engine = wb.engine()
            record = engine.record_result(hazard_id, raw, actor, at)
        _emit(engine.status(), as_json, f"{hazard_id} assessed: {record.verdict.value}")
    except HazardManagementError as exc:
        _fail(exc)


@cli.command()
@click.argument("hazard_id")
@click.option("--description", required=True)
@click.option("--technique", required=True)
@click.option("--applied-by", "applied_by", required=True)
@_mutation_options
@pass_workbench
def treat(
    wb: Workbench,
    hazard_id: str,
    description: str,
    technique: str,
    applied_by: str,
    actor: str,
    at: str | None,
    as_json: bool,
) -> None:
    """Record a mitigation for a non-tolerable hazard; re-assessment is required."""
    try:
        with wb.directory.lock():
            engine = wb.engine()
            engine.record_treatment(hazard_id, description, technique, applied_by, actor, at)
        status = engine.status()
        open_stage = next((s for s in status["stages"] if s["status"] == "open"), None)
        stale = open_stage["staleCount"] if open_stage else 0
        _emit(status, as_json, f"{hazard_id} treated; verdicts awaiting re-assessment: {stale}")
    except HazardManagementError as exc:
        _fail(exc)


@cli.command()
@click.argument("hazard_id")
@click.option("--justification", required=True, help="Why reduction to tolerable is impossible.")
@click.option("--alert", "alerts", multiple=True, required=True, help="Alert recipient, repeatable.")
@_mutation_options
@pass_workbench
def residual(
    wb: Workbench,
    hazard_id: str,
    justification: str,
    alerts: Sequence[str],
    actor: str,
    at: str | None,
    as_json: bool,
) -> None:
    """Flag a hazard as residual risk and alert the named recipients."""
    try:
        with wb.directory.lock():
            engine = wb.engine()
            engine.mark_residual(hazard_id, justification, list(alerts), actor, at)
        _emit(engine.status(), as_json, f"{hazard_id} flagged residual; alert sent to {', '.join(alerts)}")
    except HazardManagementError as exc:
        _fail(exc)


# -- reports ------------------------------------------------------------------


@cli.group()
def report() -> None:
    """Generate audit reports from the event log."""


def _write_report(document, fmt: str, out: Path | None) -> None:
    rendered = document.render(fmt)
    if out is None:
        click.echo(rendered, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(rendered, encoding="utf-8")
        click.echo(f"report written to {out}")


@report.command("stage")
@click.argument("ordinal", type=int)
@click.option("--format", "fmt", type=click.Choice(list(FORMATS)), default="markdown", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@pass_workbench
def report_stage(wb: Workbench, ordinal: int, fmt: str, out: Path | None) -> None:
    """Render the audit report for one stage."""
    try:
        engine = wb.engine()
        document = generate_stage_report(engine.log, ordinal, wb.catalog)
        _write_report(document, fmt, out)
    except HazardManagementError as exc:
        _fail(exc)


@report.command("project")
@click.option("--format", "fmt", type=click.Choice(list(FORMATS)), default="markdown", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@pass_workbench
def report_project(wb: Workbench, fmt: str, out: Path | None) -> None:
    """Render the whole-project audit report."""
    try:
        engine = wb.engine()
        document = generate_project_report(engine.log, wb.catalog)
        _write_report(document, fmt, out)
    except HazardManagementError as exc:
        _fail(exc)


# -- audit log ----------------------------------------------------------------


@cli.group()
def log() -> None:
    """Inspect the audit log."""


@log.command("verify")
@click.option("--json", "as_json", is_flag=True)
@pass_workbench
def log_verify(wb: Workbench, as_json: bool) -> None:
    """Verify the hash chain of the persisted event log."""
    try:
        wb.directory.require_exists()
    except HazardManagementError as exc:
        _fail(exc)
        return
    verification = verify_chain(wb.directory.events_path)
    if as_json:
        click.echo(json.dumps(verification.to_dict(), indent=2, sort_keys=True))
    if verification.ok:
        if not as_json:
            click.echo("chain ok")
        return
    _fail(
        HazardManagementError(
            "chain-broken",
            f"audit chain broken at event {verification.broken_at} ({verification.reason})",
            details=verification.to_dict(),
        )
    )


# -- service ------------------------------------------------------------------


@cli.command()
@click.option("--root", envvar="AIHM_ROOT", type=click.Path(path_type=Path), default=Path("."), show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8315, show_default=True)
@pass_workbench
def serve(wb: Workbench, root: Path, host: str, port: int) -> None:
    """Serve the HTTP API over a root directory of projects."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(root, catalog=wb.catalog), host=host, port=port)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return cli.main(args=argv, standalone_mode=False) or 0
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 1
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
