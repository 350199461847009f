from __future__ import annotations

import json

import pytest

from aihm.auditlog import EVENT_KINDS, AuditLog
from aihm.errors import HazardManagementError
from aihm.report import generate_project_report, generate_stage_report
from aihm.scenario import power_grid_steps, run_steps, steps_until


def test_stage2_report_shows_aih9_exclusion(scenario_engine):
    document = generate_stage_report(scenario_engine.log, 2, scenario_engine.catalog)
    text = document.render_markdown()
    assert "#### AIH9: Discriminative data bias" in text
    assert "excluded by maier, brandt" in text
    assert "Only voltage/current time series; no person-related attributes in any input." in text


def test_stage3_report_shows_robustness_arc(scenario_engine):
    text = generate_stage_report(scenario_engine.log, 3, scenario_engine.catalog).render_markdown()
    aih20 = text[text.index("#### AIH20") : text.index("#### AIH21")]
    assert "measured 0.90 -> non-tolerable [superseded]" in aih20
    assert "technique: augmented-retraining" in aih20
    assert "measured 0.93 -> tolerable" in aih20
    aih3 = text[text.index("#### AIH3:") : text.index("#### AIH4")]
    assert "Verdict invalidated" in aih3
    assert "treatment of AIH20" in aih3
    assert "Post-retraining accuracy 0.96" in aih3


def test_unopened_stage_report_rejected(scenario_engine):
    engine = run_steps(steps_until(power_grid_steps(), "stage-1-closed"))
    with pytest.raises(HazardManagementError) as err:
        generate_stage_report(engine.log, 5, engine.catalog)
    assert err.value.code == "stage-never-opened"


def test_project_report_contains_all_five_stages(scenario_engine):
    document = generate_project_report(scenario_engine.log, scenario_engine.catalog)
    text = document.render_markdown()
    for stage, name in [
        (1, "scoping"),
        (2, "data-collection-and-preparation"),
        (3, "modeling"),
        (4, "evaluation-and-deployment"),
        (5, "monitoring-and-maintenance"),
    ]:
        assert f"## Stage {stage}: {name} (closed)" in text
    assert "- none: every included hazard was reduced to a tolerable level" in text
    assert document.source_log_hash == scenario_engine.log.last_hash


def test_project_report_residual_variant_lists_aih19():
    engine = run_steps(power_grid_steps(aih19_residual=True))
    text = generate_project_report(engine.log, engine.catalog).render_markdown()
    assert "- AIH19 (stage 3): alert sent to maier, brandt" in text
    assert "Residual hazards: AIH19." in text


def test_fresh_project_has_nothing_to_report():
    engine = run_steps(steps_until(power_grid_steps(), "project-created"))
    with pytest.raises(HazardManagementError) as err:
        generate_project_report(engine.log, engine.catalog)
    assert err.value.code == "nothing-to-report"


def test_reports_are_deterministic(scenario_engine, scenario_log_text):
    first = generate_project_report(scenario_engine.log, scenario_engine.catalog).render_markdown()
    second = generate_project_report(AuditLog.parse(scenario_log_text), scenario_engine.catalog).render_markdown()
    assert first == second
    structured_1 = generate_project_report(scenario_engine.log, scenario_engine.catalog).render_structured()
    structured_2 = generate_project_report(AuditLog.parse(scenario_log_text), scenario_engine.catalog).render_structured()
    assert structured_1 == structured_2


def test_structured_format_mirrors_document(scenario_engine):
    document = generate_project_report(scenario_engine.log, scenario_engine.catalog)
    parsed = json.loads(document.render_structured())
    assert parsed["sourceLogHash"] == scenario_engine.log.last_hash
    assert parsed["scope"] == {"wholeProject": True}
    assert [s["heading"] for s in parsed["sections"]][0] == "Project"


def test_every_event_kind_surfaces_in_reports():
    """Each event kind except project-created must contribute visible content."""
    engine = run_steps(power_grid_steps(aih19_residual=True))
    kinds_present = {e.event_kind for e in engine.log.events}
    assert kinds_present == set(EVENT_KINDS)

    text = generate_project_report(engine.log, engine.catalog).render_markdown()
    evidence = {
        "stage-opened": "Hazards instantiated at opening:",
        "hazard-triaged": "- Triage: excluded by",
        "tradeoff-linked": "- AIH20 -> AIH3:",
        "assessment-planned": "- Plan:",
        "result-recorded": "- Result (",
        "treatment-recorded": "- Treatment (",
        "verdict-invalidated": "- Verdict invalidated (",
        "residual-flagged": "- Residual risk:",
        "developer-alerted": "- Developer alert sent to",
        "stage-closed": "Closed at",
    }
    assert set(evidence) == set(EVENT_KINDS) - {"project-created"}
    for kind, marker in evidence.items():
        assert marker in text, f"{kind} leaves no trace in the report"
