from __future__ import annotations

import json

import pytest

from aihm.auditlog import AuditLog, EventDraft
from aihm.engine import StageStatus
from aihm.errors import HazardManagementError
from aihm.replay import replay_log, replay_text, verify_chain


def test_replay_full_scenario_state(scenario_engine, scenario_log_text):
    project = replay_text(scenario_log_text, scenario_engine.catalog)
    assert project.to_dict() == scenario_engine.project.to_dict()
    assert all(run.status is StageStatus.CLOSED for run in project.stage_runs.values())


def test_replay_truncated_log_yields_prefix_state(scenario_engine, scenario_log_text):
    stage2_close = next(
        e.sequence
        for e in scenario_engine.log.events
        if e.event_kind == "stage-closed" and e.payload["stage"] == 2
    )
    lines = scenario_log_text.splitlines()
    truncated = "\n".join(lines[: stage2_close + 1]) + "\n"
    project = replay_text(truncated, scenario_engine.catalog)
    assert sorted(project.stage_runs) == [1, 2]
    assert project.stage_runs[1].status is StageStatus.CLOSED
    assert project.stage_runs[2].status is StageStatus.CLOSED


def test_replay_rejects_event_violating_preconditions():
    log = AuditLog("bad")
    log.append(
        EventDraft(
            event_kind="project-created",
            payload={
                "projectId": "bad",
                "name": "x",
                "useCaseContext": "",
                "participants": [{"name": "maier", "role": "data-scientist"}],
                "catalogVersion": "1.0.0",
            },
            actor="maier",
            at="2025-01-01T00:00:00Z",
        )
    )
    log.append(
        EventDraft(
            event_kind="hazard-triaged",
            payload={
                "stage": 1,
                "definitionId": "AIH1",
                "decision": "include",
                "justification": "j",
                "decidedBy": ["maier"],
            },
            actor="maier",
            at="2025-01-01T00:01:00Z",
        )
    )
    with pytest.raises(HazardManagementError) as err:
        replay_log(log)
    assert err.value.code == "replay-failed"
    assert err.value.details["sequence"] == 2


def test_replay_rejects_broken_chain(scenario_log_text):
    lines = scenario_log_text.splitlines()
    event = json.loads(lines[10])
    event["payload"] = {**event["payload"], "tampered": True}
    lines[10] = json.dumps(event, sort_keys=True, separators=(",", ":"))
    with pytest.raises(HazardManagementError) as err:
        replay_text("\n".join(lines) + "\n")
    assert err.value.code == "chain-broken"


def test_replay_detects_catalog_version_skew(scenario_log_text, catalog):
    """A stage-opened candidate snapshot that no longer matches the catalog."""
    from aihm.catalog import Catalog

    reduced = Catalog(version="0.9.0", hazards=tuple(h for h in catalog.hazards if h.id != "AIH16"))
    with pytest.raises(HazardManagementError) as err:
        replay_text(scenario_log_text, reduced)
    assert err.value.code == "replay-failed"
    assert "version skew" in err.value.details["cause"]["message"]


def test_verify_chain_on_log_object(scenario_engine):
    assert verify_chain(scenario_engine.log).ok
