from __future__ import annotations

import json

import pytest

from aihm.auditlog import (
    GENESIS_HASH,
    AuditLog,
    EventDraft,
    compute_hash,
    verify_events,
    verify_file,
)
from aihm.errors import HazardManagementError


def draft(kind="stage-opened", payload=None, actor="maier", at="2025-01-01T00:00:00Z"):
    return EventDraft(event_kind=kind, payload=payload or {"stage": 1, "candidates": []}, actor=actor, at=at)


def test_first_event_uses_genesis_hash():
    log = AuditLog("p1")
    event = log.append(draft())
    assert event.sequence == 1
    assert event.prev_hash == GENESIS_HASH
    assert event.hash == compute_hash(1, event.at, event.actor, event.event_kind, event.payload, GENESIS_HASH)


def test_second_event_chains_from_first():
    log = AuditLog("p1")
    first = log.append(draft())
    second = log.append(draft(kind="stage-closed", payload={"stage": 1}))
    assert second.sequence == 2
    assert second.prev_hash == first.hash
    assert log.verify().ok


def test_empty_log_verifies():
    assert AuditLog("p1").verify().ok
    assert verify_events([]).ok


def test_serialize_parse_roundtrip():
    log = AuditLog("p1")
    log.append(draft())
    log.append(draft(kind="stage-closed", payload={"stage": 1, "summary": "s", "residualIds": []}))
    text = log.serialize()
    again = AuditLog.parse(text)
    assert again.project_id == "p1"
    assert [e.to_dict() for e in again.events] == [e.to_dict() for e in log.events]
    assert again.serialize() == text


def test_unknown_event_kind_rejected():
    with pytest.raises(HazardManagementError) as err:
        draft(kind="mystery")
    assert err.value.code == "event-invalid"


def test_actor_required():
    with pytest.raises(HazardManagementError) as err:
        draft(actor="")
    assert err.value.code == "actor-required"


def test_file_backed_append_and_load(tmp_path):
    path = tmp_path / "events.ndjson"
    log = AuditLog("p1", path=path)
    log.append(draft())
    log.append(draft(kind="stage-closed", payload={"stage": 1}))

    loaded = AuditLog.load(path)
    assert len(loaded) == 2
    assert loaded.verify().ok
    assert loaded.serialize() == log.serialize()


def test_append_write_failure_leaves_log_unchanged(tmp_path, monkeypatch):
    path = tmp_path / "events.ndjson"
    log = AuditLog("p1", path=path)
    log.append(draft())

    def boom(lines):
        raise OSError("disk full")

    monkeypatch.setattr(log, "_write_lines", boom)
    with pytest.raises(OSError):
        log.append(draft(kind="stage-closed", payload={"stage": 1}))
    assert len(log) == 1
    assert AuditLog.load(path).serialize() == log.serialize()


def test_tampered_payload_detected(scenario_log_text):
    log = AuditLog.parse(scenario_log_text)
    target = 17
    event = log.events[target - 1]
    tampered = dict(event.to_dict())
    tampered["payload"] = dict(tampered["payload"], justification="rewritten history")
    lines = scenario_log_text.splitlines()
    lines[target] = json.dumps(tampered, sort_keys=True, separators=(",", ":"))
    _, verification = AuditLog.parse_lenient("\n".join(lines) + "\n")
    assert not verification.ok
    assert verification.broken_at == target


def test_single_byte_flip_detected_everywhere(scenario_log_text, tmp_path):
    """Flipping one byte of any persisted event breaks the chain at or before it."""
    lines = scenario_log_text.splitlines()
    header, events = lines[0], lines[1:]
    path = tmp_path / "tampered.ndjson"
    for index, line in enumerate(events, start=1):
        position = len(line) // 2
        flipped = chr(ord(line[position]) ^ 0x01)
        mutated = line[:position] + flipped + line[position + 1 :]
        assert mutated != line
        path.write_text("\n".join([header] + events[: index - 1] + [mutated] + events[index:]) + "\n")
        verification = verify_file(path)
        assert not verification.ok, f"tamper in event {index} went unnoticed"
        assert verification.broken_at is not None and verification.broken_at <= index


def test_every_byte_of_one_event_is_covered(scenario_log_text, tmp_path):
    lines = scenario_log_text.splitlines()
    target = 5
    line = lines[target]
    path = tmp_path / "tampered.ndjson"
    for position in range(len(line)):
        flipped = chr(ord(line[position]) ^ 0x01)
        mutated = line[:position] + flipped + line[position + 1 :]
        path.write_text("\n".join(lines[:target] + [mutated] + lines[target + 1 :]) + "\n")
        verification = verify_file(path)
        assert not verification.ok, f"flip at byte {position} went unnoticed"
        assert verification.broken_at is not None and verification.broken_at <= target


def test_truncated_log_still_verifies_as_prefix(scenario_log_text):
    lines = scenario_log_text.splitlines()
    prefix = "\n".join(lines[:31]) + "\n"
    log = AuditLog.parse(prefix)
    assert len(log) == 30
    assert log.verify().ok


def test_verify_reports_sequence_gap():
    log = AuditLog("p1")
    log.append(draft())
    log.append(draft(kind="stage-closed", payload={"stage": 1}))
    log.events.pop(0)
    verification = log.verify()
    assert not verification.ok
    assert verification.broken_at == 1
    assert verification.reason == "sequence"


def test_parse_rejects_unknown_digest():
    bad = json.dumps({"formatVersion": 1, "digestAlgorithm": "crc32", "projectId": "p"}) + "\n"
    with pytest.raises(HazardManagementError) as err:
        AuditLog.parse(bad)
    assert err.value.code == "log-parse-error"
