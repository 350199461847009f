"""Append-only, hash-chained audit log.

The log is the single source of truth for project state: every mutating
operation appends one or more events here before the state change is
acknowledged, and the full state is reconstructable by replaying the log.

File format: one JSON object per line. Line 1 is a header
{formatVersion, digestAlgorithm, projectId}; every following line is an event
serialized canonically (sorted keys, compact separators) so that
parse(serialize(e)) == e bit-exactly. Each event's hash covers
(sequence, at, actor, eventKind, payload, prevHash); event 1 chains from a
fixed all-zero genesis hash.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import HazardManagementError

FORMAT_VERSION = 1
DIGEST_ALGORITHM = "sha256"
GENESIS_HASH = "0" * 64

EVENT_KINDS = (
    "project-created",
    "stage-opened",
    "hazard-triaged",
    "tradeoff-linked",
    "assessment-planned",
    "result-recorded",
    "treatment-recorded",
    "verdict-invalidated",
    "residual-flagged",
    "developer-alerted",
    "stage-closed",
)


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True)
class EventDraft:
    """An event before sealing: kind, payload, actor and timestamp."""

    event_kind: str
    payload: dict[str, Any]
    actor: str
    at: str

    def __post_init__(self) -> None:
        if self.event_kind not in EVENT_KINDS:
            raise HazardManagementError("event-invalid", f"unknown event kind {self.event_kind!r}")
        if not self.actor:
            raise HazardManagementError("actor-required", "every audit event needs an actor")
        if not self.at:
            raise HazardManagementError("event-invalid", "every audit event needs a timestamp")


@dataclass(frozen=True)
class AuditEvent:
    """A sealed, hash-chained event. Never mutated after sealing."""

    sequence: int
    at: str
    actor: str
    event_kind: str
    payload: dict[str, Any]
    prev_hash: str
    hash: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "sequence": self.sequence,
            "at": self.at,
            "actor": self.actor,
            "eventKind": self.event_kind,
            "payload": self.payload,
            "prevHash": self.prev_hash,
            "hash": self.hash,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "AuditEvent":
        try:
            return cls(
                sequence=raw["sequence"],
                at=raw["at"],
                actor=raw["actor"],
                event_kind=raw["eventKind"],
                payload=raw["payload"],
                prev_hash=raw["prevHash"],
                hash=raw["hash"],
            )
        except (KeyError, TypeError) as exc:
            raise HazardManagementError("log-parse-error", f"event record missing field: {exc}") from exc

    def serialize(self) -> str:
        return canonical_json(self.to_dict())


def compute_hash(sequence: int, at: str, actor: str, event_kind: str, payload: dict[str, Any], prev_hash: str) -> str:
    material = canonical_json(
        {
            "sequence": sequence,
            "at": at,
            "actor": actor,
            "eventKind": event_kind,
            "payload": payload,
            "prevHash": prev_hash,
        }
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


@dataclass
class ChainVerification:
    ok: bool
    broken_at: int | None = None
    reason: str | None = None

    def to_dict(self) -> dict[str, Any]:
        if self.ok:
            return {"ok": True}
        return {"ok": False, "brokenAt": self.broken_at, "reason": self.reason}


class AuditLog:
    """Hash-chained event sequence for a single project.

    Optionally file-backed: when a path is bound, events are flushed and
    fsynced to disk before append() returns.
    """

    def __init__(self, project_id: str, path: str | Path | None = None, events: list[AuditEvent] | None = None):
        self.project_id = project_id
        self.path = Path(path) if path is not None else None
        self.events: list[AuditEvent] = list(events or [])
        if self.path is not None and not self.path.exists():
            self._write_lines([canonical_json(self.header())])

    def header(self) -> dict[str, Any]:
        return {
            "formatVersion": FORMAT_VERSION,
            "digestAlgorithm": DIGEST_ALGORITHM,
            "projectId": self.project_id,
        }

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[AuditEvent]:
        return iter(self.events)

    @property
    def last_hash(self) -> str:
        return self.events[-1].hash if self.events else GENESIS_HASH

    def seal(self, drafts: Iterable[EventDraft]) -> list[AuditEvent]:
        """Assign sequence numbers and chain hashes; does not persist."""
        sealed: list[AuditEvent] = []
        prev_hash = self.last_hash
        sequence = len(self.events)
        for draft in drafts:
            sequence += 1
            digest = compute_hash(sequence, draft.at, draft.actor, draft.event_kind, draft.payload, prev_hash)
            event = AuditEvent(
                sequence=sequence,
                at=draft.at,
                actor=draft.actor,
                event_kind=draft.event_kind,
                payload=draft.payload,
                prev_hash=prev_hash,
                hash=digest,
            )
            sealed.append(event)
            prev_hash = digest
        return sealed

    def extend(self, sealed: list[AuditEvent]) -> None:
        """Persist sealed events (file first, then memory)."""
        if not sealed:
            return
        if sealed[0].prev_hash != self.last_hash or sealed[0].sequence != len(self.events) + 1:
            raise HazardManagementError("event-invalid", "sealed events do not chain onto this log")
        if self.path is not None:
            self._write_lines([e.serialize() for e in sealed])
        self.events.extend(sealed)

    def append(self, draft: EventDraft) -> AuditEvent:
        sealed = self.seal([draft])
        self.extend(sealed)
        return sealed[0]

    def _write_lines(self, lines: list[str]) -> None:
        assert self.path is not None
        data = "".join(line + "\n" for line in lines)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())

    def verify(self) -> ChainVerification:
        return verify_events(self.events)

    def serialize(self) -> str:
        lines = [canonical_json(self.header())]
        lines.extend(e.serialize() for e in self.events)
        return "".join(line + "\n" for line in lines)

    @classmethod
    def parse(cls, text: str) -> "AuditLog":
        """Strict parse: raises log-parse-error / chain-broken on bad input."""
        log, verification = cls.parse_lenient(text)
        if not verification.ok:
            code = "log-parse-error" if verification.reason == "parse" else "chain-broken"
            raise HazardManagementError(
                code,
                f"audit log broken at event {verification.broken_at}: {verification.reason}",
                details=verification.to_dict(),
            )
        return log

    @classmethod
    def parse_lenient(cls, text: str) -> tuple["AuditLog", ChainVerification]:
        """Parse as far as possible and report where the chain breaks.

        A line that fails to parse counts as a break at that event position,
        so byte-level tampering is reported even when it destroys the JSON.
        """
        lines = [line for line in text.split("\n") if line.strip()]
        if not lines:
            raise HazardManagementError("log-parse-error", "audit log is empty (missing header)")
        try:
            header = json.loads(lines[0])
            project_id = header["projectId"]
            algorithm = header["digestAlgorithm"]
            version = header["formatVersion"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise HazardManagementError("log-parse-error", f"bad audit log header: {exc}") from exc
        if algorithm != DIGEST_ALGORITHM:
            raise HazardManagementError("log-parse-error", f"unsupported digest algorithm {algorithm!r}")
        if version != FORMAT_VERSION:
            raise HazardManagementError("log-parse-error", f"unsupported log format version {version!r}")

        events: list[AuditEvent] = []
        for position, line in enumerate(lines[1:], start=1):
            try:
                raw = json.loads(line)
                event = AuditEvent.from_dict(raw)
            except (json.JSONDecodeError, HazardManagementError):
                return cls(project_id, events=events), ChainVerification(False, position, "parse")
            events.append(event)
        log = cls(project_id, events=events)
        return log, log.verify()

    @classmethod
    def load(cls, path: str | Path) -> "AuditLog":
        """Load and verify a file-backed log; the returned log appends to path."""
        text = Path(path).read_text(encoding="utf-8")
        log = cls.parse(text)
        log.path = Path(path)
        return log


def verify_events(events: list[AuditEvent]) -> ChainVerification:
    """Check sequence gaplessness and end-to-end hash linkage."""
    prev_hash = GENESIS_HASH
    for index, event in enumerate(events, start=1):
        if event.sequence != index:
            return ChainVerification(False, index, "sequence")
        if event.prev_hash != prev_hash:
            return ChainVerification(False, index, "prev-hash")
        expected = compute_hash(
            event.sequence, event.at, event.actor, event.event_kind, event.payload, event.prev_hash
        )
        if event.hash != expected:
            return ChainVerification(False, index, "hash")
        prev_hash = event.hash
    return ChainVerification(True)


def verify_file(path: str | Path) -> ChainVerification:
    """Verify a persisted log, reporting parse damage as a chain break."""
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
        _, verification = AuditLog.parse_lenient(text)
        return verification
    except HazardManagementError:
        return ChainVerification(False, 0, "header")
