"""Rebuild project state from a persisted audit log."""

from __future__ import annotations

from pathlib import Path

from .auditlog import AuditLog, ChainVerification, verify_file
from .catalog import Catalog
from .engine import Project, ProjectEngine


def replay_log(log: AuditLog, catalog: Catalog | None = None) -> Project:
    """Fold a verified event log through the engine's transition function."""
    engine = ProjectEngine.from_log(log, catalog)
    assert engine.project is not None
    return engine.project


def replay_text(text: str, catalog: Catalog | None = None) -> Project:
    return replay_log(AuditLog.parse(text), catalog)


def replay_file(path: str | Path, catalog: Catalog | None = None) -> ProjectEngine:
    """Load, verify and replay a file-backed log; the engine keeps appending to it."""
    return ProjectEngine.from_log(AuditLog.load(path), catalog)


def verify_chain(source: AuditLog | str | Path) -> ChainVerification:
    if isinstance(source, AuditLog):
        return source.verify()
    return verify_file(source)
