"""Shared test helpers."""

from __future__ import annotations

from typing import Any

# Keys that hold timestamps, actors or chain digests: exactly the fields the
# CLI/API equivalence criteria allow to differ between runs.
VOLATILE_KEYS = {"at", "appliedAt", "closedAt", "actor", "hash", "prevHash"}


def scrub_volatile(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: scrub_volatile(v) for k, v in value.items() if k not in VOLATILE_KEYS}
    if isinstance(value, list):
        return [scrub_volatile(v) for v in value]
    return value


def normalized_events(events: list[dict[str, Any]]) -> list[Any]:
    return [scrub_volatile(e) for e in events]
