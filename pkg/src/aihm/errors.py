"""Domain errors with stable, machine-readable codes.

Every precondition failure in the engine, catalog, audit log, report and
service layers raises :class:`HazardManagementError` with one of the ERROR_CODES
tokens. The CLI maps these to exit code 1, the HTTP service to 4xx envelopes.
"""

from __future__ import annotations

from typing import Any

# Stable error-code tokens shared by engine, CLI and HTTP service.
ERROR_CODES = frozenset(
    {
        "catalog-parse-error",
        "catalog-invalid",
        "name-required",
        "participants-required",
        "invalid-participant",
        "unknown-participant",
        "actor-required",
        "unknown-stage",
        "stage-out-of-order",
        "stage-not-closed",
        "stage-already-opened",
        "stage-not-open",
        "stage-never-opened",
        "unknown-hazard",
        "not-a-candidate",
        "justification-required",
        "participant-role-required",
        "self-link",
        "invalid-status",
        "mode-mismatch",
        "reviewer-required",
        "signoff-required",
        "criterion-invalid",
        "kind-mismatch",
        "non-finite-value",
        "no-plan",
        "no-nontolerable-verdict",
        "recipients-required",
        "stale-verdict",
        "unresolved-instances",
        "nothing-to-report",
        "chain-broken",
        "log-parse-error",
        "replay-failed",
        "event-invalid",
        "project-exists",
        "project-not-found",
        "project-locked",
        "unauthorized",
        "invalid-request",
        "not-found",
    }
)


class HazardManagementError(Exception):
    """A domain rule was violated. Carries a stable code plus details."""

    def __init__(self, code: str, message: str, details: dict[str, Any] | None = None):
        if code not in ERROR_CODES:
            raise ValueError(f"unknown error code: {code}")
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"HazardManagementError({self.code!r}, {self.message!r})"
