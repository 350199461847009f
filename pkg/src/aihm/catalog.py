"""AI hazard catalog: lifecycle stages, taxonomy axes, definitions, queries.

The catalog is data, not code: it ships as a versioned JSON document so new
hazards can be added without touching the engine. Catalog values are immutable
after load and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from importlib import resources
from pathlib import Path
from typing import Any, IO, Iterable

from .errors import HazardManagementError

BUNDLED_CATALOG_RESOURCE = "ai_hazard_catalog.json"

_ID_PATTERN = re.compile(r"^AIH[1-9][0-9]*$")


class LifecycleStage(IntEnum):
    """The five lifecycle stages; ordinal order is process order."""

    SCOPING = 1
    DATA_COLLECTION_AND_PREPARATION = 2
    MODELING = 3
    EVALUATION_AND_DEPLOYMENT = 4
    MONITORING_AND_MAINTENANCE = 5

    @property
    def slug(self) -> str:
        return _STAGE_SLUGS[self]

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "LifecycleStage":
        try:
            return cls(ordinal)
        except ValueError:
            raise HazardManagementError(
                "unknown-stage", f"no lifecycle stage with ordinal {ordinal}"
            ) from None


_STAGE_SLUGS = {
    LifecycleStage.SCOPING: "scoping",
    LifecycleStage.DATA_COLLECTION_AND_PREPARATION: "data-collection-and-preparation",
    LifecycleStage.MODELING: "modeling",
    LifecycleStage.EVALUATION_AND_DEPLOYMENT: "evaluation-and-deployment",
    LifecycleStage.MONITORING_AND_MAINTENANCE: "monitoring-and-maintenance",
}


class HazardMode(str, Enum):
    """How a hazard is assessed and treated."""

    PROCEDURAL = "procedural"
    TECHNICAL = "technical"
    SOCIO_TECHNICAL = "socio-technical"


class HazardLevel(str, Enum):
    """Where action on a hazard is located."""

    SYSTEM = "system"
    APPLICATION = "application"


def hazard_sort_key(hazard_id: str) -> int:
    """Numeric part of an AIH id, for deterministic ordering."""
    return int(hazard_id[3:])


@dataclass(frozen=True)
class HazardDefinition:
    """One catalog entry: identity, description, taxonomy coordinates, refs."""

    id: str
    title: str
    description: str
    stages: frozenset[LifecycleStage]
    mode: HazardMode
    level: HazardLevel
    references: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "stages": sorted(int(s) for s in self.stages),
            "mode": self.mode.value,
            "level": self.level.value,
            "references": list(self.references),
        }


@dataclass(frozen=True)
class ValidationFinding:
    """A single rule violation found while validating a catalog."""

    hazard_id: str | None
    rule: str
    message: str

    def to_dict(self) -> dict[str, Any]:
        return {"hazardId": self.hazard_id, "rule": self.rule, "message": self.message}


@dataclass(frozen=True)
class Catalog:
    """Versioned, immutable collection of hazard definitions."""

    version: str
    hazards: tuple[HazardDefinition, ...]
    _by_id: dict[str, HazardDefinition] = field(repr=False, hash=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {h.id: h for h in self.hazards})

    def get(self, hazard_id: str) -> HazardDefinition:
        try:
            return self._by_id[hazard_id]
        except KeyError:
            raise HazardManagementError(
                "unknown-hazard", f"hazard {hazard_id} is not in the catalog"
            ) from None

    def __contains__(self, hazard_id: str) -> bool:
        return hazard_id in self._by_id

    def filter_by_stage(self, stage: LifecycleStage | int) -> list[HazardDefinition]:
        """Definitions with the potential to occur at the given stage, by id."""
        stage = LifecycleStage.from_ordinal(int(stage))
        return self.query(stage=stage)

    def query(
        self,
        stage: LifecycleStage | int | None = None,
        mode: HazardMode | str | None = None,
        level: HazardLevel | str | None = None,
    ) -> list[HazardDefinition]:
        """Conjunction of the provided axis filters; empty filter returns all."""
        if stage is not None:
            stage = LifecycleStage.from_ordinal(int(stage))
        if mode is not None:
            mode = HazardMode(mode)
        if level is not None:
            level = HazardLevel(level)
        hits = [
            h
            for h in self.hazards
            if (stage is None or stage in h.stages)
            and (mode is None or h.mode == mode)
            and (level is None or h.level == level)
        ]
        return sorted(hits, key=lambda h: hazard_sort_key(h.id))

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "hazards": [h.to_dict() for h in sorted(self.hazards, key=lambda h: hazard_sort_key(h.id))],
        }


def _raw_findings(raw: Any) -> list[ValidationFinding]:
    """Validate a parsed catalog document; findings are data, not failures."""
    findings: list[ValidationFinding] = []
    if not isinstance(raw, dict):
        return [ValidationFinding(None, "document", "catalog document must be an object")]
    version = raw.get("version")
    if not isinstance(version, str) or not version.strip():
        findings.append(ValidationFinding(None, "version", "catalog version must be a non-empty string"))
    hazards = raw.get("hazards")
    if not isinstance(hazards, list) or not hazards:
        findings.append(ValidationFinding(None, "non-empty", "catalog must be non-empty"))
        return findings

    seen: set[str] = set()
    for index, entry in enumerate(hazards):
        if not isinstance(entry, dict):
            findings.append(ValidationFinding(None, "entry", f"hazard entry {index} must be an object"))
            continue
        hid = entry.get("id")
        label = hid if isinstance(hid, str) and hid else f"entry {index}"
        if not isinstance(hid, str) or not _ID_PATTERN.match(hid):
            findings.append(ValidationFinding(label, "id-format", f"{label}: id must match AIH<n>"))
        elif hid in seen:
            findings.append(ValidationFinding(hid, "id-unique", f"duplicate id {hid}"))
        else:
            seen.add(hid)
        for text_field in ("title", "description"):
            value = entry.get(text_field)
            if not isinstance(value, str) or not value.strip():
                findings.append(
                    ValidationFinding(label, f"{text_field}-required", f"{label}: {text_field} must be non-empty")
                )
        stages = entry.get("stages")
        if not isinstance(stages, list) or not stages:
            findings.append(ValidationFinding(label, "stages-non-empty", f"{label}: stages must be non-empty"))
        else:
            for s in stages:
                if not isinstance(s, int) or s not in (1, 2, 3, 4, 5):
                    findings.append(
                        ValidationFinding(label, "stage-range", f"{label}: stage {s!r} is not an ordinal in 1..5")
                    )
        mode = entry.get("mode")
        if mode not in {m.value for m in HazardMode}:
            findings.append(ValidationFinding(label, "mode-known", f"{label}: unknown mode {mode!r}"))
        level = entry.get("level")
        if level not in {l.value for l in HazardLevel}:
            findings.append(ValidationFinding(label, "level-known", f"{label}: unknown level {level!r}"))
        refs = entry.get("references", [])
        if not isinstance(refs, list) or any(not isinstance(r, str) or not r for r in refs):
            findings.append(ValidationFinding(label, "references", f"{label}: references must be strings"))
    return findings


def validate_catalog(catalog: Catalog) -> list[ValidationFinding]:
    """Re-check invariants of an already constructed catalog."""
    return _raw_findings(catalog.to_dict())


def load_catalog(source: str | Path | IO[str] | dict[str, Any]) -> Catalog:
    """Parse and validate a catalog document (path, file object or dict).

    Raises catalog-parse-error on malformed JSON and catalog-invalid with the
    offending entry ids and rules when validation fails.
    """
    if isinstance(source, dict):
        raw: Any = source
    else:
        try:
            if isinstance(source, (str, Path)):
                text = Path(source).read_text(encoding="utf-8")
            else:
                text = source.read()
            raw = json.loads(text)
        except OSError as exc:
            raise HazardManagementError("catalog-parse-error", f"cannot read catalog: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise HazardManagementError("catalog-parse-error", f"catalog is not valid JSON: {exc}") from exc

    findings = _raw_findings(raw)
    if findings:
        summary = "; ".join(f.message for f in findings[:5])
        raise HazardManagementError(
            "catalog-invalid",
            f"catalog failed validation: {summary}",
            details={"findings": [f.to_dict() for f in findings]},
        )

    hazards = tuple(
        HazardDefinition(
            id=entry["id"],
            title=entry["title"],
            description=entry["description"],
            stages=frozenset(LifecycleStage(s) for s in entry["stages"]),
            mode=HazardMode(entry["mode"]),
            level=HazardLevel(entry["level"]),
            references=tuple(entry.get("references", [])),
        )
        for entry in raw["hazards"]
    )
    return Catalog(version=raw["version"], hazards=hazards)


def bundled_catalog() -> Catalog:
    """The catalog document shipped with the package."""
    with resources.files("aihm.data").joinpath(BUNDLED_CATALOG_RESOURCE).open("r", encoding="utf-8") as fh:
        return load_catalog(fh)


def stage_names() -> list[tuple[int, str]]:
    return [(int(s), s.slug) for s in LifecycleStage]
