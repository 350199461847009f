"""aihm: stage-gated AI hazard management workbench.

Catalog of AI hazards with a three-axis taxonomy, a per-stage
identify/assess/treat risk register, tamper-evident audit logging, and
deterministic report generation, driven via CLI or HTTP API.
"""

from .assessment import (
    AssessmentPlan,
    AssessmentRecord,
    MeasuredValue,
    QualitativeReviewCriterion,
    RelativeDegradationCriterion,
    ReviewInput,
    Signoff,
    ThresholdCriterion,
    Verdict,
    evaluate_criterion,
)
from .auditlog import AuditLog, AuditEvent, verify_events, verify_file
from .catalog import (
    Catalog,
    HazardDefinition,
    HazardLevel,
    HazardMode,
    LifecycleStage,
    bundled_catalog,
    load_catalog,
    validate_catalog,
)
from .engine import (
    HazardInstance,
    InstanceStatus,
    Participant,
    Project,
    ProjectEngine,
    StageRun,
    StageStatus,
    TradeoffLink,
    project_status,
    verdict_of,
)
from .errors import HazardManagementError
from .replay import replay_file, replay_log, replay_text, verify_chain
from .report import ReportDocument, generate_project_report, generate_stage_report

__version__ = "0.1.0"

__all__ = [
    "AssessmentPlan",
    "AssessmentRecord",
    "AuditEvent",
    "AuditLog",
    "Catalog",
    "HazardDefinition",
    "HazardInstance",
    "HazardLevel",
    "HazardManagementError",
    "HazardMode",
    "InstanceStatus",
    "LifecycleStage",
    "MeasuredValue",
    "Participant",
    "Project",
    "ProjectEngine",
    "QualitativeReviewCriterion",
    "RelativeDegradationCriterion",
    "ReportDocument",
    "ReviewInput",
    "Signoff",
    "StageRun",
    "StageStatus",
    "ThresholdCriterion",
    "TradeoffLink",
    "Verdict",
    "bundled_catalog",
    "evaluate_criterion",
    "generate_project_report",
    "generate_stage_report",
    "load_catalog",
    "project_status",
    "replay_file",
    "replay_log",
    "replay_text",
    "validate_catalog",
    "verdict_of",
    "verify_chain",
    "verify_events",
    "verify_file",
]
