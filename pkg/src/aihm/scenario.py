"""Scripted demonstration project: HIGF detection on distribution power grids.

A deep-learning classifier flags high-impedance ground faults in voltage and
current time series; a human operator confirms every alarm. The script walks
the full five-stage process with fixed timestamps and actors, so it doubles as
an executable regression scenario: the same steps can be driven through the
engine directly or through the CLI, and both must produce the same audit log.

Run ``python -m aihm.scenario OUTDIR`` to execute it and export the event log,
status summary and project report.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from .catalog import Catalog
from .engine import ProjectEngine, project_status
from .report import generate_project_report

PROJECT_ID = "higf-detector"
PROJECT_NAME = "HIGF detector"
PROJECT_CONTEXT = (
    "Decision support for distribution power grids: a deep neural network classifies voltage/current "
    "time series for the presence of high-impedance ground faults; every alarm is confirmed by a human operator."
)

PARTICIPANTS = [
    ("maier", "data-scientist"),
    ("brandt", "domain-expert"),
    ("nair", "business-representative"),
    ("richter", "reviewer"),
]

LEAD = "maier"
DECIDERS = ["maier", "brandt"]

BASE_TIME = datetime(2025, 3, 3, 9, 0, 0, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Step:
    op: str
    params: dict[str, Any]
    actor: str
    at: str
    label: str | None = None


class _Script:
    """Collects steps with a deterministic one-minute clock."""

    def __init__(self) -> None:
        self.steps: list[Step] = []
        self._tick = 0

    def add(self, op: str, params: dict[str, Any], label: str | None = None, actor: str = LEAD) -> None:
        at = (BASE_TIME + timedelta(minutes=self._tick)).strftime("%Y-%m-%dT%H:%M:%SZ")
        self._tick += 1
        self.steps.append(Step(op=op, params=params, actor=actor, at=at, label=label))

    # convenience wrappers -------------------------------------------------

    def open_stage(self, stage: int, label: str | None = None) -> None:
        self.add("open-stage", {"stage": stage}, label=label)

    def include(self, definition_id: str, justification: str) -> None:
        self.add(
            "triage",
            {
                "definitionId": definition_id,
                "decision": "include",
                "justification": justification,
                "decidedBy": DECIDERS,
            },
        )

    def exclude(self, definition_id: str, justification: str) -> None:
        self.add(
            "triage",
            {
                "definitionId": definition_id,
                "decision": "exclude",
                "justification": justification,
                "decidedBy": DECIDERS,
            },
        )

    def review_plan(
        self, definition_id: str, method: str, checklist: Sequence[str], reviewer: str = "richter"
    ) -> None:
        self.add(
            "plan",
            {
                "definitionId": definition_id,
                "plan": {
                    "criterion": {"kind": "qualitative-review", "reviewChecklist": list(checklist)},
                    "method": method,
                    "plannedBy": [LEAD],
                    "signoffs": [],
                    "assignedReviewer": reviewer,
                },
            },
        )

    def threshold_plan(
        self,
        definition_id: str,
        metric: str,
        comparator: str,
        bound: str,
        method: str,
        signoffs: Sequence[tuple[str, str]] = (),
    ) -> None:
        self.add(
            "plan",
            {
                "definitionId": definition_id,
                "plan": {
                    "criterion": {
                        "kind": "threshold",
                        "metricName": metric,
                        "comparator": comparator,
                        "bound": bound,
                    },
                    "method": method,
                    "plannedBy": [LEAD],
                    "signoffs": [{"participant": p, "statement": s} for p, s in signoffs],
                    "assignedReviewer": None,
                },
            },
        )

    def degradation_plan(
        self, definition_id: str, metric: str, baseline: str, max_decrease: str, method: str
    ) -> None:
        self.add(
            "plan",
            {
                "definitionId": definition_id,
                "plan": {
                    "criterion": {
                        "kind": "relative-degradation",
                        "metricName": metric,
                        "baselineValue": baseline,
                        "maxDecrease": max_decrease,
                    },
                    "method": method,
                    "plannedBy": [LEAD],
                    "signoffs": [],
                    "assignedReviewer": None,
                },
            },
        )

    def measure(self, definition_id: str, value: str, label: str | None = None) -> None:
        self.add("result", {"definitionId": definition_id, "input": {"measuredValue": value}}, label=label)

    def review(
        self,
        definition_id: str,
        outcome: str,
        notes: str,
        reviewer: str = "richter",
        label: str | None = None,
    ) -> None:
        self.add(
            "result",
            {
                "definitionId": definition_id,
                "input": {"reviewOutcome": outcome, "reviewNotes": notes, "reviewer": reviewer},
            },
            label=label,
        )

    def treat(self, definition_id: str, description: str, technique: str, label: str | None = None) -> None:
        self.add(
            "treat",
            {
                "definitionId": definition_id,
                "description": description,
                "technique": technique,
                "appliedBy": LEAD,
            },
            label=label,
        )

    def close_stage(self, stage: int, summary: str, label: str | None = None) -> None:
        self.add("close-stage", {"stage": stage, "summary": summary}, label=label)


def _stage1(s: _Script) -> None:
    s.open_stage(1, label="stage-1-opened")
    s.include("AIH1", "Grid protection depends on a precise operating envelope; the ODD must be explicit.")
    s.include("AIH2", "Degree of automation is a scoping decision with direct safety impact.")
    s.include("AIH3", "Detection performance targets drive every later acceptance decision.")
    s.include("AIH4", "Audit obligations for protection equipment require full development documentation.")
    s.include("AIH5", "Operators must understand why the detector raises an alarm before acting on it.")
    s.exclude(
        "AIH6",
        "Standard substation industrial PCs cover the expected training and inference load; "
        "no special hardware constraints identified at scoping.",
    )
    s.include("AIH16", "Model family selection happens now and constrains everything downstream.")

    s.review_plan(
        "AIH1",
        "Second-person review of the ODD specification document",
        [
            "Feeder types, voltage levels and sensor ranges are enumerated",
            "Climate and seasonal envelope is specified",
            "Out-of-scope grid conditions are listed explicitly",
        ],
    )
    s.review("AIH1", "pass", "ODD specification v0.3 covers feeders, sensors and climate envelope.")

    s.review_plan(
        "AIH2",
        "Second-person review of the automation concept",
        ["Automation level is decision support only", "Human operator retains switching authority"],
    )
    s.review("AIH2", "pass", "Concept keeps the operator in charge; detector only raises alarms.")

    s.review_plan(
        "AIH3",
        "Second-person review of the performance requirement sheet",
        [
            "False-negative and false-positive targets agreed with grid operations",
            "Chosen metrics reflect fault-detection quality",
        ],
    )
    s.review("AIH3", "pass", "FNR/FPR targets signed by grid operations; metrics fit the detection task.")

    s.review_plan(
        "AIH4",
        "Second-person review of the documentation plan",
        ["Decision log location defined", "Data and model documentation templates agreed"],
    )
    s.review("AIH4", "pass", "Documentation plan set up; templates in the project wiki.")

    s.review_plan(
        "AIH5",
        "Second-person review of the operator transparency concept",
        [
            "Operators can see why an alarm was raised",
            "Information depth matches operator domain knowledge",
        ],
    )
    s.review(
        "AIH5",
        "fail",
        "Current concept gives operators no insight into what triggered an alarm.",
    )
    s.treat(
        "AIH5",
        "Commit to an operator monitoring dashboard that shows each alarm together with the input "
        "traces that caused it; the operator stays in the loop for every action.",
        "monitoring-dashboard",
    )
    s.review(
        "AIH5",
        "pass",
        "Dashboard commitment added to the system specification; operators keep decision power.",
    )

    s.review_plan(
        "AIH16",
        "Second-person review of the model design rationale",
        ["Model family compared against simpler baselines", "Choice justified for time-series input"],
    )
    s.review("AIH16", "pass", "CNN over sliding windows justified against classical baselines.")

    s.close_stage(
        1,
        "Scoping hazards reviewed; operator transparency gap closed by the dashboard commitment.",
        label="stage-1-closed",
    )


def _stage2(s: _Script) -> None:
    s.open_stage(2, label="stage-2-opened")
    s.include("AIH1", "Collected data must be checked against the specified operating envelope.")
    s.include("AIH4", "Data collection decisions must be documented for the audit file.")
    s.include("AIH7", "Data provenance needs explicit vetting before training starts.")
    s.include("AIH8", "Signal semantics must be understood before feature and label design.")
    s.exclude(
        "AIH9",
        "Only voltage/current time series; no person-related attributes in any input.",
    )
    s.exclude("AIH10", "No personal data is collected or processed anywhere in the pipeline.")
    s.include("AIH11", "Fault labels derive from protocols and simulation; label quality must be measured.")
    s.exclude(
        "AIH12",
        "Training data comes from utility-controlled recorders and the internal simulation platform; "
        "there is no third-party ingestion path to poison.",
    )
    s.include("AIH13", "Rare fault signatures must be sufficiently represented in training data.")
    s.include("AIH14", "Simulation-generated faults must be close enough to field recordings.")
    s.include("AIH15", "Test data must stay untouched by development to keep evaluation honest.")

    s.review_plan(
        "AIH1",
        "Second-person review of data coverage against the ODD",
        ["All feeder types present", "Seasonal variation covered"],
    )
    s.review("AIH1", "pass", "Collected windows cover all feeder types and seasons in the ODD.")

    s.review_plan(
        "AIH4",
        "Second-person review of data documentation",
        ["Source, license and preprocessing recorded per dataset"],
    )
    s.review("AIH4", "pass", "Datasheets filled for both recorder and simulation data.")

    s.review_plan(
        "AIH7",
        "Second-person review of data source vetting",
        ["Recorder calibration certificates on file", "Simulation platform validation report available"],
    )
    s.review("AIH7", "pass", "Utility recorders calibrated; simulation platform validated against field events.")

    s.review_plan(
        "AIH8",
        "Second-person review of the data understanding workshop results",
        ["Channel semantics documented", "Known measurement artefacts listed"],
    )
    s.review("AIH8", "pass", "Workshop notes document channel meaning and artefact handling.")

    s.threshold_plan(
        "AIH11",
        "label-error-rate",
        "<=",
        "0.01",
        "Independent relabelling audit of 500 randomly sampled windows by two engineers",
    )
    s.measure("AIH11", "0.004")

    s.threshold_plan(
        "AIH13",
        "fault-scenario-coverage",
        ">=",
        "0.90",
        "Share of catalogued HIGF scenario classes represented in the training set",
    )
    s.measure("AIH13", "0.94")

    s.threshold_plan(
        "AIH14",
        "sim-field-distribution-distance",
        "<=",
        "0.10",
        "Maximum mean discrepancy between simulated and field recordings on held-out channels",
    )
    s.measure("AIH14", "0.06")

    s.review_plan(
        "AIH15",
        "Second-person review of the data split protocol",
        ["Temporal split", "Test feeders disjoint from training feeders", "Test set access-controlled"],
    )
    s.review("AIH15", "pass", "Split protocol enforced in the data pipeline; test set locked.")

    s.close_stage(
        2,
        "Data hazards assessed; bias and privacy hazards ruled out for purely physical time-series data.",
        label="stage-2-closed",
    )


def _stage3(s: _Script, aih19_residual: bool) -> None:
    s.open_stage(3, label="stage-3-opened")
    s.include("AIH3", "Modeling results must be checked against the planned performance requirements.")
    s.include("AIH4", "Modeling decisions and experiments must be documented.")
    s.include("AIH8", "Feature engineering choices must trace back to documented data understanding.")
    s.include("AIH16", "Architecture and loss decisions are made in this stage.")
    s.include("AIH17", "Generalisation gap must be quantified before freezing the model.")
    s.include("AIH18", "Operators and auditors need insight into what drives the classifier output.")
    s.include("AIH19", "Rare fault signatures are exactly where the detector must stay reliable.")
    s.include(
        "AIH20",
        "Operational measurements are noisy, so robustness against input perturbations is essential.",
    )
    s.include("AIH21", "Alarm confidence feeds the operator decision and must be calibrated.")

    s.review_plan(
        "AIH3",
        "Compare modeling results against the scoping performance requirement sheet",
        ["Achieved metrics meet planned targets", "Metric definitions unchanged since scoping"],
    )
    s.review("AIH3", "pass", "Accuracy 0.95 and FNR 0.03 on the original test set meet the planned targets.")

    s.review_plan(
        "AIH4",
        "Second-person review of modeling documentation",
        ["Experiment tracking complete", "Final training configuration recorded"],
    )
    s.review("AIH4", "pass", "All runs tracked; final configuration checked into the model registry.")

    s.review_plan(
        "AIH8",
        "Second-person review of feature traceability",
        ["Every input feature maps to a documented channel property"],
    )
    s.review("AIH8", "pass", "Feature list cross-referenced with the data understanding notes.")

    s.review_plan(
        "AIH16",
        "Second-person review of final architecture decisions",
        ["Architecture rationale updated with ablation results"],
    )
    s.review("AIH16", "pass", "Ablations documented; chosen depth and window size justified.")

    s.threshold_plan(
        "AIH17",
        "train-validation-accuracy-gap",
        "<=",
        "0.02",
        "Gap between training and validation accuracy on the frozen model",
    )
    s.measure("AIH17", "0.01")

    s.threshold_plan(
        "AIH18",
        "operator-saliency-agreement",
        ">=",
        "0.70",
        "Share of sampled alarms where grid experts judge the saliency attribution plausible",
        signoffs=[
            ("brandt", "Attribution views are meaningful for grid operators."),
            ("nair", "Explanation depth satisfies the customer transparency commitment."),
        ],
    )
    s.measure("AIH18", "0.80")

    s.threshold_plan(
        "AIH19",
        "corner-case-detection-rate",
        ">=",
        "0.85",
        "Detection rate on the curated corner-case suite (rare fault signatures, switching transients)",
    )
    if aih19_residual:
        s.measure("AIH19", "0.70", label="stage-3-aih19-nontolerable")
        s.add(
            "residual",
            {
                "definitionId": "AIH19",
                "justification": "Corner-case coverage is physically unattainable with available fault "
                "recordings; a runtime plausibility monitor is added as a safeguard.",
                "recipients": ["maier", "brandt"],
            },
            label="stage-3-aih19-residual",
        )
    else:
        s.measure("AIH19", "0.91")

    s.threshold_plan(
        "AIH21",
        "expected-calibration-error",
        "<=",
        "0.05",
        "Expected calibration error of the alarm confidence on the validation set",
    )
    s.measure("AIH21", "0.03")

    s.degradation_plan(
        "AIH20",
        "accuracy-on-perturbed-set",
        "0.95",
        "0.03",
        "Evaluate accuracy on a perturbation set built with simulation-based augmentation "
        "(measurement noise, harmonics, sensor jitter) and compare against the original test set",
    )
    s.add(
        "link",
        {
            "fromDefinitionId": "AIH20",
            "toDefinitionId": "AIH3",
            "rationale": "Robustness mitigations such as augmented re-training or regularization "
            "can reduce overall model performance.",
        },
    )
    s.measure("AIH20", "0.90", label="stage-3-aih20-nontolerable")
    s.treat(
        "AIH20",
        "Re-train the classifier on the simulation-augmented training set.",
        "augmented-retraining",
        label="stage-3-aih20-treated",
    )
    s.measure("AIH20", "0.93", label="stage-3-checkpoint")
    s.review(
        "AIH3",
        "pass",
        "Post-retraining accuracy 0.96 on the original test set; planned targets still met.",
        label="stage-3-aih3-reassessed",
    )
    s.close_stage(
        3,
        "Robustness brought to a tolerable level by augmented re-training; overall performance re-checked.",
        label="stage-3-closed",
    )


def _stage4(s: _Script) -> None:
    s.open_stage(4, label="stage-4-opened")
    s.include("AIH1", "Pilot deployment conditions must stay inside the specified ODD.")
    s.include("AIH2", "Deployed automation level must match the scoped decision-support design.")
    s.include("AIH3", "Final evaluation must confirm the planned performance targets.")
    s.include("AIH5", "Operators now work with the dashboard; its adequacy must be validated in the field.")
    s.include("AIH6", "Deployment hardware must sustain the inference load within the alarm budget.")
    s.include("AIH22", "Behaviour on real operational data must be evaluated before go-live.")

    s.review_plan(
        "AIH1",
        "Second-person review of pilot conditions against the ODD",
        ["Pilot feeders within specified envelope"],
    )
    s.review("AIH1", "pass", "Both pilot feeders operate inside the specified ODD.")

    s.review_plan(
        "AIH2",
        "Second-person review of the deployed automation level",
        ["Detector only raises alarms", "Operator confirmation required for every action"],
    )
    s.review("AIH2", "pass", "Deployment wiring keeps the operator as the acting authority.")

    s.review_plan(
        "AIH3",
        "Second-person review of final evaluation results",
        ["Frozen-model metrics meet planned targets"],
    )
    s.review("AIH3", "pass", "Final evaluation on the locked test set meets all planned targets.")

    s.review_plan(
        "AIH5",
        "Operator walkthrough of the deployed dashboard",
        ["Operators find alarm explanations understandable", "Alarm views validated with real events"],
    )
    s.review(
        "AIH5",
        "fail",
        "Dashboard is deployed but alarm views have not been validated with the operator team.",
    )
    s.treat(
        "AIH5",
        "Ship operator dashboard v1 with per-alarm input traces and run a structured walkthrough "
        "with the operator team.",
        "monitoring-dashboard",
    )
    s.review("AIH5", "pass", "Walkthrough completed; operators correctly interpret the alarm views.")

    s.review_plan(
        "AIH6",
        "Second-person review of measured hardware load",
        ["Inference latency within the alarm budget on the substation PC"],
    )
    s.review("AIH6", "pass", "Measured inference latency 40 ms on the substation PC, well within budget.")

    s.threshold_plan(
        "AIH22",
        "operational-pilot-accuracy",
        ">=",
        "0.92",
        "Shadow-mode evaluation on two pilot feeders over four weeks",
    )
    s.measure("AIH22", "0.94")

    s.close_stage(
        4,
        "Pilot deployment evaluated; operator dashboard validated in the field.",
        label="stage-4-closed",
    )


def _stage5(s: _Script) -> None:
    s.open_stage(5, label="stage-5-opened")
    s.include("AIH1", "Operating conditions must be monitored for ODD conformity over time.")
    s.include("AIH2", "Automation level must stay appropriate as operator practice evolves.")
    s.include("AIH3", "Performance targets must keep being met in operation.")
    s.include("AIH5", "Operator trust in the dashboard must be maintained over the long run.")
    s.include("AIH6", "Hardware capacity must keep up with grid growth.")
    s.include("AIH23", "Grid location, climate and load patterns shift the input distribution over time.")
    s.include("AIH24", "Grid topology changes can alter the fault/no-fault relationship itself.")

    s.review_plan(
        "AIH1",
        "Second-person review of the ODD monitoring setup",
        ["Out-of-envelope conditions raise an operations ticket"],
    )
    s.review("AIH1", "pass", "ODD conformity checks wired into the operations monitoring stack.")

    s.review_plan(
        "AIH2",
        "Second-person review of the operations handbook",
        ["Handbook confirms decision-support level and escalation path"],
    )
    s.review("AIH2", "pass", "Handbook re-confirms alarm-plus-confirmation operation.")

    s.review_plan(
        "AIH3",
        "Second-person review of the live performance tracking",
        ["Monthly metric report against planned targets"],
    )
    s.review("AIH3", "pass", "Monthly reports track FNR/FPR against targets on the ops dashboard.")

    s.review_plan(
        "AIH5",
        "Second-person review of long-term dashboard effectiveness",
        ["Recurring check that operators still understand and trust alarm views"],
    )
    s.review(
        "AIH5",
        "fail",
        "No recurring check exists that operators still understand and trust the alarm views.",
    )
    s.treat(
        "AIH5",
        "Institutionalise a quarterly monitoring-dashboard effectiveness review with the operator team.",
        "monitoring-dashboard",
    )
    s.review("AIH5", "pass", "Quarterly dashboard review added to the operations calendar.")

    s.review_plan(
        "AIH6",
        "Second-person review of capacity monitoring",
        ["Utilisation alert configured before capacity limits"],
    )
    s.review("AIH6", "pass", "Headroom alert fires at 80 percent utilisation.")

    s.threshold_plan(
        "AIH23",
        "population-stability-index",
        "<=",
        "0.20",
        "Periodic distribution-shift detection: weekly population-stability index between the training "
        "reference sample and the trailing operation window; a drift alarm triggers re-training evaluation",
    )
    s.measure("AIH23", "0.08")

    s.threshold_plan(
        "AIH24",
        "rolling-false-negative-rate",
        "<=",
        "0.05",
        "Monthly false-negative rate on operator-confirmed fault events",
    )
    s.measure("AIH24", "0.02")

    s.close_stage(
        5,
        "Monitoring institutionalised: drift detection scheduled and dashboard reviews recurring.",
        label="complete",
    )


def power_grid_steps(aih19_residual: bool = False) -> list[Step]:
    """The full scripted scenario; optionally divert AIH19 into the residual path."""
    s = _Script()
    s.add(
        "create-project",
        {
            "projectId": PROJECT_ID,
            "name": PROJECT_NAME,
            "context": PROJECT_CONTEXT,
            "participants": [{"name": n, "role": r} for n, r in PARTICIPANTS],
        },
        label="project-created",
    )
    _stage1(s)
    _stage2(s)
    _stage3(s, aih19_residual=aih19_residual)
    _stage4(s)
    _stage5(s)
    return s.steps


def steps_until(steps: Iterable[Step], label: str) -> list[Step]:
    """Prefix of the script up to and including the step carrying `label`."""
    collected: list[Step] = []
    for step in steps:
        collected.append(step)
        if step.label == label:
            return collected
    raise ValueError(f"no step labelled {label!r}")


def run_steps(
    steps: Iterable[Step],
    catalog: Catalog | None = None,
    log_path: str | Path | None = None,
) -> ProjectEngine:
    """Drive the engine directly through the scripted steps."""
    engine: ProjectEngine | None = None
    for step in steps:
        params = step.params
        if step.op == "create-project":
            engine = ProjectEngine.create(
                params["name"],
                params["context"],
                [(p["name"], p["role"]) for p in params["participants"]],
                step.actor,
                at=step.at,
                project_id=params["projectId"],
                catalog=catalog,
                log_path=log_path,
            )
            continue
        if engine is None:
            raise ValueError("scenario must start with create-project")
        if step.op == "open-stage":
            engine.open_stage(params["stage"], step.actor, step.at)
        elif step.op == "triage":
            engine.triage(
                params["definitionId"],
                params["decision"],
                params["justification"],
                params["decidedBy"],
                step.actor,
                step.at,
            )
        elif step.op == "link":
            engine.add_tradeoff_link(
                params["fromDefinitionId"], params["toDefinitionId"], params["rationale"], step.actor, step.at
            )
        elif step.op == "plan":
            engine.plan_assessment(params["definitionId"], params["plan"], step.actor, step.at)
        elif step.op == "result":
            engine.record_result(params["definitionId"], params["input"], step.actor, step.at)
        elif step.op == "treat":
            engine.record_treatment(
                params["definitionId"],
                params["description"],
                params["technique"],
                params["appliedBy"],
                step.actor,
                step.at,
            )
        elif step.op == "residual":
            engine.mark_residual(
                params["definitionId"], params["justification"], params["recipients"], step.actor, step.at
            )
        elif step.op == "close-stage":
            engine.close_stage(params["summary"], step.actor, step.at, stage=params["stage"])
        else:
            raise ValueError(f"unknown scenario op {step.op!r}")
    assert engine is not None
    return engine


def run_power_grid_scenario(
    catalog: Catalog | None = None,
    log_path: str | Path | None = None,
    until: str | None = None,
    aih19_residual: bool = False,
) -> ProjectEngine:
    steps = power_grid_steps(aih19_residual=aih19_residual)
    if until is not None:
        steps = steps_until(steps, until)
    return run_steps(steps, catalog=catalog, log_path=log_path)


def step_argv(step: Step) -> list[str]:
    """Translate one scripted step into CLI arguments (without project dir)."""
    params = step.params
    tail = ["--actor", step.actor, "--at", step.at]
    if step.op == "create-project":
        argv = [
            "init",
            "--name",
            params["name"],
            "--context",
            params["context"],
            "--project-id",
            params["projectId"],
        ]
        for person in params["participants"]:
            argv += ["--participant", f"{person['name']}:{person['role']}"]
        return argv + tail
    if step.op == "open-stage":
        return ["stage", "open", str(params["stage"])] + tail
    if step.op == "triage":
        argv = ["triage", params["decision"], params["definitionId"], "--justification", params["justification"]]
        for name in params["decidedBy"]:
            argv += ["--by", name]
        return argv + tail
    if step.op == "link":
        return [
            "link",
            "add",
            params["fromDefinitionId"],
            params["toDefinitionId"],
            "--rationale",
            params["rationale"],
        ] + tail
    if step.op == "plan":
        plan = params["plan"]
        criterion = plan["criterion"]
        argv = ["plan", "set", params["definitionId"], "--criterion", criterion["kind"], "--method", plan["method"]]
        if criterion["kind"] == "threshold":
            argv += ["--metric", criterion["metricName"], "--comparator", criterion["comparator"]]
            argv += ["--bound", criterion["bound"]]
        elif criterion["kind"] == "relative-degradation":
            argv += ["--metric", criterion["metricName"], "--baseline", criterion["baselineValue"]]
            argv += ["--max-decrease", criterion["maxDecrease"]]
        else:
            for item in criterion["reviewChecklist"]:
                argv += ["--check", item]
        for name in plan["plannedBy"]:
            argv += ["--planned-by", name]
        if plan.get("assignedReviewer"):
            argv += ["--reviewer", plan["assignedReviewer"]]
        for signoff in plan.get("signoffs", []):
            argv += ["--signoff", f"{signoff['participant']}:{signoff['statement']}"]
        return argv + tail
    if step.op == "result":
        raw = params["input"]
        argv = ["result", "record", params["definitionId"]]
        if "measuredValue" in raw:
            argv += ["--value", raw["measuredValue"]]
        else:
            argv += ["--review", raw["reviewOutcome"], "--notes", raw["reviewNotes"], "--reviewer", raw["reviewer"]]
        return argv + tail
    if step.op == "treat":
        return [
            "treat",
            params["definitionId"],
            "--description",
            params["description"],
            "--technique",
            params["technique"],
            "--applied-by",
            params["appliedBy"],
        ] + tail
    if step.op == "residual":
        argv = ["residual", params["definitionId"], "--justification", params["justification"]]
        for name in params["recipients"]:
            argv += ["--alert", name]
        return argv + tail
    if step.op == "close-stage":
        return ["stage", "close", str(params["stage"]), "--summary", params["summary"]] + tail
    raise ValueError(f"unknown scenario op {step.op!r}")


def main(argv: Sequence[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if len(args) != 1:
        print("usage: python -m aihm.scenario OUTDIR", file=sys.stderr)
        return 2
    outdir = Path(args[0])
    outdir.mkdir(parents=True, exist_ok=True)
    engine = run_power_grid_scenario(log_path=outdir / "events.ndjson")
    assert engine.project is not None
    status = project_status(engine.project)
    (outdir / "status.json").write_text(
        json.dumps(status, indent=2, sort_keys=True, ensure_ascii=True) + "\n", encoding="utf-8"
    )
    report = generate_project_report(engine.log, engine.catalog)
    (outdir / "project-report.md").write_text(report.render_markdown(), encoding="utf-8")
    (outdir / "project-report.json").write_text(report.render_structured(), encoding="utf-8")
    print(f"scenario complete: {len(engine.log)} events, reports written to {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
