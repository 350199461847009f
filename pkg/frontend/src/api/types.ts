// Types mirroring the aihm service API schemas (see GET /api/description).

export interface ApiErrorBody {
    code: string;
    message: string;
    details: Record<string, unknown>;
}

export type Envelope<T> = { data: T } | { error: ApiErrorBody };

export type HazardMode = 'procedural' | 'technical' | 'socio-technical';
export type HazardLevel = 'system' | 'application';
export type InstanceStatus =
    | 'candidate'
    | 'excluded'
    | 'included'
    | 'planned'
    | 'assessed'
    | 'treated'
    | 'residual';
export type VerdictLabel = 'tolerable' | 'non-tolerable' | 'pending';
export type StageGate = 'unopened' | 'open' | 'closed';
export type CriterionKind = 'threshold' | 'relative-degradation' | 'qualitative-review';

/** Criterion kinds a plan may use, by hazard mode. Mirrors the server's
 * mode-compatibility rule; the plan form offers exactly these options and the
 * server re-enforces the rule on every submission. */
export const MODE_CRITERION_KINDS: Record<HazardMode, CriterionKind[]> = {
    technical: ['threshold', 'relative-degradation'],
    'socio-technical': ['threshold', 'relative-degradation'],
    procedural: ['qualitative-review'],
};

export interface CatalogHazard {
    id: string;
    title: string;
    description: string;
    stages: number[];
    mode: HazardMode;
    level: HazardLevel;
    references: string[];
}

export interface Catalog {
    version: string;
    hazards: CatalogHazard[];
}

export interface Taxonomy {
    stages: number[];
    mode: HazardMode;
    level: HazardLevel;
}

export interface Triage {
    decision: 'include' | 'exclude';
    justification: string;
    decidedBy: string[];
}

export interface Criterion {
    kind: CriterionKind;
    metricName?: string;
    comparator?: '<=' | '>=' | '<' | '>';
    bound?: string;
    baselineValue?: string;
    maxDecrease?: string;
    reviewChecklist?: string[];
}

export interface Plan {
    criterion: Criterion;
    method: string;
    plannedBy: string[];
    signoffs: { participant: string; statement: string }[];
    assignedReviewer: string | null;
}

export interface AssessmentRecord {
    at: string;
    input: Record<string, string>;
    verdict: 'tolerable' | 'non-tolerable';
    stale: boolean;
}

export interface Treatment {
    description: string;
    technique: string;
    appliedBy: string;
    appliedAt: string;
}

/** One hazard register row, as served by GET stages/{n}/hazards. */
export interface HazardCard {
    definitionId: string;
    title: string;
    stage: number;
    taxonomy: Taxonomy;
    status: InstanceStatus;
    verdict: VerdictLabel;
    stale: boolean;
    blocker: string | null;
    triage: Triage | null;
    plan: Plan | null;
    records: AssessmentRecord[];
    treatments: Treatment[];
    priorStage: number | null;
    alert: { recipients: string[]; justification: string; at: string } | null;
}

export interface BlockingCondition {
    definitionId: string;
    condition: string;
}

export interface StageEntry {
    stage: number;
    name: string;
    status: StageGate;
    counts: Record<InstanceStatus, number>;
    blocking: BlockingCondition[];
    staleCount: number;
    residualIds: string[];
    closureSummary: string | null;
    closedAt: string | null;
}

export interface StatusSummary {
    projectId: string;
    name: string;
    useCaseContext: string;
    catalogVersion: string;
    participants: { name: string; role: string }[];
    stages: StageEntry[];
    openStage: number | null;
    tradeoffLinks: { fromDefinitionId: string; toDefinitionId: string; rationale: string }[];
    residuals: { stage: number; definitionId: string; recipients: string[] }[];
    complete: boolean;
}

export interface MutationResult<T = unknown> {
    result: T;
    status: StatusSummary;
}

export interface AuditEvent {
    sequence: number;
    at: string;
    actor: string;
    eventKind: string;
    payload: Record<string, unknown>;
    prevHash: string;
    hash: string;
}

export interface AuditPage {
    total: number;
    limit: number;
    offset: number;
    events: AuditEvent[];
}

export interface ChainVerification {
    ok: boolean;
    brokenAt?: number;
    reason?: string;
}

export interface RenderedReport {
    format: 'markdown' | 'structured';
    sourceLogHash: string;
    content: string;
}

export type TriageBody = { decision: 'include' | 'exclude'; justification: string; decidedBy: string[] };
export type PlanBody = Plan;
export type ResultBody =
    | { measuredValue: string }
    | { reviewOutcome: 'pass' | 'fail'; reviewNotes: string; reviewer: string };
export type TreatBody = { description: string; technique: string; appliedBy: string };
export type ResidualBody = { justification: string; alertRecipients: string[] };
