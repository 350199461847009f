// Typed fetch client for the aihm service. All state lives on the server:
// the client only transports envelopes and never mutates anything locally.

import type {
    AuditPage,
    Catalog,
    ChainVerification,
    Envelope,
    HazardCard,
    MutationResult,
    PlanBody,
    RenderedReport,
    ResidualBody,
    ResultBody,
    StatusSummary,
    TreatBody,
    TriageBody,
} from './types';

/** A failed request, carrying the service's stable error code verbatim. */
export class ApiError extends Error {
    readonly code: string;
    readonly details: Record<string, unknown>;
    readonly httpStatus: number;

    constructor(code: string, message: string, details: Record<string, unknown>, httpStatus: number) {
        super(message);
        this.name = 'ApiError';
        this.code = code;
        this.details = details;
        this.httpStatus = httpStatus;
    }
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string = '',
        private readonly actor: string = '',
        private readonly token: string | null = null,
    ) {}

    private headers(mutating: boolean): Record<string, string> {
        const headers: Record<string, string> = { 'Content-Type': 'application/json' };
        if (mutating) headers['X-Actor'] = this.actor;
        if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
        return headers;
    }

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        let response: Response;
        try {
            response = await fetch(this.baseUrl + path, init);
        } catch (cause) {
            throw new ApiError('service-unreachable', `service unreachable: ${String(cause)}`, {}, 0);
        }
        let envelope: Envelope<T>;
        try {
            envelope = (await response.json()) as Envelope<T>;
        } catch {
            throw new ApiError('bad-response', `non-JSON response (HTTP ${response.status})`, {}, response.status);
        }
        if ('error' in envelope) {
            const { code, message, details } = envelope.error;
            throw new ApiError(code, message, details ?? {}, response.status);
        }
        return envelope.data;
    }

    private get<T>(path: string): Promise<T> {
        return this.request<T>(path, { headers: this.headers(false) });
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.request<T>(path, {
            method: 'POST',
            headers: this.headers(true),
            body: JSON.stringify(body),
        });
    }

    getCatalog(filter: { stage?: number; mode?: string; level?: string } = {}): Promise<Catalog> {
        const params = new URLSearchParams();
        if (filter.stage !== undefined) params.set('stage', String(filter.stage));
        if (filter.mode) params.set('mode', filter.mode);
        if (filter.level) params.set('level', filter.level);
        const query = params.toString();
        return this.get(`/catalog${query ? `?${query}` : ''}`);
    }

    getStatus(projectId: string): Promise<StatusSummary> {
        return this.get(`/projects/${projectId}/status`);
    }

    getStageHazards(projectId: string, stage: number): Promise<{ stage: number; hazards: HazardCard[] }> {
        return this.get(`/projects/${projectId}/stages/${stage}/hazards`);
    }

    openStage(projectId: string, stage: number): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/stages/${stage}/open`, {});
    }

    closeStage(projectId: string, stage: number, summary: string): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/stages/${stage}/close`, { summary });
    }

    triage(projectId: string, hazardId: string, body: TriageBody): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/hazards/${hazardId}/triage`, body);
    }

    plan(projectId: string, hazardId: string, body: PlanBody): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/hazards/${hazardId}/plan`, body);
    }

    result(projectId: string, hazardId: string, body: ResultBody): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/hazards/${hazardId}/result`, body);
    }

    treat(projectId: string, hazardId: string, body: TreatBody): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/hazards/${hazardId}/treat`, body);
    }

    residual(projectId: string, hazardId: string, body: ResidualBody): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/hazards/${hazardId}/residual`, body);
    }

    addTradeoffLink(projectId: string, fromId: string, toId: string, rationale: string): Promise<MutationResult> {
        return this.post(`/projects/${projectId}/tradeoff-links`, {
            fromDefinitionId: fromId,
            toDefinitionId: toId,
            rationale,
        });
    }

    getAuditEvents(projectId: string, limit = 100, offset = 0): Promise<AuditPage> {
        return this.get(`/projects/${projectId}/audit/events?limit=${limit}&offset=${offset}`);
    }

    verifyAudit(projectId: string): Promise<ChainVerification> {
        return this.get(`/projects/${projectId}/audit/verify`);
    }

    getProjectReport(projectId: string, format: 'markdown' | 'structured'): Promise<RenderedReport> {
        return this.get(`/projects/${projectId}/reports/project?format=${format}`);
    }

    getStageReport(projectId: string, stage: number, format: 'markdown' | 'structured'): Promise<RenderedReport> {
        return this.get(`/projects/${projectId}/reports/stage/${stage}?format=${format}`);
    }
}
