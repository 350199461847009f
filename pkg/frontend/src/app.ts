// Dashboard wiring: register board + hazard detail + audit timeline, all
// refreshed from service responses only.

import { ApiClient } from './api/client';
import type { HazardCard, StatusSummary } from './api/types';
import { AuditTimeline } from './views/auditTimeline';
import { HazardDetail } from './views/hazardDetail';
import { RegisterBoard } from './views/registerBoard';

export interface AppOptions {
    baseUrl?: string;
    projectId: string;
    actor: string;
}

export class App {
    readonly client: ApiClient;
    readonly board: RegisterBoard;
    readonly detail: HazardDetail;
    readonly timeline: AuditTimeline;
    private readonly projectId: string;
    private participants: string[] = [];
    private currentStage = 1;

    constructor(root: HTMLElement, options: AppOptions) {
        this.client = new ApiClient(options.baseUrl ?? '', options.actor);
        this.projectId = options.projectId;

        const boardHost = document.createElement('div');
        boardHost.id = 'board';
        const detailHost = document.createElement('aside');
        detailHost.id = 'detail';
        const timelineHost = document.createElement('section');
        timelineHost.id = 'timeline';
        root.append(boardHost, detailHost, timelineHost);

        this.board = new RegisterBoard(boardHost, this.client, options.projectId);
        this.detail = new HazardDetail(detailHost, this.client, options.projectId);
        this.timeline = new AuditTimeline(timelineHost, this.client, options.projectId);

        this.board.onSelectStage = (stage) => void this.showStage(stage);
        this.board.onSelectCard = (card: HazardCard) => this.detail.show(card, this.participants);
        this.detail.onUpdated = (status: StatusSummary) => void this.refreshFrom(status);
    }

    async start(): Promise<void> {
        try {
            const status = await this.client.getStatus(this.projectId);
            this.participants = status.participants.map((p) => p.name);
            this.currentStage = status.openStage ?? 1;
        } catch {
            // board.show renders the error banner
        }
        await this.showStage(this.currentStage);
        await this.timeline.show();
    }

    async showStage(stage: number): Promise<void> {
        this.currentStage = stage;
        this.detail.clear();
        await this.board.show(stage);
    }

    /** After a mutation the service already returned the fresh status; reuse
     * it to pick the stage to re-render, then re-fetch the register. */
    private async refreshFrom(status: StatusSummary): Promise<void> {
        this.participants = status.participants.map((p) => p.name);
        const stage = status.openStage ?? this.currentStage;
        await this.showStage(stage);
        await this.timeline.show();
    }
}
