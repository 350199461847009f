// Register board: per-stage kanban of hazard cards with taxonomy badges,
// stage gate tabs and a blocking-conditions banner. Everything shown here is
// derived from service responses; the board never flips state locally.

import { ApiClient, ApiError } from '../api/client';
import type {
    BlockingCondition,
    HazardCard,
    InstanceStatus,
    StageEntry,
    StatusSummary,
} from '../api/types';

export interface RegisterViewModel {
    projectId: string;
    stage: number;
    stageTabs: StageEntry[];
    gate: StageEntry['status'];
    cards: HazardCard[];
    blocking: BlockingCondition[];
    staleCount: number;
    complete: boolean;
}

const COLUMN_ORDER: InstanceStatus[] = [
    'candidate',
    'included',
    'planned',
    'assessed',
    'treated',
    'residual',
    'excluded',
];

/** Build the view model for one stage from status + register responses.
 * Unopened stages yield a gate-locked model without fetching hazards. */
export async function loadRegister(
    client: ApiClient,
    projectId: string,
    stage: number,
): Promise<RegisterViewModel> {
    const status: StatusSummary = await client.getStatus(projectId);
    const entry = status.stages.find((s) => s.stage === stage);
    if (!entry) throw new ApiError('unknown-stage', `stage ${stage} does not exist`, {}, 0);
    let cards: HazardCard[] = [];
    if (entry.status !== 'unopened') {
        cards = (await client.getStageHazards(projectId, stage)).hazards;
    }
    return {
        projectId,
        stage,
        stageTabs: status.stages,
        gate: entry.status,
        cards,
        blocking: entry.blocking,
        staleCount: entry.staleCount,
        complete: status.complete,
    };
}

export type CardSelectHandler = (card: HazardCard) => void;
export type StageSelectHandler = (stage: number) => void;

export class RegisterBoard {
    private viewModel: RegisterViewModel | null = null;

    onSelectCard: CardSelectHandler | null = null;
    onSelectStage: StageSelectHandler | null = null;

    constructor(
        private readonly root: HTMLElement,
        private readonly client: ApiClient,
        private readonly projectId: string,
    ) {}

    /** Fetch and render one stage. On failure the board is cleared and an
     * error banner shows the service's message; stale data is never left up. */
    async show(stage: number): Promise<void> {
        try {
            this.viewModel = await loadRegister(this.client, this.projectId, stage);
        } catch (error) {
            this.viewModel = null;
            this.renderError(error);
            return;
        }
        this.render();
    }

    private renderError(error: unknown): void {
        this.root.innerHTML = '';
        const banner = document.createElement('div');
        banner.className = 'error-banner';
        if (error instanceof ApiError) {
            banner.textContent = `${error.code}: ${error.message}`;
        } else {
            banner.textContent = String(error);
        }
        this.root.appendChild(banner);
    }

    private render(): void {
        const vm = this.viewModel;
        if (!vm) return;
        this.root.innerHTML = '';
        this.root.appendChild(this.renderTabs(vm));
        if (vm.blocking.length > 0) {
            this.root.appendChild(this.renderBlockingBanner(vm.blocking));
        }
        if (vm.gate === 'unopened') {
            const locked = document.createElement('div');
            locked.className = 'gate-locked';
            locked.textContent = `Stage ${vm.stage} is gate-locked: close the previous stage to open it.`;
            this.root.appendChild(locked);
            return;
        }
        this.root.appendChild(this.renderColumns(vm));
    }

    private renderTabs(vm: RegisterViewModel): HTMLElement {
        const tabs = document.createElement('nav');
        tabs.className = 'stage-tabs';
        for (const entry of vm.stageTabs) {
            const tab = document.createElement('button');
            tab.className = `stage-tab gate-${entry.status}`;
            if (entry.stage === vm.stage) tab.classList.add('active');
            tab.dataset.stage = String(entry.stage);
            tab.textContent = `${entry.stage} ${entry.name} [${entry.status}]`;
            tab.addEventListener('click', () => this.onSelectStage?.(entry.stage));
            tabs.appendChild(tab);
        }
        return tabs;
    }

    private renderBlockingBanner(blocking: BlockingCondition[]): HTMLElement {
        const banner = document.createElement('div');
        banner.className = 'blocking-banner';
        const text = blocking.map((b) => `${b.definitionId}: ${b.condition}`).join('; ');
        banner.textContent = `Blocking stage closure: ${text}`;
        return banner;
    }

    private renderColumns(vm: RegisterViewModel): HTMLElement {
        const board = document.createElement('div');
        board.className = 'board';
        for (const status of COLUMN_ORDER) {
            const cards = vm.cards.filter((c) => c.status === status);
            if (cards.length === 0) continue;
            const column = document.createElement('section');
            column.className = `board-column status-${status}`;
            const heading = document.createElement('h3');
            heading.textContent = `${status} (${cards.length})`;
            column.appendChild(heading);
            for (const card of cards) {
                column.appendChild(this.renderCard(card));
            }
            board.appendChild(column);
        }
        return board;
    }

    private renderCard(card: HazardCard): HTMLElement {
        const element = document.createElement('article');
        element.className = `hazard-card status-${card.status}`;
        element.dataset.hazard = card.definitionId;
        if (card.triage) element.title = card.triage.justification;

        const head = document.createElement('header');
        const id = document.createElement('strong');
        id.textContent = card.definitionId;
        head.appendChild(id);
        const title = document.createElement('span');
        title.textContent = ` ${card.title}`;
        head.appendChild(title);
        element.appendChild(head);

        const badges = document.createElement('div');
        badges.className = 'badges';
        for (const label of [
            `stages ${card.taxonomy.stages.join(',')}`,
            card.taxonomy.mode,
            card.taxonomy.level,
        ]) {
            const badge = document.createElement('span');
            badge.className = 'badge';
            badge.textContent = label;
            badges.appendChild(badge);
        }
        element.appendChild(badges);

        const state = document.createElement('div');
        state.className = 'card-state';
        state.textContent = `${card.status} / verdict: ${card.verdict}`;
        element.appendChild(state);

        if (card.stale) {
            const flag = document.createElement('div');
            flag.className = 'stale-flag';
            flag.textContent = 're-assessment required';
            element.appendChild(flag);
        }
        if (card.status === 'residual' && card.alert) {
            const flag = document.createElement('div');
            flag.className = 'residual-flag';
            flag.textContent = `residual: alerted ${card.alert.recipients.join(', ')}`;
            element.appendChild(flag);
        }

        element.addEventListener('click', () => this.onSelectCard?.(card));
        return element;
    }
}
