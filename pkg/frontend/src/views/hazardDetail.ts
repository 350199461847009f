// Hazard detail: the per-instance decision timeline plus the forms that are
// legal in the instance's current state.

import { ApiClient } from '../api/client';
import type { HazardCard, StatusSummary } from '../api/types';
import { formsFor, UpdatedHandler } from './decisionForms';

function line(className: string, text: string): HTMLElement {
    const element = document.createElement('div');
    element.className = className;
    element.textContent = text;
    return element;
}

export class HazardDetail {
    onUpdated: UpdatedHandler | null = null;

    constructor(
        private readonly root: HTMLElement,
        private readonly client: ApiClient,
        private readonly projectId: string,
    ) {}

    clear(): void {
        this.root.innerHTML = '';
    }

    show(card: HazardCard, participants: string[]): void {
        this.root.innerHTML = '';
        const heading = document.createElement('h2');
        heading.textContent = `${card.definitionId}: ${card.title}`;
        this.root.appendChild(heading);
        this.root.appendChild(
            line(
                'detail-taxonomy',
                `stages ${card.taxonomy.stages.join(', ')}; mode ${card.taxonomy.mode}; level ${card.taxonomy.level}`,
            ),
        );
        this.root.appendChild(line('detail-state', `status ${card.status}; verdict ${card.verdict}`));
        if (card.priorStage !== null) {
            this.root.appendChild(line('detail-prior', `carried forward from stage ${card.priorStage}`));
        }

        const timeline = document.createElement('ul');
        timeline.className = 'detail-timeline';
        const add = (text: string, className = '') => {
            const item = document.createElement('li');
            if (className) item.className = className;
            item.textContent = text;
            timeline.appendChild(item);
        };
        if (card.triage) {
            add(`triage ${card.triage.decision} by ${card.triage.decidedBy.join(', ')}: ${card.triage.justification}`);
        }
        if (card.plan) {
            add(`plan (${card.plan.criterion.kind}): ${card.plan.method}`);
            for (const signoff of card.plan.signoffs) {
                add(`signoff ${signoff.participant}: ${signoff.statement}`);
            }
        }
        for (const record of card.records) {
            const value = 'measuredValue' in record.input ? record.input.measuredValue : record.input.reviewOutcome;
            add(
                `result ${record.at}: ${value} -> ${record.verdict}${record.stale ? ' [superseded]' : ''}`,
                record.stale ? 'record-stale' : 'record-live',
            );
        }
        for (const treatment of card.treatments) {
            add(`treatment ${treatment.appliedAt}: ${treatment.description} (${treatment.technique})`);
        }
        if (card.alert) {
            add(`developer alert to ${card.alert.recipients.join(', ')}`, 'alert-line');
        }
        this.root.appendChild(timeline);

        for (const form of formsFor(this.client, this.projectId, card, participants)) {
            form.onUpdated = (status: StatusSummary) => this.onUpdated?.(status);
            this.root.appendChild(form.element);
        }
    }
}
