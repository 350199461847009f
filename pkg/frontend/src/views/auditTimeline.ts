// Audit timeline: paginated event list with the chain-verification indicator.

import { ApiClient, ApiError } from '../api/client';

export class AuditTimeline {
    constructor(
        private readonly root: HTMLElement,
        private readonly client: ApiClient,
        private readonly projectId: string,
    ) {}

    async show(limit = 50, offset = 0): Promise<void> {
        this.root.innerHTML = '';
        try {
            const [verification, page] = await Promise.all([
                this.client.verifyAudit(this.projectId),
                this.client.getAuditEvents(this.projectId, limit, offset),
            ]);
            const indicator = document.createElement('div');
            indicator.className = verification.ok ? 'chain-ok' : 'chain-broken';
            indicator.textContent = verification.ok
                ? 'audit chain verified'
                : `audit chain BROKEN at event ${verification.brokenAt} (${verification.reason})`;
            this.root.appendChild(indicator);

            const list = document.createElement('ol');
            list.className = 'audit-events';
            for (const event of page.events) {
                const item = document.createElement('li');
                item.dataset.sequence = String(event.sequence);
                item.textContent = `#${event.sequence} ${event.at} ${event.actor}: ${event.eventKind}`;
                list.appendChild(item);
            }
            this.root.appendChild(list);

            const counter = document.createElement('div');
            counter.className = 'audit-count';
            counter.textContent = `showing ${page.events.length} of ${page.total} events`;
            this.root.appendChild(counter);
        } catch (error) {
            const banner = document.createElement('div');
            banner.className = 'error-banner';
            banner.textContent = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
            this.root.appendChild(banner);
        }
    }
}
