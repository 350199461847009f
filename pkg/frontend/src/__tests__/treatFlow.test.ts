// The trade-off propagation flow as the operator sees it: treating AIH20
// makes the AIH3 card demand re-assessment. All state changes arrive via
// service round trips; the test counts them.

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { App } from '../app';
import { MockService } from './support/mockService';

import statusPretreat from '../fixtures/status_stage3_pretreat.json';
import hazardsPretreat from '../fixtures/hazards_stage3_pretreat.json';
import treatResponse from '../fixtures/treat_response.json';
import statusAfter from '../fixtures/status_stage3_after_treat.json';
import hazardsAfter from '../fixtures/hazards_stage3_after_treat.json';
import auditEvents from '../fixtures/audit_events_page.json';
import auditVerify from '../fixtures/audit_verify.json';

const PROJECT = 'higf-detector';

let service: MockService;
let root: HTMLElement;

beforeEach(() => {
    service = new MockService()
        .on('GET', `/projects/${PROJECT}/status`, statusPretreat)
        .on('GET', `/projects/${PROJECT}/stages/3/hazards`, hazardsPretreat)
        .on('GET', `/projects/${PROJECT}/audit/events`, auditEvents)
        .on('GET', `/projects/${PROJECT}/audit/verify`, auditVerify)
        .on('POST', `/projects/${PROJECT}/hazards/AIH20/treat`, treatResponse);
    service.install();
    root = document.createElement('div');
    document.body.appendChild(root);
});

afterEach(() => {
    vi.unstubAllGlobals();
    document.body.innerHTML = '';
});

describe('treating AIH20', () => {
    it('flags AIH3 as re-assessment required after the round trip', async () => {
        const app = new App(root, { projectId: PROJECT, actor: 'maier' });
        await app.start();

        // pre-treatment register: AIH20 non-tolerable, AIH3 live
        const aih20 = root.querySelector<HTMLElement>('[data-hazard="AIH20"]');
        expect(aih20!.textContent).toContain('non-tolerable');
        const aih3Before = root.querySelector<HTMLElement>('[data-hazard="AIH3"]');
        expect(aih3Before!.querySelector('.stale-flag')).toBeNull();

        // open the detail pane and fill the treatment form
        aih20!.click();
        const form = root.querySelector<HTMLFormElement>('#detail .form-treat');
        expect(form).not.toBeNull();
        form!.querySelector<HTMLInputElement>('[name="description"]')!.value = 'Re-train on augmented data';
        form!.querySelector<HTMLInputElement>('[name="technique"]')!.value = 'augmented-retraining';
        form!.querySelector<HTMLInputElement>('[name="appliedBy"]')!.value = 'maier';

        // after the mutation the service serves the post-treatment state
        service
            .once('GET', `/projects/${PROJECT}/status`, statusAfter)
            .once('GET', `/projects/${PROJECT}/stages/3/hazards`, hazardsAfter);

        const callsBefore = service.calls.length;
        form!.querySelector<HTMLButtonElement>('button[type="submit"]')!.click();
        await vi.waitFor(() => {
            if (!root.querySelector('[data-hazard="AIH3"] .stale-flag')) throw new Error('not yet');
        });

        // the treatment went over the wire...
        const treatCalls = service.callsTo('POST', `/projects/${PROJECT}/hazards/AIH20/treat`);
        expect(treatCalls).toHaveLength(1);
        expect(treatCalls[0].body).toEqual({
            description: 'Re-train on augmented data',
            technique: 'augmented-retraining',
            appliedBy: 'maier',
        });
        // ...and the board re-fetched the register instead of flipping locally
        expect(service.calls.length).toBeGreaterThan(callsBefore + 1);

        const aih3 = root.querySelector<HTMLElement>('[data-hazard="AIH3"]');
        expect(aih3!.querySelector('.stale-flag')!.textContent).toBe('re-assessment required');
        expect(aih3!.textContent).toContain('planned');

        const aih20After = root.querySelector<HTMLElement>('[data-hazard="AIH20"]');
        expect(aih20After!.querySelector('.stale-flag')).not.toBeNull();

        // blocking banner reflects the two pending re-assessments
        expect(root.querySelector('.blocking-banner')!.textContent).toContain('AIH3: re-assessment-pending');
    });

    it('never repaints the register without a service response', async () => {
        const app = new App(root, { projectId: PROJECT, actor: 'maier' });
        await app.start();
        const rendered = root.querySelectorAll('.hazard-card').length;
        expect(rendered).toBeGreaterThan(0);
        const statusCalls = service.callsTo('GET', `/projects/${PROJECT}/status`).length;
        const hazardCalls = service.callsTo('GET', `/projects/${PROJECT}/stages/3/hazards`).length;
        expect(statusCalls).toBeGreaterThan(0);
        expect(hazardCalls).toBeGreaterThan(0);
    });
});
