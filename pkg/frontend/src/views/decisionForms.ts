// Decision forms: triage, plan, result, treat, residual. Forms validate the
// obvious client-side (non-empty justification, kind-specific fields) but the
// server stays authoritative; its stable error codes map back onto fields.

import { ApiClient, ApiError } from '../api/client';
import { MODE_CRITERION_KINDS } from '../api/types';
import type {
    Criterion,
    CriterionKind,
    HazardCard,
    PlanBody,
    ResultBody,
    StatusSummary,
} from '../api/types';

export type UpdatedHandler = (status: StatusSummary) => void;

/** Which form field a service error code points at. */
const ERROR_FIELD: Record<string, string> = {
    'justification-required': 'justification',
    'participant-role-required': 'decidedBy',
    'unknown-participant': 'decidedBy',
    'mode-mismatch': 'criterionKind',
    'signoff-required': 'signoff',
    'reviewer-required': 'reviewer',
    'criterion-invalid': 'criterion',
    'kind-mismatch': 'input',
    'non-finite-value': 'input',
    'recipients-required': 'recipients',
    'no-nontolerable-verdict': 'form',
    'invalid-status': 'form',
    'not-a-candidate': 'form',
    'stage-not-open': 'form',
};

function fieldRow(labelText: string, input: HTMLElement, fieldKey: string): HTMLElement {
    const row = document.createElement('label');
    row.className = 'field';
    row.dataset.field = fieldKey;
    const caption = document.createElement('span');
    caption.textContent = labelText;
    row.appendChild(caption);
    row.appendChild(input);
    return row;
}

function textInput(name: string, placeholder = ''): HTMLInputElement {
    const input = document.createElement('input');
    input.type = 'text';
    input.name = name;
    input.placeholder = placeholder;
    return input;
}

export abstract class DecisionForm {
    readonly element: HTMLFormElement;
    onUpdated: UpdatedHandler | null = null;

    constructor(
        protected readonly client: ApiClient,
        protected readonly projectId: string,
        protected readonly card: HazardCard,
        kind: string,
    ) {
        this.element = document.createElement('form');
        this.element.className = `decision-form form-${kind}`;
        this.element.noValidate = true;
        this.element.addEventListener('submit', (event) => {
            event.preventDefault();
            void this.submit();
        });
    }

    protected abstract send(): Promise<{ status: StatusSummary }>;

    /** Client-side completeness check; returns the field key to flag, if any. */
    protected precheck(): string | null {
        return null;
    }

    async submit(): Promise<void> {
        this.clearErrors();
        const incomplete = this.precheck();
        if (incomplete) {
            this.flagField(incomplete, 'required');
            return;
        }
        try {
            const { status } = await this.send();
            this.onUpdated?.(status);
        } catch (error) {
            if (error instanceof ApiError) {
                this.flagField(ERROR_FIELD[error.code] ?? 'form', `${error.code}: ${error.message}`);
            } else {
                this.flagField('form', String(error));
            }
        }
    }

    protected clearErrors(): void {
        for (const flagged of Array.from(this.element.querySelectorAll('.field-error'))) {
            flagged.classList.remove('field-error');
        }
        for (const message of Array.from(this.element.querySelectorAll('.field-message'))) {
            message.remove();
        }
    }

    protected flagField(fieldKey: string, message: string): void {
        const target =
            this.element.querySelector<HTMLElement>(`[data-field="${fieldKey}"]`) ?? this.element;
        target.classList.add('field-error');
        const note = document.createElement('div');
        note.className = 'field-message';
        note.textContent = message;
        target.appendChild(note);
    }

    protected value(name: string): string {
        const input = this.element.querySelector<HTMLInputElement | HTMLTextAreaElement>(`[name="${name}"]`);
        return input ? input.value.trim() : '';
    }

    protected submitButton(label: string): HTMLButtonElement {
        const button = document.createElement('button');
        button.type = 'submit';
        button.textContent = label;
        return button;
    }
}

export class TriageForm extends DecisionForm {
    constructor(client: ApiClient, projectId: string, card: HazardCard, participants: string[]) {
        super(client, projectId, card, 'triage');
        const decision = document.createElement('select');
        decision.name = 'decision';
        for (const option of ['include', 'exclude']) {
            const element = document.createElement('option');
            element.value = option;
            element.textContent = option;
            decision.appendChild(element);
        }
        this.element.appendChild(fieldRow('Decision', decision, 'decision'));

        const justification = document.createElement('textarea');
        justification.name = 'justification';
        justification.placeholder = 'Clear argumentation for this decision (required)';
        this.element.appendChild(fieldRow('Justification', justification, 'justification'));

        const deciders = document.createElement('div');
        deciders.dataset.field = 'decidedBy';
        for (const name of participants) {
            const label = document.createElement('label');
            const checkbox = document.createElement('input');
            checkbox.type = 'checkbox';
            checkbox.name = 'decidedBy';
            checkbox.value = name;
            label.appendChild(checkbox);
            label.appendChild(document.createTextNode(name));
            deciders.appendChild(label);
        }
        this.element.appendChild(fieldRow('Decided by', deciders, 'decidedBy'));
        this.element.appendChild(this.submitButton('Record triage'));
    }

    protected precheck(): string | null {
        if (!this.value('justification')) return 'justification';
        if (this.decidedBy().length === 0) return 'decidedBy';
        return null;
    }

    private decidedBy(): string[] {
        return Array.from(
            this.element.querySelectorAll<HTMLInputElement>('input[name="decidedBy"]:checked'),
        ).map((input) => input.value);
    }

    protected send() {
        return this.client.triage(this.projectId, this.card.definitionId, {
            decision: this.value('decision') as 'include' | 'exclude',
            justification: this.value('justification'),
            decidedBy: this.decidedBy(),
        });
    }
}

export class PlanForm extends DecisionForm {
    private readonly kindSelect: HTMLSelectElement;
    private readonly kindSections: Record<CriterionKind, HTMLElement>;

    constructor(client: ApiClient, projectId: string, card: HazardCard) {
        super(client, projectId, card, 'plan');
        const mode = card.taxonomy.mode;
        const allowed = MODE_CRITERION_KINDS[mode];

        this.kindSelect = document.createElement('select');
        this.kindSelect.name = 'criterionKind';
        // only the kinds legal for this hazard's mode are selectable at all
        for (const kind of allowed) {
            const option = document.createElement('option');
            option.value = kind;
            option.textContent = kind;
            this.kindSelect.appendChild(option);
        }
        this.element.appendChild(fieldRow(`Criterion (${mode})`, this.kindSelect, 'criterionKind'));

        this.kindSections = {
            threshold: this.thresholdSection(),
            'relative-degradation': this.degradationSection(),
            'qualitative-review': this.reviewSection(),
        };
        for (const kind of allowed) {
            this.element.appendChild(this.kindSections[kind]);
        }
        this.kindSelect.addEventListener('change', () => this.showKind());

        this.element.appendChild(
            fieldRow('Method', textInput('method', 'How the measurement or review is produced'), 'method'),
        );
        this.element.appendChild(fieldRow('Planned by', textInput('plannedBy', 'comma-separated names'), 'plannedBy'));
        if (mode === 'procedural') {
            this.element.appendChild(
                fieldRow('Assigned reviewer', textInput('reviewer', 'second person, not an author'), 'reviewer'),
            );
        }
        if (mode === 'socio-technical') {
            this.element.appendChild(
                fieldRow('Signoff', textInput('signoff', 'participant: statement (required)'), 'signoff'),
            );
        }
        this.element.appendChild(this.submitButton('Save plan'));
        this.showKind();
    }

    get selectableKinds(): CriterionKind[] {
        return Array.from(this.kindSelect.options).map((option) => option.value as CriterionKind);
    }

    private showKind(): void {
        const selected = this.kindSelect.value as CriterionKind;
        for (const [kind, section] of Object.entries(this.kindSections)) {
            section.style.display = kind === selected ? '' : 'none';
        }
    }

    private thresholdSection(): HTMLElement {
        const section = document.createElement('div');
        section.dataset.criterion = 'threshold';
        section.appendChild(fieldRow('Metric', textInput('thresholdMetric'), 'criterion'));
        const comparator = document.createElement('select');
        comparator.name = 'comparator';
        for (const symbol of ['<=', '>=', '<', '>']) {
            const option = document.createElement('option');
            option.value = symbol;
            option.textContent = symbol;
            comparator.appendChild(option);
        }
        section.appendChild(fieldRow('Comparator', comparator, 'criterion'));
        section.appendChild(fieldRow('Bound', textInput('bound', 'decimal'), 'criterion'));
        return section;
    }

    private degradationSection(): HTMLElement {
        const section = document.createElement('div');
        section.dataset.criterion = 'relative-degradation';
        section.appendChild(fieldRow('Metric', textInput('degradationMetric'), 'criterion'));
        section.appendChild(fieldRow('Baseline', textInput('baseline', 'decimal'), 'criterion'));
        section.appendChild(fieldRow('Max decrease', textInput('maxDecrease', 'decimal >= 0'), 'criterion'));
        return section;
    }

    private reviewSection(): HTMLElement {
        const section = document.createElement('div');
        section.dataset.criterion = 'qualitative-review';
        const checklist = document.createElement('textarea');
        checklist.name = 'checklist';
        checklist.placeholder = 'One checklist item per line';
        section.appendChild(fieldRow('Review checklist', checklist, 'criterion'));
        return section;
    }

    private criterion(): Criterion {
        const kind = this.kindSelect.value as CriterionKind;
        if (kind === 'threshold') {
            return {
                kind,
                metricName: this.value('thresholdMetric'),
                comparator: this.value('comparator') as Criterion['comparator'],
                bound: this.value('bound'),
            };
        }
        if (kind === 'relative-degradation') {
            return {
                kind,
                metricName: this.value('degradationMetric'),
                baselineValue: this.value('baseline'),
                maxDecrease: this.value('maxDecrease'),
            };
        }
        return {
            kind,
            reviewChecklist: this.value('checklist')
                .split('\n')
                .map((item) => item.trim())
                .filter(Boolean),
        };
    }

    protected precheck(): string | null {
        if (!this.value('method')) return 'method';
        if (!this.value('plannedBy')) return 'plannedBy';
        return null;
    }

    protected send() {
        const signoff = this.value('signoff');
        const [participant, ...rest] = signoff.split(':');
        const body: PlanBody = {
            criterion: this.criterion(),
            method: this.value('method'),
            plannedBy: this.value('plannedBy')
                .split(',')
                .map((name) => name.trim())
                .filter(Boolean),
            signoffs: signoff ? [{ participant: participant.trim(), statement: rest.join(':').trim() }] : [],
            assignedReviewer: this.value('reviewer') || null,
        };
        return this.client.plan(this.projectId, this.card.definitionId, body);
    }
}

export class ResultForm extends DecisionForm {
    private readonly quantitative: boolean;

    constructor(client: ApiClient, projectId: string, card: HazardCard) {
        super(client, projectId, card, 'result');
        this.quantitative = card.plan?.criterion.kind !== 'qualitative-review';
        if (this.quantitative) {
            this.element.appendChild(fieldRow('Measured value', textInput('value', 'decimal'), 'input'));
        } else {
            const outcome = document.createElement('select');
            outcome.name = 'outcome';
            for (const option of ['pass', 'fail']) {
                const element = document.createElement('option');
                element.value = option;
                element.textContent = option;
                outcome.appendChild(element);
            }
            this.element.appendChild(fieldRow('Review outcome', outcome, 'input'));
            this.element.appendChild(fieldRow('Notes', textInput('notes'), 'input'));
            this.element.appendChild(fieldRow('Reviewer', textInput('reviewer'), 'reviewer'));
        }
        this.element.appendChild(this.submitButton('Record result'));
    }

    protected precheck(): string | null {
        if (this.quantitative && !this.value('value')) return 'input';
        if (!this.quantitative && !this.value('reviewer')) return 'reviewer';
        return null;
    }

    protected send() {
        const body: ResultBody = this.quantitative
            ? { measuredValue: this.value('value') }
            : {
                  reviewOutcome: this.value('outcome') as 'pass' | 'fail',
                  reviewNotes: this.value('notes'),
                  reviewer: this.value('reviewer'),
              };
        return this.client.result(this.projectId, this.card.definitionId, body);
    }
}

export class TreatForm extends DecisionForm {
    constructor(client: ApiClient, projectId: string, card: HazardCard) {
        super(client, projectId, card, 'treat');
        this.element.appendChild(
            fieldRow('Mitigation', textInput('description', 'What is being done'), 'description'),
        );
        this.element.appendChild(fieldRow('Technique', textInput('technique'), 'technique'));
        this.element.appendChild(fieldRow('Applied by', textInput('appliedBy'), 'appliedBy'));
        this.element.appendChild(this.submitButton('Record treatment'));
    }

    protected precheck(): string | null {
        if (!this.value('description')) return 'description';
        if (!this.value('technique')) return 'technique';
        if (!this.value('appliedBy')) return 'appliedBy';
        return null;
    }

    protected send() {
        return this.client.treat(this.projectId, this.card.definitionId, {
            description: this.value('description'),
            technique: this.value('technique'),
            appliedBy: this.value('appliedBy'),
        });
    }
}

export class ResidualForm extends DecisionForm {
    constructor(client: ApiClient, projectId: string, card: HazardCard) {
        super(client, projectId, card, 'residual');
        const justification = document.createElement('textarea');
        justification.name = 'justification';
        justification.placeholder = 'Why reduction to a tolerable level is impossible';
        this.element.appendChild(fieldRow('Justification', justification, 'justification'));
        this.element.appendChild(
            fieldRow('Alert recipients', textInput('recipients', 'comma-separated names'), 'recipients'),
        );
        this.element.appendChild(this.submitButton('Flag residual + alert'));
    }

    protected precheck(): string | null {
        if (!this.value('justification')) return 'justification';
        if (!this.value('recipients')) return 'recipients';
        return null;
    }

    protected send() {
        return this.client.residual(this.projectId, this.card.definitionId, {
            justification: this.value('justification'),
            alertRecipients: this.value('recipients')
                .split(',')
                .map((name) => name.trim())
                .filter(Boolean),
        });
    }
}

/** The forms applicable to a card in its current state. */
export function formsFor(
    client: ApiClient,
    projectId: string,
    card: HazardCard,
    participants: string[],
): DecisionForm[] {
    switch (card.status) {
        case 'candidate':
            return [new TriageForm(client, projectId, card, participants)];
        case 'included':
            return [new PlanForm(client, projectId, card)];
        case 'planned':
            return [new PlanForm(client, projectId, card), new ResultForm(client, projectId, card)];
        case 'treated':
            return [new ResultForm(client, projectId, card)];
        case 'assessed':
            return card.verdict === 'non-tolerable'
                ? [new TreatForm(client, projectId, card), new ResidualForm(client, projectId, card)]
                : [];
        default:
            return [];
    }
}
