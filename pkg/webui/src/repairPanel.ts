// Non-modal repair panel plus the status sidebar. The panel lists the
// current report's violations with their candidates; dismissing a violation
// moves it to the sidebar without resolving it. Candidates that require
// input render an inline prompt.

import { RepairCandidate, SoundnessReport, Violation } from "./api.js";
import { Store } from "./state.js";

export class RepairPanel {
  private panel: HTMLElement;
  private sidebar: HTMLElement;

  constructor(root: HTMLElement, private store: Store) {
    this.panel = document.createElement("div");
    this.panel.className = "repair-panel";
    this.sidebar = document.createElement("div");
    this.sidebar.className = "status-sidebar";
    root.appendChild(this.panel);
    root.appendChild(this.sidebar);
  }

  get element(): HTMLElement {
    return this.panel;
  }

  render(): void {
    const report = this.store.state.report;
    const dismissed = new Set(this.store.state.dismissed);
    this.panel.innerHTML = "";
    this.sidebar.innerHTML = "";
    if (!report || report.clean) {
      this.panel.classList.add("hidden");
      return;
    }
    this.panel.classList.remove("hidden");
    for (const violation of report.violations) {
      if (dismissed.has(violation.id)) {
        this.sidebar.appendChild(this.sidebarEntry(violation));
      } else {
        this.panel.appendChild(this.violationCard(report, violation));
      }
    }
  }

  private sidebarEntry(violation: Violation): HTMLElement {
    const entry = document.createElement("div");
    entry.className = "sidebar-violation";
    entry.dataset.violation = violation.id;
    entry.textContent = `${violation.kind} at ${violation.focus}`;
    return entry;
  }

  private violationCard(report: SoundnessReport,
                        violation: Violation): HTMLElement {
    const card = document.createElement("div");
    card.className = "violation-card";
    card.dataset.violation = violation.id;
    if (violation.new) card.classList.add("new");

    const title = document.createElement("div");
    title.className = "violation-message";
    title.textContent = violation.message;
    card.appendChild(title);

    const dismiss = document.createElement("button");
    dismiss.className = "dismiss";
    dismiss.textContent = "Dismiss";
    dismiss.addEventListener("click", () => {
      this.store.dismissViolation(violation.id);
      this.render();
    });
    card.appendChild(dismiss);

    for (const candidate of report.candidates[violation.id] ?? []) {
      card.appendChild(this.candidateRow(candidate));
    }
    return card;
  }

  private candidateRow(candidate: RepairCandidate): HTMLElement {
    const row = document.createElement("div");
    row.className = "candidate";
    row.dataset.candidate = candidate.id;

    const button = document.createElement("button");
    button.className = "apply-candidate";
    button.textContent = candidate.description;

    if (candidate.requiresInput) {
      const input = document.createElement("input");
      input.className = "candidate-input";
      input.placeholder = candidate.requiresInput.prompt ?? "value";
      row.appendChild(input);
      button.addEventListener("click", () => {
        void this.store.applyRepair(candidate.id, input.value);
      });
    } else {
      button.addEventListener("click", () => {
        void this.store.applyRepair(candidate.id);
      });
    }
    row.appendChild(button);
    return row;
  }
}
