// Refactoring dialog: builds a dry-run plan, shows the valueImpact badge,
// highlights the edit targets, and offers apply/cancel. NoSpace errors flash
// the colliding range.

import { RefactoringPlan, ServiceError } from "./api.js";
import { parseRange, rectContains } from "./a1.js";
import { Store } from "./state.js";

export class PlanPreview {
  private container: HTMLElement;
  private pending: { op: string; params: Record<string, unknown> } | null
    = null;

  constructor(root: HTMLElement, private store: Store,
              private grid: HTMLElement) {
    this.container = document.createElement("div");
    this.container.className = "plan-preview hidden";
    root.appendChild(this.container);
  }

  get element(): HTMLElement {
    return this.container;
  }

  async preview(op: string, params: Record<string, unknown>): Promise<void> {
    try {
      const plan = await this.store.previewRefactoring(op, params);
      this.pending = { op, params };
      this.render(plan);
    } catch (error) {
      if (error instanceof ServiceError && error.error.code === "NoSpace") {
        this.flashRange(String(error.error.overlap ?? ""));
      }
      throw error;
    }
  }

  private render(plan: RefactoringPlan): void {
    this.container.innerHTML = "";
    this.container.classList.remove("hidden");

    const badge = document.createElement("span");
    badge.className = `impact-badge ${plan.valueImpact}`;
    badge.textContent = plan.valueImpact;
    this.container.appendChild(badge);

    const targets = document.createElement("div");
    targets.className = "plan-targets";
    for (const edit of plan.edits) {
      const chip = document.createElement("span");
      chip.className = edit.content === null ? "plan-clear" : "plan-set";
      chip.textContent = edit.addr;
      targets.appendChild(chip);
      this.markCell(edit.addr, edit.content === null);
    }
    this.container.appendChild(targets);

    const predicted = document.createElement("div");
    predicted.className = "plan-predicted";
    predicted.textContent = plan.predictedGroups
      .map((g) => `${g.range} ${g.formula}`).join("  |  ");
    this.container.appendChild(predicted);

    const apply = document.createElement("button");
    apply.className = "plan-apply";
    apply.textContent = "Apply";
    apply.addEventListener("click", () => void this.apply());
    this.container.appendChild(apply);

    const cancel = document.createElement("button");
    cancel.className = "plan-cancel";
    cancel.textContent = "Cancel";
    cancel.addEventListener("click", () => this.close());
    this.container.appendChild(cancel);
  }

  private async apply(): Promise<void> {
    if (!this.pending) return;
    const { op, params } = this.pending;
    await this.store.applyRefactoring(op, params);
    this.close();
  }

  close(): void {
    this.pending = null;
    this.container.classList.add("hidden");
    this.container.innerHTML = "";
    this.grid.querySelectorAll(".plan-target, .plan-target-clear")
      .forEach((cell) => {
        cell.classList.remove("plan-target", "plan-target-clear");
      });
  }

  private markCell(addr: string, isClear: boolean): void {
    const cell = this.grid.querySelector<HTMLElement>(
      `[data-addr="${addr}"]`);
    cell?.classList.add(isClear ? "plan-target-clear" : "plan-target");
  }

  private flashRange(rangeA1: string): void {
    if (!rangeA1) return;
    const rect = parseRange(rangeA1);
    const cells = this.grid.querySelectorAll<HTMLElement>("[data-addr]");
    cells.forEach((cell) => {
      const col = parseInt(cell.dataset.col ?? "0", 10);
      const row = parseInt(cell.dataset.row ?? "0", 10);
      if (rectContains(rect, col, row)) {
        cell.classList.add("collision-flash");
        setTimeout(() => cell.classList.remove("collision-flash"), 900);
      }
    });
  }
}
