// DOM grid renderer with a windowed viewport: only the visible row/col
// window is in the DOM, so large sheets stay responsive. Values and
// formulas come from the last workbook fetch; overlays are applied on top.

import { CellValue } from "./api.js";
import { cellName, colToLetters } from "./a1.js";
import { applyOverlays } from "./overlays.js";
import { Store } from "./state.js";

export interface GridCallbacks {
  onSelect: (addr: string) => void;
  onEdit: (addr: string, text: string) => void;
}

export function renderValue(value: CellValue | undefined): string {
  if (!value || value.kind === "blank") return "";
  if (value.kind === "error") return value.code ?? "#ERROR";
  if (value.kind === "bool") return value.value ? "TRUE" : "FALSE";
  if (value.kind === "number") {
    const num = value.value as number;
    return Number.isInteger(num) ? String(num) : String(num);
  }
  return String(value.value ?? "");
}

export class GridView {
  private table: HTMLTableElement;
  private formulaBar: HTMLInputElement;
  private sheet = "Sheet1";

  constructor(private root: HTMLElement, private store: Store,
              private callbacks: GridCallbacks) {
    this.formulaBar = document.createElement("input");
    this.formulaBar.className = "formula-bar";
    this.formulaBar.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && this.store.state.selected) {
        this.callbacks.onEdit(this.store.state.selected,
          this.formulaBar.value);
      }
    });
    this.table = document.createElement("table");
    this.table.className = "grid";
    root.appendChild(this.formulaBar);
    root.appendChild(this.table);
  }

  get element(): HTMLTableElement {
    return this.table;
  }

  /** Full re-render of the visible window plus overlay application. */
  render(): void {
    const state = this.store.state;
    const workbook = state.workbook;
    if (workbook && workbook.workbook.sheets.length > 0) {
      this.sheet = workbook.workbook.sheets[0].name;
    }
    const { topRow, leftCol, rows, cols } = state.viewport;
    this.table.innerHTML = "";

    const header = this.table.insertRow();
    header.appendChild(document.createElement("th"));
    for (let col = leftCol; col < leftCol + cols; col++) {
      const th = document.createElement("th");
      th.textContent = colToLetters(col);
      header.appendChild(th);
    }

    for (let row = topRow; row < topRow + rows; row++) {
      const tr = this.table.insertRow();
      const th = document.createElement("th");
      th.textContent = String(row);
      tr.appendChild(th);
      for (let col = leftCol; col < leftCol + cols; col++) {
        const addr = cellName(col, row);
        const td = tr.insertCell();
        td.dataset.addr = addr;
        td.dataset.col = String(col);
        td.dataset.row = String(row);
        td.textContent = renderValue(
          this.store.valueAt(this.sheet, addr));
        if (addr === state.selected) td.classList.add("selected");
        td.addEventListener("click", () => this.callbacks.onSelect(addr));
        td.addEventListener("dblclick", () => {
          const text = window.prompt(
            `Edit ${addr}`, this.store.formulaAt(this.sheet, addr) ?? "");
          if (text !== null) this.callbacks.onEdit(addr, text);
        });
      }
    }

    if (state.renderSet) applyOverlays(this.table, state.renderSet);
    this.updateFormulaBar();
  }

  private updateFormulaBar(): void {
    const selected = this.store.state.selected;
    this.formulaBar.value = selected
      ? this.store.formulaAt(this.sheet, selected) ?? ""
      : "";
  }

  /** Scrolls the viewport so the given rectangle's top-left is visible. */
  scrollTo(col: number, row: number): void {
    const viewport = this.store.state.viewport;
    if (col >= viewport.leftCol && col < viewport.leftCol + viewport.cols
        && row >= viewport.topRow && row < viewport.topRow + viewport.rows) {
      return;
    }
    this.store.patch({
      viewport: {
        ...viewport,
        topRow: Math.max(1, row - 2),
        leftCol: Math.max(1, col - 2),
      },
    });
  }
}
