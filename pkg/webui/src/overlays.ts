// Structure overlays: paints a RenderSet onto the rendered grid. Formula
// groups get a filled background per style token, reference groups a hatched
// border. The palette is a color-blind-safe 8-set; tokens wrap around it.

import { RenderItem, RenderSet } from "./api.js";
import { parseRange, rectContains } from "./a1.js";

export const PALETTE = [
  "#88ccee", "#ddcc77", "#cc6677", "#117733",
  "#332288", "#aa4499", "#44aa99", "#999933",
];

export function fillFor(style: number): string {
  return PALETTE[style % PALETTE.length];
}

/** Removes previous overlay classes/styles from every grid cell. */
export function clearOverlays(grid: HTMLElement): void {
  const cells = grid.querySelectorAll<HTMLElement>("[data-addr]");
  cells.forEach((cell) => {
    cell.classList.remove("overlay-fill", "overlay-hatch");
    cell.style.removeProperty("--overlay-color");
    delete cell.dataset.overlayGroup;
    delete cell.dataset.overlayRole;
  });
}

/**
 * Applies a RenderSet to the grid DOM. Cells inside a formula-group item get
 * the `overlay-fill` class; cells inside a reference-group item get
 * `overlay-hatch`. A cell covered by both keeps both classes.
 */
export function applyOverlays(grid: HTMLElement, renderSet: RenderSet): void {
  clearOverlays(grid);
  const cells = grid.querySelectorAll<HTMLElement>("[data-addr]");
  for (const item of renderSet.items) {
    const rect = parseRange(item.range);
    cells.forEach((cell) => {
      const col = parseInt(cell.dataset.col ?? "0", 10);
      const row = parseInt(cell.dataset.row ?? "0", 10);
      if (!rectContains(rect, col, row)) return;
      decorate(cell, item);
    });
  }
}

function decorate(cell: HTMLElement, item: RenderItem): void {
  if (item.role === "formula-group") {
    cell.classList.add("overlay-fill");
    cell.style.setProperty("--overlay-color", fillFor(item.style));
    if (item.group) cell.dataset.overlayGroup = item.group;
    cell.dataset.overlayRole = "formula-group";
  } else {
    cell.classList.add("overlay-hatch");
    if (!cell.dataset.overlayRole) cell.dataset.overlayRole = "reference-group";
  }
}

/** Ranges currently covered by fill overlays, for assertions and tooltips. */
export function coveredRanges(grid: HTMLElement): Set<string> {
  const out = new Set<string>();
  grid.querySelectorAll<HTMLElement>(".overlay-fill").forEach((cell) => {
    if (cell.dataset.addr) out.add(cell.dataset.addr);
  });
  return out;
}
