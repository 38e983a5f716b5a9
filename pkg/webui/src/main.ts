// Application bootstrap: wires the store, grid, panels and toolbar to one
// session. The session id lives in the URL hash so a reload reattaches.

import { ApiClient, Perspective } from "./api.js";
import { parseRange } from "./a1.js";
import { GridView } from "./grid.js";
import { GraphPanel } from "./graph.js";
import { PlanPreview } from "./planPreview.js";
import { RepairPanel } from "./repairPanel.js";
import { Store } from "./state.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:7345";

export function bootstrap(root: HTMLElement,
                          baseUrl = DEFAULT_BASE_URL): Store {
  const api = new ApiClient(baseUrl);
  const store = new Store(api);

  const toolbar = document.createElement("div");
  toolbar.className = "toolbar";
  root.appendChild(toolbar);

  const gridHost = document.createElement("div");
  gridHost.className = "grid-host";
  root.appendChild(gridHost);

  const sidePanel = document.createElement("div");
  sidePanel.className = "side-panel";
  root.appendChild(sidePanel);

  const grid = new GridView(gridHost, store, {
    onSelect: (addr) => void store.selectCell(addr),
    onEdit: (addr, text) => {
      store.editCell(addr, text).catch((error) => {
        showInlineError(gridHost, addr, String(error.message ?? error));
      });
    },
  });

  const repairPanel = new RepairPanel(sidePanel, store);
  const planPreview = new PlanPreview(sidePanel, store, grid.element);
  const graphPanel = new GraphPanel(sidePanel, {
    onNodeClick: (_groupId, range) => {
      const rect = parseRange(range);
      grid.scrollTo(rect.c1, rect.r1);
      void store.selectCell(`${colRow(rect.c1, rect.r1)}`);
    },
  });

  buildToolbar(toolbar, store, planPreview);

  store.subscribe(() => {
    grid.render();
    repairPanel.render();
    graphPanel.render(store.state.model);
  });

  const fromHash = window.location.hash.replace(/^#/, "");
  if (fromHash) {
    store.attachSession(fromHash).catch(() => {
      window.location.hash = "";
    });
  }
  store.subscribe((state) => {
    if (state.session) window.location.hash = state.session;
  });

  return store;
}

function colRow(col: number, row: number): string {
  let letters = "";
  let n = col;
  while (n > 0) {
    letters = String.fromCharCode(65 + ((n - 1) % 26)) + letters;
    n = Math.floor((n - 1) / 26);
  }
  return `${letters}${row}`;
}

function buildToolbar(toolbar: HTMLElement, store: Store,
                      planPreview: PlanPreview): void {
  const perspectives: Perspective[] =
    ["formula-groups", "reference-groups", "cell", "graph"];
  const select = document.createElement("select");
  select.className = "perspective-select";
  for (const perspective of perspectives) {
    const option = document.createElement("option");
    option.value = perspective;
    option.textContent = perspective;
    select.appendChild(option);
  }
  select.addEventListener("change", () => {
    void store.setPerspective(select.value as Perspective);
  });
  toolbar.appendChild(select);

  const soundness = document.createElement("input");
  soundness.type = "checkbox";
  soundness.checked = true;
  soundness.className = "soundness-toggle";
  soundness.addEventListener("change", () => {
    void store.setSoundness(soundness.checked);
  });
  toolbar.appendChild(soundness);

  const undoButton = document.createElement("button");
  undoButton.className = "undo-button";
  undoButton.textContent = "Undo";
  undoButton.addEventListener("click", () => void store.undo());
  toolbar.appendChild(undoButton);

  const splitButton = document.createElement("button");
  splitButton.className = "split-button";
  splitButton.textContent = "Split group…";
  splitButton.addEventListener("click", () => {
    const group = store.state.selectedGroup;
    if (!group) return;
    const at = window.prompt("Split at subexpression:", "");
    if (at) void planPreview.preview("split", { group, at });
  });
  toolbar.appendChild(splitButton);
}

function showInlineError(gridHost: HTMLElement, addr: string,
                         message: string): void {
  const cell = gridHost.querySelector<HTMLElement>(`[data-addr="${addr}"]`);
  if (!cell) return;
  cell.classList.add("edit-error");
  cell.title = message;
  setTimeout(() => cell.classList.remove("edit-error"), 2000);
}
