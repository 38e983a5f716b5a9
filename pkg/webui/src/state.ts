// GridViewState store. Holds everything needed to restore the view and
// serializes mutations: at most one mutating request is in flight, the rest
// queue client-side so the server sees them in order.

import {
  ApiClient, CellValue, MutationResponse, Perspective, RefactoringPlan,
  RenderSet, SoundnessReport, StructureModel, WorkbookResponse,
} from "./api.js";
import { parseCell, parseRange, rectContains } from "./a1.js";

export interface Viewport {
  topRow: number;
  leftCol: number;
  rows: number;
  cols: number;
}

export interface GridViewState {
  session: string | null;
  perspective: Perspective;
  viewport: Viewport;
  selected: string | null;
  selectedGroup: string | null;
  workbook: WorkbookResponse | null;
  renderSet: RenderSet | null;
  model: StructureModel | null;
  report: SoundnessReport | null;
  planPreview: RefactoringPlan | null;
  dismissed: string[];
  soundnessEnabled: boolean;
}

type Listener = (state: GridViewState) => void;

export class Store {
  state: GridViewState = {
    session: null,
    perspective: "formula-groups",
    viewport: { topRow: 1, leftCol: 1, rows: 40, cols: 16 },
    selected: null,
    selectedGroup: null,
    workbook: null,
    renderSet: null,
    model: null,
    report: null,
    planPreview: null,
    dismissed: [],
    soundnessEnabled: true,
  };

  private listeners: Listener[] = [];
  private queue: Promise<unknown> = Promise.resolve();

  constructor(public api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  patch(partial: Partial<GridViewState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  /** Serializes mutating requests; rejections propagate to the caller. */
  enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work, work);
    this.queue = next.catch(() => undefined);
    return next;
  }

  // -- session lifecycle ---------------------------------------------------

  async openSession(workbookJson: string): Promise<string> {
    const { sessionId } = await this.api.createSession(workbookJson);
    this.patch({ session: sessionId });
    await this.refreshAll();
    return sessionId;
  }

  async attachSession(sessionId: string): Promise<void> {
    this.patch({ session: sessionId });
    await this.refreshAll();
  }

  private get session(): string {
    if (!this.state.session) throw new Error("no session open");
    return this.state.session;
  }

  /** Re-fetches workbook, structure and report after any mutation. */
  async refreshAll(): Promise<void> {
    const session = this.session;
    const [workbook, renderSet, model, report] = await Promise.all([
      this.api.getWorkbook(session),
      this.fetchPerspective(),
      this.api.getModel(session),
      this.api.getViolations(session),
    ]);
    this.patch({ workbook, renderSet, model, report });
  }

  private fetchPerspective(): Promise<RenderSet> {
    const { perspective, selectedGroup, selected } = this.state;
    const params: { group?: string; addr?: string } = {};
    if (perspective === "reference-groups" && selectedGroup) {
      params.group = selectedGroup;
    }
    if (perspective === "cell" && selected) params.addr = selected;
    const kind = perspective === "model" ? "formula-groups" : perspective;
    return this.api.getStructure(this.session, kind, params);
  }

  /** Perspective switches are read-only: they never enqueue a mutation. */
  async setPerspective(perspective: Perspective): Promise<void> {
    this.patch({ perspective });
    const renderSet = await this.fetchPerspective();
    this.patch({ renderSet });
  }

  async selectCell(addr: string): Promise<void> {
    const group = this.state.model?.groups.find((g) =>
      coveredBy(g.range, addr));
    this.patch({ selected: addr, selectedGroup: group?.id ?? null });
    if (this.state.perspective === "cell"
        || this.state.perspective === "reference-groups") {
      const renderSet = await this.fetchPerspective();
      this.patch({ renderSet });
    }
  }

  // -- mutations -----------------------------------------------------------

  editCell(addr: string, input: string): Promise<MutationResponse> {
    return this.enqueue(async () => {
      const response = await this.api.postEdits(
        this.session, [{ addr, input: input === "" ? null : input }]);
      await this.refreshAll();
      return response;
    });
  }

  applyRepair(candidateId: string, input?: string): Promise<MutationResponse> {
    return this.enqueue(async () => {
      const response = await this.api.postRepair(
        this.session, candidateId, input);
      await this.refreshAll();
      return response;
    });
  }

  previewRefactoring(op: string, params: Record<string, unknown>):
      Promise<RefactoringPlan> {
    return this.enqueue(async () => {
      const { plan } = await this.api.postRefactoring(
        this.session, op, params, true);
      this.patch({ planPreview: plan });
      return plan;
    });
  }

  applyRefactoring(op: string, params: Record<string, unknown>):
      Promise<void> {
    return this.enqueue(async () => {
      await this.api.postRefactoring(this.session, op, params, false);
      this.patch({ planPreview: null });
      await this.refreshAll();
    });
  }

  undo(): Promise<void> {
    return this.enqueue(async () => {
      await this.api.postUndo(this.session);
      await this.refreshAll();
    });
  }

  setSoundness(enabled: boolean): Promise<void> {
    return this.enqueue(async () => {
      const result = await this.api.putSettings(this.session, enabled);
      this.patch({ soundnessEnabled: result.soundnessEnabled });
      await this.refreshAll();
    });
  }

  dismissViolation(violationId: string): void {
    this.patch({ dismissed: [...this.state.dismissed, violationId] });
  }

  // -- value helpers -------------------------------------------------------

  valueAt(sheet: string, addr: string): CellValue | undefined {
    return this.state.workbook?.values[`${sheet}!${addr}`];
  }

  formulaAt(sheet: string, addr: string): string | null {
    const sheetDoc = this.state.workbook?.workbook.sheets.find(
      (s) => s.name === sheet);
    const cell = sheetDoc?.cells.find((c) => c.addr === addr);
    if (!cell) return null;
    if (cell.kind === "formula") return cell.formula ?? null;
    return String(cell.value);
  }
}

function coveredBy(rangeA1: string, addr: string): boolean {
  const rect = parseRange(rangeA1);
  const cell = parseCell(addr);
  return rectContains(rect, cell.col, cell.row);
}
