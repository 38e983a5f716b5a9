// Typed client for the sheetstruct session service. The UI computes nothing
// structural itself; every overlay and panel derives from these responses.

export interface CellValue {
  kind: "number" | "text" | "bool" | "error" | "blank";
  value?: number | string | boolean;
  code?: string;
}

export interface WorkbookCell {
  addr: string;
  kind: "number" | "text" | "bool" | "formula";
  value?: number | string | boolean;
  formula?: string;
}

export interface WorkbookSheet {
  name: string;
  cells: WorkbookCell[];
}

export interface WorkbookDoc {
  version: string;
  sheets: WorkbookSheet[];
}

export interface WorkbookResponse {
  workbook: WorkbookDoc;
  values: Record<string, CellValue>;
}

export interface RenderItem {
  range: string;
  style: number;
  role: "formula-group" | "reference-group";
  group?: string;
  owner?: string;
  slot?: number;
}

export interface RenderSet {
  perspective: string;
  items: RenderItem[];
  edges: [string, string][];
}

export interface ModelGroup {
  id: string;
  range: string;
  formula: string;
  cells: number;
}

export interface StructureModel {
  groups: ModelGroup[];
  refGroups: { owner: string; slot: number; range: string; fragmented: boolean }[];
  edges: [string, string][];
}

export interface Violation {
  id: string;
  kind: string;
  focus: string;
  groups: string[];
  new: boolean;
  message: string;
}

export interface RepairAction {
  addr: string;
  set?: { kind: string; value?: unknown; formula?: string } | "<input>";
  clear?: boolean;
}

export interface RepairCandidate {
  id: string;
  description: string;
  actions: RepairAction[];
  requiresInput: { prompt: string } | null;
}

export interface SoundnessReport {
  clean: boolean;
  violations: Violation[];
  candidates: Record<string, RepairCandidate[]>;
}

export interface PlanEditJson {
  addr: string;
  content: { kind: string; value?: unknown; formula?: string } | null;
}

export interface RefactoringPlan {
  op: string;
  params: Record<string, unknown>;
  valueImpact: "preserving" | "altering";
  affected: string[];
  edits: PlanEditJson[];
  predictedGroups: { range: string; formula: string; cells: number }[];
}

export interface MutationResponse {
  changedValues: Record<string, CellValue | null>;
  report: SoundnessReport;
  structure?: StructureModel;
}

export interface RefactoringResponse extends Partial<MutationResponse> {
  plan: RefactoringPlan;
}

export interface ApiError {
  code: string;
  message: string;
  [key: string]: unknown;
}

export class ServiceError extends Error {
  constructor(public status: number, public error: ApiError) {
    super(error.message);
  }
}

export type Perspective =
  | "formula-groups"
  | "reference-groups"
  | "cell"
  | "graph"
  | "model";

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown,
                           contentType = "application/json"): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      (init.headers as Record<string, string>)["content-type"] = contentType;
      init.body = typeof body === "string" ? body : JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: { error?: ApiError };
      try {
        payload = await response.json();
      } catch {
        payload = {};
      }
      throw new ServiceError(response.status,
        payload.error ?? { code: "Unknown", message: response.statusText });
    }
    return response.json() as Promise<T>;
  }

  createSession(workbookJson: string): Promise<{ sessionId: string }> {
    return this.request("POST", "/sessions", workbookJson);
  }

  createSessionFromCsv(csv: string): Promise<{ sessionId: string }> {
    return this.request("POST", "/sessions", csv, "text/csv");
  }

  getWorkbook(session: string): Promise<WorkbookResponse> {
    return this.request("GET", `/sessions/${session}/workbook`);
  }

  getStructure(session: string, perspective: Perspective,
               params: { group?: string; addr?: string } = {}):
      Promise<RenderSet> {
    const query = new URLSearchParams({ perspective });
    if (params.group) query.set("group", params.group);
    if (params.addr) query.set("addr", params.addr);
    return this.request("GET", `/sessions/${session}/structure?${query}`);
  }

  getModel(session: string): Promise<StructureModel> {
    return this.request(
      "GET", `/sessions/${session}/structure?perspective=model`);
  }

  getViolations(session: string): Promise<SoundnessReport> {
    return this.request("GET", `/sessions/${session}/violations`);
  }

  postEdits(session: string, edits: { addr: string; input: string | null }[]):
      Promise<MutationResponse> {
    return this.request("POST", `/sessions/${session}/edits`, edits);
  }

  postRepair(session: string, candidateId: string, input?: string):
      Promise<MutationResponse> {
    const body = input === undefined ? {} : { input };
    return this.request(
      "POST", `/sessions/${session}/repairs/${candidateId}`, body);
  }

  postRefactoring(session: string, op: string,
                  params: Record<string, unknown>, dryRun: boolean):
      Promise<RefactoringResponse> {
    return this.request("POST", `/sessions/${session}/refactorings`,
      { op, params, dryRun });
  }

  postUndo(session: string): Promise<MutationResponse> {
    return this.request("POST", `/sessions/${session}/undo`);
  }

  putSettings(session: string, soundnessEnabled: boolean):
      Promise<{ soundnessEnabled: boolean }> {
    return this.request("PUT", `/sessions/${session}/settings`,
      { soundnessEnabled });
  }
}
