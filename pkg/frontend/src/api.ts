/**
 * Typed client for the training-service HTTP+JSON API.
 *
 * This module is the console's only channel to the backend; no parse
 * logic lives on the client side.
 */

export interface FormsView {
  person: string;
  number: string;
  tense: string;
  extra: string[];
}

export interface FrameView {
  kind: "frame";
  surface: string;
  lex: string;
  synt: string;
  sem: string;
  forms: FormsView;
  span: [number, number] | null;
  extras: Record<string, string>;
  subs: { roles: string[]; child: FrameView }[];
}

export interface UnitView {
  kind: "unit";
  surface: string;
  span: [number, number];
  alternatives: FrameView[];
}

export type ElementView = FrameView | UnitView;

export interface TraceStep {
  type: string;
  [key: string]: unknown;
}

export interface SessionView {
  id: string;
  sentence: string;
  done: boolean;
  tokens: string[];
  stack: ElementView[];
  input: ElementView[];
  proposal: string | null;
  trace: TraceStep[];
  featureVector: { feature: string; value: string }[];
  confirms: number;
  overrides: number;
  history: { action: string; kind: string }[];
}

export interface ModelStats {
  variant: string;
  exampleCount: number;
  nodeCount: number;
  depth: number;
  trainingAccuracy: number;
}

export interface CorpusEntry {
  id: string;
  sentence: string;
  actionCount: number;
  confirms?: number;
  overrides?: number;
}

export interface ServiceError {
  code: string;
  message: string;
  step?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export class Client {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.base + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload as ServiceError);
    }
    return payload as T;
  }

  createSession(sentence: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { sentence });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  /** Post an action text, or the literal "CONFIRM" for the proposal. */
  postAction(id: string, action: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/actions`, { action });
  }

  undo(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  finish(id: string): Promise<{ log: string; path: string }> {
    return this.request("POST", `/sessions/${id}/finish`);
  }

  retrain(variant: string): Promise<ModelStats & { variant: string }> {
    return this.request("POST", "/retrain", { variant });
  }

  modelStats(): Promise<ModelStats> {
    return this.request("GET", "/model/stats");
  }

  corpus(): Promise<{ logs: CorpusEntry[] }> {
    return this.request("GET", "/corpus");
  }

  validateAction(action: string): Promise<{ ok: boolean; canonical?: string; code?: string }> {
    return this.request("POST", "/actions/validate", { action });
  }

  concepts(): Promise<{ syntactic: string[]; roles: string[] }> {
    return this.request("GET", "/resources/concepts");
  }
}
