/** Session view state. One store per page; every mutation notifies listeners. */

import { ApiClient, ApiError } from "./api";
import type { QueryAxiom, SessionConfig, SessionSnapshot } from "./types";

export type AnswerMode = "labels" | "whole";

export interface UiSessionView {
  sessionId: string | null;
  snapshot: SessionSnapshot | null;
  /** The query currently awaiting an answer; null once finished. */
  pendingQuery: QueryAxiom[] | null;
  answerMode: AnswerMode;
  /** Per-axiom true/false choices for the pending query, keyed by axiom id. */
  draft: Map<number, boolean>;
  /** Answer buttons are disabled while a request is in flight. */
  inFlight: boolean;
  /** Inline error on the create form (parse errors, bad config, …). */
  formError: string | null;
  /** Banner for network failures and rejected answers; retryable. */
  banner: string | null;
}

function emptyView(): UiSessionView {
  return {
    sessionId: null,
    snapshot: null,
    pendingQuery: null,
    answerMode: "labels",
    draft: new Map(),
    inFlight: false,
    formError: null,
    banner: null,
  };
}

const isNetworkFailure = (error: unknown) => !(error instanceof ApiError);

export class SessionStore {
  private view_: UiSessionView = emptyView();
  private listeners: Array<() => void> = [];

  constructor(private readonly client: ApiClient) {}

  get view(): UiSessionView {
    return this.view_;
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  private patch(changes: Partial<UiSessionView>): void {
    this.view_ = { ...this.view_, ...changes };
    this.notify();
  }

  /** Create a session and fetch its first query. */
  async start(kbText: string, config: SessionConfig): Promise<void> {
    if (this.view_.inFlight) return;
    this.patch({ ...emptyView(), inFlight: true });
    try {
      const snapshot = await this.client.createSession(kbText, config);
      this.view_ = {
        ...emptyView(),
        sessionId: snapshot.sessionId,
        snapshot,
        inFlight: true,
      };
      this.notify();
      await this.pullQuery();
      this.patch({ inFlight: false });
    } catch (error) {
      if (isNetworkFailure(error)) {
        this.patch({ inFlight: false, banner: "service unreachable — check the server and retry" });
      } else {
        this.patch({ inFlight: false, formError: (error as ApiError).message });
      }
    }
  }

  setMode(mode: AnswerMode): void {
    if (mode !== this.view_.answerMode) this.patch({ answerMode: mode, draft: new Map() });
  }

  setLabel(axiomId: number, value: boolean): void {
    const draft = new Map(this.view_.draft);
    draft.set(axiomId, value);
    this.patch({ draft });
  }

  clearLabel(axiomId: number): void {
    const draft = new Map(this.view_.draft);
    draft.delete(axiomId);
    this.patch({ draft });
  }

  /** The label list that would be posted: presentation order, labelled axioms only. */
  orderedLabels(): [number, boolean][] {
    const query = this.view_.pendingQuery ?? [];
    const labels: [number, boolean][] = [];
    for (const axiom of query) {
      const value = this.view_.draft.get(axiom.id);
      if (value !== undefined) labels.push([axiom.id, value]);
    }
    return labels;
  }

  async submitLabels(): Promise<void> {
    const labels = this.orderedLabels();
    if (labels.length === 0) return;
    await this.submit({ labels });
  }

  async submitWhole(value: boolean): Promise<void> {
    await this.submit({ whole: value });
  }

  /** Recover after a banner: refetch state and pending query. */
  async retry(): Promise<void> {
    if (this.view_.sessionId === null || this.view_.inFlight) return;
    this.patch({ inFlight: true, banner: null });
    try {
      await this.refresh();
      this.patch({ inFlight: false });
    } catch (error) {
      this.patch({ inFlight: false, banner: describe(error) });
    }
  }

  private async submit(body: { labels: [number, boolean][] } | { whole: boolean }): Promise<void> {
    const sessionId = this.view_.sessionId;
    if (sessionId === null || this.view_.inFlight || this.view_.pendingQuery === null) return;
    this.patch({ inFlight: true });
    try {
      const snapshot = await this.client.postAnswer(sessionId, body);
      this.patch({ snapshot, pendingQuery: null, draft: new Map(), banner: null });
      await this.pullQuery();
      this.patch({ inFlight: false });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // lost a race (double click, second tab): resync silently
        try {
          await this.refresh();
          this.patch({ inFlight: false });
        } catch (inner) {
          this.patch({ inFlight: false, banner: describe(inner) });
        }
      } else if (isNetworkFailure(error)) {
        this.patch({ inFlight: false, banner: "service unreachable — check the server and retry" });
      } else {
        this.patch({ inFlight: false, banner: (error as ApiError).message });
      }
    }
  }

  private async pullQuery(): Promise<void> {
    const sessionId = this.view_.sessionId;
    if (sessionId === null) return;
    const response = await this.client.getQuery(sessionId);
    if (response.finished) {
      this.patch({ pendingQuery: null });
    } else {
      this.patch({ pendingQuery: response.query, draft: new Map() });
    }
  }

  private async refresh(): Promise<void> {
    const sessionId = this.view_.sessionId;
    if (sessionId === null) return;
    const snapshot = await this.client.getState(sessionId);
    this.patch({ snapshot, draft: new Map() });
    await this.pullQuery();
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  return "service unreachable — check the server and retry";
}
