/** Wire types, mirroring the session service's JSON bodies. */

export interface SessionConfig {
  queryType: "sq" | "normal";
  heuristic: "ent" | "spl";
  leadingCap: number;
  faultProbsText?: string | null;
}

export interface QueryAxiom {
  id: number;
  text: string;
}

export interface DiagnosisView {
  axiomIds: number[];
  axioms: string[];
  probability: number;
}

export interface ResultView {
  axiomIds: number[];
  axioms: string[];
}

export interface HistoryEntry {
  query: { axiomIds: number[] };
  answer: { kind: string; labels: [number, boolean][]; effort: number };
}

export interface Metrics {
  numQueries: number;
  numAxioms: number;
  totalSelectionNanos: number;
  perIterationNanos: number[];
}

export interface SessionSnapshot {
  sessionId: string;
  finished: boolean;
  result: ResultView | null;
  diagnoses: DiagnosisView[];
  complete: boolean;
  history: HistoryEntry[];
  metrics: Metrics;
}

export type QueryResponse =
  | { finished: false; query: QueryAxiom[] }
  | { finished: true; result: ResultView };

export type AnswerBody = { labels: [number, boolean][] } | { whole: boolean };
