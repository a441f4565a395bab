/** Service wire schema (v1) and the content<->background message contract. */

export const SCHEMA_VERSION = 1;

export interface WireComment {
  author: string;
  body: string;
}

export interface RefinePayload {
  schema_version: number;
  answer: string;
  comments: WireComment[];
  question: string;
}

export interface ChangeLogEntry {
  concern: string;
  change: string;
}

export interface RefineResult {
  schema_version: number;
  concerns: string[];
  used_question: boolean;
  change_log: ChangeLogEntry[];
  improved_answer: string;
}

export type RelayResponse =
  | { ok: true; result: RefineResult }
  | { ok: false; status: number; error: string };

export interface RefineMessage {
  type: "autocombat:refine";
  payload: RefinePayload;
}

export type InjectionState = "idle" | "pending" | "rendered" | "failed";

/** One refinable answer found on the page. */
export interface PageAnswer {
  element: Element;
  answerText: string;
  comments: WireComment[];
  questionText: string;
  state: InjectionState;
}
