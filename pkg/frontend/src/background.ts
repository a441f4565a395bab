import { RefineMessage, RefinePayload, RefineResult, RelayResponse } from "./types";

export const DEFAULT_BACKEND_URL = "http://127.0.0.1:8080";

/** POST the payload to the backend and normalize the outcome for the
 * content script: success carries the schema-v1 result, failure the status
 * and the server's error text. */
export async function relayRefinement(
  payload: RefinePayload,
  backendUrl: string,
  fetchFn: typeof fetch = fetch,
): Promise<RelayResponse> {
  let response: Response;
  try {
    response = await fetchFn(`${backendUrl.replace(/\/$/, "")}/refine`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  } catch (error) {
    return { ok: false, status: 0, error: `backend unreachable: ${String(error)}` };
  }

  let body: unknown;
  try {
    body = await response.json();
  } catch {
    return { ok: false, status: response.status, error: "backend returned non-JSON" };
  }

  if (!response.ok) {
    const doc = body as { error?: string; missing?: string[] };
    const detail = [doc.error, doc.missing?.length ? `missing: ${doc.missing.join(", ")}` : ""]
      .filter(Boolean)
      .join("; ");
    return { ok: false, status: response.status, error: detail || `HTTP ${response.status}` };
  }

  const result = body as RefineResult;
  if (typeof result.improved_answer !== "string" || !Array.isArray(result.change_log)) {
    return { ok: false, status: response.status, error: "backend result is malformed" };
  }
  return { ok: true, result };
}

export function isRefineMessage(message: unknown): message is RefineMessage {
  return (
    typeof message === "object" &&
    message !== null &&
    (message as RefineMessage).type === "autocombat:refine"
  );
}

export async function backendUrlFromStorage(): Promise<string> {
  try {
    const stored = await chrome.storage.sync.get({ backendUrl: DEFAULT_BACKEND_URL });
    return (stored.backendUrl as string) || DEFAULT_BACKEND_URL;
  } catch {
    return DEFAULT_BACKEND_URL;
  }
}
