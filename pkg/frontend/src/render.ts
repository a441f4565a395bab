import { MARKERS } from "./selectors";
import { RefineResult } from "./types";

/**
 * Panel construction. Everything is built with createElement/textContent,
 * never innerHTML from model output, so the page cannot be script-injected
 * through a refinement result.
 */

const FENCE = /^```(.*)$/;

/** Render fenced-markdown-ish text as prose paragraphs and code blocks. */
export function renderAnswerText(doc: Document, text: string): DocumentFragment {
  const fragment = doc.createDocumentFragment();
  const lines = text.split("\n");
  let prose: string[] = [];
  let code: string[] | null = null;
  let codeLang = "";

  const flushProse = () => {
    const chunk = prose.join("\n").trim();
    prose = [];
    if (!chunk) return;
    for (const para of chunk.split(/\n{2,}/)) {
      const p = doc.createElement("p");
      p.textContent = para;
      fragment.append(p);
    }
  };

  for (const line of lines) {
    const match = FENCE.exec(line);
    if (code === null && match) {
      flushProse();
      code = [];
      codeLang = match[1].trim();
    } else if (code !== null && match && match[1].trim() === "") {
      const pre = doc.createElement("pre");
      const codeEl = doc.createElement("code");
      if (codeLang) codeEl.className = `language-${codeLang}`;
      codeEl.textContent = code.join("\n") + (code.length ? "\n" : "");
      pre.append(codeEl);
      fragment.append(pre);
      code = null;
    } else if (code !== null) {
      code.push(line);
    } else {
      prose.push(line);
    }
  }
  if (code !== null) {
    // unterminated fence: keep the remainder visible as code
    const pre = doc.createElement("pre");
    const codeEl = doc.createElement("code");
    codeEl.textContent = code.join("\n");
    pre.append(codeEl);
    fragment.append(pre);
  }
  flushProse();
  return fragment;
}

export function buildResultPanel(
  doc: Document,
  result: RefineResult,
  originalAnswer: string,
): HTMLElement {
  const panel = doc.createElement("section");
  panel.setAttribute(MARKERS.panel, "true");
  panel.className = "autocombat-panel";

  const heading = doc.createElement("h3");
  heading.textContent = "Enhanced answer";
  panel.append(heading);

  if (result.improved_answer === originalAnswer) {
    const notice = doc.createElement("p");
    notice.className = "autocombat-notice";
    notice.textContent = "No actionable concerns found; the answer is unchanged.";
    panel.append(notice);
  }

  const body = doc.createElement("div");
  body.className = "autocombat-answer s-prose";
  body.append(renderAnswerText(doc, result.improved_answer));
  panel.append(body);

  if (result.change_log.length > 0) {
    const details = doc.createElement("details");
    details.className = "autocombat-changelog";
    const summary = doc.createElement("summary");
    summary.textContent = `What changed (${result.change_log.length})`;
    details.append(summary);
    const list = doc.createElement("ul");
    for (const entry of result.change_log) {
      const item = doc.createElement("li");
      const concern = doc.createElement("strong");
      concern.textContent = entry.concern;
      item.append(concern, doc.createTextNode(` — ${entry.change}`));
      list.append(item);
    }
    details.append(list);
    panel.append(details);
  }

  if (result.used_question) {
    const note = doc.createElement("p");
    note.className = "autocombat-used-question";
    note.textContent = "Question context was used to resolve the concerns.";
    panel.append(note);
  }
  return panel;
}

export function buildErrorBanner(doc: Document, message: string, onRetry: () => void): HTMLElement {
  const banner = doc.createElement("div");
  banner.setAttribute(MARKERS.panel, "true");
  banner.className = "autocombat-error";
  const text = doc.createElement("span");
  text.textContent = message;
  const retry = doc.createElement("button");
  retry.type = "button";
  retry.textContent = "Retry";
  retry.addEventListener("click", onRetry);
  banner.append(text, retry);
  return banner;
}
