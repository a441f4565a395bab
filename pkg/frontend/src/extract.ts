import { SELECTORS } from "./selectors";
import { RefinePayload, SCHEMA_VERSION, WireComment } from "./types";

/**
 * Flatten a rendered post body back into fenced-markdown-ish text: code
 * blocks become ```lang fences so the backend sees the same structure the
 * author wrote; prose keeps paragraph breaks.
 */
export function postBodyToText(body: Element): string {
  const parts: string[] = [];
  for (const child of Array.from(body.children)) {
    if (child.tagName === "PRE") {
      const code = child.querySelector("code");
      const text = (code ?? child).textContent ?? "";
      const lang = languageOf(code);
      parts.push("```" + lang + "\n" + ensureTrailingNewline(text) + "```");
    } else {
      const text = (child.textContent ?? "").trim();
      if (text) parts.push(text);
    }
  }
  return parts.join("\n\n");
}

function languageOf(code: Element | null): string {
  if (!code) return "";
  for (const cls of Array.from(code.classList)) {
    if (cls.startsWith("language-")) return cls.slice("language-".length);
    if (cls.startsWith("lang-")) return cls.slice("lang-".length);
  }
  return "";
}

function ensureTrailingNewline(text: string): string {
  return text.endsWith("\n") ? text : text + "\n";
}

export function extractComments(answer: Element): WireComment[] {
  const comments: WireComment[] = [];
  for (const node of Array.from(answer.querySelectorAll(SELECTORS.comment))) {
    const body = node.querySelector(SELECTORS.commentBody)?.textContent?.trim();
    if (!body) continue;
    const author = node.querySelector(SELECTORS.commentAuthor)?.textContent?.trim() ?? "";
    comments.push({ author, body });
  }
  return comments;
}

export function extractAnswerText(answer: Element): string {
  const body = answer.querySelector(SELECTORS.answerBody);
  return body ? postBodyToText(body) : "";
}

export function extractQuestionText(root: Document | Element): string {
  const title = root.querySelector(SELECTORS.questionTitle)?.textContent?.trim() ?? "";
  const body = root.querySelector(SELECTORS.question);
  const bodyText = body ? postBodyToText(body) : "";
  return [title, bodyText].filter(Boolean).join("\n\n");
}

export function buildPayload(
  answerText: string,
  comments: WireComment[],
  questionText: string,
): RefinePayload {
  return {
    schema_version: SCHEMA_VERSION,
    answer: answerText,
    comments,
    question: questionText,
  };
}
