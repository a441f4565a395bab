import { buildPayload, extractAnswerText, extractComments, extractQuestionText } from "./extract";
import { buildErrorBanner, buildResultPanel } from "./render";
import { MARKERS, SELECTORS } from "./selectors";
import { PageAnswer, RefineMessage, RefinePayload, RelayResponse } from "./types";

export type Relay = (payload: RefinePayload) => Promise<RelayResponse>;

export interface ControllerOptions {
  root: Document;
  relay: Relay;
}

/**
 * Owns every page mutation the extension makes. All mutations are appended
 * nodes carrying marker attributes; the original answer content is never
 * touched, so teardown() restores the page exactly.
 */
export class AnswerController {
  private readonly root: Document;
  private readonly relay: Relay;
  private readonly answers = new Map<Element, PageAnswer>();
  private readonly expanded = new WeakSet<Element>();
  private observer: MutationObserver | null = null;

  constructor(options: ControllerOptions) {
    this.root = options.root;
    this.relay = options.relay;
  }

  /** Find answers with at least one visible comment and inject one button each. */
  scan(): PageAnswer[] {
    const questionText = extractQuestionText(this.root);
    for (const element of Array.from(this.root.querySelectorAll(SELECTORS.answer))) {
      if (this.answers.has(element) || element.querySelector(`[${MARKERS.button}]`)) {
        continue;
      }
      if (!element.querySelector(SELECTORS.answerBody)) {
        console.debug("autocombat: unrecognized answer layout, skipping", element);
        continue;
      }
      this.expandCollapsedComments(element);
      const comments = extractComments(element);
      if (comments.length === 0) continue;

      const pageAnswer: PageAnswer = {
        element,
        answerText: extractAnswerText(element),
        comments,
        questionText,
        state: "idle",
      };
      this.answers.set(element, pageAnswer);
      this.injectButton(pageAnswer);
    }
    return Array.from(this.answers.values());
  }

  /** Watch for dynamically loaded comments; re-scan on subtree changes. */
  observe(): void {
    if (this.observer) return;
    this.observer = new MutationObserver(() => this.scan());
    this.observer.observe(this.root.body, { childList: true, subtree: true });
  }

  payloadFor(pageAnswer: PageAnswer): RefinePayload {
    return buildPayload(pageAnswer.answerText, pageAnswer.comments, pageAnswer.questionText);
  }

  async requestRefinement(pageAnswer: PageAnswer): Promise<void> {
    if (pageAnswer.state === "pending" || pageAnswer.state === "rendered") {
      return; // one in-flight request per answer; rendered panels stay
    }
    this.removeInjected(pageAnswer.element, `[${MARKERS.panel}]`);
    pageAnswer.state = "pending";
    this.buttonOf(pageAnswer)?.setAttribute("disabled", "true");

    let response: RelayResponse;
    try {
      response = await this.relay(this.payloadFor(pageAnswer));
    } catch (error) {
      response = { ok: false, status: 0, error: String(error) };
    }
    this.buttonOf(pageAnswer)?.removeAttribute("disabled");

    if (response.ok) {
      const panel = buildResultPanel(this.root, response.result, pageAnswer.answerText);
      pageAnswer.element.append(panel);
      pageAnswer.state = "rendered";
    } else {
      const message = response.status
        ? `Refinement failed (HTTP ${response.status}): ${response.error}`
        : `Refinement failed: ${response.error}`;
      const banner = buildErrorBanner(this.root, message, () => {
        pageAnswer.state = "idle";
        this.removeInjected(pageAnswer.element, `[${MARKERS.panel}]`);
        void this.requestRefinement(pageAnswer);
      });
      pageAnswer.element.append(banner);
      pageAnswer.state = "failed";
    }
  }

  /** Remove every injected node; the page returns to its pre-scan state. */
  teardown(): void {
    this.observer?.disconnect();
    this.observer = null;
    for (const selector of [`[${MARKERS.button}]`, `[${MARKERS.panel}]`]) {
      this.removeInjected(this.root, selector);
    }
    this.answers.clear();
  }

  /** Best-effort expansion of collapsed comment threads: click the site's
   * show-more link once; newly loaded comments re-enter through the
   * observer-driven re-scan. */
  private expandCollapsedComments(answer: Element): void {
    const link = answer.querySelector(SELECTORS.showMoreComments);
    if (link instanceof HTMLElement && !this.expanded.has(link)) {
      this.expanded.add(link);
      link.click();
    }
  }

  private injectButton(pageAnswer: PageAnswer): void {
    const button = this.root.createElement("button");
    button.type = "button";
    button.textContent = "AUTOCOMBAT";
    button.className = "autocombat-button";
    button.setAttribute(MARKERS.button, "true");
    button.addEventListener("click", () => void this.requestRefinement(pageAnswer));
    pageAnswer.element.append(button);
  }

  private buttonOf(pageAnswer: PageAnswer): Element | null {
    return pageAnswer.element.querySelector(`[${MARKERS.button}]`);
  }

  private removeInjected(scope: Document | Element, selector: string): void {
    for (const node of Array.from(scope.querySelectorAll(selector))) {
      node.remove();
    }
  }
}

/** Production relay: everything crosses to the background worker; the
 * content script itself never performs a cross-origin fetch. */
export function chromeRelay(payload: RefinePayload): Promise<RelayResponse> {
  const message: RefineMessage = { type: "autocombat:refine", payload };
  return new Promise((resolve) => {
    chrome.runtime.sendMessage(message, (response: RelayResponse | undefined) => {
      if (chrome.runtime.lastError || response === undefined) {
        resolve({
          ok: false,
          status: 0,
          error: chrome.runtime.lastError?.message ?? "background relay unavailable",
        });
      } else {
        resolve(response);
      }
    });
  });
}
