/**
 * Versioned DOM adapter: every selector the extension relies on lives here,
 * because the target site's markup drifts. Bump ADAPTER_VERSION on change.
 */
export const ADAPTER_VERSION = 1;

export const SELECTORS = {
  answer: "div.answer",
  answerBody: "div.s-prose, div.js-post-body",
  commentList: "ul.comments-list",
  comment: "li.comment",
  commentBody: ".comment-copy",
  commentAuthor: ".comment-user",
  commentDate: ".relativetime",
  question: "#question div.s-prose, #question div.js-post-body",
  questionTitle: "#question-header h1",
  showMoreComments: "a.js-show-link.comments-link",
} as const;

/** Marker attributes; also the cleanup inventory for reversible injection. */
export const MARKERS = {
  button: "data-autocombat-button",
  panel: "data-autocombat-panel",
  scanned: "data-autocombat-scanned",
} as const;
