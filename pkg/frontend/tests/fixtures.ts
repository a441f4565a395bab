import { RefinePayload, RefineResult } from "../src/types";

/** A question page in the target site's markup: two answers, the first with
 * two comments, the second with none. */
export const QUESTION_PAGE = `
<div id="question-header"><h1>How do I fetch the registration token?</h1></div>
<div id="question">
  <div class="s-prose">
    <p>My app needs the current registration token.</p>
  </div>
</div>
<div id="answers">
  <div class="answer" data-answerid="101">
    <div class="s-prose">
      <p>Call getToken() on the instance:</p>
      <pre><code class="language-java">String token = FirebaseInstanceId.getInstance().getToken();
</code></pre>
      <p>Do this on a background thread.</p>
    </div>
    <ul class="comments-list">
      <li class="comment">
        <span class="comment-copy">getToken() was deprecated, use getInstanceId() instead</span>
        <a class="comment-user">sam</a>
        <span class="relativetime" title="2020-05-01 10:00:00Z">May 1 '20</span>
      </li>
      <li class="comment">
        <span class="comment-copy">worked for me, thanks!</span>
        <a class="comment-user">ada</a>
        <span class="relativetime" title="2020-05-02 11:00:00Z">May 2 '20</span>
      </li>
    </ul>
  </div>
  <div class="answer" data-answerid="102">
    <div class="s-prose">
      <p>You can also check the docs.</p>
    </div>
    <ul class="comments-list"></ul>
  </div>
</div>
`;

/** Exact payload the content script must extract from the first answer. */
export const GOLDEN_PAYLOAD: RefinePayload = {
  schema_version: 1,
  answer:
    "Call getToken() on the instance:\n\n" +
    "```java\nString token = FirebaseInstanceId.getInstance().getToken();\n```\n\n" +
    "Do this on a background thread.",
  comments: [
    { author: "sam", body: "getToken() was deprecated, use getInstanceId() instead" },
    { author: "ada", body: "worked for me, thanks!" },
  ],
  question:
    "How do I fetch the registration token?\n\nMy app needs the current registration token.",
};

export const FIXTURE_RESULT: RefineResult = {
  schema_version: 1,
  concerns: ["getToken() is deprecated"],
  used_question: false,
  change_log: [
    { concern: "getToken() is deprecated", change: "switched to getInstanceId()" },
    { concern: "getToken() is deprecated", change: "updated the surrounding prose" },
  ],
  improved_answer:
    "Call getInstanceId() on the instance:\n\n" +
    "```java\nString id = FirebaseInstanceId.getInstance().getId();\n```\n\n" +
    "Do this on a background thread.",
};

export function loadPage(html: string = QUESTION_PAGE): void {
  document.body.innerHTML = html;
}
