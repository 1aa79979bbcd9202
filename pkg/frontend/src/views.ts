// DOM builders for the three screens. No framework: build elements, hand
// back the root, let main.ts own state and polling.

import { countdownText } from "./countdown.js";
import { describeError } from "./errors.js";
import { formState, pointsFromInputs } from "./form.js";
import { shareBars } from "./outcome.js";
import {
  LEVEL_LABELS,
  WIRE_LEVELS,
  type DecisionPayload,
  type Points,
  type ProjectSummary,
  type QueueEntry,
  type WireLevel,
} from "./types.js";

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function messageBox(kind: "error" | "ok" | "info", text: string): HTMLElement {
  return el("div", { class: `message ${kind}`, role: "status" }, [text]);
}

// -- outcome page -------------------------------------------------------------

export function outcomeView(payload: DecisionPayload, nowMs: number): HTMLElement {
  const root = el("section", { class: "outcome" });
  if (payload.status === "under_evaluation" && payload.closes_at) {
    root.append(
      el("h3", {}, ["Under expert evaluation"]),
      el("p", {}, [
        "Voting closes in ",
        el("span", {
          class: "countdown",
          "data-closes-at": payload.closes_at,
        }, [countdownText(payload.closes_at, nowMs)]),
      ]),
    );
    return root;
  }
  if (payload.status !== "decided") {
    root.append(messageBox("info", "This project has no public outcome yet."));
    return root;
  }
  root.append(el("h3", { class: "badge" }, [payload.badge ?? ""]));
  root.append(
    el("p", { class: "meta" }, [
      `${payload.vote_count ?? 0} expert vote${payload.vote_count === 1 ? "" : "s"}`,
    ]),
  );
  if (payload.outcome?.kind === "recommended" && payload.shares) {
    const chart = el("div", { class: "bars" });
    for (const bar of shareBars(payload.shares)) {
      chart.append(
        el("div", { class: "bar-row" }, [
          el("span", { class: "bar-label" }, [bar.label]),
          el("div", { class: "bar-track" }, [
            el("div", {
              class: `bar-fill level-${bar.level}`,
              style: `width: ${bar.widthPercent}%`,
            }),
          ]),
          el("span", { class: "bar-value" }, [`${bar.percentText}%`]),
        ]),
      );
    }
    root.append(chart);
  }
  const comments = payload.comments ?? [];
  if (comments.length > 0) {
    root.append(el("h4", {}, ["Anonymous expert comments"]));
    const list = el("ul", { class: "comments" });
    for (const comment of comments) {
      list.append(el("li", {}, [comment]));
    }
    root.append(list);
  }
  return root;
}

export function notFoundView(projectId: string): HTMLElement {
  return messageBox("error", `No public project found for "${projectId}".`);
}

// -- vote form -----------------------------------------------------------------

/** Sends the ballot; resolves to a success message or rejects (the view
 * renders the failure through describeError). */
export type SubmitVoteFn = (points: Points, comment: string) => Promise<string>;

export function voteFormView(
  entry: QueueEntry,
  alreadyVoted: boolean,
  submitVote: SubmitVoteFn,
): HTMLElement {
  const root = el("section", { class: "vote-form" });
  root.append(el("h3", {}, [`Evaluate: ${entry.title}`]));
  root.append(
    el("p", { class: "meta" }, [
      "Window closes in ",
      el("span", { class: "countdown", "data-closes-at": entry.closes_at }, [
        countdownText(entry.closes_at, Date.now()),
      ]),
      ` - distribute exactly 100 points across the four levels.`,
    ]),
  );

  const inputs = {} as Record<WireLevel, HTMLInputElement>;
  const grid = el("div", { class: "point-grid" });
  for (const level of WIRE_LEVELS) {
    const input = el("input", {
      type: "number",
      min: "0",
      max: "100",
      step: "1",
      value: "0",
      id: `points-${level}`,
    });
    inputs[level] = input;
    grid.append(
      el("label", { for: `points-${level}` }, [LEVEL_LABELS[level]]),
      input,
    );
  }
  root.append(grid);

  const remaining = el("p", { class: "remaining" }, ["100 points left to allocate"]);
  root.append(remaining);

  const comment = el("textarea", {
    class: "comment",
    maxlength: "2000",
    placeholder: "Anonymous comment for backers (optional)",
  });
  root.append(comment);

  const submit = el("button", { class: "primary", disabled: "" }, [
    alreadyVoted ? "Revise vote" : "Submit vote",
  ]);
  const feedback = el("div", { class: "form-feedback" });
  root.append(submit, feedback);

  const currentPoints = (): { points: Points; parseFailed: boolean } =>
    pointsFromInputs({
      hnr: inputs.hnr.value,
      nr: inputs.nr.value,
      r: inputs.r.value,
      hr: inputs.hr.value,
    });

  const refresh = () => {
    const { points } = currentPoints();
    const state = formState(points);
    remaining.textContent =
      state.message ?? "All 100 points allocated - ready to submit.";
    remaining.classList.toggle("bad", !state.submitEnabled);
    if (state.submitEnabled) {
      submit.removeAttribute("disabled");
    } else {
      submit.setAttribute("disabled", "");
    }
  };
  for (const level of WIRE_LEVELS) {
    inputs[level].addEventListener("input", refresh);
  }
  refresh();

  submit.addEventListener("click", () => {
    const { points } = currentPoints();
    const state = formState(points);
    if (!state.submitEnabled) return; // server rule; this is just the gate
    feedback.replaceChildren();
    void submitVote(points, comment.value).then(
      (okText) => {
        feedback.append(messageBox("ok", okText));
        submit.textContent = "Revise vote";
      },
      (err) => {
        feedback.append(messageBox("error", describeError(err)));
      },
    );
  });

  return root;
}

// -- admin queue ------------------------------------------------------------------

export interface AdminHandlers {
  onApprove(projectId: string): void;
  onSweep(): void;
}

export function adminQueueView(
  projects: ProjectSummary[],
  nowMs: number,
  handlers: AdminHandlers,
): HTMLElement {
  const root = el("section", { class: "admin" });
  const pending = projects.filter((p) => p.state === "pending_approval");
  const open = projects.filter((p) => p.state === "under_evaluation");
  const decided = projects.filter((p) => p.state === "decided");

  root.append(el("h3", {}, ["Awaiting approval"]));
  if (pending.length === 0) {
    root.append(el("p", { class: "meta" }, ["Nothing waiting."]));
  }
  for (const project of pending) {
    const button = el("button", { class: "primary" }, ["Approve"]);
    button.addEventListener("click", () => handlers.onApprove(project.project_id));
    root.append(
      el("div", { class: "row" }, [
        el("span", {}, [`${project.title} [${project.categories.join(", ")}]`]),
        button,
      ]),
    );
  }

  root.append(el("h3", {}, ["Under evaluation"]));
  if (open.length === 0) {
    root.append(el("p", { class: "meta" }, ["No open windows."]));
  }
  for (const project of open) {
    root.append(
      el("div", { class: "row" }, [
        el("span", {}, [project.title]),
        el("span", { class: "countdown", "data-closes-at": project.closes_at ?? "" }, [
          project.closes_at ? countdownText(project.closes_at, nowMs) : "--:--:--",
        ]),
      ]),
    );
  }

  const sweep = el("button", {}, ["Run sweep now"]);
  sweep.addEventListener("click", () => handlers.onSweep());
  root.append(el("div", { class: "row" }, [sweep]));

  root.append(el("h3", {}, ["Decided"]));
  for (const project of decided) {
    root.append(
      el("div", { class: "row" }, [
        el("span", {}, [project.title]),
        el("span", { class: "badge-small" }, [project.badge ?? ""]),
      ]),
    );
  }
  return root;
}

export function refreshCountdowns(root: ParentNode, nowMs: number): void {
  root.querySelectorAll<HTMLElement>(".countdown[data-closes-at]").forEach((node) => {
    const closesAt = node.dataset.closesAt;
    if (closesAt) node.textContent = countdownText(closesAt, nowMs);
  });
}
