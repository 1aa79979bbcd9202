// Single-page wiring: token entry, three tabs (public projects, expert
// voting, admin queue), 5-second polling against the REST API, and a
// 1-second countdown ticker. The session token lives in memory only.

import { ApiClient, ApiError } from "./api.js";
import { describeError } from "./errors.js";
import {
  adminQueueView,
  el,
  messageBox,
  notFoundView,
  outcomeView,
  refreshCountdowns,
  voteFormView,
} from "./views.js";
import type { ProjectSummary, QueueEntry } from "./types.js";

const POLL_MS = 5000;

type Tab = "projects" | "expert" | "admin";

const client = new ApiClient("");
let activeTab: Tab = "projects";
let lookupId = "";
let selectedQueueEntry: QueueEntry | null = null;
let votedProjects = new Set<string>();
let pollTimer: number | undefined;

const view = document.getElementById("view") as HTMLElement;
const status = document.getElementById("session-status") as HTMLElement;

// -- tabs ------------------------------------------------------------------

async function renderProjectsTab(): Promise<void> {
  const root = el("section", {});
  const lookup = el("div", { class: "row" });
  const input = el("input", {
    type: "text",
    placeholder: "project id",
    value: lookupId,
    id: "lookup-input",
  });
  const go = el("button", {}, ["View outcome"]);
  lookup.append(input, go);
  root.append(el("h2", {}, ["Projects"]), lookup);

  const results = el("div", { id: "lookup-result" });
  root.append(results);

  go.addEventListener("click", async () => {
    lookupId = input.value.trim();
    results.replaceChildren();
    if (!lookupId) return;
    try {
      const payload = await client.getDecision(lookupId);
      results.append(outcomeView(payload, Date.now()));
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        results.append(notFoundView(lookupId));
      } else {
        results.append(messageBox("error", describeError(err)));
      }
    }
  });

  try {
    const { projects } = await client.listProjects();
    root.append(el("h3", {}, ["Decided projects"]));
    if (projects.length === 0) {
      root.append(el("p", { class: "meta" }, ["No published outcomes yet."]));
    }
    for (const project of projects) {
      const row = el("div", { class: "row clickable" }, [
        el("span", {}, [project.title]),
        el("span", { class: "badge-small" }, [project.badge ?? project.state]),
      ]);
      row.addEventListener("click", async () => {
        lookupId = project.project_id;
        results.replaceChildren();
        try {
          results.append(outcomeView(await client.getDecision(project.project_id), Date.now()));
        } catch (err) {
          results.append(messageBox("error", describeError(err)));
        }
      });
      root.append(row);
    }
  } catch (err) {
    root.append(messageBox("error", describeError(err)));
  }
  view.replaceChildren(root);
}

async function renderExpertTab(): Promise<void> {
  const root = el("section", {});
  root.append(el("h2", {}, ["Expert queue"]));
  if (!client.hasToken()) {
    root.append(messageBox("info", "Enter your expert token above to see pending evaluations."));
    view.replaceChildren(root);
    return;
  }
  try {
    const { entries } = await client.expertQueue();
    if (entries.length === 0 && !selectedQueueEntry) {
      root.append(el("p", { class: "meta" }, ["Nothing waiting for your review."]));
    }
    for (const entry of entries) {
      const row = el("div", { class: "row clickable" }, [
        el("span", {}, [`${entry.title} [${entry.categories.join(", ")}]`]),
        el("button", {}, ["Review & vote"]),
      ]);
      row.querySelector("button")?.addEventListener("click", () => {
        selectedQueueEntry = entry;
        void renderActiveTab();
      });
      root.append(row);
    }
    if (selectedQueueEntry) {
      const entry = selectedQueueEntry;
      root.append(
        voteFormView(entry, votedProjects.has(entry.project_id), async (points, comment) => {
          await client.submitVote(entry.project_id, points, comment);
          votedProjects.add(entry.project_id);
          return "Vote recorded. You can revise it here until the window closes.";
        }),
      );
    }
  } catch (err) {
    root.append(messageBox("error", describeError(err)));
  }
  view.replaceChildren(root);
}

async function renderAdminTab(): Promise<void> {
  const root = el("section", {});
  root.append(el("h2", {}, ["Admin"]));
  if (!client.hasToken()) {
    root.append(messageBox("info", "Enter your admin token above."));
    view.replaceChildren(root);
    return;
  }
  try {
    const { projects } = await client.listProjects();
    const adminSeesAll = projects.some((p: ProjectSummary) => p.state !== "decided");
    if (!adminSeesAll && projects.length === 0) {
      root.append(el("p", { class: "meta" }, ["No projects yet."]));
    }
    root.append(
      adminQueueView(projects, Date.now(), {
        onApprove: (projectId) => {
          void (async () => {
            try {
              await client.approveProject(projectId);
            } catch (err) {
              root.prepend(messageBox("error", describeError(err)));
              return;
            }
            void renderActiveTab();
          })();
        },
        onSweep: () => {
          void (async () => {
            try {
              const result = await client.runSweep();
              root.prepend(
                messageBox("ok", `Sweep finalized ${result.decided.length} project(s).`),
              );
            } catch (err) {
              root.prepend(messageBox("error", describeError(err)));
              return;
            }
            void renderActiveTab();
          })();
        },
      }),
    );
  } catch (err) {
    root.append(messageBox("error", describeError(err)));
  }
  view.replaceChildren(root);
}

async function renderActiveTab(): Promise<void> {
  if (activeTab === "projects") await renderProjectsTab();
  else if (activeTab === "expert") await renderExpertTab();
  else await renderAdminTab();
}

function schedulePolling(): void {
  if (pollTimer !== undefined) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(() => void renderActiveTab(), POLL_MS);
}

function wireChrome(): void {
  const tokenInput = document.getElementById("token-input") as HTMLInputElement;
  const tokenButton = document.getElementById("token-apply") as HTMLButtonElement;
  tokenButton.addEventListener("click", () => {
    client.setToken(tokenInput.value);
    status.textContent = client.hasToken() ? "token set (kept in memory)" : "anonymous";
    selectedQueueEntry = null;
    votedProjects = new Set();
    void renderActiveTab();
  });

  document.querySelectorAll<HTMLButtonElement>("[data-tab]").forEach((button) => {
    button.addEventListener("click", () => {
      activeTab = button.dataset.tab as Tab;
      selectedQueueEntry = null;
      document
        .querySelectorAll("[data-tab]")
        .forEach((b) => b.classList.toggle("active", b === button));
      void renderActiveTab();
    });
  });

  window.setInterval(() => refreshCountdowns(document, Date.now()), 1000);
}

wireChrome();
schedulePolling();
void renderActiveTab();
