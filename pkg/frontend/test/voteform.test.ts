// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { voteFormView } from "../src/views.js";
import type { QueueEntry, WireLevel } from "../src/types.js";

const ENTRY: QueueEntry = {
  project_id: "proj_1",
  title: "Widget",
  categories: ["hardware"],
  closes_at: new Date(Date.now() + 3600_000).toISOString(),
  notified_at: new Date().toISOString(),
};

function setPoints(root: HTMLElement, values: Record<WireLevel, string>) {
  for (const [level, value] of Object.entries(values)) {
    const input = root.querySelector<HTMLInputElement>(`#points-${level}`)!;
    input.value = value;
    input.dispatchEvent(new Event("input", { bubbles: true }));
  }
}

const submitButton = (root: HTMLElement) =>
  root.querySelector<HTMLButtonElement>("button.primary")!;

describe("voteFormView", () => {
  it("disables submit until the points sum to 100", () => {
    const root = voteFormView(ENTRY, false, async () => "ok");
    expect(submitButton(root).hasAttribute("disabled")).toBe(true);
    setPoints(root, { hnr: "25", nr: "25", r: "25", hr: "26" });
    expect(submitButton(root).hasAttribute("disabled")).toBe(true);
    expect(root.querySelector(".remaining")?.textContent).toContain("over budget");
    setPoints(root, { hnr: "10", nr: "20", r: "40", hr: "30" });
    expect(submitButton(root).hasAttribute("disabled")).toBe(false);
  });

  it("keeps the live counter at 100 minus the sum", () => {
    const root = voteFormView(ENTRY, false, async () => "ok");
    setPoints(root, { hnr: "10", nr: "20", r: "30", hr: "0" });
    expect(root.querySelector(".remaining")?.textContent).toContain("40 points left");
  });

  it("submits the ballot and offers revision afterwards", async () => {
    const sent: unknown[] = [];
    const root = voteFormView(ENTRY, false, async (points, comment) => {
      sent.push({ points, comment });
      return "Vote recorded.";
    });
    setPoints(root, { hnr: "0", nr: "0", r: "60", hr: "40" });
    submitButton(root).click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(sent).toEqual([
      { points: { hnr: 0, nr: 0, r: 60, hr: 40 }, comment: "" },
    ]);
    expect(root.querySelector(".message.ok")?.textContent).toBe("Vote recorded.");
    expect(submitButton(root).textContent).toBe("Revise vote");
  });

  it("surfaces a window-closed conflict from the server", async () => {
    const root = voteFormView(ENTRY, false, async () => {
      throw new ApiError(409, {
        error: "window_closed",
        message: "the evaluation window is closed",
      });
    });
    setPoints(root, { hnr: "10", nr: "20", r: "40", hr: "30" });
    submitButton(root).click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    const text = root.querySelector(".message.error")?.textContent ?? "";
    expect(text).toContain("window has closed");
    expect(text).toContain("the evaluation window is closed");
  });
});
