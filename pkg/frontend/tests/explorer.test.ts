// Scripted browser tests against the real fixture-backed service: the pivot
// loop and the what-if self-match, driven entirely through the DOM.

import { beforeEach, describe, expect, inject, it } from "vitest";

import { createApp } from "../src/app.js";

const serviceUrl = inject("serviceUrl");

async function until(check: () => boolean, label: string, timeoutMs = 15_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`timed out waiting for: ${label}`);
}

function caseButton(id: string): HTMLButtonElement {
  const row = document.querySelector(`li[data-case-id="${id}"] button.case-link`);
  if (!row) throw new Error(`case row ${id} not rendered`);
  return row as HTMLButtonElement;
}

function resultRows(): HTMLTableRowElement[] {
  return [...document.querySelectorAll("tr.result-row")] as HTMLTableRowElement[];
}

function targetLabel(): string {
  return document.querySelector(".target-label")?.textContent ?? "";
}

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  window.history.replaceState(null, "", "/");
});

describe("pivot loop", () => {
  it("select target, get 2 ranked rows, pivot into row 1, navigate back", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();

    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");

    // Step 1: select the target case.
    caseButton("pharma-a").click();
    await until(() => resultRows().length === 2, "two ranked rows");
    expect(targetLabel()).toBe("pharma-a");

    const firstRows = resultRows();
    const topMatchId = firstRows[0]?.dataset.matchId;
    expect(topMatchId).toBe("bev-c");
    // Rank and six-decimal score shape come straight from the service.
    expect(firstRows[0]?.cells[0]?.textContent).toBe("1");
    expect(firstRows[0]?.querySelector(".score-cell")?.textContent).toMatch(/^-?[01]\.\d{6}$/);

    // Step 2: pivot into the first match; it becomes the new target.
    (firstRows[0]?.querySelector("button.pivot-button") as HTMLButtonElement).click();
    await until(() => targetLabel() === "bev-c", "pivoted target");
    await until(() => resultRows().length > 0, "pivot results");
    const pivotCaption = document.querySelector(".results-region h2")?.textContent ?? "";
    expect(pivotCaption).toContain("bev-c");
    expect(window.location.search).toContain("target=bev-c");
    expect(window.location.search).toContain("hist=pharma-a");

    // Step 3: navigate back; the original view is restored.
    const back = document.querySelector("button.back-button") as HTMLButtonElement;
    expect(back.disabled).toBe(false);
    back.click();
    await until(() => targetLabel() === "pharma-a", "restored target");
    await until(() => {
      const rows = resultRows();
      return rows.length === 2 && rows[0]?.dataset.matchId === "bev-c";
    }, "restored results");
    expect((document.querySelector("button.back-button") as HTMLButtonElement).disabled).toBe(true);
  });

  it("industry filter narrows the case list per server response", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");

    const select = document.getElementById("industry-filter") as HTMLSelectElement;
    await until(() => select.options.length > 1, "industry options");
    select.value = "Wholesale";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await until(() => document.querySelectorAll("li[data-case-id]").length === 1, "narrowed list");
    expect(document.querySelector("li[data-case-id]")?.getAttribute("data-case-id")).toBe("whole-e");

    select.value = "";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "restored list");
  });

  it("filter toggle changes the top result and empty pools render the explanation", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");

    caseButton("pharma-a").click();
    await until(() => resultRows()[0]?.dataset.matchId === "bev-c", "default top match");

    // Allowing the same sub-industry brings the near-duplicate pharma case in.
    (document.getElementById("toggle-exclude-sub-industry") as HTMLInputElement).click();
    await until(() => resultRows()[0]?.dataset.matchId === "pharma-b", "relaxed top match");

    // Excluding the whole industry (and sub-industry again) leaves one doc.
    (document.getElementById("toggle-exclude-sub-industry") as HTMLInputElement).click();
    (document.getElementById("toggle-exclude-industry") as HTMLInputElement).click();
    await until(() => {
      const rows = resultRows();
      return rows.length === 1 && rows[0]?.dataset.matchId === "whole-e";
    }, "industry-excluded results");
  });
});

describe("error states", () => {
  it("empty candidate pool renders the server explanation and keeps history", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");

    caseButton("pharma-a").click();
    await until(() => resultRows().length === 2, "initial results");
    (resultRows()[0]?.querySelector("button.pivot-button") as HTMLButtonElement).click();
    await until(() => targetLabel() === "bev-c", "pivoted target");
    const historyBefore = new URLSearchParams(window.location.search).get("hist");

    // An unreachable threshold empties the candidate pool (422).
    const minScore = document.getElementById("min-score-input") as HTMLInputElement;
    minScore.value = "0.999";
    minScore.dispatchEvent(new Event("change", { bubbles: true }));

    await until(() => document.querySelector(".results-region .error-banner") !== null, "error banner");
    const banner = document.querySelector(".results-region .error-banner") as HTMLElement;
    expect(banner.textContent).toContain("No eligible matches");
    expect(new URLSearchParams(window.location.search).get("hist")).toBe(historyBefore);
    expect((document.querySelector("button.back-button") as HTMLButtonElement).disabled).toBe(false);
  });

  it("service being down renders a retryable banner in the case browser", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, "http://127.0.0.1:9");
    await app.start();
    await until(() => !document.querySelector(".browser-panel .error-banner")?.classList.contains("hidden"), "browser banner");
    const banner = document.querySelector(".browser-panel .error-banner") as HTMLElement;
    expect(banner.textContent).toContain("Could not load cases");
    expect(banner.querySelector("button")?.textContent).toBe("Retry");
  });
});

describe("url round trip", () => {
  it("reloading a serialized view reproduces the same query and view", async () => {
    const first = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await first.start();
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");
    caseButton("pharma-a").click();
    await until(() => resultRows().length === 2, "results");
    (document.getElementById("toggle-exclude-sub-industry") as HTMLInputElement).click();
    await until(() => resultRows()[0]?.dataset.matchId === "pharma-b", "relaxed results");
    const url = window.location.search;
    expect(url).toContain("target=pharma-a");

    // Fresh app instance on the captured URL, as after a browser reload.
    document.body.innerHTML = '<div id="app"></div>';
    window.history.replaceState(null, "", `/${url}`);
    const second = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await second.start();
    await until(() => resultRows().length === 2, "reloaded results");
    expect(targetLabel()).toBe("pharma-a");
    expect(resultRows()[0]?.dataset.matchId).toBe("pharma-b");
    expect((document.getElementById("toggle-exclude-sub-industry") as HTMLInputElement).checked).toBe(false);
  });
});

describe("what-if panel", () => {
  it("submit is disabled for an empty draft", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();
    const submit = document.getElementById("whatif-submit") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
  });

  it("pasting a fixture document's text self-matches at rank 1 with score 1.000000", async () => {
    const app = createApp(document.getElementById("app") as HTMLElement, serviceUrl);
    await app.start();
    await until(() => document.querySelectorAll("li[data-case-id]").length === 5, "case list");

    const detail = (await (await fetch(`${serviceUrl}/api/cases/bev-c`)).json()) as { text: string };
    const textarea = document.getElementById("whatif-text") as HTMLTextAreaElement;
    textarea.value = detail.text;
    textarea.dispatchEvent(new Event("input", { bubbles: true }));

    const submit = document.getElementById("whatif-submit") as HTMLButtonElement;
    await until(() => !submit.disabled, "submit enabled");
    submit.click();

    await until(() => resultRows().length > 0, "what-if results");
    const rows = resultRows();
    expect(rows[0]?.dataset.matchId).toBe("bev-c");
    expect(rows[0]?.cells[0]?.textContent).toBe("1");
    expect(rows[0]?.querySelector(".score-cell")?.textContent).toBe("1.000000");
    expect(targetLabel()).toBe("what-if draft");
  });
});
