// DOM wiring for the explorer: case browser on the left, ranked results and
// the what-if panel on the right. Every score shown comes verbatim from a
// service response; this module only renders and routes clicks.

import { ApiClient, ApiError, RequestGate } from "./api.js";
import {
  DEFAULT_STATE,
  type ExplorerState,
  parseState,
  popTarget,
  pushTarget,
  serializeState,
} from "./state.js";
import type { CasesPage, FilterToggles, Report } from "./types.js";

const PAGE_SIZE = 50;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function formatScore(score: number): string {
  return score.toFixed(6);
}

export class ExplorerApp {
  private api: ApiClient;
  private state: ExplorerState = { ...DEFAULT_STATE };
  private browserGate = new RequestGate();
  private resultsGate = new RequestGate();
  private industry: string | null = null;
  private page = 1;

  // regions
  private caseList!: HTMLUListElement;
  private industrySelect!: HTMLSelectElement;
  private pageLabel!: HTMLSpanElement;
  private browserError!: HTMLDivElement;
  private resultsRegion!: HTMLDivElement;
  private backButton!: HTMLButtonElement;
  private targetLabel!: HTMLSpanElement;
  private kInput!: HTMLInputElement;
  private minScoreInput!: HTMLInputElement;
  private toggleSub!: HTMLInputElement;
  private toggleInd!: HTMLInputElement;
  private toggleCo!: HTMLInputElement;
  private whatifText!: HTMLTextAreaElement;
  private whatifSubmit!: HTMLButtonElement;

  constructor(
    private root: HTMLElement,
    apiBase: string,
  ) {
    this.api = new ApiClient(apiBase);
    this.buildLayout();
    window.addEventListener("popstate", () => {
      this.state = parseState(window.location.search);
      this.applyStateToControls();
      void this.refreshResults(false);
    });
  }

  async start(): Promise<void> {
    this.state = parseState(window.location.search);
    this.applyStateToControls();
    await Promise.all([this.loadCases(), this.refreshResults(false)]);
  }

  private buildLayout(): void {
    this.root.innerHTML = "";
    const header = el("header");
    header.append(el("h1", "", "DX case explorer"));
    this.root.append(header);

    const main = el("main");
    main.append(this.buildBrowserPanel(), this.buildResultsPanel());
    this.root.append(main);
  }

  private buildBrowserPanel(): HTMLElement {
    const panel = el("section", "panel browser-panel");
    panel.append(el("h2", "", "Cases"));

    const controls = el("div", "browser-controls");
    this.industrySelect = el("select");
    this.industrySelect.id = "industry-filter";
    this.industrySelect.addEventListener("change", () => {
      this.industry = this.industrySelect.value || null;
      this.page = 1;
      void this.loadCases();
    });
    controls.append(this.industrySelect);

    const prev = el("button", "", "Prev");
    prev.addEventListener("click", () => {
      if (this.page > 1) {
        this.page -= 1;
        void this.loadCases();
      }
    });
    const next = el("button", "", "Next");
    next.addEventListener("click", () => {
      this.page += 1;
      void this.loadCases();
    });
    this.pageLabel = el("span", "page-label", "page 1");
    controls.append(prev, this.pageLabel, next);
    panel.append(controls);

    this.browserError = el("div", "error-banner hidden");
    panel.append(this.browserError);

    this.caseList = el("ul", "case-list");
    panel.append(this.caseList);
    return panel;
  }

  private buildResultsPanel(): HTMLElement {
    const panel = el("section", "panel results-panel");

    const targetBar = el("div", "target-bar");
    this.backButton = el("button", "back-button", "Back");
    this.backButton.disabled = true;
    this.backButton.addEventListener("click", () => this.goBack());
    this.targetLabel = el("span", "target-label", "no target selected");
    targetBar.append(this.backButton, this.targetLabel);
    panel.append(targetBar);

    panel.append(this.buildFilterBar());

    this.resultsRegion = el("div", "results-region");
    this.resultsRegion.append(el("p", "placeholder", "Pick a case to see its cross-domain matches."));
    panel.append(this.resultsRegion);

    panel.append(this.buildWhatifPanel());
    return panel;
  }

  private buildFilterBar(): HTMLElement {
    const bar = el("div", "filter-bar");

    const kLabel = el("label", "", "k ");
    this.kInput = el("input");
    this.kInput.type = "number";
    this.kInput.min = "1";
    this.kInput.max = "20";
    this.kInput.value = String(this.state.k);
    this.kInput.id = "k-input";
    this.kInput.addEventListener("change", () => {
      const k = Number.parseInt(this.kInput.value, 10);
      this.state = { ...this.state, k: Number.isFinite(k) && k >= 1 ? k : 2 };
      void this.refreshResults(true);
    });
    kLabel.append(this.kInput);
    bar.append(kLabel);

    const msLabel = el("label", "", "min score ");
    this.minScoreInput = el("input");
    this.minScoreInput.type = "number";
    this.minScoreInput.step = "0.01";
    this.minScoreInput.min = "-1";
    this.minScoreInput.max = "1";
    this.minScoreInput.id = "min-score-input";
    this.minScoreInput.placeholder = "none";
    this.minScoreInput.addEventListener("change", () => {
      const value = Number.parseFloat(this.minScoreInput.value);
      this.state = {
        ...this.state,
        minScore: Number.isFinite(value) ? Math.min(1, Math.max(-1, value)) : null,
      };
      void this.refreshResults(true);
    });
    msLabel.append(this.minScoreInput);
    bar.append(msLabel);

    const makeToggle = (
      id: string,
      labelText: string,
      checked: boolean,
      onChange: (value: boolean) => void,
    ): HTMLInputElement => {
      const label = el("label");
      const box = el("input");
      box.type = "checkbox";
      box.id = id;
      box.checked = checked;
      box.addEventListener("change", () => onChange(box.checked));
      label.append(box, document.createTextNode(" " + labelText));
      bar.append(label);
      return box;
    };

    this.toggleSub = makeToggle(
      "toggle-exclude-sub-industry",
      "exclude same sub-industry",
      this.state.excludeSubIndustry,
      (value) => {
        this.state = { ...this.state, excludeSubIndustry: value };
        void this.refreshResults(true);
      },
    );
    this.toggleInd = makeToggle(
      "toggle-exclude-industry",
      "exclude same industry",
      this.state.excludeIndustry,
      (value) => {
        this.state = { ...this.state, excludeIndustry: value };
        void this.refreshResults(true);
      },
    );
    this.toggleCo = makeToggle(
      "toggle-exclude-company",
      "exclude target's company",
      this.state.excludeCompany,
      (value) => {
        this.state = { ...this.state, excludeCompany: value };
        void this.refreshResults(true);
      },
    );
    return bar;
  }

  private buildWhatifPanel(): HTMLElement {
    const panel = el("div", "whatif-panel");
    panel.append(el("h2", "", "What-if draft"));
    panel.append(
      el("p", "hint", "Describe a business idea; it is matched against the corpus without being stored."),
    );
    this.whatifText = el("textarea");
    this.whatifText.id = "whatif-text";
    this.whatifText.rows = 5;
    this.whatifText.addEventListener("input", () => {
      this.whatifSubmit.disabled = !this.whatifText.value.trim();
    });
    this.whatifSubmit = el("button", "whatif-submit", "Find similar cases");
    this.whatifSubmit.id = "whatif-submit";
    this.whatifSubmit.disabled = true;
    this.whatifSubmit.addEventListener("click", () => {
      const draft = this.whatifText.value.trim();
      if (!draft) return;
      this.state = { ...this.state, whatifDraft: draft };
      void this.refreshResults(true);
    });
    panel.append(this.whatifText, this.whatifSubmit);
    return panel;
  }

  private filters(): FilterToggles {
    return {
      exclude_company_of_target: this.state.excludeCompany,
      exclude_same_sub_industry: this.state.excludeSubIndustry,
      exclude_same_industry: this.state.excludeIndustry,
      min_score: this.state.minScore,
    };
  }

  private applyStateToControls(): void {
    this.kInput.value = String(this.state.k);
    this.minScoreInput.value = this.state.minScore === null ? "" : String(this.state.minScore);
    this.toggleSub.checked = this.state.excludeSubIndustry;
    this.toggleInd.checked = this.state.excludeIndustry;
    this.toggleCo.checked = this.state.excludeCompany;
    if (this.state.whatifDraft) this.whatifText.value = this.state.whatifDraft;
    this.whatifSubmit.disabled = !this.whatifText.value.trim();
    this.backButton.disabled = this.state.history.length === 0;
    this.targetLabel.textContent = this.state.whatifDraft
      ? "what-if draft"
      : (this.state.target ?? "no target selected");
  }

  private pushUrl(): void {
    const query = serializeState(this.state);
    window.history.pushState(null, "", query ? `?${query}` : window.location.pathname);
  }

  // --- case browser ---------------------------------------------------

  private async loadCases(): Promise<void> {
    const { seq, signal } = this.browserGate.begin();
    this.browserError.classList.add("hidden");
    try {
      const pageData = await this.api.cases(this.industry, this.page, PAGE_SIZE, signal);
      if (!this.browserGate.isCurrent(seq)) return;
      this.renderCaseList(pageData);
    } catch (error) {
      if (!this.browserGate.isCurrent(seq)) return;
      this.showBrowserError(error);
    }
  }

  private renderCaseList(pageData: CasesPage): void {
    this.pageLabel.textContent = `page ${pageData.page} of ${Math.max(
      1,
      Math.ceil(pageData.total / pageData.page_size),
    )}`;
    if (this.industrySelect.options.length === 0) {
      void this.populateIndustryOptions();
    }
    this.caseList.innerHTML = "";
    for (const item of pageData.cases) {
      const row = el("li", "case-row");
      row.dataset.caseId = item.id;
      const button = el("button", "case-link", `${item.company}`);
      button.addEventListener("click", () => this.selectTarget(item.id));
      const meta = el("span", "case-meta", ` ${item.industry} / ${item.sub_industry} / ${item.year}`);
      row.append(button, meta);
      this.caseList.append(row);
    }
    if (!pageData.cases.length) {
      this.caseList.append(el("li", "case-row empty", "(no cases)"));
    }
  }

  private async populateIndustryOptions(): Promise<void> {
    try {
      const all = await this.api.cases(null, 1, 200);
      const industries = [...new Set(all.cases.map((c) => c.industry))].sort();
      this.industrySelect.innerHTML = "";
      const any = el("option", "", "all industries");
      any.value = "";
      this.industrySelect.append(any);
      for (const industry of industries) {
        const option = el("option", "", industry);
        option.value = industry;
        this.industrySelect.append(option);
      }
    } catch {
      // not fatal; the select stays empty and the list still works
    }
  }

  private showBrowserError(error: unknown): void {
    this.browserError.classList.remove("hidden");
    this.browserError.innerHTML = "";
    this.browserError.append(
      el("span", "", `Could not load cases: ${error instanceof Error ? error.message : String(error)} `),
    );
    const retry = el("button", "", "Retry");
    retry.addEventListener("click", () => void this.loadCases());
    this.browserError.append(retry);
  }

  // --- results --------------------------------------------------------

  private selectTarget(id: string): void {
    this.state = pushTarget(this.state, id);
    void this.refreshResults(true);
  }

  private goBack(): void {
    const restored = popTarget(this.state);
    if (!restored) return;
    this.state = restored;
    void this.refreshResults(true);
  }

  private async refreshResults(pushUrl: boolean): Promise<void> {
    this.applyStateToControls();
    if (pushUrl) this.pushUrl();
    if (!this.state.target && !this.state.whatifDraft) return;

    const { seq, signal } = this.resultsGate.begin();
    this.renderStatus("querying…");
    try {
      const report = this.state.whatifDraft
        ? await this.api.whatif(this.state.whatifDraft, this.state.k, this.filters(), signal)
        : await this.api.similar(this.state.target as string, this.state.k, this.filters(), signal);
      if (!this.resultsGate.isCurrent(seq)) return;
      this.renderReport(report);
    } catch (error) {
      if (!this.resultsGate.isCurrent(seq)) return;
      this.renderQueryError(error);
    }
  }

  private renderStatus(message: string): void {
    this.resultsRegion.innerHTML = "";
    this.resultsRegion.append(el("p", "status", message));
  }

  private renderQueryError(error: unknown): void {
    this.resultsRegion.innerHTML = "";
    const banner = el("div", "error-banner");
    if (error instanceof ApiError && error.code === "empty_candidate_pool") {
      banner.append(el("strong", "", "No eligible matches. "), el("span", "", error.detail));
    } else if (error instanceof ApiError && error.status === 502) {
      banner.append(el("strong", "", "Embedding backend unavailable. "), el("span", "", error.detail));
    } else {
      banner.append(el("span", "", error instanceof Error ? error.message : String(error)));
    }
    this.resultsRegion.append(banner);
  }

  private renderReport(report: Report): void {
    this.resultsRegion.innerHTML = "";
    const caption = report.target.id
      ? `Matches for ${report.target.id} (${report.target.company ?? ""})`
      : "Matches for what-if draft";
    this.resultsRegion.append(el("h2", "", caption));

    const table = el("table", "results-table");
    const head = el("tr");
    for (const title of ["Rank", "Company", "Industry", "Cos Similarity", "Common Features", ""]) {
      head.append(el("th", "", title));
    }
    table.append(head);

    for (const match of report.matches) {
      const row = el("tr", "result-row");
      row.dataset.matchId = match.id;
      row.append(el("td", "", String(match.rank)));
      row.append(el("td", "", match.company));
      row.append(el("td", "", `${match.industry} / ${match.sub_industry}`));
      row.append(el("td", "score-cell", formatScore(match.score)));
      const chips = el("td", "chips");
      for (const term of match.common_features) {
        chips.append(el("span", "chip", term));
      }
      row.append(chips);
      const pivotCell = el("td");
      const pivot = el("button", "pivot-button", "Pivot →");
      pivot.addEventListener("click", () => this.selectTarget(match.id));
      pivotCell.append(pivot);
      row.append(pivotCell);
      table.append(row);
    }
    this.resultsRegion.append(table);

    const footer = el("p", "report-footer", `backend ${report.backend_fingerprint}`);
    this.resultsRegion.append(footer);
  }
}

export function createApp(root: HTMLElement, apiBase: string): ExplorerApp {
  return new ExplorerApp(root, apiBase);
}
