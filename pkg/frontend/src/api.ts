// Thin typed client for the service API plus in-flight request control.

import type { CaseDetail, CasesPage, FilterToggles, Report } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
  ) {
    super(`${code} (${status}): ${detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { error?: string; detail?: string; id?: string };
    if (body.error) code = body.error;
    if (body.detail) detail = body.detail;
    else if (body.id) detail = `unknown id: ${body.id}`;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, detail);
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as T;
}

async function postJson<T>(url: string, body: unknown, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private base: string) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  cases(industry: string | null, page: number, pageSize: number, signal?: AbortSignal): Promise<CasesPage> {
    const params = new URLSearchParams({ page: String(page), page_size: String(pageSize) });
    if (industry) params.set("industry", industry);
    return getJson(this.url(`/api/cases?${params}`), signal);
  }

  caseDetail(id: string, signal?: AbortSignal): Promise<CaseDetail> {
    return getJson(this.url(`/api/cases/${encodeURIComponent(id)}`), signal);
  }

  similar(target: string, k: number, filters: FilterToggles, signal?: AbortSignal): Promise<Report> {
    return postJson(this.url("/api/similar"), { target, k, filters }, signal);
  }

  whatif(text: string, k: number, filters: FilterToggles, signal?: AbortSignal): Promise<Report> {
    return postJson(this.url("/api/whatif"), { text, k, filters }, signal);
  }

  health(signal?: AbortSignal): Promise<{ status: string; corpus_size: number; dim: number }> {
    return getJson(this.url("/api/health"), signal);
  }
}

// Serializes queries per panel: a new request aborts the previous one, and
// responses that lost the race are detectable by sequence number.
export class RequestGate {
  private seq = 0;
  private controller: AbortController | null = null;

  begin(): { seq: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    this.seq += 1;
    return { seq: this.seq, signal: this.controller.signal };
  }

  isCurrent(seq: number): boolean {
    return seq === this.seq;
  }
}
