// Explorer state and its URL query-string round trip.
//
// The whole view is reconstructible from the URL (shareable sessions): the
// current target or what-if draft, k, the filter toggles, and the pivot
// history stack.

export interface ExplorerState {
  target: string | null;
  whatifDraft: string | null;
  k: number;
  excludeCompany: boolean;
  excludeSubIndustry: boolean;
  excludeIndustry: boolean;
  minScore: number | null;
  history: string[];
}

export const DEFAULT_STATE: ExplorerState = {
  target: null,
  whatifDraft: null,
  k: 2,
  excludeCompany: true,
  excludeSubIndustry: true,
  excludeIndustry: false,
  minScore: null,
  history: [],
};

export function serializeState(state: ExplorerState): string {
  const params = new URLSearchParams();
  if (state.target) params.set("target", state.target);
  if (state.whatifDraft) params.set("whatif", state.whatifDraft);
  if (state.k !== DEFAULT_STATE.k) params.set("k", String(state.k));
  if (!state.excludeCompany) params.set("xco", "0");
  if (!state.excludeSubIndustry) params.set("xsub", "0");
  if (state.excludeIndustry) params.set("xind", "1");
  if (state.minScore !== null) params.set("ms", String(state.minScore));
  if (state.history.length) params.set("hist", state.history.join(","));
  return params.toString();
}

function parseMinScore(raw: string | null): number | null {
  if (raw === null) return null;
  const value = Number.parseFloat(raw);
  if (!Number.isFinite(value)) return null;
  return Math.min(1, Math.max(-1, value));
}

export function parseState(query: string): ExplorerState {
  const params = new URLSearchParams(query);
  const k = Number.parseInt(params.get("k") ?? "", 10);
  const hist = params.get("hist");
  return {
    target: params.get("target"),
    whatifDraft: params.get("whatif"),
    k: Number.isFinite(k) && k >= 1 ? k : DEFAULT_STATE.k,
    excludeCompany: params.get("xco") !== "0",
    excludeSubIndustry: params.get("xsub") !== "0",
    excludeIndustry: params.get("xind") === "1",
    minScore: parseMinScore(params.get("ms")),
    history: dedupeConsecutive(hist ? hist.split(",").filter((id) => id) : []),
  };
}

function dedupeConsecutive(ids: string[]): string[] {
  return ids.filter((id, index) => index === 0 || id !== ids[index - 1]);
}

// Pivot: the current target (if any) goes onto the history stack. The stack
// never holds consecutive duplicates.
export function pushTarget(state: ExplorerState, newTarget: string): ExplorerState {
  const history = [...state.history];
  if (state.target && state.target !== newTarget && history[history.length - 1] !== state.target) {
    history.push(state.target);
  }
  return { ...state, target: newTarget, whatifDraft: null, history };
}

// Back-navigation: restore the most recent prior target, or null when the
// stack is empty.
export function popTarget(state: ExplorerState): ExplorerState | null {
  if (!state.history.length) return null;
  const history = [...state.history];
  const target = history.pop() as string;
  return { ...state, target, whatifDraft: null, history };
}
