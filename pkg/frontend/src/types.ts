// Shapes of the service's JSON responses. The UI renders these verbatim;
// it never computes similarity on its own.

export interface CaseMeta {
  id: string;
  company: string;
  industry: string;
  sub_industry: string;
  year: number;
}

export interface CasesPage {
  cases: CaseMeta[];
  page: number;
  page_size: number;
  total: number;
}

export interface CaseDetail extends CaseMeta {
  text: string;
}

export interface MatchRow {
  id: string;
  rank: number;
  company: string;
  industry: string;
  sub_industry: string;
  score: number;
  common_features: string[];
}

export interface Report {
  target: { id: string | null; company: string | null; sub_industry: string | null };
  matches: MatchRow[];
  filters: Record<string, unknown>;
  backend_fingerprint: string;
  generated_at: string;
}

export interface FilterToggles {
  exclude_company_of_target: boolean;
  exclude_same_sub_industry: boolean;
  exclude_same_industry: boolean;
  min_score?: number | null;
}
