// Request/response shapes of the prediction API (docs/api_schema.json).

export interface HIndexRequest {
  current_h: number;
  num_papers: number;
  avg_citations: number;
  num_coauthors: number;
  years_active: number;
  horizon_years: number;
}

export interface HIndexResponse {
  predicted_h: number;
  horizon: number;
  clipped: boolean;
  model_version: string;
}

export interface ManualAuthorProfile {
  h: number;
  prior_citations?: number[];
  delta_h?: number;
  num_coauthors?: number;
  years_active?: number;
}

export interface PaperAuthor {
  name: string;
  author_id?: string;
  manual?: ManualAuthorProfile;
}

export type PaperVenue =
  | string
  | { name?: string; venue_id?: string }
  | { manual: { h_index: number; avg_citations: number } };

export interface PaperRequest {
  title: string;
  abstract: string;
  year: number;
  primary_mode: "max-h" | "first";
  authors: PaperAuthor[];
  venue?: PaperVenue;
}

export interface PaperResponse {
  probability: number;
  factor_breakdown: Record<string, number>;
  factor_contributions: Record<string, number> | null;
  primary_author: { name: string; author_id: string | null };
  predicted_future_h: number | null;
  model_version: string;
  flags: string[];
}

export interface HealthResponse {
  status: string;
  model_versions: Record<string, string>;
  corpus_checksum: string;
  t: number;
  delta_t: number;
}

export interface ApiError {
  error: { code: string; message: string; field?: string; missing?: string[] };
}

/** One per-field validation problem, mirrored from the service's 400s. */
export interface FieldError {
  field: string;
  message: string;
}
