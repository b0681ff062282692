/** Typed client for the `/api/v1` service.
 *
 * Every result keeps the raw response text next to the parsed body so that
 * views can display numbers exactly as the service wrote them (see
 * rawjson.ts). The fetch implementation is injected, which keeps the
 * client testable without a browser.
 */

export interface HttpResponse {
  status: number;
  text(): Promise<string>;
}

export interface RequestOptions {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export type FetchLike = (url: string, init?: RequestOptions) => Promise<HttpResponse>;

/** A non-2xx response, carrying the service's machine-readable error kind. */
export class ApiError extends Error {
  constructor(
    readonly kind: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ApiResult<T> {
  body: T;
  raw: string;
}

export interface ModelInfo {
  id: string;
  kind: string;
}

export interface CaseItem {
  number: string;
  text: string;
  kind: string;
  canonical: boolean;
  page_ref?: string;
}

export interface CrossrefEntry {
  model: string;
  element: string;
}

export interface EvidenceBody {
  hard?: Record<string, string>;
  soft?: Record<string, number[]>;
  nodes?: string[];
}

export interface PosteriorBody {
  marginals: Record<string, number[]>;
  evidence_probability: number;
}

export interface CegPath {
  labels: string[];
  positions: string[];
  probability: number;
}

export interface PathsBody {
  paths: CegPath[];
  total_probability: number;
}

export interface ConditionBody {
  kept_mass: number;
  paths: CegPath[];
  ceg: unknown;
}

export type Predicate =
  | { has_label: string }
  | { lacks_label: string }
  | { through_position: string }
  | { not: Predicate }
  | { any: Predicate[] }
  | { all: Predicate[] };

export interface RelevanceBody {
  probandum: string;
  relevant: string[];
  irrelevant: string[];
}

export interface Chain {
  nodes: string[];
  polarities: string[];
}

export interface ChainsBody {
  item: string;
  chains: Chain[];
}

export class Client {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base = "/api/v1",
  ) {}

  models(): Promise<ApiResult<{ models: ModelInfo[] }>> {
    return this.request("GET", "/models");
  }

  items(): Promise<ApiResult<{ items: CaseItem[] }>> {
    return this.request("GET", "/case/items");
  }

  crossref(item: string): Promise<ApiResult<{ item: string; references: CrossrefEntry[] }>> {
    return this.request("GET", `/case/crossref/${encodeURIComponent(item)}`);
  }

  infer(model: string, evidence: EvidenceBody): Promise<ApiResult<PosteriorBody>> {
    return this.request("POST", `/bn/${encodeURIComponent(model)}/infer`, evidence);
  }

  paths(model: string): Promise<ApiResult<PathsBody>> {
    return this.request("GET", `/ceg/${encodeURIComponent(model)}/paths`);
  }

  condition(model: string, predicate: Predicate): Promise<ApiResult<ConditionBody>> {
    return this.request("POST", `/ceg/${encodeURIComponent(model)}/condition`, predicate);
  }

  relevance(chart: string): Promise<ApiResult<RelevanceBody>> {
    return this.request("GET", `/wigmore/${encodeURIComponent(chart)}/relevance`);
  }

  chains(chart: string, node: string): Promise<ApiResult<ChainsBody>> {
    return this.request(
      "GET",
      `/wigmore/${encodeURIComponent(chart)}/chains/${encodeURIComponent(node)}`,
    );
  }

  private async request<T>(method: string, path: string, payload?: unknown): Promise<ApiResult<T>> {
    const init: RequestOptions =
      payload === undefined
        ? { method }
        : {
            method,
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
          };
    const resp = await this.fetchImpl(this.base + path, init);
    const raw = await resp.text();
    if (resp.status >= 400) throw toApiError(raw, resp.status);
    return { body: JSON.parse(raw) as T, raw };
  }
}

function toApiError(raw: string, status: number): ApiError {
  try {
    const parsed = JSON.parse(raw) as { error?: { kind?: string; message?: string } };
    if (parsed.error?.kind) return new ApiError(parsed.error.kind, parsed.error.message ?? "", status);
  } catch {
    // not the service's error envelope; fall through
  }
  return new ApiError("HttpError", raw, status);
}
