/** Typed client for the record query service. */

import type { Scope, ViewState } from "./state.js";

export interface MaterialJson {
  surface: string;
  label: string;
  normalized: string | null;
  cluster: number;
}

export interface ValueJson {
  numeric: number;
  unit_raw: string;
  canonical_numeric: number | null;
  unit_canonical: string | null;
  error: number | null;
  range: [number, number] | null;
}

export interface RecordJson {
  doc_id: string;
  year: number | null;
  doi: string | null;
  materials: MaterialJson[];
  property_raw: string;
  property_canonical: string;
  value: ValueJson;
  amount: { material: string; cluster: number; value: ValueJson } | null;
  relation_mode: string;
  composition_class: string;
}

export interface RecordsPage {
  records: RecordJson[];
  total: number;
  page: number;
  page_size: number;
}

export interface PropertiesResponse {
  properties: { name: string; count: number }[];
}

export interface StatsResponse {
  total: number;
  composition: Record<string, number>;
  unique_neat_polymers: number;
  yearly_counts: Record<string, number>;
}

export interface ScatterResponse {
  pairs: { x: number; y: number; doc_id: string; year: number | null }[];
  x_unit: string | null;
  y_unit: string | null;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export function recordParams(state: ViewState, pageSize: number): URLSearchParams {
  const params = new URLSearchParams();
  if (state.property) params.set("property", state.property);
  if (state.material) params.set("material", state.material);
  if (state.minValue !== null) params.set("min", String(state.minValue));
  if (state.maxValue !== null) params.set("max", String(state.maxValue));
  if (state.yearMin !== null) params.set("year_min", String(state.yearMin));
  if (state.yearMax !== null) params.set("year_max", String(state.yearMax));
  if (state.composition) params.set("composition", state.composition);
  if (state.keyword) params.set("keyword", state.keyword);
  params.set("page", String(state.page));
  params.set("page_size", String(pageSize));
  return params;
}

export class Client {
  constructor(readonly base: string) {}

  private async get<T>(path: string, params?: URLSearchParams): Promise<T> {
    const query = params && params.size > 0 ? `?${params.toString()}` : "";
    const response = await fetch(`${this.base}${path}${query}`);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  records(state: ViewState, pageSize: number): Promise<RecordsPage> {
    return this.get<RecordsPage>("/records", recordParams(state, pageSize));
  }

  properties(): Promise<PropertiesResponse> {
    return this.get<PropertiesResponse>("/properties");
  }

  stats(state: ViewState): Promise<StatsResponse> {
    const params = new URLSearchParams();
    if (state.property) params.set("property", state.property);
    if (state.material) params.set("material", state.material);
    if (state.composition) params.set("composition", state.composition);
    if (state.keyword) params.set("keyword", state.keyword);
    return this.get<StatsResponse>("/stats", params);
  }

  scatter(x: string, y: string, scope: Scope): Promise<ScatterResponse> {
    const params = new URLSearchParams({ x, y, scope });
    return this.get<ScatterResponse>("/scatter", params);
  }
}
