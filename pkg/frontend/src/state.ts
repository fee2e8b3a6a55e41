/**
 * View state <-> URL query string.
 *
 * Serialization is canonical: fixed parameter order, defaults omitted.
 * Every state the app can reach serializes to exactly one URL, and
 * deserializing that URL reproduces the state bit for bit, so any view is
 * a shareable link and history navigation just works.
 */

export type ViewKind = "table" | "scatter" | "histogram" | "trend";
export type Scope = "SAME_RECORD_MATERIALS" | "SAME_DOCUMENT";
export type Composition = "NEAT" | "BLEND" | "COMPOSITE";

export interface ViewState {
  view: ViewKind;
  property: string | null;
  material: string | null;
  minValue: number | null;
  maxValue: number | null;
  yearMin: number | null;
  yearMax: number | null;
  composition: Composition | null;
  keyword: string | null;
  scatterX: string;
  scatterY: string;
  scatterScope: Scope;
  colorByYear: boolean;
  page: number;
}

export const DEFAULT_STATE: ViewState = {
  view: "table",
  property: null,
  material: null,
  minValue: null,
  maxValue: null,
  yearMin: null,
  yearMax: null,
  composition: null,
  keyword: null,
  scatterX: "tensile strength",
  scatterY: "elongation at break",
  scatterScope: "SAME_RECORD_MATERIALS",
  colorByYear: false,
  page: 1,
};

const VIEWS: ViewKind[] = ["table", "scatter", "histogram", "trend"];
const SCOPES: Scope[] = ["SAME_RECORD_MATERIALS", "SAME_DOCUMENT"];
const COMPOSITIONS: Composition[] = ["NEAT", "BLEND", "COMPOSITE"];

export function serialize(state: ViewState): string {
  const params = new URLSearchParams();
  const put = (key: string, value: string | null) => {
    if (value !== null) params.set(key, value);
  };
  put("view", state.view === DEFAULT_STATE.view ? null : state.view);
  put("property", state.property);
  put("material", state.material);
  put("min", state.minValue === null ? null : String(state.minValue));
  put("max", state.maxValue === null ? null : String(state.maxValue));
  put("year_min", state.yearMin === null ? null : String(state.yearMin));
  put("year_max", state.yearMax === null ? null : String(state.yearMax));
  put("composition", state.composition);
  put("keyword", state.keyword);
  put("x", state.scatterX === DEFAULT_STATE.scatterX ? null : state.scatterX);
  put("y", state.scatterY === DEFAULT_STATE.scatterY ? null : state.scatterY);
  put(
    "scope",
    state.scatterScope === DEFAULT_STATE.scatterScope ? null : state.scatterScope,
  );
  put("color_year", state.colorByYear ? "1" : null);
  put("page", state.page === 1 ? null : String(state.page));
  return params.toString();
}

function parseNumber(raw: string | null): number | null {
  if (raw === null || raw.trim() === "") return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}

function parseChoice<T extends string>(
  raw: string | null,
  allowed: readonly T[],
  fallback: T,
): T {
  return allowed.includes(raw as T) ? (raw as T) : fallback;
}

export function deserialize(query: string): ViewState {
  const params = new URLSearchParams(query);
  const text = (key: string): string | null => {
    const value = params.get(key);
    return value === null || value === "" ? null : value;
  };
  const intOr = (key: string, fallback: number): number => {
    const value = parseNumber(params.get(key));
    return value === null ? fallback : Math.max(1, Math.trunc(value));
  };
  const composition = text("composition");
  return {
    view: parseChoice(params.get("view"), VIEWS, DEFAULT_STATE.view),
    property: text("property"),
    material: text("material"),
    minValue: parseNumber(params.get("min")),
    maxValue: parseNumber(params.get("max")),
    yearMin: parseNumber(params.get("year_min")),
    yearMax: parseNumber(params.get("year_max")),
    composition: COMPOSITIONS.includes(composition as Composition)
      ? (composition as Composition)
      : null,
    keyword: text("keyword"),
    scatterX: text("x") ?? DEFAULT_STATE.scatterX,
    scatterY: text("y") ?? DEFAULT_STATE.scatterY,
    scatterScope: parseChoice(
      params.get("scope"),
      SCOPES,
      DEFAULT_STATE.scatterScope,
    ),
    colorByYear: params.get("color_year") === "1",
    page: intOr("page", 1),
  };
}

export function withChanges(
  state: ViewState,
  changes: Partial<ViewState>,
): ViewState {
  const next = { ...state, ...changes };
  // filter edits restart pagination unless the page itself was changed
  if (!("page" in changes)) next.page = 1;
  return next;
}
