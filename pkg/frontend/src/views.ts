/**
 * Pure view models: API payloads in, renderable structures out.
 *
 * Everything displayed comes straight from the API payloads; the client
 * never re-aggregates, so counts shown always equal the service's counts.
 */

import type {
  RecordJson,
  RecordsPage,
  ScatterResponse,
  StatsResponse,
} from "./api.js";

export interface TableRow {
  material: string;
  property: string;
  value: string;
  year: string;
  docId: string;
  doiUrl: string | null;
}

function formatValue(record: RecordJson): string {
  const v = record.value;
  if (v.canonical_numeric !== null && v.unit_canonical !== null) {
    return `${formatNumber(v.canonical_numeric)} ${v.unit_canonical}`;
  }
  const unit = v.unit_raw ? ` ${v.unit_raw}` : "";
  return `${formatNumber(v.numeric)}${unit} (not converted)`;
}

function formatNumber(n: number): string {
  if (n !== 0 && (Math.abs(n) < 1e-3 || Math.abs(n) >= 1e6)) {
    return n.toExponential(3).replace("e", " × 10^");
  }
  return String(Math.round(n * 1e6) / 1e6);
}

export function tableRows(page: RecordsPage): TableRow[] {
  return page.records.map((record) => ({
    material: record.materials
      .map((m) => m.normalized ?? m.surface)
      .join(" + "),
    property: record.property_canonical,
    value: formatValue(record),
    year: record.year === null ? "—" : String(record.year),
    docId: record.doc_id,
    doiUrl: record.doi ? `https://doi.org/${record.doi}` : null,
  }));
}

export interface ScatterPoint {
  px: number; // plot coordinates
  py: number;
  x: number; // data values, for the tooltip
  y: number;
  docId: string;
  year: number | null;
  color: string;
}

export interface ScatterModel {
  points: ScatterPoint[];
  xLabel: string;
  yLabel: string;
  xTicks: { at: number; label: string }[];
  yTicks: { at: number; label: string }[];
}

const PLOT = { width: 640, height: 420, pad: 50 };

function yearColor(year: number | null, min: number, max: number): string {
  if (year === null || max <= min) return "#4477aa";
  const t = (year - min) / (max - min);
  const hue = 220 - 180 * t; // older blue, recent orange-red
  return `hsl(${Math.round(hue)}, 70%, 45%)`;
}

export function scatterModel(
  payload: ScatterResponse,
  xName: string,
  yName: string,
  colorByYear: boolean,
): ScatterModel {
  const xs = payload.pairs.map((p) => p.x);
  const ys = payload.pairs.map((p) => p.y);
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const years = payload.pairs
    .map((p) => p.year)
    .filter((y): y is number => y !== null);
  const yearMin = years.length ? Math.min(...years) : 0;
  const yearMax = years.length ? Math.max(...years) : 0;

  const sx = (v: number) =>
    PLOT.pad + ((v - x0) / (x1 - x0 || 1)) * (PLOT.width - 2 * PLOT.pad);
  const sy = (v: number) =>
    PLOT.height - PLOT.pad - ((v - y0) / (y1 - y0 || 1)) * (PLOT.height - 2 * PLOT.pad);

  return {
    points: payload.pairs.map((p) => ({
      px: sx(p.x),
      py: sy(p.y),
      x: p.x,
      y: p.y,
      docId: p.doc_id,
      year: p.year,
      color: colorByYear ? yearColor(p.year, yearMin, yearMax) : "#4477aa",
    })),
    xLabel: payload.x_unit ? `${xName} (${payload.x_unit})` : xName,
    yLabel: payload.y_unit ? `${yName} (${payload.y_unit})` : yName,
    xTicks: ticks(x0, x1).map((v) => ({ at: sx(v), label: formatNumber(v) })),
    yTicks: ticks(y0, y1).map((v) => ({ at: sy(v), label: formatNumber(v) })),
  };
}

function extent(values: number[]): [number, number] {
  if (!values.length) return [0, 1];
  return [Math.min(...values), Math.max(...values)];
}

function ticks(lo: number, hi: number, count = 5): number[] {
  if (hi <= lo) return [lo];
  const out = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

export interface Bar {
  label: string;
  count: number;
  fraction: number; // of the tallest bar
}

export function histogramBars(
  properties: { name: string; count: number }[],
  limit = 25,
): Bar[] {
  const top = properties.slice(0, limit);
  const peak = top.length ? Math.max(...top.map((p) => p.count)) : 1;
  return top.map((p) => ({
    label: p.name,
    count: p.count,
    fraction: p.count / peak,
  }));
}

export function trendBars(stats: StatsResponse): Bar[] {
  const years = Object.keys(stats.yearly_counts)
    .filter((k) => k !== "unknown")
    .sort();
  if (stats.yearly_counts["unknown"] !== undefined) years.push("unknown");
  const peak = years.length
    ? Math.max(...years.map((y) => stats.yearly_counts[y]))
    : 1;
  return years.map((year) => ({
    label: year,
    count: stats.yearly_counts[year],
    fraction: stats.yearly_counts[year] / peak,
  }));
}

export const PLOT_SIZE = PLOT;
