/** DOM wiring: URL-backed state, filter form, and the four views. */

import { ApiError, Client } from "./api.js";
import {
  DEFAULT_STATE,
  ViewState,
  deserialize,
  serialize,
  withChanges,
} from "./state.js";
import {
  PLOT_SIZE,
  histogramBars,
  scatterModel,
  tableRows,
  trendBars,
} from "./views.js";

const PAGE_SIZE = 25;
const API_BASE =
  (window as unknown as { POLYREC_API?: string }).POLYREC_API ??
  "http://localhost:8000";

const client = new Client(API_BASE);
let state: ViewState = deserialize(window.location.search);
let requestToken = 0; // concurrent responses resolve last-write-wins

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setState(changes: Partial<ViewState>, push = true) {
  state = withChanges(state, changes);
  const query = serialize(state);
  const url = query ? `?${query}` : window.location.pathname;
  if (push) history.pushState(null, "", url);
  void refresh();
}

window.addEventListener("popstate", () => {
  state = deserialize(window.location.search);
  syncForm();
  void refresh();
});

// ---- filter form ---------------------------------------------------------

function input(id: string): HTMLInputElement {
  return el<HTMLInputElement>(id);
}

function select(id: string): HTMLSelectElement {
  return el<HTMLSelectElement>(id);
}

function syncForm() {
  input("f-property").value = state.property ?? "";
  input("f-material").value = state.material ?? "";
  input("f-min").value = state.minValue === null ? "" : String(state.minValue);
  input("f-max").value = state.maxValue === null ? "" : String(state.maxValue);
  input("f-year-min").value = state.yearMin === null ? "" : String(state.yearMin);
  input("f-year-max").value = state.yearMax === null ? "" : String(state.yearMax);
  select("f-composition").value = state.composition ?? "";
  input("f-keyword").value = state.keyword ?? "";
  select("s-x").value = state.scatterX;
  select("s-y").value = state.scatterY;
  select("s-scope").value = state.scatterScope;
  input("s-color-year").checked = state.colorByYear;
  for (const kind of ["table", "scatter", "histogram", "trend"] as const) {
    el(`tab-${kind}`).classList.toggle("active", state.view === kind);
  }
}

function readFilters(): Partial<ViewState> {
  const num = (raw: string) => (raw.trim() === "" ? null : Number(raw));
  return {
    property: input("f-property").value.trim() || null,
    material: input("f-material").value.trim() || null,
    minValue: num(input("f-min").value),
    maxValue: num(input("f-max").value),
    yearMin: num(input("f-year-min").value),
    yearMax: num(input("f-year-max").value),
    composition:
      (select("f-composition").value as ViewState["composition"]) || null,
    keyword: input("f-keyword").value.trim() || null,
  };
}

// ---- rendering -----------------------------------------------------------

function showError(message: string | null) {
  const banner = el("error-banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

function escapeHtml(raw: string): string {
  return raw
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

async function renderTable() {
  const page = await client.records(state, PAGE_SIZE);
  const rows = tableRows(page);
  const body = rows
    .map(
      (row) => `<tr>
        <td>${escapeHtml(row.material)}</td>
        <td>${escapeHtml(row.property)}</td>
        <td class="num">${escapeHtml(row.value)}</td>
        <td class="num">${row.year}</td>
        <td>${
          row.doiUrl
            ? `<a href="${row.doiUrl}" target="_blank" rel="noopener">${escapeHtml(row.docId)}</a>`
            : escapeHtml(row.docId)
        }</td>
      </tr>`,
    )
    .join("");
  const pages = Math.max(1, Math.ceil(page.total / page.page_size));
  el("view-table").innerHTML = rows.length
    ? `<table>
        <thead><tr><th>material</th><th>property</th><th>value</th>
        <th>year</th><th>source</th></tr></thead>
        <tbody>${body}</tbody>
      </table>`
    : `<p class="empty">No records match the current filters.</p>`;
  el("pager").innerHTML = `
    <button id="prev-page" ${page.page <= 1 ? "disabled" : ""}>&larr;</button>
    <span>page ${page.page} / ${pages} &middot; ${page.total} records</span>
    <button id="next-page" ${page.page >= pages ? "disabled" : ""}>&rarr;</button>`;
  el("prev-page").onclick = () => setState({ page: state.page - 1 });
  el("next-page").onclick = () => setState({ page: state.page + 1 });
}

async function renderScatter() {
  const payload = await client.scatter(
    state.scatterX,
    state.scatterY,
    state.scatterScope,
  );
  const model = scatterModel(
    payload,
    state.scatterX,
    state.scatterY,
    state.colorByYear,
  );
  const { width, height, pad } = PLOT_SIZE;
  const circles = model.points
    .map(
      (p) =>
        `<circle cx="${p.px.toFixed(1)}" cy="${p.py.toFixed(1)}" r="4"
           fill="${p.color}" fill-opacity="0.75">
           <title>${escapeHtml(p.docId)}${p.year !== null ? ` (${p.year})` : ""}: ${p.x}, ${p.y}</title>
         </circle>`,
    )
    .join("");
  const xTicks = model.xTicks
    .map(
      (t) => `<g transform="translate(${t.at.toFixed(1)},${height - pad})">
        <line y2="5" stroke="#888"/><text y="18" text-anchor="middle">${t.label}</text></g>`,
    )
    .join("");
  const yTicks = model.yTicks
    .map(
      (t) => `<g transform="translate(${pad},${t.at.toFixed(1)})">
        <line x2="-5" stroke="#888"/><text x="-8" dy="4" text-anchor="end">${t.label}</text></g>`,
    )
    .join("");
  el("view-scatter").innerHTML = model.points.length
    ? `<svg viewBox="0 0 ${width} ${height}" role="img">
        <rect x="${pad}" y="${pad}" width="${width - 2 * pad}" height="${height - 2 * pad}"
              fill="none" stroke="#ccc"/>
        ${circles}${xTicks}${yTicks}
        <text x="${width / 2}" y="${height - 8}" text-anchor="middle">${escapeHtml(model.xLabel)}</text>
        <text x="14" y="${height / 2}" text-anchor="middle"
              transform="rotate(-90 14 ${height / 2})">${escapeHtml(model.yLabel)}</text>
      </svg>
      <p class="note">${model.points.length} points (one per paper/material system)</p>`
    : `<p class="empty">No paired values for these two properties.</p>`;
}

async function renderHistogram() {
  const payload = await client.properties();
  const bars = histogramBars(payload.properties);
  el("view-histogram").innerHTML = bars.length
    ? bars
        .map(
          (bar) => `<div class="bar-row">
            <span class="bar-label" title="${escapeHtml(bar.label)}">${escapeHtml(bar.label)}</span>
            <div class="bar" style="width:${(bar.fraction * 100).toFixed(1)}%"></div>
            <span class="bar-count">${bar.count}</span>
          </div>`,
        )
        .join("")
    : `<p class="empty">The store is empty.</p>`;
}

async function renderTrend() {
  const payload = await client.stats(state);
  const bars = trendBars(payload);
  const summary = `
    <p class="note">${payload.total} records &middot;
    NEAT ${payload.composition["NEAT"] ?? 0} /
    BLEND ${payload.composition["BLEND"] ?? 0} /
    COMPOSITE ${payload.composition["COMPOSITE"] ?? 0} &middot;
    ${payload.unique_neat_polymers} unique neat polymers</p>`;
  el("view-trend").innerHTML = bars.length
    ? summary +
      bars
        .map(
          (bar) => `<div class="bar-row">
            <span class="bar-label">${escapeHtml(bar.label)}</span>
            <div class="bar trend" style="width:${(bar.fraction * 100).toFixed(1)}%"></div>
            <span class="bar-count">${bar.count}</span>
          </div>`,
        )
        .join("")
    : `${summary}<p class="empty">No records for this filter.</p>`;
}

async function refresh() {
  const token = ++requestToken;
  syncForm();
  for (const kind of ["table", "scatter", "histogram", "trend"] as const) {
    el(`view-${kind}`).style.display = state.view === kind ? "block" : "none";
  }
  el("pager").style.display = state.view === "table" ? "flex" : "none";
  el("scatter-controls").style.display =
    state.view === "scatter" ? "flex" : "none";
  try {
    const work =
      state.view === "table"
        ? renderTable()
        : state.view === "scatter"
          ? renderScatter()
          : state.view === "histogram"
            ? renderHistogram()
            : renderTrend();
    await work;
    if (token === requestToken) showError(null);
  } catch (error) {
    if (token !== requestToken) return; // a newer request superseded this one
    showError(
      error instanceof ApiError
        ? `API error: ${error.message}`
        : `Cannot reach the record service at ${API_BASE}`,
    );
  }
}

async function populatePropertyPickers() {
  try {
    const payload = await client.properties();
    const names = payload.properties.map((p) => p.name);
    const options = (selected: string) =>
      names
        .map(
          (name) =>
            `<option value="${escapeHtml(name)}" ${name === selected ? "selected" : ""}>${escapeHtml(name)}</option>`,
        )
        .join("");
    select("s-x").innerHTML = options(state.scatterX);
    select("s-y").innerHTML = options(state.scatterY);
    if (names.length && !names.includes(state.scatterX)) {
      select("s-x").insertAdjacentHTML(
        "afterbegin",
        `<option selected>${escapeHtml(state.scatterX)}</option>`,
      );
    }
    if (names.length && !names.includes(state.scatterY)) {
      select("s-y").insertAdjacentHTML(
        "afterbegin",
        `<option selected>${escapeHtml(state.scatterY)}</option>`,
      );
    }
  } catch {
    /* picker stays free-form; refresh() surfaces connectivity errors */
  }
}

function bind() {
  el("filters").addEventListener("submit", (event) => {
    event.preventDefault();
    setState(readFilters());
  });
  el("f-reset").addEventListener("click", () => setState({ ...DEFAULT_STATE, view: state.view }));
  for (const kind of ["table", "scatter", "histogram", "trend"] as const) {
    el(`tab-${kind}`).addEventListener("click", () =>
      setState({ view: kind, page: state.page }),
    );
  }
  select("s-x").addEventListener("change", () =>
    setState({ scatterX: select("s-x").value }),
  );
  select("s-y").addEventListener("change", () =>
    setState({ scatterY: select("s-y").value }),
  );
  select("s-scope").addEventListener("change", () =>
    setState({
      scatterScope: select("s-scope").value as ViewState["scatterScope"],
    }),
  );
  input("s-color-year").addEventListener("change", () =>
    setState({ colorByYear: input("s-color-year").checked }),
  );
}

bind();
syncForm();
void populatePropertyPickers();
void refresh();
