/** DOM wiring for the explorer: filter panel, results table, PL lineshape
 * view, and the refractive-index what-if slider. All numbers come from the
 * service; the client only formats them. */

import {
  ApiRecord,
  DefectsResponse,
  ServiceError,
  fetchDefects,
  rawDbUrl,
  rescaleLifetime,
} from "./api.js";
import { PlCurve, parsePlBlob, svgPaths } from "./chart.js";
import { debounce } from "./debounce.js";
import {
  DEFAULT_REFRACTIVE_INDEX,
  FilterState,
  HOSTS,
  NUMERIC_OPTION_KEYS,
  OPTICAL_SPIN_TRANSITIONS,
  SPIN_MULTIPLICITIES,
  CHARGE_STATES,
  decodeFilterState,
  emptyFilterState,
  encodeFilterState,
  stateToken,
  validateFilterState,
} from "./filter-state.js";
import { formatLifetimeNs, formatRefractiveIndex } from "./format.js";
import { buildTableModel } from "./table-model.js";

const BASE = "";
const WHATIF_DEBOUNCE_MS = 250;

const state: FilterState = decodeFilterState(window.location.search);
let inFlightToken = "";
let totalCount: number | null = null;
let lastResponse: DefectsResponse | null = null;
let currentCurve: { label: string; curve: PlCurve } | null = null;
let pinnedCurve: { label: string; curve: PlCurve } | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function checkboxGroup(
  containerId: string,
  values: readonly (string | number)[],
  selected: () => (string | number)[],
  toggle: (value: string | number, on: boolean) => void,
): void {
  const container = el<HTMLDivElement>(containerId);
  container.replaceChildren();
  for (const value of values) {
    const label = document.createElement("label");
    label.className = "option";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = selected().includes(value);
    box.addEventListener("change", () => {
      toggle(value, box.checked);
      onFiltersChanged();
    });
    label.append(box, document.createTextNode(String(value)));
    container.append(label);
  }
}

function toggleList<T>(list: T[], value: T, on: boolean): void {
  const at = list.indexOf(value);
  if (on && at < 0) list.push(value);
  if (!on && at >= 0) list.splice(at, 1);
}

function syncUrl(): void {
  const query = encodeFilterState(state);
  const url = query ? `?${query}` : window.location.pathname;
  window.history.replaceState(null, "", url);
}

function setError(message: string | null): void {
  const banner = el<HTMLDivElement>("error-banner");
  if (message === null) {
    banner.classList.add("hidden");
    banner.replaceChildren();
    return;
  }
  banner.classList.remove("hidden");
  banner.replaceChildren();
  banner.append(document.createTextNode(message));
  const retry = document.createElement("button");
  retry.textContent = "retry";
  retry.addEventListener("click", () => void refreshTable());
  banner.append(retry);
}

async function refreshTable(): Promise<void> {
  setError(null);
  const problems = validateFilterState(state);
  if (problems.length > 0) {
    setError(problems.join("; "));
    return;
  }
  const token = stateToken(state);
  inFlightToken = token;
  el<HTMLDivElement>("status").textContent = "loading";
  try {
    const response = await fetchDefects(BASE, state);
    if (stateToken(state) !== token || inFlightToken !== token) {
      return; // stale response: filters moved on while this was in flight
    }
    lastResponse = response;
    renderTable(response);
  } catch (err) {
    if (stateToken(state) !== token) return;
    const message = err instanceof ServiceError
      ? `service error ${err.status}: ${err.message}`
      : `service unreachable: ${String(err)}`;
    setError(message);
    el<HTMLDivElement>("status").textContent = "error";
  }
}

function renderTable(response: DefectsResponse): void {
  const model = buildTableModel(response);
  const table = el<HTMLTableElement>("results");
  table.replaceChildren();

  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const column of model.header) {
    const th = document.createElement("th");
    th.textContent = column;
    headRow.append(th);
  }
  thead.append(headRow);
  table.append(thead);

  const tbody = document.createElement("tbody");
  for (const row of model.rows) {
    const tr = document.createElement("tr");
    if (row.rowId !== null && row.rowId === state.selectedRow) {
      tr.classList.add("selected");
    }
    for (const cell of row.cells) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.append(td);
    }
    tr.addEventListener("click", () => {
      state.selectedRow = row.rowId;
      syncUrl();
      renderTable(response);
      void onRecordSelected(row.record);
    });
    tbody.append(tr);
  }
  table.append(tbody);

  const empty = el<HTMLDivElement>("empty-state");
  empty.classList.toggle("hidden", model.rows.length > 0);

  const filtered = hasActiveFilters();
  const status = filtered && totalCount !== null
    ? `${response.count} of ${totalCount} records`
    : `${response.count} records`;
  el<HTMLDivElement>("status").textContent = status;
}

function hasActiveFilters(): boolean {
  return state.host.length > 0 || state.spinMultiplicity.length > 0
    || state.chargeState.length > 0 || state.opticalSpinTransition.length > 0
    || state.valueRange !== null;
}

function onFiltersChanged(): void {
  syncUrl();
  updateRangeEnabled();
  void refreshTable();
}

function updateRangeEnabled(): void {
  const numeric = state.option.filter((o) =>
    (NUMERIC_OPTION_KEYS as readonly string[]).includes(o));
  const enabled = numeric.length === 1;
  el<HTMLInputElement>("range-lo").disabled = !enabled;
  el<HTMLInputElement>("range-hi").disabled = !enabled;
  el<HTMLDivElement>("range-hint").textContent = enabled
    ? `range on ${numeric[0]}`
    : "select exactly one numeric option to filter by value";
  if (!enabled) {
    state.valueRange = null;
    el<HTMLInputElement>("range-lo").value = "";
    el<HTMLInputElement>("range-hi").value = "";
  }
}

function readRangeInputs(): void {
  const lo = el<HTMLInputElement>("range-lo").value.trim();
  const hi = el<HTMLInputElement>("range-hi").value.trim();
  if (lo === "" || hi === "") {
    state.valueRange = null;
  } else {
    state.valueRange = [Number(lo), Number(hi)];
  }
  onFiltersChanged();
}

// ------------------------------------------------------- record detail ---

async function onRecordSelected(record: ApiRecord): Promise<void> {
  const panel = el<HTMLDivElement>("detail");
  panel.classList.remove("hidden");
  el<HTMLDivElement>("detail-title").textContent =
    `${record["defect"]} (q=${record["charge_state"]}, ` +
    `${record["spin_multiplicity"]}, ${record["optical_spin_transition"]})`;
  await Promise.all([renderLineshape(recordLabel(record)),
                     setupWhatIf(record)]);
}

function recordLabel(record: ApiRecord): string {
  return `${record["defect"]} q=${record["charge_state"]}`;
}

async function renderLineshape(label: string): Promise<void> {
  const holder = el<HTMLDivElement>("lineshape");
  holder.replaceChildren();
  if (state.selectedRow === null) return;
  const plState: FilterState = { ...state, option: ["PL"] };
  let response: DefectsResponse;
  try {
    response = await fetchDefects(BASE, plState);
  } catch (err) {
    holder.textContent = `PL lineshape unavailable: ${String(err)}`;
    return;
  }
  const match = response.records.find((r) => r["_row"] === state.selectedRow);
  const blob = match ? match["PL"] : null;
  currentCurve = null;
  if (typeof blob !== "string" || blob.length === 0) {
    holder.textContent = "no PL lineshape stored for this record";
    return;
  }
  try {
    currentCurve = { label, curve: parsePlBlob(atob(blob)) };
  } catch (err) {
    holder.textContent = `PL blob unreadable: ${String(err)}`;
    return;
  }
  drawCurves(holder);
}

function drawCurves(holder: HTMLDivElement): void {
  if (currentCurve === null) return;
  const shown = [currentCurve];
  if (pinnedCurve !== null && pinnedCurve.label !== currentCurve.label) {
    shown.push(pinnedCurve);
  }
  const geom = { width: 560, height: 280, margin: 36 };
  const ns = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(ns, "svg");
  svg.setAttribute("viewBox", `0 0 ${geom.width} ${geom.height}`);
  svg.setAttribute("class", "pl-chart");
  const classes = ["pl-curve", "pl-curve-pinned"];
  const paths = svgPaths(shown.map((s) => s.curve), geom);
  paths.forEach((d, i) => {
    const path = document.createElementNS(ns, "path");
    path.setAttribute("d", d);
    path.setAttribute("class", classes[i] ?? "pl-curve");
    path.setAttribute("fill", "none");
    svg.append(path);
  });
  const label = document.createElementNS(ns, "text");
  label.setAttribute("x", String(geom.width / 2));
  label.setAttribute("y", String(geom.height - 6));
  label.setAttribute("class", "axis-label");
  label.textContent = "energy (eV)";
  svg.append(label);
  const ylabel = document.createElementNS(ns, "text");
  ylabel.setAttribute("x", "12");
  ylabel.setAttribute("y", String(geom.height / 2));
  ylabel.setAttribute("class", "axis-label");
  ylabel.setAttribute("transform", `rotate(-90 12 ${geom.height / 2})`);
  ylabel.textContent = "intensity (max = 1)";
  svg.append(ylabel);

  const legend = document.createElement("div");
  legend.className = "legend";
  shown.forEach((entry, i) => {
    const item = document.createElement("span");
    item.className = `legend-item ${classes[i] ?? ""}`;
    item.textContent = entry.label + (i === 1 ? " (pinned)" : "");
    legend.append(item);
  });

  const pin = document.createElement("button");
  pin.className = "btn";
  pin.textContent = pinnedCurve === null
    ? "pin for comparison" : "unpin comparison";
  pin.addEventListener("click", () => {
    pinnedCurve = pinnedCurve === null ? currentCurve : null;
    drawCurves(holder);
  });

  const samples = currentCurve.curve.energies;
  const range = document.createElement("div");
  range.className = "hint";
  range.textContent = `${samples.length} samples, `
    + `${Math.min(...samples).toFixed(2)} to `
    + `${Math.max(...samples).toFixed(2)} eV`;
  holder.replaceChildren(svg, legend, pin, range);
}

async function setupWhatIf(record: ApiRecord): Promise<void> {
  const slider = el<HTMLInputElement>("nd-slider");
  const readout = el<HTMLDivElement>("nd-readout");
  const badge = el<HTMLSpanElement>("stale-badge");
  const row = state.selectedRow;
  if (row === null) return;

  slider.value = String(state.refractiveIndex);
  el<HTMLSpanElement>("nd-value").textContent =
    formatRefractiveIndex(Number(slider.value));

  const apply = async (ndNew: number) => {
    try {
      const result = await rescaleLifetime(BASE, {
        record: row,
        n_d_new: ndNew,
      });
      if (state.selectedRow !== row) return;
      badge.classList.add("hidden");
      readout.textContent =
        `lifetime ${formatLifetimeNs(result.tau_old_ns)} at ` +
        `n_D = ${formatRefractiveIndex(result.n_d_old)}  ->  ` +
        `${formatLifetimeNs(result.tau_new_ns)} at ` +
        `n_D = ${formatRefractiveIndex(result.n_d_new)}`;
    } catch (err) {
      badge.classList.remove("hidden");
      badge.title = err instanceof ServiceError ? err.message : String(err);
    }
  };

  const debounced = debounce((value: number) => void apply(value),
                             WHATIF_DEBOUNCE_MS);
  slider.oninput = () => {
    const value = Number(slider.value);
    state.refractiveIndex = value;
    el<HTMLSpanElement>("nd-value").textContent =
      formatRefractiveIndex(value);
    syncUrl();
    debounced(value);
  };

  const hasLifetime = record["lifetime"] !== null
    && record["lifetime"] !== undefined;
  if (!hasLifetime && !state.option.includes("lifetime")
      && !state.option.includes("all")) {
    // lifetime may simply not be in the selected columns; ask the service
    await apply(state.refractiveIndex);
    return;
  }
  if (!hasLifetime) {
    readout.textContent = "no stored lifetime for this record";
    slider.disabled = true;
    return;
  }
  slider.disabled = false;
  await apply(state.refractiveIndex);
}

// --------------------------------------------------------------- set up ---

function initPanels(): void {
  const optionPool = [...NUMERIC_OPTION_KEYS];
  checkboxGroup("options", optionPool,
                () => state.option,
                (v, on) => toggleList(state.option, String(v), on));
  checkboxGroup("hosts", HOSTS,
                () => state.host,
                (v, on) => toggleList(state.host, String(v), on));
  checkboxGroup("spins", SPIN_MULTIPLICITIES,
                () => state.spinMultiplicity,
                (v, on) => toggleList(state.spinMultiplicity, String(v), on));
  checkboxGroup("charges", CHARGE_STATES,
                () => state.chargeState,
                (v, on) => toggleList(state.chargeState, Number(v), on));
  checkboxGroup("transitions", OPTICAL_SPIN_TRANSITIONS,
                () => state.opticalSpinTransition,
                (v, on) => toggleList(state.opticalSpinTransition,
                                      String(v), on));
  el<HTMLInputElement>("range-lo").addEventListener("change", readRangeInputs);
  el<HTMLInputElement>("range-hi").addEventListener("change", readRangeInputs);
  el<HTMLButtonElement>("clear-filters").addEventListener("click", () => {
    const fresh = emptyFilterState();
    fresh.refractiveIndex = state.refractiveIndex;
    Object.assign(state, fresh);
    initPanels();
    onFiltersChanged();
  });
  el<HTMLAnchorElement>("download-db").href = rawDbUrl(BASE);
  if (state.valueRange) {
    el<HTMLInputElement>("range-lo").value = String(state.valueRange[0]);
    el<HTMLInputElement>("range-hi").value = String(state.valueRange[1]);
  }
  updateRangeEnabled();
}

async function start(): Promise<void> {
  initPanels();
  try {
    const everything = await fetchDefects(BASE, emptyFilterState());
    totalCount = everything.count;
  } catch {
    totalCount = null;
  }
  await refreshTable();
}

if (typeof document !== "undefined") {
  void start();
}
