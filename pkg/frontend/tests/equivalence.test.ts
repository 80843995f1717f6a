/** UI/API equivalence against a live service.
 *
 * Spawns the real backend on the committed sample data, drives the same
 * code paths the browser uses (URL building, fetch client, table model),
 * and asserts every rendered cell equals the raw API response. Also checks
 * the refractive-index what-if: doubling n_D must display half the
 * lifetime within display rounding.
 */

import assert from "node:assert/strict";
import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { after, before, test } from "node:test";

import { ApiValue, defectsUrl, fetchDefects, rescaleLifetime } from "../src/api.js";
import { FilterState, emptyFilterState } from "../src/filter-state.js";
import { buildTableModel, formatCell } from "../src/table-model.js";
import { formatLifetimeNs } from "../src/format.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = path.resolve(process.cwd(), "..");
const STORED_N_D = 1.85;

let service: ReturnType<typeof spawn> | null = null;

function state(partial: Partial<FilterState>): FilterState {
  return { ...emptyFilterState(), ...partial };
}

// twenty scripted filter states covering options, identity filters, ranges
const SCRIPTED: FilterState[] = [
  state({}),
  state({ option: ["ZPL"] }),
  state({ option: ["ZPL"], valueRange: [2.0, 4.0] }),
  state({ option: ["ZPL", "lifetime"] }),
  state({ option: ["HR", "DW", "Q"] }),
  state({ option: ["all"] }),
  state({ host: ["bulk"] }),
  state({ host: ["monolayer"] }),
  state({ host: ["bulk", "monolayer"], option: ["ZPL_nm"] }),
  state({ spinMultiplicity: ["doublet"] }),
  state({ spinMultiplicity: ["singlet", "triplet"], option: ["ems_tdm"] }),
  state({ chargeState: [0] }),
  state({ chargeState: [-1, 1], option: ["misalignment"] }),
  state({ opticalSpinTransition: ["up"] }),
  state({ opticalSpinTransition: ["down"], option: ["abs_visibility"] }),
  state({ option: ["lifetime"], valueRange: [0.0, 1e6] }),
  state({ option: ["ems_angle"], host: ["bulk"], chargeState: [0] }),
  state({ option: ["E_ground", "E_excited"] }),
  state({ option: ["abs_tdm"], valueRange: [0.0, 100.0],
          spinMultiplicity: ["doublet", "singlet"] }),
  state({ option: ["ZPL"], valueRange: [5.0, 6.0], host: ["monolayer"] }),
];

before(async () => {
  const dir = mkdtempSync(path.join(tmpdir(), "hbndb-ui-"));
  const db = path.join(dir, "sample.db");
  const build = spawnSync("python3", [
    "-m", "hbndb.cli", "build-db",
    path.join(REPO_ROOT, "sample_data", "manifest"),
    "-o", db, "--gamma", "0.005", "--time-span", "1200",
  ], { cwd: REPO_ROOT, encoding: "utf-8" });
  assert.equal(build.status, 0,
    `build-db failed: ${build.stderr}\n${build.stdout}`);

  service = spawn("python3", [
    "-m", "hbndb.cli", "serve", db, "--port", String(PORT),
    "--refractive-index", String(STORED_N_D),
  ], { cwd: REPO_ROOT, stdio: "ignore" });

  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const ping = await fetch(`${BASE}/db`);
      if (ping.ok) break;
    } catch {
      // not up yet
    }
    assert.ok(Date.now() < deadline, "service did not come up in 20 s");
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
});

after(() => {
  service?.kill();
});

test("every table cell equals the API response for 20 scripted states",
  async () => {
    for (const filterState of SCRIPTED) {
      const response = await fetchDefects(BASE, filterState);
      const model = buildTableModel(response);

      // independent raw fetch of the same query: guards the URL builder
      const raw = await fetch(defectsUrl(BASE, filterState));
      assert.equal(raw.status, 200);
      const rawBody = await raw.json() as {
        columns: string[];
        records: Record<string, ApiValue>[];
      };

      assert.deepEqual(model.header, rawBody.columns);
      assert.equal(model.rows.length, rawBody.records.length);
      for (let r = 0; r < model.rows.length; r++) {
        const record = rawBody.records[r]!;
        for (let c = 0; c < rawBody.columns.length; c++) {
          const column = rawBody.columns[c]!;
          assert.equal(model.rows[r]!.cells[c],
                       formatCell(column, record[column]),
                       `state ${JSON.stringify(filterState)} row ${r} ` +
                       `column ${column}`);
          // numeric and text cells must reproduce the API value exactly
          const value = record[column];
          if (typeof value === "number") {
            assert.equal(Number(model.rows[r]!.cells[c]), value);
          } else if (typeof value === "string"
                     && !column.match(/^(structure|band|PL|raman)/)) {
            assert.equal(model.rows[r]!.cells[c], value);
          }
        }
      }
    }
  });

test("identity columns always lead the table", async () => {
  for (const filterState of SCRIPTED.slice(0, 6)) {
    const response = await fetchDefects(BASE, filterState);
    assert.deepEqual(response.columns.slice(0, 6), [
      "host", "defect", "defect_name", "charge_state",
      "spin_multiplicity", "optical_spin_transition",
    ]);
  }
});

test("slider at 2x the stored n_D displays tau/2 within display rounding",
  async () => {
    const response = await fetchDefects(BASE, state({ option: ["lifetime"] }));
    const row = response.records.find((r) => r["lifetime"] !== null);
    assert.ok(row, "sample database has a record with a stored lifetime");
    const stored = row!["lifetime"] as number;
    const rowId = row!["_row"] as number;

    const result = await rescaleLifetime(BASE, {
      record: rowId,
      n_d_new: 2 * STORED_N_D,
    });
    assert.equal(result.tau_old_ns, stored);
    assert.equal(formatLifetimeNs(result.tau_new_ns),
                 formatLifetimeNs(stored / 2));
  });

test("slider restored to the stored n_D displays the stored lifetime",
  async () => {
    const response = await fetchDefects(BASE, state({ option: ["lifetime"] }));
    const row = response.records.find((r) => r["lifetime"] !== null)!;
    const result = await rescaleLifetime(BASE, {
      record: row["_row"] as number,
      n_d_new: STORED_N_D,
    });
    assert.equal(formatLifetimeNs(result.tau_new_ns),
                 formatLifetimeNs(row["lifetime"] as number));
  });

test("a sweep of n_D values yields a monotone decreasing lifetime curve",
  async () => {
    const response = await fetchDefects(BASE, state({ option: ["lifetime"] }));
    const row = response.records.find((r) => r["lifetime"] !== null)!;
    const rowId = row["_row"] as number;
    let previous = Number.POSITIVE_INFINITY;
    for (let nd = 1.5; nd <= 2.5 + 1e-9; nd += 0.1) {
      const result = await rescaleLifetime(BASE,
        { record: rowId, n_d_new: nd });
      assert.ok(result.tau_new_ns < previous,
        `tau must decrease: ${result.tau_new_ns} at n_D = ${nd}`);
      previous = result.tau_new_ns;
    }
  });
