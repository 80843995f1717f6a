import assert from "node:assert/strict";
import { test } from "node:test";

import { parsePlBlob, svgPath } from "../src/chart.js";

const BLOB = `# kind: pl_lineshape
# columns: energy_eV intensity
# gamma_ev: 0.005
1.9000000000e+00 1.2000000000e-02
2.0000000000e+00 1.0000000000e+00
2.1000000000e+00 4.0000000000e-01
`;

test("parses header metadata and samples", () => {
  const curve = parsePlBlob(BLOB);
  assert.equal(curve.energies.length, 3);
  assert.equal(curve.intensities[1], 1.0);
  assert.equal(curve.metadata["gamma_ev"], "0.005");
  assert.equal(curve.metadata["kind"], "pl_lineshape");
});

test("every sample becomes one path point", () => {
  const curve = parsePlBlob(BLOB);
  const path = svgPath(curve, { width: 560, height: 280, margin: 36 });
  const points = path.split(" ");
  assert.equal(points.length, 3);
  assert.ok(points[0]!.startsWith("M"));
  assert.ok(points.slice(1).every((p) => p.startsWith("L")));
});

test("peak maps to the top of the plot area", () => {
  const curve = parsePlBlob(BLOB);
  const geom = { width: 560, height: 280, margin: 36 };
  const path = svgPath(curve, geom);
  const ys = path.split(" ").map((p) => Number(p.slice(1).split(",")[1]));
  assert.equal(Math.min(...ys), geom.margin);
});

test("rejects malformed sample lines", () => {
  assert.throws(() => parsePlBlob("1.0 2.0 3.0\n"), /two columns/);
  assert.throws(() => parsePlBlob("abc def\n"), /non-numeric/);
  assert.throws(() => parsePlBlob("# only headers\n"), /no samples/);
});

test("overlaid curves share one coordinate scale", async () => {
  const { svgPaths } = await import("../src/chart.js");
  const a = parsePlBlob("1.0 0.5\n2.0 1.0\n");
  const b = parsePlBlob("2.0 0.25\n3.0 0.5\n");
  const geom = { width: 560, height: 280, margin: 36 };
  const [pa, pb] = svgPaths([a, b], geom);
  // shared x-scale: curve a starts at the left margin, curve b ends at the
  // right margin, and they meet at 2.0 eV with the same x coordinate
  const ax = pa!.split(" ").map((p) => Number(p.slice(1).split(",")[0]));
  const bx = pb!.split(" ").map((p) => Number(p.slice(1).split(",")[0]));
  assert.equal(ax[0], geom.margin);
  assert.equal(bx[1], geom.width - geom.margin);
  assert.equal(ax[1], bx[0]);
  // shared y-scale: the global maximum (1.0 on curve a) touches the top
  const ay = pa!.split(" ").map((p) => Number(p.slice(1).split(",")[1]));
  const by = pb!.split(" ").map((p) => Number(p.slice(1).split(",")[1]));
  assert.equal(Math.min(...ay), geom.margin);
  assert.ok(Math.min(...by) > geom.margin);
});
