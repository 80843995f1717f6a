/** PL lineshape rendering helpers.
 *
 * The PL blob is two-column text (energy in eV, intensity already
 * max-normalized by the pipeline) with '#' header lines; parsing and the
 * SVG path construction are pure so they are testable without a DOM.
 */

export interface PlCurve {
  energies: number[];
  intensities: number[];
  metadata: Record<string, string>;
}

export function parsePlBlob(text: string): PlCurve {
  const energies: number[] = [];
  const intensities: number[] = [];
  const metadata: Record<string, string> = {};
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const colon = body.indexOf(":");
      if (colon > 0) {
        metadata[body.slice(0, colon).trim()] = body.slice(colon + 1).trim();
      }
      continue;
    }
    const parts = line.split(/\s+/);
    if (parts.length !== 2) {
      throw new Error(`PL blob line is not two columns: "${line}"`);
    }
    const e = Number(parts[0]);
    const i = Number(parts[1]);
    if (!Number.isFinite(e) || !Number.isFinite(i)) {
      throw new Error(`PL blob has non-numeric sample: "${line}"`);
    }
    energies.push(e);
    intensities.push(i);
  }
  if (energies.length === 0) throw new Error("PL blob holds no samples");
  return { energies, intensities, metadata };
}

export interface ChartGeometry {
  width: number;
  height: number;
  margin: number;
}

/** Map the curve into an SVG polyline path, one point per sample. */
export function svgPath(curve: PlCurve, geom: ChartGeometry): string {
  return svgPaths([curve], geom)[0]!;
}

/** Overlaid curves share one coordinate scale so they compare honestly. */
export function svgPaths(curves: PlCurve[], geom: ChartGeometry): string[] {
  const { width, height, margin } = geom;
  const eMin = Math.min(...curves.map((c) => Math.min(...c.energies)));
  const eMax = Math.max(...curves.map((c) => Math.max(...c.energies)));
  const iMax = Math.max(
    ...curves.map((c) => Math.max(...c.intensities)), 1e-300);
  const spanX = Math.max(eMax - eMin, 1e-12);
  const plotW = width - 2 * margin;
  const plotH = height - 2 * margin;
  return curves.map((curve) => {
    const parts: string[] = [];
    for (let k = 0; k < curve.energies.length; k++) {
      const x = margin + ((curve.energies[k]! - eMin) / spanX) * plotW;
      const y = height - margin - (curve.intensities[k]! / iMax) * plotH;
      parts.push(`${k === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    }
    return parts.join(" ");
  });
}

export function axisTicks(lo: number, hi: number, n: number): number[] {
  const ticks: number[] = [];
  for (let k = 0; k < n; k++) ticks.push(lo + ((hi - lo) * k) / (n - 1));
  return ticks;
}
