/**
 * Diffusion-fit chart (SVG): c and alpha versus noise rate, one series per
 * disorder value (lighter strokes for stronger disorder), split into the
 * dephasing-rate and hop-rate families, with dashed guide lines c = 1/rate
 * on the dephasing panel and c = rate on the hop panel.
 */

import { FitRow } from "./csv.js";

const PANEL_W = 330;
const PANEL_H = 250;
const MARGIN = { left: 62, right: 16, top: 34, bottom: 42 };
const GAP = 26;

interface Pt {
  rate: number;
  value: number;
}

function seriesColor(index: number, count: number): string {
  // darkest for the smallest disorder, lighter for larger
  const light = count <= 1 ? 35 : 25 + (55 * index) / (count - 1);
  return `hsl(215, 65%, ${light.toFixed(1)}%)`;
}

function fmt(v: number): string {
  if (v >= 1000 || (v > 0 && v < 0.01)) return v.toExponential(0).replace("e+0", "e").replace("e-0", "e-");
  return String(Math.round(v * 1000) / 1000);
}

class LogAxis {
  constructor(
    readonly min: number,
    readonly max: number,
    readonly px0: number,
    readonly px1: number,
  ) {}

  map(v: number): number {
    const f = (Math.log10(v) - Math.log10(this.min)) / (Math.log10(this.max) - Math.log10(this.min));
    return this.px0 + f * (this.px1 - this.px0);
  }

  decades(): number[] {
    const ticks: number[] = [];
    for (let e = Math.ceil(Math.log10(this.min) - 1e-9); e <= Math.floor(Math.log10(this.max) + 1e-9); e++) {
      ticks.push(10 ** e);
    }
    return ticks;
  }
}

class LinAxis {
  constructor(
    readonly min: number,
    readonly max: number,
    readonly px0: number,
    readonly px1: number,
  ) {}

  map(v: number): number {
    return this.px0 + ((v - this.min) / (this.max - this.min)) * (this.px1 - this.px0);
  }
}

function panel(
  x0: number,
  y0: number,
  title: string,
  xLabel: string,
  yLabel: string,
  xAxis: LogAxis,
  yLogAxis: LogAxis | null,
  yLinAxis: LinAxis | null,
  body: string[],
): string {
  const parts: string[] = [];
  const plotX0 = x0 + MARGIN.left;
  const plotX1 = x0 + PANEL_W - MARGIN.right;
  const plotY0 = y0 + MARGIN.top;
  const plotY1 = y0 + PANEL_H - MARGIN.bottom;
  parts.push(
    `<rect x="${plotX0}" y="${plotY0}" width="${plotX1 - plotX0}" height="${plotY1 - plotY0}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${x0 + PANEL_W / 2}" y="${y0 + 18}" text-anchor="middle" font-size="13" font-family="sans-serif">${title}</text>`,
  );
  for (const t of xAxis.decades()) {
    const px = xAxis.map(t);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${plotY0}" x2="${px.toFixed(2)}" y2="${plotY1}" stroke="#ddd" stroke-width="0.6"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${plotY1 + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  if (yLogAxis) {
    for (const t of yLogAxis.decades()) {
      const py = yLogAxis.map(t);
      parts.push(`<line x1="${plotX0}" y1="${py.toFixed(2)}" x2="${plotX1}" y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.6"/>`);
      parts.push(
        `<text x="${plotX0 - 6}" y="${(py + 3).toFixed(2)}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
      );
    }
  }
  if (yLinAxis) {
    for (let v = 0; v <= yLinAxis.max + 1e-9; v += 0.5) {
      const py = yLinAxis.map(v);
      parts.push(`<line x1="${plotX0}" y1="${py.toFixed(2)}" x2="${plotX1}" y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.6"/>`);
      parts.push(
        `<text x="${plotX0 - 6}" y="${(py + 3).toFixed(2)}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(v)}</text>`,
      );
    }
  }
  parts.push(
    `<text x="${(plotX0 + plotX1) / 2}" y="${y0 + PANEL_H - 8}" text-anchor="middle" font-size="11" font-family="sans-serif">${xLabel}</text>`,
  );
  parts.push(
    `<text x="${x0 + 14}" y="${(plotY0 + plotY1) / 2}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 ${x0 + 14} ${(plotY0 + plotY1) / 2})">${yLabel}</text>`,
  );
  parts.push(...body);
  return parts.join("\n");
}

export function renderFitChart(rows: FitRow[]): string {
  const valid = rows.filter((r) => r.valid && r.c > 0 && Number.isFinite(r.alpha));
  const skipped = rows.length - valid.length;
  if (skipped > 0) console.warn(`fit chart: skipped ${skipped} invalid row(s)`);
  if (valid.length === 0) throw new Error("no valid fit rows to plot");

  const allFamilies: { name: string; xLabel: string; rowsOf: FitRow[]; guide: "inverse" | "equal" }[] = [
    {
      name: "ON-SITE DEPHASING",
      xLabel: "dephasing rate (units of g)",
      rowsOf: valid.filter((r) => r.gamma > 0),
      guide: "inverse",
    },
    {
      name: "INCOHERENT HOPPING",
      xLabel: "hop rate (units of g)",
      rowsOf: valid.filter((r) => r.bigGamma > 0),
      guide: "equal",
    },
  ];
  const families = allFamilies.filter((f) => f.rowsOf.length > 0);
  if (families.length === 0) throw new Error("no rate-family rows to plot (all rates zero)");

  const width = families.length * PANEL_W + (families.length - 1) * GAP + 2 * GAP;
  const height = 2 * PANEL_H + GAP + 2 * GAP;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  families.forEach((family, fi) => {
    const x0 = GAP + fi * (PANEL_W + GAP);
    const rates = family.rowsOf.map((r) => Math.max(r.gamma, r.bigGamma));
    const deltas = [...new Set(family.rowsOf.map((r) => r.delta))].sort((a, b) => a - b);
    const rateMin = Math.min(...rates);
    const rateMax = Math.max(...rates);
    const cVals = family.rowsOf.map((r) => r.c);
    const guideVals =
      family.guide === "equal" ? [rateMin, rateMax] : [1 / rateMin, 1 / rateMax];
    const cMin = Math.min(...cVals, ...guideVals);
    const cMax = Math.max(...cVals, ...guideVals);

    const xAxis = new LogAxis(rateMin / 1.5, rateMax * 1.5, x0 + MARGIN.left, x0 + PANEL_W - MARGIN.right);
    const cAxis = new LogAxis(cMin / 2, cMax * 2, GAP + PANEL_H - MARGIN.bottom, GAP + MARGIN.top);
    const aAxis = new LinAxis(0, 2.2, GAP + PANEL_H + GAP + PANEL_H - MARGIN.bottom, GAP + PANEL_H + GAP + MARGIN.top);

    // dashed guide on the c panel
    const gx0 = xAxis.map(rateMin);
    const gx1 = xAxis.map(rateMax);
    const gy0 = cAxis.map(family.guide === "equal" ? rateMin : 1 / rateMin);
    const gy1 = cAxis.map(family.guide === "equal" ? rateMax : 1 / rateMax);
    const guideLabel = family.guide === "equal" ? "c = rate" : "c = 1/rate";
    const cBody: string[] = [
      `<line x1="${gx0.toFixed(2)}" y1="${gy0.toFixed(2)}" x2="${gx1.toFixed(2)}" y2="${gy1.toFixed(2)}" stroke="#777" stroke-width="1.2" stroke-dasharray="6,4"/>`,
      `<text x="${(gx1 - 4).toFixed(2)}" y="${(gy1 + 12).toFixed(2)}" text-anchor="end" font-size="10" font-family="sans-serif" fill="#555">${guideLabel}</text>`,
    ];
    const aBody: string[] = [
      `<line x1="${xAxis.px0}" y1="${aAxis.map(1).toFixed(2)}" x2="${xAxis.px1}" y2="${aAxis.map(1).toFixed(2)}" stroke="#999" stroke-width="0.8" stroke-dasharray="2,3"/>`,
      `<line x1="${xAxis.px0}" y1="${aAxis.map(2).toFixed(2)}" x2="${xAxis.px1}" y2="${aAxis.map(2).toFixed(2)}" stroke="#999" stroke-width="0.8" stroke-dasharray="2,3"/>`,
    ];

    deltas.forEach((delta, di) => {
      const color = seriesColor(di, deltas.length);
      const pts = family.rowsOf
        .filter((r) => r.delta === delta)
        .map((r) => ({ rate: Math.max(r.gamma, r.bigGamma), c: r.c, alpha: r.alpha }))
        .sort((a, b) => a.rate - b.rate);
      const cPath = pts.map((p, i) => `${i === 0 ? "M" : "L"}${xAxis.map(p.rate).toFixed(2)},${cAxis.map(p.c).toFixed(2)}`).join(" ");
      const aPath = pts.map((p, i) => `${i === 0 ? "M" : "L"}${xAxis.map(p.rate).toFixed(2)},${aAxis.map(p.alpha).toFixed(2)}`).join(" ");
      cBody.push(`<path d="${cPath}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
      aBody.push(`<path d="${aPath}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
      for (const p of pts) {
        cBody.push(`<circle cx="${xAxis.map(p.rate).toFixed(2)}" cy="${cAxis.map(p.c).toFixed(2)}" r="2.6" fill="${color}"/>`);
        aBody.push(`<circle cx="${xAxis.map(p.rate).toFixed(2)}" cy="${aAxis.map(p.alpha).toFixed(2)}" r="2.6" fill="${color}"/>`);
      }
      // legend on the c panel
      const ly = GAP + MARGIN.top + 12 + di * 13;
      cBody.push(`<line x1="${x0 + MARGIN.left + 8}" y1="${ly - 4}" x2="${x0 + MARGIN.left + 28}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
      cBody.push(`<text x="${x0 + MARGIN.left + 33}" y="${ly}" font-size="10" font-family="sans-serif">disorder ${fmt(delta)}</text>`);
    });

    parts.push(panel(x0, GAP, `${family.name}: COEFFICIENT c`, family.xLabel, "c (sites^2 per t^alpha)", xAxis, cAxis, null, cBody));
    parts.push(panel(x0, GAP + PANEL_H + GAP, `${family.name}: EXPONENT alpha`, family.xLabel, "alpha", xAxis, null, aAxis, aBody));
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
