/**
 * Probability heatmap grids: one panel per run, site index horizontal,
 * time increasing downward, color normalization shared across the whole
 * figure so panels are directly comparable.  Trajectory panels can overlay
 * jump events (localize/hop: bright cross, exclude: grey dot).
 */

import { ColorScale, normalize, viridis } from "./color.js";
import { JumpEvent } from "./csv.js";
import { CHAR_H, drawText } from "./font.js";
import { Raster } from "./png.js";

export interface Panel {
  label: string;
  /** probs[t][j] */
  probs: number[][];
  times: number[];
  events?: JumpEvent[];
}

export interface GridOptions {
  nCols: number;
  scaleKind: "linear" | "log";
  logFloor: number;
  /** pixels per site (horizontal) and per sample (vertical) */
  sx: number;
  sy: number;
}

const MARGIN = 8;
const GAP = 6;
const LABEL_H = CHAR_H + 2;
const BG: [number, number, number] = [255, 255, 255];
const FRAME: [number, number, number] = [120, 120, 120];
const TEXT: [number, number, number] = [20, 20, 20];
const MARK_BRIGHT: [number, number, number] = [255, 255, 255];
const MARK_DIM: [number, number, number] = [200, 200, 200];

export function defaultGridOptions(partial: Partial<GridOptions> = {}): GridOptions {
  return {
    nCols: partial.nCols ?? 1,
    scaleKind: partial.scaleKind ?? "linear",
    logFloor: partial.logFloor ?? 1e-6,
    sx: partial.sx ?? 1,
    sy: partial.sy ?? 1,
  };
}

export function renderHeatmapGrid(panels: Panel[], opts: GridOptions): Raster {
  if (panels.length === 0) throw new Error("no panels to render");
  const nCols = Math.max(1, Math.min(opts.nCols, panels.length));
  const nRows = Math.ceil(panels.length / nCols);
  const nSites = panels[0].probs[0]?.length ?? 0;
  const nTimes = panels[0].probs.length;
  for (const p of panels) {
    if (p.probs.length !== nTimes || (p.probs[0]?.length ?? 0) !== nSites) {
      throw new Error(
        `panel "${p.label}" has shape ${p.probs.length}x${p.probs[0]?.length}, ` +
          `expected ${nTimes}x${nSites}`,
      );
    }
  }
  // figure-wide normalization, not per panel
  let vmax = 0;
  for (const p of panels) for (const row of p.probs) for (const v of row) vmax = Math.max(vmax, v);
  const scale: ColorScale = { kind: opts.scaleKind, floor: opts.logFloor, vmax };

  const panelW = nSites * opts.sx;
  const panelH = nTimes * opts.sy;
  const cellW = panelW + GAP;
  const cellH = panelH + LABEL_H + GAP;
  const width = 2 * MARGIN + nCols * cellW - GAP;
  const height = 2 * MARGIN + nRows * cellH - GAP;
  const img = new Raster(width, height, BG);

  panels.forEach((panel, idx) => {
    const col = idx % nCols;
    const row = Math.floor(idx / nCols);
    const x0 = MARGIN + col * cellW;
    const y0 = MARGIN + row * cellH;
    drawText(img, x0, y0, panel.label, TEXT);
    const py0 = y0 + LABEL_H;
    for (let t = 0; t < nTimes; t++) {
      for (let j = 0; j < nSites; j++) {
        const rgb = viridis(normalize(panel.probs[t][j], scale));
        img.fillRect(x0 + j * opts.sx, py0 + t * opts.sy, opts.sx, opts.sy, rgb);
      }
    }
    if (panel.events && panel.events.length > 0) {
      const tMax = panel.times[panel.times.length - 1];
      for (const ev of panel.events) {
        const ex = x0 + Math.min(nSites - 1, ev.site) * opts.sx + (opts.sx >> 1);
        const ey = py0 + Math.round((ev.t / tMax) * (panelH - 1));
        if (ev.kind === "exclude") {
          img.set(ex, ey, MARK_DIM);
        } else {
          img.set(ex, ey, MARK_BRIGHT);
          img.set(ex - 1, ey, MARK_BRIGHT);
          img.set(ex + 1, ey, MARK_BRIGHT);
          img.set(ex, ey - 1, MARK_BRIGHT);
          img.set(ex, ey + 1, MARK_BRIGHT);
        }
      }
    }
    // 1px frame
    for (let x = x0 - 1; x <= x0 + panelW; x++) {
      img.set(x, py0 - 1, FRAME);
      img.set(x, py0 + panelH, FRAME);
    }
    for (let y = py0 - 1; y <= py0 + panelH; y++) {
      img.set(x0 - 1, y, FRAME);
      img.set(x0 + panelW, y, FRAME);
    }
  });
  return img;
}

/** Count pixels that differ from the colormap zero color (test helper). */
export function countStructurePixels(img: Raster): number {
  const zero = viridis(0);
  let n = 0;
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const [r, g, b] = img.get(x, y);
      const isZero = Math.abs(r - zero[0]) <= 2 && Math.abs(g - zero[1]) <= 2 && Math.abs(b - zero[2]) <= 2;
      const isBg = r === BG[0] && g === BG[1] && b === BG[2];
      if (!isZero && !isBg) n++;
    }
  }
  return n;
}
