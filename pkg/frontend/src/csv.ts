/**
 * Strict parsers for the simulator's CSV and manifest formats.
 *
 * frames CSV:  t,site_0,...,site_{N-1}   (one row per sample time)
 * events CSV:  t,kind,site_or_pair       (kind: localize | exclude | hop)
 * fits CSV:    delta,gamma,big_gamma,c,alpha,rms_log_residual,valid
 */

import { readFileSync } from "fs";
import path from "path";

export interface Frames {
  times: number[];
  nSites: number;
  /** probs[t][j] = site probability */
  probs: number[][];
}

export interface JumpEvent {
  t: number;
  kind: "localize" | "exclude" | "hop";
  site: number;
  target: number | null;
}

export interface FitRow {
  delta: number;
  gamma: number;
  bigGamma: number;
  c: number;
  alpha: number;
  rmsLogResidual: number;
  valid: boolean;
}

export interface ManifestRun {
  delta: number;
  gamma: number;
  big_gamma: number;
  frames?: string;
  events?: string;
  msd?: string;
  trajectory_index?: number;
  [key: string]: unknown;
}

export interface Manifest {
  tool: string;
  command: string;
  runs: ManifestRun[];
  outputs: string[];
  config: Record<string, unknown>;
  dir: string; // directory holding the manifest (outputs are relative to it)
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

export function parseFramesCsv(text: string, name = "frames"): Frames {
  const lines = splitLines(text);
  if (lines.length < 2) throw new Error(`${name}: need a header and at least one row`);
  const header = lines[0].split(",");
  if (header[0] !== "t" || !header[1]?.startsWith("site_")) {
    throw new Error(`${name}: unexpected header ${lines[0]}`);
  }
  const nSites = header.length - 1;
  const times: number[] = [];
  const probs: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== nSites + 1) {
      throw new Error(`${name}: row ${i} has ${cells.length} cells, expected ${nSites + 1}`);
    }
    const row = cells.map(Number);
    if (row.some((v) => Number.isNaN(v))) throw new Error(`${name}: row ${i} is not numeric`);
    times.push(row[0]);
    probs.push(row.slice(1));
  }
  return { times, nSites, probs };
}

export function parseEventsCsv(text: string, name = "events"): JumpEvent[] {
  const lines = splitLines(text);
  if (lines[0] !== "t,kind,site_or_pair") {
    throw new Error(`${name}: unexpected header ${lines[0]}`);
  }
  const events: JumpEvent[] = [];
  for (let i = 1; i < lines.length; i++) {
    const [t, kind, tag] = lines[i].split(",");
    if (kind !== "localize" && kind !== "exclude" && kind !== "hop") {
      throw new Error(`${name}: row ${i} has unknown kind ${kind}`);
    }
    let site: number;
    let target: number | null = null;
    if (tag.includes("->")) {
      const [src, dst] = tag.split("->");
      site = Number(src);
      target = Number(dst);
    } else {
      site = Number(tag);
    }
    events.push({ t: Number(t), kind, site, target });
  }
  return events;
}

export function parseFitsCsv(text: string, name = "fits"): FitRow[] {
  const lines = splitLines(text);
  const expected = "delta,gamma,big_gamma,c,alpha,rms_log_residual,valid";
  if (lines[0] !== expected) throw new Error(`${name}: unexpected header ${lines[0]}`);
  const rows: FitRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== 7) throw new Error(`${name}: row ${i} has ${cells.length} cells`);
    rows.push({
      delta: Number(cells[0]),
      gamma: Number(cells[1]),
      bigGamma: Number(cells[2]),
      c: Number(cells[3]),
      alpha: Number(cells[4]),
      rmsLogResidual: Number(cells[5]),
      valid: cells[6] === "1",
    });
  }
  return rows;
}

export function loadManifest(manifestPath: string): Manifest {
  const text = readFileSync(manifestPath, "utf-8");
  const data = JSON.parse(text);
  if (!Array.isArray(data.runs)) throw new Error(`${manifestPath}: manifest has no runs`);
  return { ...data, dir: path.dirname(manifestPath) } as Manifest;
}

export function loadFrames(manifest: Manifest, run: ManifestRun): Frames {
  if (!run.frames) throw new Error("run has no frames file");
  const p = path.join(manifest.dir, run.frames);
  return parseFramesCsv(readFileSync(p, "utf-8"), run.frames);
}

export function loadEvents(manifest: Manifest, run: ManifestRun): JumpEvent[] {
  if (!run.events) throw new Error("run has no events file");
  const p = path.join(manifest.dir, run.events);
  return parseEventsCsv(readFileSync(p, "utf-8"), run.events);
}
