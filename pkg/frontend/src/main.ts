#!/usr/bin/env node
/**
 * Figure renderer for simulator outputs.
 *
 * Usage:
 *   node dist/main.js heatmap-grid <manifest.json> [--out fig.png] [--log] [--floor 1e-6] [--sx N] [--sy N]
 *   node dist/main.js trajectory   <manifest.json> [--out fig.png] [--log] [--floor 1e-6] [--no-events] [--sx N] [--sy N]
 *   node dist/main.js fit-chart    <fits.csv | manifest.json> [--out fig.svg]
 *
 * Reads only the CSV/manifest files produced by the simulator CLI and writes
 * image files; rendering is deterministic (byte-stable inputs give
 * byte-identical images).
 */

import { readFileSync, writeFileSync } from "fs";
import path from "path";

import { loadEvents, loadFrames, loadManifest, Manifest, ManifestRun, parseFitsCsv } from "./csv.js";
import { renderFitChart } from "./fitchart.js";
import { defaultGridOptions, Panel, renderHeatmapGrid } from "./heatmap.js";
import { encodePng } from "./png.js";

interface Flags {
  out?: string;
  log: boolean;
  floor: number;
  sx?: number;
  sy?: number;
  events: boolean;
}

function parseFlags(argv: string[]): { positional: string[]; flags: Flags } {
  const flags: Flags = { log: false, floor: 1e-6, events: true };
  const positional: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--log") flags.log = true;
    else if (a === "--no-events") flags.events = false;
    else if (a === "--out") flags.out = argv[++i];
    else if (a === "--floor") flags.floor = Number(argv[++i]);
    else if (a === "--sx") flags.sx = Number(argv[++i]);
    else if (a === "--sy") flags.sy = Number(argv[++i]);
    else if (a.startsWith("--")) throw new Error(`unknown flag ${a}`);
    else positional.push(a);
  }
  return { positional, flags };
}

function runLabel(run: ManifestRun, multi: boolean): string {
  const parts = [`D=${run.delta}`];
  if (run.gamma > 0) parts.push(`G=${run.gamma}`);
  if (run.big_gamma > 0) parts.push(`H=${run.big_gamma}`);
  if (multi && run.trajectory_index !== undefined) parts.push(`#${run.trajectory_index}`);
  return parts.join(" ");
}

function buildPanels(manifest: Manifest, withEvents: boolean): { panels: Panel[]; nCols: number } {
  const runs = manifest.runs.filter((r) => r.frames);
  if (runs.length === 0) throw new Error("manifest has no frames runs");
  const key = (r: ManifestRun) => `${r.delta}|${r.gamma}|${r.big_gamma}`;
  const groupSizes = new Map<string, number>();
  for (const r of runs) groupSizes.set(key(r), (groupSizes.get(key(r)) ?? 0) + 1);
  const multi = [...groupSizes.values()].some((n) => n > 1);

  const panels: Panel[] = runs.map((run) => {
    const frames = loadFrames(manifest, run);
    return {
      label: runLabel(run, multi),
      probs: frames.probs,
      times: frames.times,
      events: withEvents && run.events ? loadEvents(manifest, run) : undefined,
    };
  });
  const nRates = new Set(runs.map((r) => `${r.gamma}|${r.big_gamma}`)).size;
  const nDeltas = new Set(runs.map((r) => r.delta)).size;
  const nCols = multi || nRates * nDeltas !== runs.length ? Math.ceil(Math.sqrt(runs.length)) : nRates;
  return { panels, nCols };
}

function renderGridCommand(manifestPath: string, flags: Flags, withEvents: boolean): string {
  const manifest = loadManifest(manifestPath);
  const { panels, nCols } = buildPanels(manifest, withEvents && flags.events);
  const nSites = panels[0].probs[0].length;
  const nTimes = panels[0].probs.length;
  const img = renderHeatmapGrid(
    panels,
    defaultGridOptions({
      nCols,
      scaleKind: flags.log ? "log" : "linear",
      logFloor: flags.floor,
      sx: flags.sx ?? Math.max(1, Math.ceil(120 / nSites)),
      sy: flags.sy ?? Math.max(1, Math.ceil(120 / nTimes)),
    }),
  );
  const out =
    flags.out ?? manifestPath.replace(/_manifest\.json$/, "") + (flags.log ? "_log" : "") + ".png";
  writeFileSync(out, encodePng(img));
  return out;
}

function fitChartCommand(inputPath: string, flags: Flags): string {
  let csvPath = inputPath;
  if (inputPath.endsWith(".json")) {
    const manifest = loadManifest(inputPath);
    const fits = manifest.outputs.find((o) => o.endsWith("_fits.csv"));
    if (!fits) throw new Error(`${inputPath}: manifest lists no fits CSV`);
    csvPath = path.join(manifest.dir, fits);
  }
  const rows = parseFitsCsv(readFileSync(csvPath, "utf-8"), path.basename(csvPath));
  const svg = renderFitChart(rows);
  const out = flags.out ?? csvPath.replace(/\.csv$/, "") + ".svg";
  writeFileSync(out, svg);
  return out;
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    const { positional, flags } = parseFlags(rest);
    if (!command || positional.length !== 1) {
      console.error(
        "usage: main.js <heatmap-grid|trajectory|fit-chart> <manifest.json|fits.csv> [options]",
      );
      return 2;
    }
    let out: string;
    switch (command) {
      case "heatmap-grid":
        out = renderGridCommand(positional[0], flags, false);
        break;
      case "trajectory":
        out = renderGridCommand(positional[0], flags, true);
        break;
      case "fit-chart":
        out = fitChartCommand(positional[0], flags);
        break;
      default:
        console.error(`unknown command ${command}`);
        return 2;
    }
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exitCode = main(process.argv.slice(2));
}
