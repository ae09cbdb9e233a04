/** Figure specification and dispatch. A spec names the input CSVs, the
 * figure kind, axis labels, and the output path; rendering is a pure
 * function of the CSV bytes and the spec. */

import * as fs from "node:fs";
import * as path from "node:path";

import { readTable, Table } from "./csv.js";
import { FigureError } from "./errors.js";
import { Raster } from "./raster.js";
import { SS } from "./chart.js";
import { renderBand } from "./figures/band.js";
import { renderHeatmap } from "./figures/heatmap.js";
import { renderPhase } from "./figures/phase.js";
import { renderRatio } from "./figures/ratio.js";
import { renderTrajectory } from "./figures/trajectory.js";

export type FigureKind = "phase" | "trajectory" | "band" | "heatmap" | "ratio";

export const FIGURE_KINDS: readonly FigureKind[] = [
  "phase", "trajectory", "band", "heatmap", "ratio"];

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSVs. First entry is the main table; `trajectory` accepts an
   * optional spike-train CSV and `heatmap` an optional argmin CSV as the
   * second entry. */
  csvPaths: string[];
  outPath: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
  /** Heatmap color column (default std_ratio). */
  metric?: string;
}

function mainTable(spec: FigureSpec): Table {
  if (spec.csvPaths.length === 0) {
    throw new FigureError(`figure '${spec.kind}': no csv paths given`);
  }
  return readTable(spec.csvPaths[0]);
}

function optionalTable(spec: FigureSpec): Table | null {
  if (spec.csvPaths.length < 2) return null;
  return readTable(spec.csvPaths[1]);
}

export function renderToRaster(spec: FigureSpec): Raster {
  switch (spec.kind) {
    case "phase":
      return renderPhase(mainTable(spec), spec.xLabel ?? "posterior mean",
                         spec.yLabel ?? "time derivative", spec.title ?? "");
    case "trajectory":
      return renderTrajectory(mainTable(spec), optionalTable(spec),
                              spec.xLabel ?? "t", spec.yLabel ?? "state",
                              spec.title ?? "");
    case "band":
      return renderBand(mainTable(spec), spec.xLabel ?? "pop_var",
                        spec.yLabel ?? "integrated squared error",
                        spec.title ?? "");
    case "heatmap":
      return renderHeatmap(mainTable(spec), optionalTable(spec),
                           spec.metric ?? "std_ratio", spec.title ?? "");
    case "ratio":
      return renderRatio(mainTable(spec), spec.xLabel ?? "t",
                         spec.title ?? "");
    default: {
      const kind: never = spec.kind;
      throw new FigureError(`unknown figure kind '${kind}'`);
    }
  }
}

/** Render the spec and write the PNG; returns the encoded bytes. */
export function renderFigure(spec: FigureSpec): Buffer {
  const bytes = renderToRaster(spec).downsample(SS).toPng();
  fs.mkdirSync(path.dirname(path.resolve(spec.outPath)), { recursive: true });
  fs.writeFileSync(spec.outPath, bytes);
  return bytes;
}
