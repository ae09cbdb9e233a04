#!/usr/bin/env node
/** Command-line entry point:
 *
 *   render <figure-name> --in <dir> --out <file.png>
 *
 * Figure names map to the CSVs the pipeline writes into --in:
 *   phase       phase.csv
 *   trajectory  trial.csv (spikes.csv overlaid when present)
 *   band        uniform_compare.csv
 *   heatmap     center_sweep_cells.csv or pop_sweep_cells.csv (+ argmin)
 *   ratio       variance_mse.csv
 */

import * as fs from "node:fs";
import * as path from "node:path";
import yargs from "yargs";

import { FigureError } from "./errors.js";
import { FIGURE_KINDS, FigureKind, FigureSpec, renderFigure } from "./figure.js";

function optional(dir: string, name: string): string[] {
  const file = path.join(dir, name);
  return fs.existsSync(file) ? [file] : [];
}

export function buildSpec(figure: string, inDir: string,
                          outPath: string): FigureSpec {
  const kind = figure as FigureKind;
  switch (kind) {
    case "phase":
      return { kind, csvPaths: [path.join(inDir, "phase.csv")],
               outPath, title: "no-spike filter flow" };
    case "trajectory":
      return { kind,
               csvPaths: [path.join(inDir, "trial.csv"),
                          ...optional(inDir, "spikes.csv")],
               outPath, title: "decoded trial" };
    case "band":
      return { kind, csvPaths: [path.join(inDir, "uniform_compare.csv")],
               outPath, title: "full filter vs uniform coding" };
    case "heatmap": {
      const center = optional(inDir, "center_sweep_cells.csv");
      const pop = optional(inDir, "pop_sweep_cells.csv");
      if (center.length > 0 && pop.length > 0) {
        throw new FigureError(
          `${inDir}: both center_sweep_cells.csv and pop_sweep_cells.csv `
          + "present; point --in at a single sweep's output directory");
      }
      if (center.length > 0) {
        return { kind,
                 csvPaths: [center[0],
                            ...optional(inDir, "center_sweep_argmin.csv")],
                 outPath, title: "center sweep" };
      }
      if (pop.length > 0) {
        return { kind,
                 csvPaths: [pop[0], ...optional(inDir, "pop_sweep_argmin.csv")],
                 outPath, title: "population sweep" };
      }
      // neither file exists; let the reader produce the usual ENOENT
      return { kind, csvPaths: [path.join(inDir, "center_sweep_cells.csv")],
               outPath, title: "center sweep" };
    }
    case "ratio":
      return { kind, csvPaths: [path.join(inDir, "variance_mse.csv")],
               outPath, title: "" };
    default:
      throw new FigureError(
        `unknown figure '${figure}' (choose from: ${FIGURE_KINDS.join(", ")})`);
  }
}

export function run(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("render")
    .command("$0 <figure>", "render one figure from a results directory",
             (cmd) => cmd
               .positional("figure", {
                 describe: `figure name (${FIGURE_KINDS.join(" | ")})`,
                 type: "string",
                 demandOption: true,
               }))
    .option("in", {
      describe: "directory holding the pipeline's CSV outputs",
      type: "string",
      demandOption: true,
    })
    .option("out", {
      describe: "output image path (.png)",
      type: "string",
      demandOption: true,
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const spec = buildSpec(String(args.figure), args.in, args.out);
    renderFigure(spec);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (error) {
    if (error instanceof FigureError
        || (error as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(error as Error).message}`);
      return 1;
    }
    throw error;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || path.basename(entry) === "render") {
  process.exit(run(process.argv.slice(2)));
}
