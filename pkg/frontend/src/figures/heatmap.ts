/** Sweep-grid heatmap with argmin overlays. The first two CSV columns are
 * the grid axes; cells are drawn at uniform size in grid order, so the
 * image is defined for any complete rectangular sweep. */

import { drawText, textHeight, textWidth } from "../font.js";
import { LABEL_FONT, SS, TICK_FONT, TITLE_FONT } from "../chart.js";
import { rampColor } from "../colormap.js";
import { column, requireRows, Table } from "../csv.js";
import { IncompleteGridError } from "../errors.js";
import { BLACK, RED, Raster, WHITE } from "../raster.js";
import { formatTick } from "../scale.js";

interface Grid {
  axis1: number[];
  axis2: number[];
  /** values[i][j] for axis1[i], axis2[j]. */
  values: number[][];
}

/** Assemble the rectangular grid, failing loudly on gaps or duplicates. */
function buildGrid(table: Table, metric: string): Grid {
  const a1 = column(table, table.header[0]);
  const a2 = column(table, table.header[1]);
  const vals = column(table, metric);
  const axis1 = [...new Set(a1)].sort((x, y) => x - y);
  const axis2 = [...new Set(a2)].sort((x, y) => x - y);
  if (axis1.length * axis2.length !== table.rows.length) {
    throw new IncompleteGridError(
      `${table.file}: ${table.rows.length} rows cannot fill the `
      + `${axis1.length} x ${axis2.length} grid of `
      + `(${table.header[0]}, ${table.header[1]}) values`);
  }
  const values = axis1.map(() => axis2.map(() => Number.NaN));
  for (let r = 0; r < vals.length; r++) {
    const i = axis1.indexOf(a1[r]);
    const j = axis2.indexOf(a2[r]);
    if (!Number.isNaN(values[i][j])) {
      throw new IncompleteGridError(
        `${table.file}: duplicate grid cell (${a1[r]}, ${a2[r]})`);
    }
    values[i][j] = vals[r];
  }
  return { axis1, axis2, values };
}

function nearestIndex(axis: number[], value: number): number {
  let best = 0;
  for (let i = 1; i < axis.length; i++) {
    if (Math.abs(axis[i] - value) < Math.abs(axis[best] - value)) best = i;
  }
  return best;
}

/** Label roughly eight cells per axis so dense sweeps stay readable. */
function labelStride(count: number): number {
  return Math.max(1, Math.ceil(count / 8));
}

export function renderHeatmap(cells: Table, argmin: Table | null,
                              metric: string, title: string): Raster {
  requireRows(cells);
  const grid = buildGrid(cells, metric);
  const n1 = grid.axis1.length;
  const n2 = grid.axis2.length;

  const flat = grid.values.flat();
  const vmin = Math.min(...flat);
  const vmax = Math.max(...flat);
  const span = vmax > vmin ? vmax - vmin : 1;

  const raster = new Raster(900 * SS, 600 * SS);
  // axis1 runs along x, axis2 along y (bottom row = smallest value)
  const rect = {
    x0: Math.round(900 * SS * 0.11),
    y0: Math.round(600 * SS * 0.09),
    x1: Math.round(900 * SS * 0.85),
    y1: Math.round(600 * SS * 0.86),
  };
  const cellW = (rect.x1 - rect.x0) / n1;
  const cellH = (rect.y1 - rect.y0) / n2;
  const cx = (i: number) => rect.x0 + (i + 0.5) * cellW;
  const cy = (j: number) => rect.y1 - (j + 0.5) * cellH;

  for (let i = 0; i < n1; i++) {
    for (let j = 0; j < n2; j++) {
      const t = (grid.values[i][j] - vmin) / span;
      raster.fillRect(rect.x0 + i * cellW, rect.y1 - (j + 1) * cellH,
                      rect.x0 + (i + 1) * cellW, rect.y1 - j * cellH,
                      rampColor(t));
    }
  }
  raster.fillRect(rect.x0 - SS, rect.y0 - SS, rect.x1 + SS, rect.y0, BLACK);
  raster.fillRect(rect.x0 - SS, rect.y1, rect.x1 + SS, rect.y1 + SS, BLACK);
  raster.fillRect(rect.x0 - SS, rect.y0, rect.x0, rect.y1, BLACK);
  raster.fillRect(rect.x1, rect.y0, rect.x1 + SS, rect.y1, BLACK);

  const stride1 = labelStride(n1);
  for (let i = 0; i < n1; i += stride1) {
    const label = formatTick(grid.axis1[i]);
    drawText(raster, cx(i) - textWidth(label, TICK_FONT) / 2, rect.y1 + 4 * SS,
             label, TICK_FONT, BLACK);
  }
  const stride2 = labelStride(n2);
  for (let j = 0; j < n2; j += stride2) {
    const label = formatTick(grid.axis2[j]);
    drawText(raster, rect.x0 - textWidth(label, TICK_FONT) - 4 * SS,
             cy(j) - textHeight(TICK_FONT) / 2, label, TICK_FONT, BLACK);
  }
  drawText(raster,
           (rect.x0 + rect.x1) / 2 - textWidth(cells.header[0], LABEL_FONT) / 2,
           rect.y1 + 4 * SS + textHeight(TICK_FONT) + 5 * SS,
           cells.header[0], LABEL_FONT, BLACK);
  drawText(raster, rect.x0 - 24 * SS - textHeight(LABEL_FONT),
           (rect.y0 + rect.y1) / 2 - textWidth(cells.header[1], LABEL_FONT) / 2,
           cells.header[1], LABEL_FONT, BLACK, true);
  if (title) {
    drawText(raster, (rect.x0 + rect.x1) / 2 - textWidth(title, TITLE_FONT) / 2,
             rect.y0 - textHeight(TITLE_FONT) - 4 * SS, title, TITLE_FONT,
             BLACK);
  }

  // colorbar with min / mid / max labels
  const barX0 = Math.round(900 * SS * 0.88);
  const barX1 = barX0 + 12 * SS;
  for (let y = rect.y0; y < rect.y1; y++) {
    const t = (rect.y1 - y) / (rect.y1 - rect.y0);
    raster.fillRect(barX0, y, barX1, y + 1, rampColor(t));
  }
  raster.fillRect(barX0 - SS, rect.y0 - SS, barX1 + SS, rect.y0, BLACK);
  raster.fillRect(barX0 - SS, rect.y1, barX1 + SS, rect.y1 + SS, BLACK);
  raster.fillRect(barX0 - SS, rect.y0, barX0, rect.y1, BLACK);
  raster.fillRect(barX1, rect.y0, barX1 + SS, rect.y1, BLACK);
  const barTicks: Array<[number, number]> = [
    [vmin, rect.y1], [(vmin + vmax) / 2, (rect.y0 + rect.y1) / 2],
    [vmax, rect.y0]];
  for (const [value, y] of barTicks) {
    drawText(raster, barX1 + 3 * SS, y - textHeight(TICK_FONT) / 2,
             formatTick(value), TICK_FONT, BLACK);
  }
  drawText(raster, barX0 - SS,
           rect.y0 - textHeight(TICK_FONT) - 4 * SS, metric, TICK_FONT, BLACK);

  if (argmin !== null && argmin.rows.length > 0) {
    overlayArgmin(raster, argmin, grid, cx, cy);
  }
  return raster;
}

/** Argmin overlays: a center sweep lists one optimal center per axis value
 * (drawn as a connected marker curve, plus the silence-optimal curve); a
 * population sweep reports one global optimum (a single ring marker). */
function overlayArgmin(raster: Raster, argmin: Table, grid: Grid,
                       cx: (i: number) => number,
                       cy: (j: number) => number): void {
  if (argmin.header.includes("optimal_pop_var")) {
    const center = column(argmin, "optimal_center")[0];
    const popVar = column(argmin, "optimal_pop_var")[0];
    const i = nearestIndex(grid.axis1, center);
    const j = nearestIndex(grid.axis2, popVar);
    raster.ring(cx(i), cy(j), 7 * SS, 2 * SS, WHITE);
    raster.ring(cx(i), cy(j), 5 * SS, 2 * SS, RED);
    return;
  }
  const axisValues = column(argmin, argmin.header[0]);
  const curves: Array<{ name: string; color: typeof RED }> = [
    { name: "optimal_center", color: RED },
    { name: "silence_center", color: WHITE },
  ];
  for (const { name, color } of curves) {
    if (!argmin.header.includes(name)) continue;
    const centers = column(argmin, name);
    let prev: readonly [number, number] | null = null;
    for (let r = 0; r < axisValues.length; r++) {
      const i = nearestIndex(grid.axis1, axisValues[r]);
      const j = nearestIndex(grid.axis2, centers[r]);
      if (prev !== null) {
        raster.line(prev[0], prev[1], cx(i), cy(j), 1.5 * SS, color);
      }
      raster.disc(cx(i), cy(j), 3 * SS, color);
      prev = [cx(i), cy(j)];
    }
  }
}
