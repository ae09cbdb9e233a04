/** Mean integrated squared error with standard-error bands for the full
 * and uniform-coding filters across the population-variance grid. */

import { Panel, panelRect, SS } from "../chart.js";
import { column, requireRows, Table } from "../csv.js";
import { BLUE, ORANGE, Raster } from "../raster.js";
import { autoScale, linearScale } from "../scale.js";

export function renderBand(table: Table, xLabel: string, yLabel: string,
                           title: string): Raster {
  requireRows(table);
  const popVar = column(table, "pop_var");
  const adf = column(table, "adf_mean_ise");
  const adfSe = column(table, "adf_se");
  const uniform = column(table, "uniform_mean_ise");
  const uniformSe = column(table, "uniform_se");

  const order = popVar.map((_, i) => i).sort((a, b) => popVar[a] - popVar[b]);
  const xs = order.map((i) => popVar[i]);
  const lines = [
    { label: "full filter", color: BLUE,
      mean: order.map((i) => adf[i]), se: order.map((i) => adfSe[i]) },
    { label: "uniform coding", color: ORANGE,
      mean: order.map((i) => uniform[i]), se: order.map((i) => uniformSe[i]) },
  ];

  const values: number[] = [];
  for (const line of lines) {
    line.mean.forEach((m, k) => values.push(m - line.se[k], m + line.se[k]));
  }
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo) * 0.08;

  const raster = new Raster(900 * SS, 600 * SS);
  const panel = new Panel(raster, panelRect(900, 600), autoScale(xs),
                          linearScale(lo - pad, hi + pad));
  panel.frame(xLabel, yLabel, title);
  for (const line of lines) {
    panel.band(xs, line.mean.map((m, k) => m - line.se[k]),
               line.mean.map((m, k) => m + line.se[k]), line.color);
    panel.polyline(xs, line.mean, line.color, 2 * SS);
    xs.forEach((x, k) => raster.disc(panel.px(x), panel.py(line.mean[k]),
                                     2.5 * SS, line.color));
  }
  panel.legend(lines.map(({ label, color }) => ({ label, color })));
  return raster;
}
