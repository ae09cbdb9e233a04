/** Filter calibration over time: squared error next to posterior variance
 * on the left, their ratio against the unity line on the right. */

import { Panel, panelRect, SS } from "../chart.js";
import { column, requireRows, Table } from "../csv.js";
import { BLACK, BLUE, GREEN, ORANGE, Raster } from "../raster.js";
import { linearScale } from "../scale.js";

export function renderRatio(table: Table, xLabel: string,
                            title: string): Raster {
  requireRows(table);
  const t = column(table, "t");
  const mse = column(table, "mse");
  const mseSe = column(table, "mse_se");
  const postVar = column(table, "mean_post_var");
  const varSe = column(table, "post_var_se");
  const ratio = column(table, "ratio_of_means");
  const meanRatio = column(table, "mean_ratio");

  const raster = new Raster(1200 * SS, 500 * SS);
  const xScale = linearScale(Math.min(...t), Math.max(...t));

  const leftValues = [
    ...mse.map((m, k) => m - mseSe[k]), ...mse.map((m, k) => m + mseSe[k]),
    ...postVar.map((v, k) => v - varSe[k]),
    ...postVar.map((v, k) => v + varSe[k]), 0];
  const leftHi = Math.max(...leftValues);
  const left = new Panel(raster, panelRect(1200, 500, 0.07, 0.48, 0.11, 0.82),
                         xScale,
                         linearScale(Math.min(...leftValues), leftHi * 1.06));
  left.frame(xLabel, "window metric", title);
  left.band(t, mse.map((m, k) => m - mseSe[k]), mse.map((m, k) => m + mseSe[k]),
            BLUE);
  left.polyline(t, mse, BLUE, 2 * SS);
  left.band(t, postVar.map((v, k) => v - varSe[k]),
            postVar.map((v, k) => v + varSe[k]), ORANGE);
  left.polyline(t, postVar, ORANGE, 2 * SS);
  left.legend([
    { label: "mean squared error", color: BLUE },
    { label: "posterior variance", color: ORANGE },
  ]);

  const ratioValues = [...ratio, ...meanRatio, 1];
  const rLo = Math.min(...ratioValues);
  const rHi = Math.max(...ratioValues);
  const rPad = (rHi - rLo) * 0.08 || 0.1;
  const right = new Panel(raster, panelRect(1200, 500, 0.56, 0.98, 0.11, 0.82),
                          xScale, linearScale(rLo - rPad, rHi + rPad));
  right.frame(xLabel, "mse / variance", title ? "ratio" : "");
  right.polyline([t[0], t[t.length - 1]], [1, 1], BLACK, SS, [4 * SS, 4 * SS]);
  right.polyline(t, ratio, GREEN, 2 * SS);
  right.polyline(t, meanRatio, BLUE, 1.5 * SS, [6 * SS, 3 * SS]);
  right.legend([
    { label: "ratio of means", color: GREEN },
    { label: "mean of ratios", color: BLUE, dash: [6 * SS, 3 * SS] },
    { label: "unity", color: BLACK, dash: [4 * SS, 4 * SS] },
  ]);
  return raster;
}
