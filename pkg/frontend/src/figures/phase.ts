/** Phase portrait of the no-spike filter flow: the drift of the posterior
 * mean and variance as functions of the current mean. */

import { Panel, panelRect, SS } from "../chart.js";
import { column, requireRows, Table } from "../csv.js";
import { BLACK, BLUE, ORANGE, Raster } from "../raster.js";
import { linearScale } from "../scale.js";

export function renderPhase(table: Table, xLabel: string, yLabel: string,
                            title: string): Raster {
  requireRows(table);
  const mu = column(table, "mu");
  const dmu = column(table, "dmu_dt");
  const dvar = column(table, "dvar_dt");

  const raster = new Raster(900 * SS, 600 * SS);
  const values = [...dmu, ...dvar, 0];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo) * 0.06;
  const panel = new Panel(raster, panelRect(900, 600),
                          linearScale(Math.min(...mu), Math.max(...mu)),
                          linearScale(lo - pad, hi + pad));
  panel.frame(xLabel, yLabel, title);
  panel.polyline([mu[0], mu[mu.length - 1]], [0, 0], BLACK, SS, [4 * SS, 4 * SS]);
  panel.polyline(mu, dmu, BLUE, 2 * SS);
  panel.polyline(mu, dvar, ORANGE, 2 * SS);
  panel.legend([
    { label: "mean drift", color: BLUE },
    { label: "variance drift", color: ORANGE },
    { label: "zero", color: BLACK, dash: [4 * SS, 4 * SS] },
  ]);
  return raster;
}
