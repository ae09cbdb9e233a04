/** One decoded trial: dotted true state, filter means with +-2 std
 * envelopes, and a spike raster along the bottom edge. */

import { LegendEntry, Panel, panelRect, SS } from "../chart.js";
import { column, requireRows, Table } from "../csv.js";
import { BLACK, BLUE, Color, GREEN, ORANGE, Raster } from "../raster.js";
import { linearScale } from "../scale.js";

const MODE_COLORS: Color[] = [BLUE, ORANGE, GREEN];

export function renderTrajectory(trial: Table, spikes: Table | null,
                                 xLabel: string, yLabel: string,
                                 title: string): Raster {
  requireRows(trial);
  const t = column(trial, "t");
  const truth = column(trial, "x");

  const modes = trial.header
    .filter((name) => name.startsWith("mu_"))
    .map((name) => name.slice("mu_".length));
  const series = modes.map((mode) => {
    const mean = column(trial, `mu_${mode}`);
    const std = column(trial, `var_${mode}`).map(Math.sqrt);
    return {
      mode,
      mean,
      lo: mean.map((m, k) => m - 2 * std[k]),
      hi: mean.map((m, k) => m + 2 * std[k]),
    };
  });

  const values = [...truth];
  for (const s of series) values.push(...s.lo, ...s.hi);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo) * 0.08;

  const raster = new Raster(900 * SS, 600 * SS);
  const panel = new Panel(raster, panelRect(900, 600),
                          linearScale(Math.min(...t), Math.max(...t)),
                          linearScale(lo - pad, hi + pad));
  panel.frame(xLabel, yLabel, title);

  series.forEach((s, i) => {
    const color = MODE_COLORS[i % MODE_COLORS.length];
    panel.band(t, s.lo, s.hi, color);
    panel.polyline(t, s.mean, color, 2 * SS);
  });
  panel.polyline(t, truth, BLACK, 1.5 * SS, [2 * SS, 3 * SS]);

  if (spikes !== null && spikes.rows.length > 0) {
    const times = column(spikes, "t");
    for (const time of times) {
      const x = panel.px(time);
      raster.fillRect(x, panel.rect.y1 - 8 * SS, x + SS, panel.rect.y1 - SS,
                      BLACK);
    }
  }

  const entries: LegendEntry[] = series.map((s, i) => ({
    label: s.mode.replace(/_/g, " "),
    color: MODE_COLORS[i % MODE_COLORS.length],
  }));
  entries.push({ label: "true state", color: BLACK, dash: [2 * SS, 3 * SS] });
  panel.legend(entries);
  return raster;
}
