/** Panel layout: axes, ticks, grid, legends. All coordinates are in
 * supersampled pixels; figures render at SS x the output size and the
 * encoder downsamples once at the end. */

import { drawText, textHeight, textWidth } from "./font.js";
import { BLACK, Color, GRAY, LIGHT_GRAY, Raster, WHITE, withAlpha } from "./raster.js";
import { formatTick, Scale } from "./scale.js";

export const SS = 2;
export const TICK_FONT = 2 * SS;
export const LABEL_FONT = 2 * SS;
export const TITLE_FONT = 3 * SS;

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface LegendEntry {
  label: string;
  color: Color;
  dash?: readonly [number, number];
}

export class Panel {
  constructor(readonly raster: Raster, readonly rect: Rect,
              readonly xScale: Scale, readonly yScale: Scale) {}

  px(value: number): number {
    return this.rect.x0 + this.xScale.toUnit(value) * (this.rect.x1 - this.rect.x0);
  }

  py(value: number): number {
    return this.rect.y1 - this.yScale.toUnit(value) * (this.rect.y1 - this.rect.y0);
  }

  /** Grid, frame box, ticks and tick labels, axis labels, panel title. */
  frame(xLabel: string, yLabel: string, title = ""): void {
    const { x0, y0, x1, y1 } = this.rect;
    for (const t of this.xScale.ticks) {
      const x = Math.round(this.px(t));
      this.raster.fillRect(x, y0, x + SS, y1, LIGHT_GRAY);
      const label = formatTick(t);
      drawText(this.raster, x - textWidth(label, TICK_FONT) / 2,
               y1 + 4 * SS, label, TICK_FONT, BLACK);
    }
    for (const t of this.yScale.ticks) {
      const y = Math.round(this.py(t));
      this.raster.fillRect(x0, y, x1, y + SS, LIGHT_GRAY);
      const label = formatTick(t);
      drawText(this.raster, x0 - textWidth(label, TICK_FONT) - 4 * SS,
               y - textHeight(TICK_FONT) / 2, label, TICK_FONT, BLACK);
    }
    // frame on top of the grid
    this.raster.fillRect(x0 - SS, y0 - SS, x1 + SS, y0, BLACK);
    this.raster.fillRect(x0 - SS, y1, x1 + SS, y1 + SS, BLACK);
    this.raster.fillRect(x0 - SS, y0, x0, y1, BLACK);
    this.raster.fillRect(x1, y0, x1 + SS, y1, BLACK);
    if (xLabel) {
      drawText(this.raster,
               (x0 + x1) / 2 - textWidth(xLabel, LABEL_FONT) / 2,
               y1 + 4 * SS + textHeight(TICK_FONT) + 5 * SS,
               xLabel, LABEL_FONT, BLACK);
    }
    if (yLabel) {
      drawText(this.raster, x0 - 24 * SS - textHeight(LABEL_FONT),
               (y0 + y1) / 2 - textWidth(yLabel, LABEL_FONT) / 2,
               yLabel, LABEL_FONT, BLACK, true);
    }
    if (title) {
      drawText(this.raster,
               (x0 + x1) / 2 - textWidth(title, TITLE_FONT) / 2,
               y0 - textHeight(TITLE_FONT) - 4 * SS, title, TITLE_FONT, BLACK);
    }
  }

  polyline(xs: number[], ys: number[], color: Color, width = 1.5 * SS,
           dash?: readonly [number, number]): void {
    let phase = 0;
    for (let i = 1; i < xs.length; i++) {
      phase = this.raster.line(this.px(xs[i - 1]), this.py(ys[i - 1]),
                               this.px(xs[i]), this.py(ys[i]),
                               width, color, dash, phase);
    }
  }

  /** Shaded region between lo(x) and hi(x), filled column by column so an
   * alpha fill blends exactly once per pixel. */
  band(xs: number[], lo: number[], hi: number[], color: Color,
       alpha = 70): void {
    const fill = withAlpha(color, alpha);
    for (let i = 1; i < xs.length; i++) {
      const xa = Math.round(this.px(xs[i - 1]));
      const xb = Math.round(this.px(xs[i]));
      if (xb <= xa) continue;
      for (let x = xa; x < xb; x++) {
        const t = (x - this.px(xs[i - 1])) / (this.px(xs[i]) - this.px(xs[i - 1]));
        const yLo = this.py(lo[i - 1] + (lo[i] - lo[i - 1]) * t);
        const yHi = this.py(hi[i - 1] + (hi[i] - hi[i - 1]) * t);
        this.raster.fillRect(x, Math.min(yLo, yHi), x + 1,
                             Math.max(yLo, yHi), fill);
      }
    }
  }

  marker(x: number, y: number, color: Color, radius = 3.5 * SS): void {
    this.raster.disc(this.px(x), this.py(y), radius, color);
    this.raster.ring(this.px(x), this.py(y), radius, SS, WHITE);
  }

  legend(entries: LegendEntry[]): void {
    const lineLen = 14 * SS;
    const pad = 4 * SS;
    const rowH = textHeight(TICK_FONT) + 3 * SS;
    const width = lineLen + 4 * SS
      + Math.max(...entries.map((e) => textWidth(e.label, TICK_FONT))) + 2 * pad;
    const height = entries.length * rowH + 2 * pad - 3 * SS;
    const x0 = this.rect.x1 - width - 6 * SS;
    const y0 = this.rect.y0 + 6 * SS;
    this.raster.fillRect(x0, y0, x0 + width, y0 + height, withAlpha(WHITE, 230));
    this.raster.fillRect(x0, y0, x0 + width, y0 + SS, GRAY);
    this.raster.fillRect(x0, y0 + height - SS, x0 + width, y0 + height, GRAY);
    this.raster.fillRect(x0, y0, x0 + SS, y0 + height, GRAY);
    this.raster.fillRect(x0 + width - SS, y0, x0 + width, y0 + height, GRAY);
    entries.forEach((entry, i) => {
      const cy = y0 + pad + i * rowH + textHeight(TICK_FONT) / 2;
      this.raster.line(x0 + pad, cy, x0 + pad + lineLen, cy, 1.5 * SS,
                       entry.color, entry.dash);
      drawText(this.raster, x0 + pad + lineLen + 4 * SS,
               cy - textHeight(TICK_FONT) / 2, entry.label, TICK_FONT, BLACK);
    });
  }
}

/** Panel rectangle inside an output-size frame, in supersampled pixels.
 * Fractions are of the final image; margins leave room for labels. */
export function panelRect(width: number, height: number, left = 0.11,
                          right = 0.97, top = 0.09, bottom = 0.86): Rect {
  return {
    x0: Math.round(width * SS * left),
    y0: Math.round(height * SS * top),
    x1: Math.round(width * SS * right),
    y1: Math.round(height * SS * bottom),
  };
}
