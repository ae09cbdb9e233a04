/** Minimal software rasterizer. Figures draw onto an RGBA buffer at an
 * integer supersampling factor and box-filter down before PNG encoding,
 * which keeps every output byte a pure function of the draw calls. */

import { PNG } from "pngjs";

export type Color = readonly [number, number, number, number];

export const BLACK: Color = [0, 0, 0, 255];
export const WHITE: Color = [255, 255, 255, 255];
export const GRAY: Color = [150, 150, 150, 255];
export const LIGHT_GRAY: Color = [225, 225, 225, 255];
export const BLUE: Color = [31, 119, 180, 255];
export const ORANGE: Color = [255, 127, 14, 255];
export const GREEN: Color = [44, 160, 44, 255];
export const RED: Color = [214, 39, 40, 255];

export function withAlpha(color: Color, alpha: number): Color {
  return [color[0], color[1], color[2], alpha];
}

export class Raster {
  readonly data: Uint8ClampedArray;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8ClampedArray(width * height * 4);
    this.clear(WHITE);
  }

  clear(color: Color): void {
    for (let i = 0; i < this.data.length; i += 4) {
      this.data[i] = color[0];
      this.data[i + 1] = color[1];
      this.data[i + 2] = color[2];
      this.data[i + 3] = 255;
    }
  }

  /** Source-over blend of one pixel; out-of-bounds writes are dropped. */
  blend(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    const a = color[3] / 255;
    this.data[i] = color[0] * a + this.data[i] * (1 - a);
    this.data[i + 1] = color[1] * a + this.data[i + 1] * (1 - a);
    this.data[i + 2] = color[2] * a + this.data[i + 2] * (1 - a);
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    const xa = Math.max(0, Math.round(Math.min(x0, x1)));
    const xb = Math.min(this.width, Math.round(Math.max(x0, x1)));
    const ya = Math.max(0, Math.round(Math.min(y0, y1)));
    const yb = Math.min(this.height, Math.round(Math.max(y0, y1)));
    for (let y = ya; y < yb; y++) {
      for (let x = xa; x < xb; x++) {
        this.blend(x, y, color);
      }
    }
  }

  /** Filled disc, used as the stamp for thick lines and as a marker. */
  disc(cx: number, cy: number, radius: number, color: Color): void {
    const r2 = radius * radius;
    const xa = Math.floor(cx - radius);
    const xb = Math.ceil(cx + radius);
    const ya = Math.floor(cy - radius);
    const yb = Math.ceil(cy + radius);
    for (let y = ya; y <= yb; y++) {
      for (let x = xa; x <= xb; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy <= r2) this.blend(x, y, color);
      }
    }
  }

  /** Solid or dashed segment of the given width, stamped along its length.
   * `dash` is [on, off] in pixels; `phase` carries dash continuity across
   * polyline joints and is returned updated. */
  line(x0: number, y0: number, x1: number, y1: number, width: number,
       color: Color, dash?: readonly [number, number], phase = 0): number {
    const dx = x1 - x0;
    const dy = y1 - y0;
    const length = Math.hypot(dx, dy);
    const steps = Math.max(1, Math.ceil(length));
    const radius = width / 2;
    if (!dash) {
      for (let s = 0; s <= steps; s++) {
        const t = s / steps;
        this.discSquare(x0 + dx * t, y0 + dy * t, radius, color);
      }
      return 0;
    }
    const period = dash[0] + dash[1];
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      const along = (phase + length * t) % period;
      if (along <= dash[0]) {
        this.discSquare(x0 + dx * t, y0 + dy * t, radius, color);
      }
    }
    return (phase + length) % period;
  }

  /** Square stamp: cheaper than a disc and identical after downsampling
   * for the 1..3 px pens figures use. */
  private discSquare(cx: number, cy: number, radius: number, color: Color): void {
    const xa = Math.round(cx - radius);
    const xb = Math.round(cx + radius);
    const ya = Math.round(cy - radius);
    const yb = Math.round(cy + radius);
    for (let y = ya; y <= yb; y++) {
      for (let x = xa; x <= xb; x++) {
        this.blend(x, y, color);
      }
    }
  }

  /** Open circle marker (argmin highlights on heatmaps). */
  ring(cx: number, cy: number, radius: number, width: number, color: Color): void {
    const inner = (radius - width / 2) * (radius - width / 2);
    const outer = (radius + width / 2) * (radius + width / 2);
    for (let y = Math.floor(cy - radius - width); y <= cy + radius + width; y++) {
      for (let x = Math.floor(cx - radius - width); x <= cx + radius + width; x++) {
        const d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if (d2 >= inner && d2 <= outer) this.blend(x, y, color);
      }
    }
  }

  /** Box-filter downsample by an integer factor. */
  downsample(factor: number): Raster {
    const out = new Raster(this.width / factor, this.height / factor);
    const n = factor * factor;
    for (let y = 0; y < out.height; y++) {
      for (let x = 0; x < out.width; x++) {
        let r = 0;
        let g = 0;
        let b = 0;
        for (let sy = 0; sy < factor; sy++) {
          for (let sx = 0; sx < factor; sx++) {
            const i = ((y * factor + sy) * this.width + (x * factor + sx)) * 4;
            r += this.data[i];
            g += this.data[i + 1];
            b += this.data[i + 2];
          }
        }
        const j = (y * out.width + x) * 4;
        out.data[j] = Math.round(r / n);
        out.data[j + 1] = Math.round(g / n);
        out.data[j + 2] = Math.round(b / n);
        out.data[j + 3] = 255;
      }
    }
    return out;
  }

  /** Encode as PNG with pinned filter/compression settings. */
  toPng(): Buffer {
    const png = new PNG({
      width: this.width,
      height: this.height,
      colorType: 6,
      deflateLevel: 9,
      deflateStrategy: 0,
      filterType: 0,
    });
    png.data = Buffer.from(this.data.buffer, 0, this.data.length);
    return PNG.sync.write(png, {
      colorType: 6,
      deflateLevel: 9,
      deflateStrategy: 0,
      filterType: 0,
    });
  }
}
