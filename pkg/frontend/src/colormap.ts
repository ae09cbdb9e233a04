/** Fixed dark-blue -> teal -> yellow color ramp for heatmaps. */

import { Color } from "./raster.js";

const STOPS: ReadonlyArray<readonly [number, number, number]> = [
  [13, 8, 135],
  [44, 48, 158],
  [55, 93, 166],
  [46, 138, 160],
  [42, 180, 140],
  [92, 212, 99],
  [175, 229, 60],
  [252, 231, 37],
];

/** Map t in [0, 1] to the ramp, linearly between stops. */
export function rampColor(t: number): Color {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(pos));
  const frac = pos - i;
  const a = STOPS[i];
  const b = STOPS[i + 1];
  return [
    Math.round(a[0] + (b[0] - a[0]) * frac),
    Math.round(a[1] + (b[1] - a[1]) * frac),
    Math.round(a[2] + (b[2] - a[2]) * frac),
    255,
  ];
}
