/** Axis scales and tick placement. Everything here is a pure function of
 * the data extent, so a given CSV always produces the same axes. */

export interface Scale {
  /** Data value -> unit interval [0, 1]. */
  toUnit(value: number): number;
  ticks: number[];
  kind: "linear" | "log";
}

/** Round `span / n` up to a 1/2/5 decade multiple. */
function niceStep(span: number, n: number): number {
  const raw = span / Math.max(n, 1);
  const power = Math.floor(Math.log10(raw));
  const base = Math.pow(10, power);
  const frac = raw / base;
  const mult = frac <= 1 ? 1 : frac <= 2 ? 2 : frac <= 5 ? 5 : 10;
  return mult * base;
}

export function linearScale(min: number, max: number, tickGoal = 6): Scale {
  if (!(max > min)) {
    // degenerate extent: pad around the single value
    const pad = min === 0 ? 1 : Math.abs(min) * 0.5;
    min -= pad;
    max += pad;
  }
  const step = niceStep(max - min, tickGoal);
  const lo = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = lo; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  const span = max - min;
  return {
    toUnit: (value) => (value - min) / span,
    ticks,
    kind: "linear",
  };
}

export function logScale(min: number, max: number): Scale {
  if (!(min > 0) || !(max > min)) {
    throw new Error(`log scale needs 0 < min < max, got [${min}, ${max}]`);
  }
  const lmin = Math.log10(min);
  const lmax = Math.log10(max);
  const ticks: number[] = [];
  for (let p = Math.ceil(lmin - 1e-9); p <= lmax + 1e-9; p++) {
    ticks.push(Math.pow(10, p));
  }
  return {
    toUnit: (value) => (Math.log10(value) - lmin) / (lmax - lmin),
    ticks,
    kind: "log",
  };
}

/** Pick log axes only for strictly positive data spanning >= 2 decades. */
export function autoScale(values: number[], tickGoal = 6): Scale {
  const min = Math.min(...values);
  const max = Math.max(...values);
  if (min > 0 && max / min >= 100) {
    return logScale(min, max);
  }
  return linearScale(min, max, tickGoal);
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    const exp = Math.floor(Math.log10(magnitude));
    const mantissa = value / Math.pow(10, exp);
    const m = Number(mantissa.toPrecision(3));
    return m === 1 ? `1e${exp}` : m === -1 ? `-1e${exp}` : `${m}e${exp}`;
  }
  return String(Number(value.toPrecision(6)));
}
