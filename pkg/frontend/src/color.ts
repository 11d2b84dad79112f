/** Color scales and grid helpers for the overlays.
 *
 * Risk uses a sequential scale where orange marks higher values; the
 * utilization scale diverges around zero, orange for increases and purple
 * for decreases.
 */

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

function rgb(r: number, g: number, b: number): string {
  return `rgb(${Math.round(r)}, ${Math.round(g)}, ${Math.round(b)})`;
}

const RISK_STOPS: [number, number, number][] = [
  [253, 246, 227], // pale
  [255, 170, 60], // orange
  [165, 30, 10], // deep red-orange
];

/** t in [0, 1] mapped onto the pale-to-orange ramp. */
export function riskColor(t: number): string {
  const x = Math.min(1, Math.max(0, t));
  const seg = x < 0.5 ? 0 : 1;
  const local = (x - seg * 0.5) / 0.5;
  const [r1, g1, b1] = RISK_STOPS[seg];
  const [r2, g2, b2] = RISK_STOPS[seg + 1];
  return rgb(lerp(r1, r2, local), lerp(g1, g2, local), lerp(b1, b2, local));
}

const ORANGE: [number, number, number] = [235, 125, 20];
const PURPLE: [number, number, number] = [110, 60, 160];
const NEUTRAL: [number, number, number] = [225, 225, 225];

/** Diverging scale centered at zero delta. */
export function deltaColor(delta: number, maxAbs: number): string {
  if (maxAbs <= 0 || delta === 0) {
    return rgb(...NEUTRAL);
  }
  const t = Math.min(1, Math.abs(delta) / maxAbs);
  const target = delta > 0 ? ORANGE : PURPLE;
  return rgb(
    lerp(NEUTRAL[0], target[0], t),
    lerp(NEUTRAL[1], target[1], t),
    lerp(NEUTRAL[2], target[2], t),
  );
}

/** Row and column of the largest value in a row-major grid; first wins. */
export function argmaxCell(values: number[], nx: number): { row: number; col: number } {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return { row: Math.floor(best / nx), col: best % nx };
}

export function maxValue(values: number[]): number {
  let best = -Infinity;
  for (const v of values) {
    if (v > best) {
      best = v;
    }
  }
  return best;
}
