/**
 * Client-side move pre-check, mirroring the server referee.
 *
 * The point of mirroring is that an illegal click never needs a network
 * round trip: the same wrap-around metric, the same radius tolerance and
 * the same containment rule run locally, so local reject implies server
 * reject. The arithmetic is kept bit-compatible with the server (IEEE
 * doubles on both sides; fmod plus a sign fix reproduces its modulo).
 */

import type { BallConstraints } from "./protocol.js";

export const RADIUS_CAP = 0.25;
export const RATIO_RTOL = 1e-12;

/** Reduce a coordinate mod 1 into [0, 1). */
export function wrap(x: number): number {
  let m = x % 1.0; // JS % keeps the dividend's sign; shift negatives up
  if (m < 0) m += 1.0;
  return m < 1.0 ? m : 0.0; // the shift can round to exactly 1.0
}

/** Shortest signed displacement from b to a on the circle, in [-1/2, 1/2). */
export function wrapDiff(a: number, b: number): number {
  let d = (a - b) % 1.0;
  if (d < 0) d += 1.0;
  return d >= 0.5 ? d - 1.0 : d;
}

/** Wrap-around Euclidean distance between coordinate tuples. */
export function distance(a: number[], b: number[]): number {
  if (a.length !== b.length) {
    throw new Error(`dimension mismatch: ${a.length} vs ${b.length}`);
  }
  if (a.length === 1) {
    return Math.abs(wrapDiff(a[0], b[0]));
  }
  return Math.hypot(wrapDiff(a[0], b[0]), wrapDiff(a[1], b[1]));
}

export interface PreVerdict {
  ok: boolean;
  reason: string;
}

const ACCEPT: PreVerdict = { ok: true, reason: "" };

/**
 * Decide whether a proposed ball would be accepted, given the legal
 * envelope the server sent with your_turn.
 *
 * Order matches the referee: shape, then radius, then containment. The
 * opening move (radius_exact null) is free apart from the ball invariants
 * themselves. Centers are wrapped before measuring, exactly as the server
 * wraps them, so out-of-range coordinates are not by themselves illegal.
 */
export function preValidate(bc: BallConstraints, c: number[], r: number): PreVerdict {
  if (c.length !== bc.u) {
    return { ok: false, reason: `need ${bc.u} coordinates` };
  }
  if (!(r > 0 && r <= bc.radius_max)) {
    return { ok: false, reason: `radius must be in (0, ${bc.radius_max}]` };
  }
  if (bc.radius_exact !== null && Math.abs(r - bc.radius_exact) > RATIO_RTOL * bc.radius_exact) {
    return { ok: false, reason: "radius-ratio" };
  }
  if (bc.center_ref !== null && bc.center_max_distance !== null) {
    const wrapped = c.map(wrap);
    if (distance(wrapped, bc.center_ref) > bc.center_max_distance) {
      return { ok: false, reason: "not-contained" };
    }
  }
  return ACCEPT;
}
