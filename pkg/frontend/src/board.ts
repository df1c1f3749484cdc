/**
 * Canvas board: a zoomable view of the unit interval (u=1) or the unit
 * torus square (u=2) with the nested game balls drawn inside it.
 *
 * Radii shrink geometrically, so a fixed view goes blind after two turns;
 * the viewport therefore tracks the latest ball and rescales so that ball
 * fills most of the screen. All geometry helpers are pure and exported,
 * the draw call at the bottom only turns their output into strokes.
 */

import type { BallConstraints } from "./protocol.js";
import { preValidate, wrapDiff } from "./validate.js";

export interface BoardBall {
  player: string;
  c: number[];
  r: number;
}

export interface BoardState {
  u: number;
  balls: BoardBall[];
  constraints: BallConstraints | null; // legal envelope when it is the human's turn
  dangers: { c: number[]; r: number }[]; // reveal overlay, empty when hidden
  outcome: number[] | null;
  marker: number[] | null; // target point, for orientation at low zoom
}

export interface Viewport {
  center: number[];
  half: number; // half-width of the square window, world units
}

// the tracked ball's diameter takes up this fraction of the view
const FILL = 0.6;

export function fitViewport(st: BoardState): Viewport {
  const full = st.u === 1 ? [0.5] : [0.5, 0.5];
  if (st.balls.length === 0) {
    return { center: full, half: 0.5 };
  }
  const last = st.balls[st.balls.length - 1];
  const half = Math.min(0.5, Math.max(last.r / FILL, 1e-300));
  return { center: last.c.slice(), half };
}

/** How many times finer than the full torus the current view is. */
export function zoomLevel(vp: Viewport): number {
  return 0.5 / vp.half;
}

/** Pixels per world unit for a given canvas size. */
export function scaleFor(vp: Viewport, w: number, h: number): number {
  return Math.min(w, h) / (2 * vp.half);
}

/**
 * World point to canvas pixels, through the nearest periodic image: the
 * displacement from the view center is measured with wrapDiff, so a ball
 * at 0.999 shows up next to a view centered at 0.001.
 */
export function worldToScreen(vp: Viewport, w: number, h: number, p: number[]): [number, number] {
  const s = scaleFor(vp, w, h);
  const x = w / 2 + wrapDiff(p[0], vp.center[0]) * s;
  const y = p.length === 1 ? h / 2 : h / 2 + wrapDiff(p[1], vp.center[1]) * s;
  return [x, y];
}

export function screenToWorld(vp: Viewport, w: number, h: number, x: number, y: number): number[] {
  const s = scaleFor(vp, w, h);
  const wx = vp.center[0] + (x - w / 2) / s;
  if (vp.center.length === 1) {
    return [wx];
  }
  return [wx, vp.center[1] + (y - h / 2) / s];
}

export function ballVisible(vp: Viewport, c: number[], r: number): boolean {
  for (let i = 0; i < vp.center.length; i++) {
    if (Math.abs(wrapDiff(c[i], vp.center[i])) > vp.half + r) {
      return false;
    }
  }
  return true;
}

// the canvas surface the draw call needs; tests substitute a recorder
export type Paint = Pick<
  CanvasRenderingContext2D,
  | "save"
  | "restore"
  | "beginPath"
  | "arc"
  | "fill"
  | "stroke"
  | "fillRect"
  | "strokeRect"
  | "clearRect"
  | "moveTo"
  | "lineTo"
  | "fillText"
  | "setLineDash"
  | "fillStyle"
  | "strokeStyle"
  | "lineWidth"
  | "globalAlpha"
  | "font"
>;

const BG = "#0f1320";
const GRID = "#2a3350";
const BOB = "#4a9eff";
const ALICE = "#ff9f43";
const LEGAL = "#4ade80";
const DANGER = "#ef4444";
const MARKER = "#fbbf24";

function ballColor(player: string): string {
  return player === "bob" ? BOB : ALICE;
}

function drawDisk(p: Paint, x: number, y: number, rp: number, color: string, alpha: number) {
  p.beginPath();
  p.arc(x, y, Math.max(rp, 1.5), 0, 2 * Math.PI);
  p.globalAlpha = alpha;
  p.fillStyle = color;
  p.fill();
  p.globalAlpha = 1;
  p.strokeStyle = color;
  p.lineWidth = 1.5;
  p.stroke();
}

function drawInterval(p: Paint, x: number, rp: number, mid: number, hgt: number, color: string, alpha: number) {
  p.globalAlpha = alpha;
  p.fillStyle = color;
  p.fillRect(x - rp, mid - hgt / 2, 2 * rp, hgt);
  p.globalAlpha = 1;
  p.strokeStyle = color;
  p.lineWidth = 1;
  p.strokeRect(x - rp, mid - hgt / 2, 2 * rp, hgt);
}

export interface Ghost {
  c: number[];
  r: number;
}

export function drawBoard(p: Paint, w: number, h: number, st: BoardState, vp: Viewport, ghost: Ghost | null) {
  const s = scaleFor(vp, w, h);
  p.fillStyle = BG;
  p.fillRect(0, 0, w, h);

  // frame of the unit domain, only useful while it is in view
  if (st.u === 2) {
    const [ox, oy] = worldToScreen(vp, w, h, [0, 0]);
    p.strokeStyle = GRID;
    p.lineWidth = 1;
    p.setLineDash([4, 4]);
    p.strokeRect(ox, oy, s, s);
    p.setLineDash([]);
  } else {
    p.strokeStyle = GRID;
    p.lineWidth = 1;
    p.beginPath();
    p.moveTo(0, h / 2);
    p.lineTo(w, h / 2);
    p.stroke();
  }

  // legal envelope for the pending move
  const bc = st.constraints;
  if (bc && bc.center_ref !== null && bc.center_max_distance !== null) {
    const [lx, ly] = worldToScreen(vp, w, h, bc.center_ref);
    const lr = bc.center_max_distance * s;
    if (st.u === 2) {
      drawDisk(p, lx, ly, lr, LEGAL, 0.12);
    } else {
      drawInterval(p, lx, lr, h / 2, h * 0.5, LEGAL, 0.1);
    }
  }

  // danger hulls (reveal mode only; hidden play leaves this list empty)
  for (const d of st.dangers) {
    if (!ballVisible(vp, d.c, d.r)) continue;
    const [dx, dy] = worldToScreen(vp, w, h, d.c);
    if (st.u === 2) {
      drawDisk(p, dx, dy, d.r * s, DANGER, 0.18);
    } else {
      drawInterval(p, dx, d.r * s, h / 2, h * 0.28, DANGER, 0.25);
    }
  }

  // the nested ball stack, oldest first so the newest paints on top
  let band = h * 0.62;
  for (const b of st.balls) {
    if (!ballVisible(vp, b.c, b.r)) continue;
    const [bx, by] = worldToScreen(vp, w, h, b.c);
    if (st.u === 2) {
      drawDisk(p, bx, by, b.r * s, ballColor(b.player), 0.1);
    } else {
      drawInterval(p, bx, b.r * s, h / 2, band, ballColor(b.player), 0.12);
      band = Math.max(band * 0.84, h * 0.06);
    }
  }

  // target marker, a thin cross so it stays visible at any zoom
  if (st.marker) {
    const [mx, my] = worldToScreen(vp, w, h, st.marker);
    p.strokeStyle = MARKER;
    p.lineWidth = 1;
    p.beginPath();
    p.moveTo(mx - 6, my);
    p.lineTo(mx + 6, my);
    p.moveTo(mx, my - 6);
    p.lineTo(mx, my + 6);
    p.stroke();
  }

  if (ghost && bc) {
    const ok = preValidate(bc, ghost.c, ghost.r).ok;
    const [gx, gy] = worldToScreen(vp, w, h, ghost.c);
    const color = ok ? LEGAL : DANGER;
    if (st.u === 2) {
      drawDisk(p, gx, gy, ghost.r * s, color, 0.3);
    } else {
      drawInterval(p, gx, ghost.r * s, h / 2, h * 0.3, color, 0.3);
    }
  }

  if (st.outcome) {
    const [fx, fy] = worldToScreen(vp, w, h, st.outcome);
    drawDisk(p, fx, fy, 4, MARKER, 0.9);
  }

  p.fillStyle = "#8b93b5";
  p.font = "12px monospace";
  p.fillText(`zoom ${zoomLevel(vp).toExponential(1)}x`, 8, 16);
}
