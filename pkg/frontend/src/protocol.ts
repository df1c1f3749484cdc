/**
 * Wire protocol for the match server. One JSON object per WebSocket frame.
 *
 * server -> client:
 *   your_turn    { ball_constraints }              it is the human's move
 *   verdict      { accept, reason }                answer to a propose frame
 *   alice_moved  { ball }                          the engine's reply ball
 *   game_over    { outcome, final_radius, report } game finished, verified
 *   error        { reason }                        session-level failure
 *
 * client -> server:
 *   propose      { c, r }                          the human's ball
 *
 * Sessions are created over plain HTTP first; POST /session returns the
 * ws_url and state_url this module talks to.
 */

export interface BallConstraints {
  radius_exact: number | null; // null on the free opening move
  radius_max: number; // hard ball cap (0.25)
  center_ref: number[] | null; // previous ball center, null on the opener
  center_max_distance: number | null; // prev radius minus required radius
  u: number; // playing dimension, 1 or 2
}

export interface WireBall {
  c: number[];
  r: number;
}

export type ServerMessage =
  | { type: "your_turn"; ball_constraints: BallConstraints }
  | { type: "verdict"; accept: boolean; reason: string }
  | { type: "alice_moved"; ball: WireBall }
  | { type: "game_over"; outcome: number[]; final_radius: number; report: Record<string, unknown> }
  | { type: "error"; reason: string };

export interface SessionInfo {
  session_id: string;
  system: Record<string, unknown>;
  constants: Record<string, unknown>;
  target: number[];
  width: number;
  state_url: string;
  ws_url: string;
}

export interface StateView {
  balls: { player: string; c: number[]; r: number; turn: number }[];
  turn: { index: number; player: string | null };
  constraints: BallConstraints | null;
  over: boolean;
  outcome: number[] | null;
  dangers?: { depth: number; c: number[]; r: number; size: number }[];
}

function isNumberArray(x: unknown): x is number[] {
  return Array.isArray(x) && x.every((v) => typeof v === "number");
}

/**
 * Parse one frame from the server. Returns null on anything that does not
 * match the protocol; the caller treats that as a channel fault, never as
 * game state.
 */
export function parseServerMessage(text: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (!obj || typeof obj !== "object") {
    return null;
  }
  const msg = obj as Record<string, unknown>;
  switch (msg.type) {
    case "your_turn": {
      const bc = msg.ball_constraints as Record<string, unknown> | undefined;
      if (!bc || typeof bc.u !== "number") return null;
      return msg as unknown as ServerMessage;
    }
    case "verdict":
      if (typeof msg.accept !== "boolean" || typeof msg.reason !== "string") return null;
      return msg as unknown as ServerMessage;
    case "alice_moved": {
      const ball = msg.ball as Record<string, unknown> | undefined;
      if (!ball || !isNumberArray(ball.c) || typeof ball.r !== "number") return null;
      return msg as unknown as ServerMessage;
    }
    case "game_over":
      if (!isNumberArray(msg.outcome) || typeof msg.final_radius !== "number") return null;
      return msg as unknown as ServerMessage;
    case "error":
      if (typeof msg.reason !== "string") return null;
      return msg as unknown as ServerMessage;
    default:
      return null;
  }
}

/** Serialize the only client->server frame. */
export function proposeFrame(c: number[], r: number): string {
  return JSON.stringify({ type: "propose", c, r });
}
