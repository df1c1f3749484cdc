/**
 * End-to-end against the real match server: these tests spawn the Python
 * server as a child process and talk to it over actual sockets, exactly
 * as the page does. Three things are on trial: a scripted client can play
 * a complete verified game; local pre-validation agrees with the server
 * verdict on a corpus of 1000+ mixed legal and illegal proposals; and a
 * rejected proposal never changes what the state endpoint reports.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, expect, test } from "vitest";
import WebSocket from "ws";
import { parseServerMessage, proposeFrame, type BallConstraints, type ServerMessage, type SessionInfo, type StateView } from "../src/protocol.js";
import { preValidate } from "../src/validate.js";

const PORT = 8871;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

beforeAll(async () => {
  server = spawn("schmidtlab", ["serve", "--port", String(PORT), "--reveal"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  for (let i = 0; i < 150; i++) {
    try {
      const res = await fetch(`${BASE}/session/warmup/state`);
      if (res.status === 404) return; // up: unknown sessions 404
    } catch {
      // connection refused until uvicorn binds
    }
    await sleep(200);
  }
  throw new Error("match server did not come up");
}, 45_000);

afterAll(() => {
  server?.kill();
});

/** Buffers server frames so bursts (verdict + alice_moved + your_turn) are not lost. */
class Frames {
  private queue: ServerMessage[] = [];
  private waiters: ((m: ServerMessage) => void)[] = [];

  constructor(ws: WebSocket) {
    ws.on("message", (data) => {
      const msg = parseServerMessage(String(data));
      if (!msg) {
        throw new Error(`unparseable frame: ${String(data)}`);
      }
      const w = this.waiters.shift();
      if (w) {
        w(msg);
      } else {
        this.queue.push(msg);
      }
    });
  }

  next(): Promise<ServerMessage> {
    const m = this.queue.shift();
    if (m) return Promise.resolve(m);
    return new Promise((res) => this.waiters.push(res));
  }
}

interface Game {
  info: SessionInfo;
  ws: WebSocket;
  frames: Frames;
}

async function openGame(body: Record<string, unknown>): Promise<Game> {
  const res = await fetch(`${BASE}/session`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  expect(res.status).toBe(200);
  const info = (await res.json()) as SessionInfo;
  const ws = new WebSocket(`ws://127.0.0.1:${PORT}${info.ws_url}`);
  const frames = new Frames(ws);
  await new Promise<void>((resolve, reject) => {
    ws.once("open", () => resolve());
    ws.once("error", reject);
  });
  return { info, ws, frames };
}

async function state(info: SessionInfo): Promise<StateView> {
  const res = await fetch(BASE + info.state_url);
  expect(res.status).toBe(200);
  return (await res.json()) as StateView;
}

test("scripted client plays a complete verified game", async () => {
  const g = await openGame({ system: "linear2", stop_radius: 1e-9 });
  let bobMoves = 0;
  let aliceMoves = 0;
  let msg = await g.frames.next();
  while (msg.type === "your_turn") {
    const bc = msg.ball_constraints;
    const c = bc.center_ref ?? [0.5];
    const r = bc.radius_exact ?? 0.25;
    expect(preValidate(bc, c, r).ok).toBe(true);
    g.ws.send(proposeFrame(c, r));
    const v = await g.frames.next();
    expect(v).toMatchObject({ type: "verdict", accept: true });
    bobMoves++;
    msg = await g.frames.next();
    if (msg.type === "alice_moved") {
      aliceMoves++;
      msg = await g.frames.next();
    }
  }
  expect(msg.type).toBe("game_over");
  if (msg.type === "game_over") {
    expect(msg.final_radius).toBeLessThanOrEqual(1e-9);
    expect(msg.outcome).toHaveLength(1);
    expect((msg.report as { ok?: boolean }).ok).toBe(true);
  }
  expect(bobMoves).toBeGreaterThanOrEqual(4);

  const st = await state(g.info);
  expect(st.over).toBe(true);
  expect(st.balls).toHaveLength(bobMoves + aliceMoves);
  expect(st.dangers).toBeDefined(); // server runs with --reveal
  g.ws.close();
}, 30_000);

// deterministic tiny PRNG so corpus failures are reproducible
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

interface Proposal {
  c: number[];
  r: number;
  tag: string;
}

function unitDir(u: number, rng: () => number): number[] {
  if (u === 1) {
    return [rng() < 0.5 ? -1 : 1];
  }
  const phi = 2 * Math.PI * rng();
  return [Math.cos(phi), Math.sin(phi)];
}

function offsetFrom(ref: number[], dir: number[], dist: number): number[] {
  return ref.map((x, i) => x + dir[i] * dist);
}

/** Proposals built to be rejected, with margins wide enough that float
 * rounding cannot flip either side's verdict. */
function illegalProbes(bc: BallConstraints, rng: () => number): Proposal[] {
  if (bc.radius_exact === null || bc.center_ref === null || bc.center_max_distance === null) {
    const c = [rng(), rng()].slice(0, bc.u);
    return [
      { c, r: 0.3, tag: "opener-over-cap" },
      { c, r: 0, tag: "opener-zero-radius" },
      { c, r: -0.25, tag: "opener-negative-radius" },
      { c: bc.u === 1 ? [0.5, 0.5] : [0.5], r: 0.25, tag: "opener-wrong-dims" },
    ];
  }
  const q = bc.radius_exact;
  const ref = bc.center_ref;
  const d = bc.center_max_distance;
  return [
    { c: offsetFrom(ref, unitDir(bc.u, rng), d * (1.05 + 0.5 * rng())), r: q, tag: "far-center" },
    { c: offsetFrom(ref, unitDir(bc.u, rng), d * (1.6 + rng())), r: q, tag: "very-far-center" },
    { c: ref.slice(), r: q * (1 + 1e-6), tag: "radius-too-big" },
    { c: ref.slice(), r: q * (1 - 1e-6), tag: "radius-too-small" },
    { c: ref.slice(), r: 0.26, tag: "radius-over-cap" },
    { c: ref.slice(), r: 0, tag: "zero-radius" },
    { c: ref.slice(), r: -q, tag: "negative-radius" },
    { c: bc.u === 1 ? [ref[0], 0.5] : [ref[0]], r: q, tag: "wrong-dims" },
  ];
}

/** A legal proposal: exact radius, center at most 90% of the way to the
 * containment boundary (or a free opener below the cap). */
function legalMove(bc: BallConstraints, rng: () => number): Proposal {
  if (bc.radius_exact === null || bc.center_ref === null || bc.center_max_distance === null) {
    const c = [rng(), rng()].slice(0, bc.u);
    return { c, r: 0.25 * (0.2 + 0.8 * rng()), tag: "opener" };
  }
  const dist = bc.center_max_distance * 0.9 * rng();
  return {
    c: offsetFrom(bc.center_ref, unitDir(bc.u, rng), dist),
    r: bc.radius_exact,
    tag: "legal",
  };
}

test("pre-validation agrees with server verdicts on 1000+ proposals and rejects never mutate state", async () => {
  const rng = mulberry32(20260816);
  const sessions: Record<string, unknown>[] = [
    { system: "linear2" },
    { system: "conformal2" },
    { system: "nonlinear" },
    { system: "skew2" },
    { system: "linear2", beta: 0.5 },
  ];
  let proposals = 0;
  let legalSeen = 0;
  let illegalSeen = 0;
  const disagreements: string[] = [];

  for (let gameIdx = 0; proposals < 1000; gameIdx++) {
    const cfg = { stop_radius: 1e-12, ...sessions[gameIdx % sessions.length] };
    const g = await openGame(cfg);
    let msg = await g.frames.next();
    while (msg.type === "your_turn") {
      const bc = msg.ball_constraints;
      const before = await state(g.info);

      for (const probe of illegalProbes(bc, rng)) {
        const local = preValidate(bc, probe.c, probe.r);
        g.ws.send(proposeFrame(probe.c, probe.r));
        const v = await g.frames.next();
        expect(v.type).toBe("verdict");
        if (v.type !== "verdict") break;
        proposals++;
        illegalSeen++;
        if (v.accept !== local.ok) {
          disagreements.push(`${probe.tag} ${JSON.stringify(probe)}: server=${v.accept} local=${local.ok}`);
        }
        expect(v.accept).toBe(false);
        expect(v.reason).not.toBe("");
        const after = await state(g.info);
        expect(after.balls).toEqual(before.balls);
        expect(after.turn).toEqual(before.turn);
      }

      const mv = legalMove(bc, rng);
      const local = preValidate(bc, mv.c, mv.r);
      expect(local.ok).toBe(true);
      g.ws.send(proposeFrame(mv.c, mv.r));
      const v = await g.frames.next();
      expect(v.type).toBe("verdict");
      proposals++;
      legalSeen++;
      if (v.type === "verdict" && v.accept !== local.ok) {
        disagreements.push(`${mv.tag} ${JSON.stringify(mv)}: server=${v.accept} local=${local.ok}`);
      }

      msg = await g.frames.next();
      if (msg.type === "alice_moved") {
        msg = await g.frames.next();
      }
    }
    expect(msg.type).toBe("game_over");
    if (msg.type === "game_over") {
      expect((msg.report as { ok?: boolean }).ok).toBe(true);
    }
    g.ws.close();
  }

  expect(proposals).toBeGreaterThanOrEqual(1000);
  expect(legalSeen).toBeGreaterThan(50);
  expect(illegalSeen).toBeGreaterThan(500);
  expect(disagreements).toEqual([]); // 100% agreement, both directions
}, 240_000);
