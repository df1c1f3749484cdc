/**
 * Page wiring: session form -> HTTP session -> WebSocket game loop.
 *
 * The human plays Bob. Every your_turn refreshes the ball stack from the
 * state endpoint before input is accepted, so the canvas always shows the
 * server's view of the game, never a local guess; the move log advances
 * only on accepted verdicts and engine replies.
 */

import { drawBoard, fitViewport, screenToWorld, type BoardState, type Ghost, type Viewport } from "./board.js";
import { parseServerMessage, proposeFrame, type BallConstraints, type SessionInfo, type StateView } from "./protocol.js";
import { preValidate } from "./validate.js";

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusDot = document.getElementById("status-dot")!;
const statusText = document.getElementById("status-text")!;
const banner = document.getElementById("banner")!;
const moveLog = document.getElementById("move-log")!;
const reportBox = document.getElementById("report")!;
const form = {
  server: document.getElementById("server") as HTMLInputElement,
  system: document.getElementById("system") as HTMLSelectElement,
  alpha: document.getElementById("alpha") as HTMLInputElement,
  beta: document.getElementById("beta") as HTMLInputElement,
  stop: document.getElementById("stop") as HTMLInputElement,
  reveal: document.getElementById("reveal") as HTMLInputElement,
  firstRadius: document.getElementById("first-radius") as HTMLInputElement,
  firstRadiusRow: document.getElementById("first-radius-row")!,
  newGame: document.getElementById("new-game") as HTMLButtonElement,
};

let session: SessionInfo | null = null;
let ws: WebSocket | null = null;
let constraints: BallConstraints | null = null;
let awaitingVerdict = false;
let over = false;
let ghost: Ghost | null = null;

const board: BoardState = {
  u: 1,
  balls: [],
  constraints: null,
  dangers: [],
  outcome: null,
  marker: null,
};
let viewport: Viewport = fitViewport(board);

function setStatus(connected: boolean, text: string) {
  statusDot.classList.toggle("connected", connected);
  statusText.textContent = text;
}

function setBanner(text: string, kind: "" | "ok" | "bad") {
  banner.textContent = text;
  banner.className = kind;
}

function logLine(text: string) {
  const li = document.createElement("li");
  li.textContent = text;
  moveLog.prepend(li);
}

function redraw() {
  viewport = fitViewport(board);
  drawBoard(ctx, canvas.width, canvas.height, board, viewport, ghost);
}

async function refreshState() {
  if (!session) return;
  const res = await fetch(form.server.value + session.state_url);
  if (!res.ok) return;
  const st = (await res.json()) as StateView;
  board.balls = st.balls;
  board.outcome = st.outcome;
  board.dangers = form.reveal.checked && st.dangers ? st.dangers : [];
  if (form.reveal.checked && st.dangers === undefined) {
    setBanner("server hides dangers (start it with --reveal)", "");
  }
  redraw();
}

function myRadius(): number {
  if (!constraints) return 0;
  if (constraints.radius_exact !== null) return constraints.radius_exact;
  return parseFloat(form.firstRadius.value);
}

function handleMessage(ev: MessageEvent) {
  const msg = parseServerMessage(String(ev.data));
  if (!msg) {
    setBanner("unparseable frame from server", "bad");
    return;
  }
  switch (msg.type) {
    case "your_turn":
      constraints = msg.ball_constraints;
      board.u = constraints.u;
      board.constraints = constraints;
      form.firstRadiusRow.style.display = constraints.radius_exact === null ? "" : "none";
      // stale views are refreshed before any input is accepted
      refreshState().then(() => {
        awaitingVerdict = false;
        setStatus(true, `your move · radius ${constraints!.radius_exact?.toExponential(3) ?? "free"}`);
      });
      break;
    case "verdict":
      if (msg.accept) {
        logLine(`you: accepted`);
        setBanner("accepted", "ok");
      } else {
        awaitingVerdict = false;
        logLine(`you: rejected (${msg.reason})`);
        setBanner(msg.reason, "bad"); // server reasons shown verbatim
      }
      break;
    case "alice_moved":
      logLine(`alice: r=${msg.ball.r.toExponential(3)}`);
      break;
    case "game_over": {
      over = true;
      constraints = null;
      board.constraints = null;
      const rep = msg.report as { ok?: boolean; min_orbit_distance?: number };
      setStatus(true, "game over");
      setBanner(`game over at ${msg.final_radius.toExponential(3)}`, "ok");
      reportBox.textContent =
        `outcome: ${msg.outcome.map((x) => x.toFixed(12)).join(", ")}\n` +
        `final radius: ${msg.final_radius.toExponential(6)}\n` +
        `min orbit distance: ${rep.min_orbit_distance?.toExponential(6) ?? "n/a"}\n` +
        `verification: ${rep.ok ? "ok" : "FAILED"}`;
      refreshState();
      break;
    }
    case "error":
      setBanner(msg.reason, "bad");
      break;
  }
}

async function newGame() {
  ws?.close();
  over = false;
  constraints = null;
  ghost = null;
  board.balls = [];
  board.dangers = [];
  board.outcome = null;
  board.constraints = null;
  moveLog.textContent = "";
  reportBox.textContent = "";
  setBanner("", "");
  const body = {
    system: form.system.value,
    alpha: parseFloat(form.alpha.value),
    beta: parseFloat(form.beta.value),
    stop_radius: parseFloat(form.stop.value),
  };
  let res: Response;
  try {
    res = await fetch(form.server.value + "/session", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch {
    setStatus(false, "server unreachable");
    return;
  }
  if (!res.ok) {
    const detail = (await res.json()) as { detail?: string };
    setBanner(detail.detail ?? `session refused (${res.status})`, "bad");
    setStatus(false, "no session");
    return;
  }
  session = (await res.json()) as SessionInfo;
  board.u = session.target.length === 2 && form.system.value.startsWith("skew") ? 1 : session.target.length;
  board.marker = session.target.slice(0, board.u);
  redraw();

  const wsUrl = form.server.value.replace(/^http/, "ws") + session.ws_url;
  ws = new WebSocket(wsUrl);
  ws.onopen = () => setStatus(true, "connected");
  ws.onmessage = handleMessage;
  ws.onclose = () => {
    if (!over) setStatus(false, "connection lost"); // disconnect banner
  };
  ws.onerror = () => setStatus(false, "connection error");
}

canvas.addEventListener("pointermove", (ev) => {
  if (!constraints || awaitingVerdict || over) return;
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const y = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  ghost = { c: screenToWorld(viewport, canvas.width, canvas.height, x, y), r: myRadius() };
  drawBoard(ctx, canvas.width, canvas.height, board, viewport, ghost);
});

canvas.addEventListener("pointerleave", () => {
  ghost = null;
  redraw();
});

canvas.addEventListener("click", (ev) => {
  if (!constraints || awaitingVerdict || over || !ws) return;
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const y = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  const c = screenToWorld(viewport, canvas.width, canvas.height, x, y);
  const r = myRadius();
  const pre = preValidate(constraints, c, r);
  if (!pre.ok) {
    // local pre-reject: no network call for an obviously illegal click
    setBanner(`illegal: ${pre.reason}`, "bad");
    return;
  }
  awaitingVerdict = true;
  ws.send(proposeFrame(c, r));
});

form.newGame.addEventListener("click", newGame);
form.reveal.addEventListener("change", () => {
  refreshState();
});

redraw();
setStatus(false, "no session");
