import { describe, expect, test } from "vitest";
import {
  ballVisible,
  drawBoard,
  fitViewport,
  screenToWorld,
  worldToScreen,
  zoomLevel,
  type BoardState,
  type Paint,
} from "../src/board.js";

function emptyState(u: number): BoardState {
  return { u, balls: [], constraints: null, dangers: [], outcome: null, marker: null };
}

/** Alternate Bob/Alice balls by the radius law, all centered at c. */
function playRounds(st: BoardState, c: number[], alpha: number, beta: number, rounds: number) {
  let r = 0.25;
  for (let i = 0; i < rounds; i++) {
    st.balls.push({ player: "bob", c, r });
    r *= alpha;
    st.balls.push({ player: "alice", c, r });
    r *= beta;
  }
}

describe("viewport", () => {
  test("fresh game shows the whole domain", () => {
    const vp = fitViewport(emptyState(2));
    expect(vp.center).toEqual([0.5, 0.5]);
    expect(vp.half).toBe(0.5);
    expect(zoomLevel(vp)).toBe(1);
  });

  test("auto-zoom tracks the current ball down the radius law", () => {
    const st = emptyState(1);
    const zooms: number[] = [];
    for (let rounds = 1; rounds <= 4; rounds++) {
      st.balls = [];
      playRounds(st, [0.3], 0.1, 0.1, rounds);
      zooms.push(zoomLevel(fitViewport(st)));
    }
    // alpha*beta = 0.01 per round, so the view gets 100x finer per round
    for (let i = 1; i < zooms.length; i++) {
      expect(zooms[i] / zooms[i - 1]).toBeCloseTo(100, 6);
    }
    expect(zooms[3]).toBeGreaterThan(1e6); // a million-fold after 8 moves
  });

  test("viewport centers on the latest ball", () => {
    const st = emptyState(2);
    st.balls.push({ player: "bob", c: [0.2, 0.8], r: 0.1 });
    const vp = fitViewport(st);
    expect(vp.center).toEqual([0.2, 0.8]);
    expect(vp.half).toBeLessThan(0.25);
  });
});

describe("projection", () => {
  test("world-screen roundtrip", () => {
    const vp = { center: [0.3, 0.6], half: 0.01 };
    const [x, y] = worldToScreen(vp, 800, 500, [0.305, 0.595]);
    const back = screenToWorld(vp, 800, 500, x, y);
    expect(back[0]).toBeCloseTo(0.305, 12);
    expect(back[1]).toBeCloseTo(0.595, 12);
  });

  test("draws the nearest periodic image across the seam", () => {
    const vp = { center: [0.001], half: 0.01 };
    expect(ballVisible(vp, [0.999], 0.001)).toBe(true);
    const [x] = worldToScreen(vp, 800, 500, [0.999]);
    expect(x).toBeLessThan(400); // left of center, not a full turn away
  });

  test("distant balls are culled at deep zoom", () => {
    const vp = { center: [0.5, 0.5], half: 1e-6 };
    expect(ballVisible(vp, [0.6, 0.5], 1e-8)).toBe(false);
    expect(ballVisible(vp, [0.5, 0.5], 1e-8)).toBe(true);
  });
});

/** Records draw calls so rendering can be asserted without a DOM. */
function recorder() {
  const ops: string[] = [];
  const p = {
    save: () => ops.push("save"),
    restore: () => ops.push("restore"),
    beginPath: () => ops.push("beginPath"),
    arc: () => ops.push("arc"),
    fill: () => ops.push("fill"),
    stroke: () => ops.push("stroke"),
    fillRect: () => ops.push("fillRect"),
    strokeRect: () => ops.push("strokeRect"),
    clearRect: () => ops.push("clearRect"),
    moveTo: () => ops.push("moveTo"),
    lineTo: () => ops.push("lineTo"),
    fillText: () => ops.push("fillText"),
    setLineDash: () => ops.push("setLineDash"),
    fillStyle: "",
    strokeStyle: "",
    lineWidth: 0,
    globalAlpha: 1,
    font: "",
  };
  return { p: p as unknown as Paint, ops };
}

describe("drawBoard", () => {
  test("plane game paints one disk per visible ball plus overlays", () => {
    const st = emptyState(2);
    st.balls.push({ player: "bob", c: [0.5, 0.5], r: 0.2 });
    st.balls.push({ player: "alice", c: [0.52, 0.5], r: 0.02 });
    st.dangers.push({ c: [0.51, 0.5], r: 0.005 });
    st.constraints = {
      radius_exact: 0.002,
      radius_max: 0.25,
      center_ref: [0.52, 0.5],
      center_max_distance: 0.018,
      u: 2,
    };
    const { p, ops } = recorder();
    drawBoard(p, 800, 500, st, fitViewport(st), { c: [0.52, 0.5], r: 0.002 });
    // legal region + danger + 2 balls + ghost = 5 disks
    expect(ops.filter((o) => o === "arc").length).toBe(5);
    expect(ops).toContain("fillText"); // zoom readout
  });

  test("line game draws intervals, not disks", () => {
    const st = emptyState(1);
    st.balls.push({ player: "bob", c: [0.3], r: 0.1 });
    st.balls.push({ player: "alice", c: [0.3], r: 0.01 });
    const { p, ops } = recorder();
    drawBoard(p, 800, 500, st, fitViewport(st), null);
    expect(ops.filter((o) => o === "arc").length).toBe(0);
    // background + 2 interval fills
    expect(ops.filter((o) => o === "fillRect").length).toBe(3);
  });

  test("outcome point is marked once the game ends", () => {
    const st = emptyState(2);
    st.outcome = [0.42, 0.77];
    st.balls.push({ player: "bob", c: [0.42, 0.77], r: 1e-9 });
    const { p, ops } = recorder();
    drawBoard(p, 800, 500, st, fitViewport(st), null);
    expect(ops.filter((o) => o === "arc").length).toBe(2); // ball + outcome dot
  });
});
