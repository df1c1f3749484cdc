"""Match server: remote players drive Bob over a WebSocket while the
engine answers with the winning strategy.

One game per session. Game state mutates only through moves that
validate_move has approved; everything else (malformed frames, illegal
proposals, stale sessions) is answered without touching the transcript.
The state endpoint is read-only; danger hulls appear in it only when
the server was started with reveal enabled.
"""

from __future__ import annotations

import asyncio
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .alice import AliceStrategy, constants_to_obj, derive_constants
from .bob import bob_constraints
from .errors import ConstantsError
from .game import GameConfig, Move, Transcript, validate_move, verify_transcript
from .systems import (Rectangle, SystemSpec, named_system, spec_from_obj,
                      spec_to_obj, sys_id)
from .torus import RADIUS_CAP, Ball, Point, wrap


@dataclass
class Session:
    sid: str
    sys: SystemSpec
    rect: Rectangle
    config: GameConfig
    constants: object
    alice: AliceStrategy
    transcript: Transcript
    last_touch: float = field(default_factory=time.monotonic)
    over: bool = False
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)

    def touch(self):
        self.last_touch = time.monotonic()


def _ball_obj(move: Move) -> dict:
    return {"player": move.player, "c": list(move.ball.center.coords),
            "r": move.ball.radius, "turn": move.turn_index}


def create_app(reveal: bool = False, idle_seconds: float = 900.0) -> FastAPI:
    app = FastAPI(title="schmidtlab match server")
    # browser clients live on other origins; the protocol has no
    # credentials so a blanket allow is safe
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}

    def sweep():
        now = time.monotonic()
        for sid in [s for s, v in sessions.items()
                    if now - v.last_touch > idle_seconds]:
            del sessions[sid]

    def get_session(sid: str) -> Session | None:
        sweep()
        s = sessions.get(sid)
        if s is not None:
            s.touch()
        return s

    @app.post("/session")
    async def new_session(body: dict):
        sweep()
        try:
            system = body.get("system", "linear2")
            if isinstance(system, dict):
                sys_spec = spec_from_obj(system)
            else:
                sys_spec = named_system(str(system))
            config = GameConfig(
                alpha=float(body.get("alpha", 0.1)),
                beta=float(body.get("beta", 0.1)),
                stop_radius=float(body.get("stop_radius", 1e-9)),
            )
            first_radius = float(body.get("first_radius", RADIUS_CAP))
            constants = derive_constants(sys_spec, config.alpha, config.beta,
                                         first_radius)
            # skew targets live on the 2-torus even though play is on a leaf
            t_dim = 2 if sys_spec.kind == "skew-product" else sys_spec.u
            target = body.get("target")
            if target is None:
                target = [0.0] * sys_spec.u
                if sys_spec.kind == "skew-product":
                    target = [0.0, sys_spec.leaf_z0]
            coords = [wrap(float(x)) for x in target]
            if len(coords) != t_dim:
                raise ValueError(f"target needs {t_dim} coordinates")
            width = float(body.get("width", constants.c))
            rect = Rectangle(Point.of(*coords), width)
            alice = AliceStrategy(sys_spec, rect, config, constants)
        except (ValueError, TypeError, ConstantsError) as bad:
            return JSONResponse(status_code=422, content={"detail": str(bad)})
        sid = uuid.uuid4().hex
        sessions[sid] = Session(
            sid=sid, sys=sys_spec, rect=rect, config=config,
            constants=constants, alice=alice,
            transcript=Transcript(config, sys_spec, rect),
        )
        return {
            "session_id": sid,
            "system": {"id": sys_id(sys_spec), **spec_to_obj(sys_spec)},
            "constants": constants_to_obj(constants),
            "target": coords,
            "width": width,
            "state_url": f"/session/{sid}/state",
            "ws_url": f"/session/{sid}/ws",
        }

    @app.get("/session/{sid}/state")
    async def state(sid: str):
        s = get_session(sid)
        if s is None:
            return JSONResponse(status_code=404, content={"detail": "no such session"})
        async with s.lock:
            t = s.transcript
            out = {
                "balls": [_ball_obj(m) for m in t.moves],
                "turn": {"index": len(t.moves) + 1,
                         "player": None if s.over else t.next_player},
                "constraints": None if s.over or t.next_player != "bob"
                               else bob_constraints(t),
                "over": s.over,
                "outcome": list(t.outcome.coords) if t.outcome is not None else None,
            }
            if reveal:
                out["dangers"] = [
                    {"depth": d.depth, "c": list(d.hull.center.coords),
                     "r": d.hull.radius, "size": d.size}
                    for d in s.alice.survivors
                ]
            return out

    @app.websocket("/session/{sid}/ws")
    async def play(ws: WebSocket, sid: str):
        await ws.accept()
        s = get_session(sid)
        if s is None:
            await ws.send_json({"type": "error", "reason": "no such session"})
            await ws.close()
            return
        try:
            if s.over:
                await ws.send_json(_game_over_msg(s))
                await ws.close()
                return
            await ws.send_json({"type": "your_turn",
                                "ball_constraints": bob_constraints(s.transcript)})
            while True:
                try:
                    msg = await ws.receive_json()
                except (ValueError, KeyError):
                    await ws.send_json({"type": "verdict", "accept": False,
                                        "reason": "malformed: not a JSON frame"})
                    continue
                s.touch()
                async with s.lock:
                    done, replies = _handle_frame(s, msg)
                for reply in replies:
                    await ws.send_json(reply)
                if done:
                    await ws.close()
                    return
        except WebSocketDisconnect:
            return

    def _game_over_msg(s: Session) -> dict:
        report = verify_transcript(s.transcript, s.constants, s.sys, s.rect)
        return {
            "type": "game_over",
            "outcome": list(s.transcript.outcome.coords),
            "final_radius": s.transcript.final_radius,
            "report": report.to_obj(),
        }

    def _handle_frame(s: Session, msg) -> tuple[bool, list[dict]]:
        """Apply one client frame under the session lock; returns
        (game finished, ordered replies)."""
        if not isinstance(msg, dict) or msg.get("type") != "propose":
            return False, [{"type": "verdict", "accept": False,
                            "reason": "malformed: expected a propose frame"}]
        if s.over:
            return True, [_game_over_msg(s)]
        t = s.transcript
        try:
            coords = [wrap(float(c)) for c in msg["c"]]
            if len(coords) != s.sys.u:
                raise ValueError(f"need {s.sys.u} coordinates")
            ball = Ball(Point.of(*coords), float(msg["r"]))
        except (KeyError, TypeError, ValueError) as bad:
            return False, [{"type": "verdict", "accept": False,
                            "reason": f"malformed: {bad}"}]
        move = Move("bob", ball, len(t.moves) + 1)
        verdict = validate_move(t.last_move, move, s.config)
        if not verdict.ok:
            return False, [{"type": "verdict", "accept": False,
                            "reason": verdict.reason}]
        t.moves.append(move)
        replies = [{"type": "verdict", "accept": True, "reason": ""}]
        if ball.radius <= s.config.stop_radius:
            _finish(s)
            return True, replies + [_game_over_msg(s)]
        reply = s.alice.propose(t)
        amove = Move("alice", reply, len(t.moves) + 1)
        averdict = validate_move(t.last_move, amove, s.config)
        assert averdict.ok, f"engine reply failed validation: {averdict.reason}"
        t.moves.append(amove)
        replies.append({"type": "alice_moved",
                        "ball": {"c": list(reply.center.coords), "r": reply.radius}})
        if reply.radius <= s.config.stop_radius:
            _finish(s)
            return True, replies + [_game_over_msg(s)]
        replies.append({"type": "your_turn",
                        "ball_constraints": bob_constraints(t)})
        return False, replies

    def _finish(s: Session):
        t = s.transcript
        t.outcome = t.moves[-1].ball.center
        t.final_radius = t.moves[-1].ball.radius
        s.over = True

    return app


app = create_app()
