"""Live session service: one simulated arm shared over WebSocket.

A single asyncio task owns the control loop and advances it at the
configured tick rate; connected clients receive every tick as a JSON
message on ``/session`` and steer the session (press and release
patches, move the recall temperature, load banks, reset) with JSON
commands on the same socket. ``/healthz`` reports liveness and the
tick counter.

All client input flows through ``LiveSession.handle``, which validates
and applies one message between ticks, so the tick loop stays the only
writer of simulation state. Outbound traffic per client goes through a
bounded queue; a client that stops draining it is disconnected rather
than allowed to stall the loop.
"""

import asyncio
import contextlib
import json
import math

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import SystemConfig
from .errors import DataError, ProtocolError
from .memory import MemoryBank, canonical_dumps
from .sim import ArmWorld, ControlLoop, recall_commander

__all__ = ["PROTOCOL_VERSION", "parse_message", "LiveSession", "create_app"]

PROTOCOL_VERSION = 1

QUEUE_SIZE = 64

CLIENT_TYPES = {"hello", "touch", "set_beta", "load_bank", "reset"}


def parse_message(text: str) -> dict:
    """Decode and structurally validate one client message."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise ProtocolError(f"unknown message type {mtype!r}")
    if mtype == "touch":
        event = msg.get("event")
        if event not in ("pressed", "released"):
            raise ProtocolError("touch event must be 'pressed' or 'released'")
        if not isinstance(msg.get("patch"), str):
            raise ProtocolError("touch needs a patch name")
        if event == "pressed":
            mag = msg.get("magnitude")
            # zero is legal: a resting contact that applies no force
            if not isinstance(mag, (int, float)) or not math.isfinite(mag) or mag < 0:
                raise ProtocolError("pressed touch needs a finite magnitude >= 0")
    elif mtype == "set_beta":
        beta = msg.get("beta")
        if not isinstance(beta, (int, float)) or not math.isfinite(beta) or beta <= 0:
            raise ProtocolError("set_beta needs a positive finite beta")
    elif mtype == "load_bank":
        if not isinstance(msg.get("patch"), str) or not isinstance(msg.get("path"), str):
            raise ProtocolError("load_bank needs a patch name and a file path")
    return msg


class LiveSession:
    """Shared session state plus the per-message and per-tick logic."""

    def __init__(
        self,
        config: SystemConfig,
        banks: dict[str, MemoryBank] | None = None,
        beta: float | None = None,
    ):
        self.config = config
        self.encoder = config.build_association_encoder()
        self.banks = dict(banks or {})
        for bank in self.banks.values():
            bank.require_encoder(self.encoder)
        self.beta = float(beta if beta is not None else config.memory.beta)
        self.world = ArmWorld(config)
        self.loop = ControlLoop(self.world)
        self._command_fn = recall_commander(config, self.banks, lambda: self.beta)
        self.tick_count = 0
        self.last_payload: dict | None = None
        self.queues: set[asyncio.Queue] = set()

    def welcome(self) -> dict:
        return {
            "type": "welcome",
            "version": PROTOCOL_VERSION,
            "joints": self.config.joint_names,
            "limits": [list(lim) for lim in self.config.limits],
            "patches": {
                p.name: {"axis": list(p.axis), "theta_sign": p.theta_sign, "joint": p.joint}
                for p in self.config.patches
            },
            "tick_rate": self.config.sim.tick_rate,
            "beta": self.beta,
            "banks": sorted(self.banks),
            "tick": self.tick_count,
        }

    def handle(self, msg: dict) -> dict:
        """Apply one validated client message; returns the reply."""
        mtype = msg["type"]
        if mtype == "hello":
            return self.welcome()
        if mtype == "touch":
            patch = msg["patch"]
            if patch not in self.world.patch_ids:
                return {"type": "error", "message": f"unknown patch {patch!r}"}
            if msg["event"] == "pressed":
                self.world.set_touch(patch, float(msg["magnitude"]))
            else:
                self.world.set_touch(patch, 0.0)
            return {"type": "ack", "of": "touch", "patch": patch, "event": msg["event"]}
        if mtype == "set_beta":
            self.beta = float(msg["beta"])
            return {"type": "ack", "of": "set_beta", "beta": self.beta}
        if mtype == "load_bank":
            patch = msg["patch"]
            if patch not in self.world.patch_ids:
                return {"type": "error", "message": f"unknown patch {patch!r}"}
            try:
                bank = MemoryBank.load(msg["path"])
                bank.require_encoder(self.encoder)
            except DataError as exc:
                return {"type": "error", "message": str(exc)}
            self.banks[patch] = bank
            return {"type": "ack", "of": "load_bank", "patch": patch}
        if mtype == "reset":
            self.world = ArmWorld(self.config)
            self.loop = ControlLoop(self.world)
            self._command_fn = recall_commander(
                self.config, self.banks, lambda: self.beta
            )
            return {"type": "ack", "of": "reset"}
        return {"type": "error", "message": f"unhandled message type {mtype!r}"}

    def handle_text(self, text: str) -> str:
        try:
            reply = self.handle(parse_message(text))
        except ProtocolError as exc:
            reply = {"type": "error", "message": str(exc)}
        return canonical_dumps(reply)

    def tick(self) -> str:
        """Advance the simulation one tick; returns the broadcast text."""
        result = self.loop.tick(self._command_fn)
        self.tick_count += 1
        payload = {
            "type": "tick",
            "tick": self.tick_count,
            "t": result.t,
            "angles": [float(a) for a in result.angles],
            "touches": self.world.active_touches(),
            "patch": result.info.get("patch", ""),
            "rho": float(result.info.get("rho", 0.0)),
            "entropy": result.info.get("entropy"),
            "beta": self.beta,
        }
        self.last_payload = payload
        return canonical_dumps(payload)

    def broadcast(self, text: str):
        """Queue one frame for every client; drop clients that are full."""
        stalled = [q for q in self.queues if q.full()]
        for q in stalled:
            self.queues.discard(q)
            with contextlib.suppress(asyncio.QueueEmpty):
                q.get_nowait()  # make room so the close signal always fits
            q.put_nowait(None)
        for q in self.queues:
            q.put_nowait(text)


def create_app(
    config: SystemConfig,
    banks: dict[str, MemoryBank] | None = None,
    beta: float | None = None,
    tick_interval: float | None = None,
) -> FastAPI:
    """ASGI app: WS /session plus GET /healthz, one shared session."""
    session = LiveSession(config, banks, beta)
    interval = config.sim.tick_dt if tick_interval is None else tick_interval

    async def ticker():
        while True:
            await asyncio.sleep(interval)
            session.broadcast(session.tick())

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(ticker())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.session = session

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok",
            "tick": session.tick_count,
            "clients": len(session.queues),
        }

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=QUEUE_SIZE)
        session.queues.add(queue)

        async def pump():
            while True:
                item = await queue.get()
                if item is None:
                    await ws.close(code=1013)  # server overloaded for this client
                    return
                await ws.send_text(item)

        def offer(item: str):
            # a full queue means the client is stalled; broadcast() will
            # drop it on the next tick, no point blocking the reader here
            with contextlib.suppress(asyncio.QueueFull):
                queue.put_nowait(item)

        sender = asyncio.create_task(pump())
        try:
            offer(canonical_dumps(session.welcome()))
            while True:
                text = await ws.receive_text()
                offer(session.handle_text(text))
        except WebSocketDisconnect:
            pass
        finally:
            session.queues.discard(queue)
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender

    return app
