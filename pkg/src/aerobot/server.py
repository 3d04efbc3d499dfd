"""Live piloting sessions over a line-delimited JSON protocol.

One session owns one engine stepped at a wall-clock pace of dt/speed and
emits state frames at the telemetry cadence (1 Hz of simulated time by
default). Frames are fire-and-forget: slow or absent consumers never stall
the physics (the outbound queue drops the oldest frame). Inbound command
frames are queued to the engine and take effect at the next step boundary.

Connections speak either raw TCP (one JSON object per line) or WebSocket:
an initial HTTP GET triggers the RFC 6455 upgrade handshake, after which
each text message carries one JSON object. The server hosts a primary
session that starts advancing immediately; the first client attaches to it
and every further concurrent client gets an independent session.
"""
from __future__ import annotations

import base64
import hashlib
import json
import socket
import struct
import threading
import time
from collections import deque

from .dynamics import Engine
from .gastransfer import CommandKind

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
COMMANDS = {k.value for k in CommandKind}


def state_frame(engine: Engine, event: str | None) -> dict:
    st = engine.state
    return {
        "t": st.t, "alt": st.alt, "vz": st.vz, "p_sp": st.p_sp,
        "p_zp": st.p_zp, "t_zp": st.t_zp, "t_sp": st.t_sp,
        "m_sp": st.m_sp, "m_zp": st.m_zp,
        "pump": engine.actuators.pump_on, "vent": engine.actuators.vent_open,
        "mode": st.mode, "event": event,
    }


class Session:
    """One engine advanced in (scaled) real time, broadcasting frames."""

    def __init__(self, make_engine, speed: float = 1.0,
                 frame_cadence_s: float = 1.0):
        self.engine = make_engine()
        self.speed = speed
        self.every = max(1, int(round(frame_cadence_s / self.engine.dt)))
        self.frames = deque(maxlen=600)
        self.total_frames = 0
        self.fault = None
        self._stop = threading.Event()
        self._seen_events = 0
        self.thread = threading.Thread(target=self._loop, daemon=True)

    def start(self):
        self.thread.start()
        return self

    def stop(self):
        self._stop.set()

    def enqueue(self, kind: str) -> None:
        self.engine.enqueue(CommandKind(kind))

    def _loop(self):
        eng = self.engine
        budget = eng.dt / self.speed
        next_tick = time.monotonic()
        k = 0
        while not self._stop.is_set():
            try:
                eng.step()
            except Exception as e:              # fault ends the session politely
                self.fault = str(e)
                self.frames.append({"error": f"engine fault: {e}"})
                self.total_frames += 1
                return
            k += 1
            if k % self.every == 0:
                ev = eng._events[self._seen_events:]
                self._seen_events = len(eng._events)
                text = ";".join(f"{e[1]}:{e[2]}" for e in ev) or None
                self.frames.append(state_frame(eng, text))
                self.total_frames += 1
            next_tick += budget
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_tick = time.monotonic()


class SessionServer:
    """TCP/WebSocket front end; one primary session plus per-client spares."""

    def __init__(self, make_engine, port: int = 8751, host: str = "127.0.0.1",
                 speed: float = 1.0, frame_cadence_s: float = 1.0):
        self._make_engine = make_engine
        self.host = host
        self.port = port
        self.speed = speed
        self.cadence = frame_cadence_s
        self.primary = Session(make_engine, speed, frame_cadence_s)
        self._primary_claimed = threading.Lock()
        self._sock = None
        self._stop = threading.Event()
        self._spares = []

    def start(self):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((self.host, self.port))
        self.port = self._sock.getsockname()[1]
        self._sock.listen(8)
        self.primary.start()
        threading.Thread(target=self._accept_loop, daemon=True).start()
        return self

    def stop(self):
        self._stop.set()
        self.primary.stop()
        for s in self._spares:
            s.stop()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass

    def serve_forever(self):
        self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        finally:
            self.stop()

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._serve_client, args=(conn,),
                             daemon=True).start()

    def _session_for_client(self) -> Session:
        if self._primary_claimed.acquire(blocking=False):
            return self.primary
        spare = Session(self._make_engine, self.speed, self.cadence).start()
        self._spares.append(spare)
        return spare

    def _serve_client(self, conn: socket.socket):
        session = self._session_for_client()
        transport = None
        try:
            # sniff the first byte to detect an HTTP upgrade; a silent client
            # is a raw line consumer and must start receiving frames anyway
            conn.settimeout(0.5)
            try:
                first = conn.recv(1, socket.MSG_PEEK)
            except (socket.timeout, TimeoutError):
                first = b""
            conn.settimeout(None)
            if first == b"G":
                transport = _WebSocketTransport(conn)
            else:
                transport = _LineTransport(conn)
            transport.handshake()
            stop = threading.Event()
            writer = threading.Thread(
                target=self._pump_frames, args=(session, transport, stop),
                daemon=True)
            writer.start()
            for line in transport.lines():
                self._handle_command(session, transport, line)
            stop.set()
        except (OSError, ConnectionError):
            pass
        finally:
            if session is self.primary:
                try:
                    self._primary_claimed.release()
                except RuntimeError:
                    pass
            elif session in self._spares:
                session.stop()
            try:
                conn.close()
            except OSError:
                pass

    def _pump_frames(self, session: Session, transport, stop):
        seen = session.total_frames      # join live; history is not replayed
        while not stop.is_set() and not self._stop.is_set():
            total = session.total_frames
            if total <= seen:
                time.sleep(0.005)
                continue
            if total - seen > len(session.frames):
                seen = total - len(session.frames)   # dropped: client too slow
            try:
                frame = session.frames[len(session.frames) - (total - seen)]
            except IndexError:
                seen = session.total_frames
                continue
            try:
                transport.send(json.dumps(frame))
            except (OSError, ConnectionError):
                return
            seen += 1

    def _handle_command(self, session, transport, line: str):
        try:
            obj = json.loads(line)
            cmd = obj["cmd"]
            if cmd not in COMMANDS:
                raise KeyError(cmd)
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            try:
                transport.send(json.dumps({"error": f"bad command frame: {e}"}))
            except (OSError, ConnectionError):
                pass
            return
        session.enqueue(cmd)


class _LineTransport:
    def __init__(self, conn):
        self.conn = conn
        self._buf = b""

    def handshake(self):
        pass

    def send(self, text: str):
        self.conn.sendall(text.encode("utf-8") + b"\n")

    def lines(self):
        while True:
            chunk = self.conn.recv(4096)
            if not chunk:
                return
            self._buf += chunk
            while b"\n" in self._buf:
                line, self._buf = self._buf.split(b"\n", 1)
                if line.strip():
                    yield line.decode("utf-8", "replace")


class _WebSocketTransport:
    """Minimal RFC 6455 server endpoint: text frames, client masking."""

    def __init__(self, conn):
        self.conn = conn
        self._buf = b""

    def handshake(self):
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = self.conn.recv(4096)
            if not chunk:
                raise ConnectionError("client closed during handshake")
            data += chunk
        head, _, rest = data.partition(b"\r\n\r\n")
        self._buf = rest
        key = None
        for line in head.split(b"\r\n")[1:]:
            name, _, value = line.partition(b":")
            if name.strip().lower() == b"sec-websocket-key":
                key = value.strip().decode()
        if key is None:
            raise ConnectionError("not a websocket upgrade")
        accept = base64.b64encode(
            hashlib.sha1((key + WS_GUID).encode()).digest()).decode()
        self.conn.sendall(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\nConnection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + accept.encode() + b"\r\n\r\n")

    def send(self, text: str):
        payload = text.encode("utf-8")
        n = len(payload)
        if n < 126:
            head = struct.pack("!BB", 0x81, n)
        elif n < 1 << 16:
            head = struct.pack("!BBH", 0x81, 126, n)
        else:
            head = struct.pack("!BBQ", 0x81, 127, n)
        self.conn.sendall(head + payload)

    def _read_exact(self, n):
        while len(self._buf) < n:
            chunk = self.conn.recv(4096)
            if not chunk:
                raise ConnectionError("closed")
            self._buf += chunk
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def lines(self):
        while True:
            b1, b2 = self._read_exact(2)
            opcode = b1 & 0x0F
            masked = b2 & 0x80
            length = b2 & 0x7F
            if length == 126:
                (length,) = struct.unpack("!H", self._read_exact(2))
            elif length == 127:
                (length,) = struct.unpack("!Q", self._read_exact(8))
            mask = self._read_exact(4) if masked else b"\x00" * 4
            payload = bytes(b ^ mask[i % 4]
                            for i, b in enumerate(self._read_exact(length)))
            if opcode == 0x8:                 # close
                try:
                    self.conn.sendall(struct.pack("!BB", 0x88, 0))
                except OSError:
                    pass
                return
            if opcode == 0x9:                 # ping -> pong
                self.conn.sendall(struct.pack("!BB", 0x8A, len(payload))
                                  + payload)
                continue
            if opcode in (0x1, 0x2):
                text = payload.decode("utf-8", "replace")
                for ln in text.splitlines():
                    if ln.strip():
                        yield ln
