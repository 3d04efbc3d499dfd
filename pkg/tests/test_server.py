import json
import socket
import time

import pytest

from aerobot.scenario import ensure_table, load_scenario, make_engine
from aerobot.server import SessionServer


@pytest.fixture(scope="module")
def server():
    scen = load_scenario("nevada-flight2")
    table = ensure_table(scen)
    srv = SessionServer(lambda: make_engine(scen, table), port=0,
                        speed=200.0, frame_cadence_s=1.0)
    srv.start()
    yield srv
    srv.stop()


def connect(port):
    s = socket.create_connection(("127.0.0.1", port), timeout=10.0)
    s.settimeout(10.0)
    return s


def read_frames(sock, n, buf=b""):
    frames = []
    while len(frames) < n:
        chunk = sock.recv(4096)
        if not chunk:
            break
        buf += chunk
        while b"\n" in buf:
            line, buf = buf.split(b"\n", 1)
            if line.strip():
                frames.append(json.loads(line))
    return frames, buf


class TestRawSession:
    def test_frames_stream_and_advance(self, server):
        sock = connect(server.port)
        frames, _ = read_frames(sock, 3)
        assert len(frames) == 3
        assert frames[0]["t"] < frames[1]["t"] < frames[2]["t"]
        for key in ("t", "alt", "vz", "p_sp", "p_zp", "t_zp", "t_sp",
                    "m_sp", "m_zp", "pump", "vent", "mode", "event"):
            assert key in frames[0]
        sock.close()

    def test_simulation_advances_without_client(self, server):
        # the primary session has been running since server start
        time.sleep(0.3)
        sock = connect(server.port)
        frames, _ = read_frames(sock, 1)
        sock.close()
        assert frames[0]["t"] > 0.0

    def test_vent_command_reflected(self, server):
        sock = connect(server.port)
        frames, buf = read_frames(sock, 1)
        m_sp0 = frames[0]["m_sp"]
        sock.sendall(b'{"cmd":"vent_open"}\n')
        got_vent = None
        for _ in range(20):
            more, buf = read_frames(sock, 1, buf)
            if more and more[0]["vent"]:
                got_vent = more[0]
                break
        assert got_vent is not None
        later, buf = read_frames(sock, 3, buf)
        assert later[-1]["m_sp"] < m_sp0
        sock.sendall(b'{"cmd":"vent_close"}\n')
        sock.close()

    def test_malformed_command_yields_error_frame(self, server):
        sock = connect(server.port)
        _, buf = read_frames(sock, 1)
        sock.sendall(b'{"cmd":"warp"}\n')
        found_error = False
        for _ in range(20):
            frames, buf = read_frames(sock, 1, buf)
            if frames and "error" in frames[0]:
                found_error = True
                break
        assert found_error
        # session continues: state frames keep flowing
        frames, _ = read_frames(sock, 2, buf)
        assert any("t" in f for f in frames)
        sock.close()

    def test_two_clients_get_independent_sessions(self, server):
        a = connect(server.port)
        b = connect(server.port)
        fa, _ = read_frames(a, 1)
        fb, _ = read_frames(b, 1)
        # the spare session was freshly spawned: it trails the primary
        assert fb[0]["t"] <= fa[0]["t"]
        a.close()
        b.close()


class TestWebSocket:
    def test_upgrade_and_first_frame(self, server):
        import base64
        import hashlib
        sock = connect(server.port)
        key = base64.b64encode(b"0123456789abcdef").decode()
        req = (f"GET /session HTTP/1.1\r\nHost: x\r\nUpgrade: websocket\r\n"
               f"Connection: Upgrade\r\nSec-WebSocket-Key: {key}\r\n"
               f"Sec-WebSocket-Version: 13\r\n\r\n")
        sock.sendall(req.encode())
        resp = b""
        while b"\r\n\r\n" not in resp:
            resp += sock.recv(4096)
        head, _, rest = resp.partition(b"\r\n\r\n")
        assert b"101" in head.split(b"\r\n")[0]
        want = base64.b64encode(hashlib.sha1(
            (key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11").encode())
            .digest())
        assert want in head
        # read one websocket text frame
        data = rest
        while len(data) < 2:
            data += sock.recv(4096)
        assert data[0] == 0x81
        length = data[1] & 0x7F
        offset = 2
        if length == 126:
            while len(data) < 4:
                data += sock.recv(4096)
            length = int.from_bytes(data[2:4], "big")
            offset = 4
        while len(data) < offset + length:
            data += sock.recv(4096)
        frame = json.loads(data[offset:offset + length])
        assert "alt" in frame
        sock.close()
