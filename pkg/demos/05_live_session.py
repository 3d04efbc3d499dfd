"""
Driving a live piloting session from a script
=============================================

Starts the session server on the desert-flight preset at 60x real time,
attaches a raw TCP client, waits for the aerobot to settle near its float
altitude, then opens the vent and watches the reservoir drain and the float
rise. The same protocol (one JSON object per line, WebSocket-upgradeable)
feeds the browser console in frontend/.

Run:  python demos/05_live_session.py
"""
import json
import socket
import time

from aerobot.scenario import ensure_table, load_scenario, make_engine
from aerobot.server import SessionServer

scen = load_scenario("nevada-flight2")
table = ensure_table(scen)
server = SessionServer(lambda: make_engine(scen, table), port=0, speed=60.0)
server.start()
print(f"session server on 127.0.0.1:{server.port} at 60x")

sock = socket.create_connection(("127.0.0.1", server.port), timeout=30)
buf = b""


def frames():
    global buf
    while True:
        chunk = sock.recv(4096)
        if not chunk:
            return
        buf += chunk
        while b"\n" in buf:
            line, buf = buf.split(b"\n", 1)
            if line.strip():
                yield json.loads(line)


vented = False
printed = 0
for f in frames():
    if "error" in f:
        print("server:", f["error"])
        break
    if f["t"] % 60 < 1.0 or f.get("event"):
        print(f"t={f['t']:7.1f}s alt={f['alt']:7.1f}m vz={f['vz']:+.3f} "
              f"m_sp={f['m_sp']:.3f}kg vent={f['vent']} {f.get('event') or ''}")
        printed += 1
    if not vented and f["t"] > 600 and abs(f["vz"]) < 0.05:
        print(">>> sending vent_open")
        sock.sendall(b'{"cmd":"vent_open"}\n')
        vented = True
        t_vent = f["t"]
    if vented and f["t"] > t_vent + 120:
        sock.sendall(b'{"cmd":"vent_close"}\n')
        print(">>> vent closed; letting it re-equilibrate briefly")
        for g in frames():
            if g["t"] > t_vent + 400:
                print(f"final: alt={g['alt']:.1f} m (was floating near "
                      f"1700 m before the vent)")
                break
        break

sock.close()
server.stop()
