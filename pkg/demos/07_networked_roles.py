"""The same protocol over real sockets.

Every role runs in its own thread with its own TCP endpoint on loopback,
mirroring a multi-process deployment (see the ``pppca role`` subcommand for
actual separate processes).  For a fixed seed the wire traffic is
byte-for-byte identical to the in-process simulation.
"""

import numpy as np

from pppca import SessionConfig
from pppca.protocol import run_session

rng = np.random.default_rng(3)
data = [rng.normal(size=(30, 5)), rng.normal(size=(25, 5))]
cfg = SessionConfig(method="ss", parties=2, k=2, seed=777, timeout=20.0)

print("running the session on the in-process bus...")
sim = run_session(cfg, data, transport="sim")

print("running the identical session over loopback TCP...")
tcp = run_session(cfg, data, transport="tcp")

print(f"\nmessages per run      : {len(sim.transcript)}")
same_bytes = sim.transcript.canonical_bytes() == tcp.transcript.canonical_bytes()
print(f"transcripts identical : {same_bytes}")
print(f"reduced rows identical: {np.array_equal(sim.reduced, tcp.reduced)}")

total_bytes = sum(len(m.payload) for m in tcp.transcript.entries())
print(f"payload volume        : {total_bytes} bytes")
print(f"wall clock            : sim {sim.timings['total']:.3f}s, tcp {tcp.timings['total']:.3f}s")
