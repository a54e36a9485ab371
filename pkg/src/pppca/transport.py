"""Message delivery between protocol roles.

Two interchangeable transports expose the same endpoint surface:

* :class:`SimulatedNetwork` delivers frames in process, deterministically.
* :class:`TcpNetwork` runs the identical frames over length-prefixed TCP,
  one connection per ordered (sender, receiver) channel.

Both log every delivered message into a shared :class:`Transcript` at the
moment the receiving role consumes it, so a transcript records exactly what
each party saw, in a canonical order that is identical across transports.
"""

from __future__ import annotations

import queue
import socket
import threading
import time

from .errors import FrameFormatError, TransportClosed, TransportTimeout
from .messages import (
    ProtocolMessage,
    Transcript,
    deserialize,
    header_size,
    parse_header,
    serialize,
)

DEFAULT_TIMEOUT = 30.0


class _Closed:
    def __init__(self, reason: str):
        self.reason = reason


class _BufferedReceiver:
    """Per-sender buffering over a single inbox queue.

    ``recv(sender)`` returns the next message from that sender in arrival
    order, parking messages from other senders until they are asked for.
    """

    def __init__(self, party: int, transcript: Transcript, timeout: float):
        self.party = party
        self.transcript = transcript
        self.timeout = timeout
        self._inbox: queue.Queue = queue.Queue()
        self._buffers: dict[int, list[ProtocolMessage]] = {}
        self._closed: _Closed | None = None

    def _push(self, item):
        self._inbox.put(item)

    def _next_from_inbox(self, deadline: float):
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise TransportTimeout(
                f"party {self.party}: no message within {self.timeout:g}s"
            )
        try:
            item = self._inbox.get(timeout=remaining)
        except queue.Empty:
            raise TransportTimeout(
                f"party {self.party}: no message within {self.timeout:g}s"
            ) from None
        if isinstance(item, _Closed):
            self._closed = item
            raise TransportClosed(item.reason)
        return item

    def recv(
        self, sender: int | None = None, timeout: float | None = None
    ) -> ProtocolMessage:
        if self._closed is not None:
            raise TransportClosed(self._closed.reason)
        deadline = time.monotonic() + (self.timeout if timeout is None else timeout)
        if sender is None:
            for buffered in self._buffers.values():
                if buffered:
                    msg = buffered.pop(0)
                    self.transcript.append(msg)
                    return msg
            msg = self._next_from_inbox(deadline)
            self.transcript.append(msg)
            return msg
        while True:
            buffered = self._buffers.get(sender)
            if buffered:
                msg = buffered.pop(0)
                self.transcript.append(msg)
                return msg
            msg = self._next_from_inbox(deadline)
            if msg.sender == sender:
                self.transcript.append(msg)
                return msg
            self._buffers.setdefault(msg.sender, []).append(msg)


class SimEndpoint(_BufferedReceiver):
    def __init__(self, network: "SimulatedNetwork", party: int):
        super().__init__(party, network.transcript, network.timeout)
        self._network = network

    def send(self, msg: ProtocolMessage):
        # Round-trip through the wire format so simulation exercises exactly
        # the bytes that TCP would carry.
        self._network.deliver(deserialize(serialize(msg)))

    def close(self):
        pass


class SimulatedNetwork:
    """Deterministic in-process bus: send delivers immediately, in order."""

    def __init__(
        self, transcript: Transcript | None = None, timeout: float = DEFAULT_TIMEOUT
    ):
        self.transcript = transcript if transcript is not None else Transcript()
        self.timeout = timeout
        self._endpoints: dict[int, SimEndpoint] = {}
        self._lock = threading.Lock()

    def endpoint(self, party: int) -> SimEndpoint:
        with self._lock:
            if party in self._endpoints:
                raise ValueError(f"party {party} already registered")
            ep = SimEndpoint(self, party)
            self._endpoints[party] = ep
            return ep

    def deliver(self, msg: ProtocolMessage):
        with self._lock:
            target = self._endpoints.get(msg.receiver)
        if target is None:
            raise TransportClosed(f"no endpoint for party {msg.receiver}")
        target._push(msg)

    def abort(self, reason: str):
        with self._lock:
            endpoints = list(self._endpoints.values())
        for ep in endpoints:
            ep._push(_Closed(reason))


class TcpEndpoint(_BufferedReceiver):
    """One party's network presence: a listener plus outbound channels."""

    def __init__(
        self,
        party: int,
        listen: tuple[str, int],
        transcript: Transcript | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        connect_retry: float = 0.05,
    ):
        super().__init__(party, transcript if transcript is not None else Transcript(), timeout)
        self._peers: dict[int, tuple[str, int]] = {}
        self._out: dict[int, socket.socket] = {}
        self._out_lock = threading.Lock()
        self._threads: list[threading.Thread] = []
        self._connect_retry = connect_retry
        self._shutdown = False
        self._listener = socket.create_server(listen)
        self._listener.settimeout(0.2)
        self.address = self._listener.getsockname()
        acceptor = threading.Thread(
            target=self._accept_loop, name=f"pppca-accept-{party}", daemon=True
        )
        acceptor.start()
        self._threads.append(acceptor)

    def set_peers(self, peers: dict[int, tuple[str, int]]):
        self._peers.update(peers)

    def _accept_loop(self):
        while not self._shutdown:
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            reader = threading.Thread(
                target=self._read_loop,
                args=(conn,),
                name=f"pppca-read-{self.party}",
                daemon=True,
            )
            reader.start()
            self._threads.append(reader)

    def _read_exact(self, conn: socket.socket, count: int) -> bytes | None:
        chunks = []
        got = 0
        while got < count:
            try:
                chunk = conn.recv(count - got)
            except OSError:
                return None
            if not chunk:
                if got:
                    self._push(
                        _Closed(f"connection lost mid-frame ({got}/{count} bytes)")
                    )
                return None
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def _read_loop(self, conn: socket.socket):
        with conn:
            while not self._shutdown:
                header = self._read_exact(conn, header_size())
                if header is None:
                    return
                try:
                    _, _, _, _, length = parse_header(header)
                    payload = self._read_exact(conn, length)
                    if payload is None:
                        return
                    msg = deserialize(header + payload)
                except FrameFormatError as exc:
                    self._push(_Closed(f"malformed frame: {exc}"))
                    return
                self._push(msg)

    def _channel(self, receiver: int) -> socket.socket:
        with self._out_lock:
            sock = self._out.get(receiver)
            if sock is not None:
                return sock
            if receiver not in self._peers:
                raise TransportClosed(f"no address known for party {receiver}")
            deadline = time.monotonic() + self.timeout
            while True:
                try:
                    sock = socket.create_connection(self._peers[receiver], timeout=self.timeout)
                    break
                except OSError:
                    if time.monotonic() >= deadline:
                        raise TransportTimeout(
                            f"party {self.party}: could not reach party {receiver}"
                        ) from None
                    time.sleep(self._connect_retry)
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._out[receiver] = sock
            return sock

    def send(self, msg: ProtocolMessage):
        data = serialize(msg)
        sock = self._channel(msg.receiver)
        try:
            sock.sendall(data)
        except OSError as exc:
            raise TransportClosed(f"send to party {msg.receiver} failed: {exc}") from exc

    def close(self):
        self._shutdown = True
        try:
            self._listener.close()
        except OSError:
            pass
        with self._out_lock:
            for sock in self._out.values():
                try:
                    sock.close()
                except OSError:
                    pass
            self._out.clear()


class TcpNetwork:
    """Helper for in-process multi-endpoint TCP sessions (tests, demos)."""

    def __init__(
        self, parties: list[int], transcript: Transcript | None = None,
        timeout: float = DEFAULT_TIMEOUT, host: str = "127.0.0.1",
    ):
        self.transcript = transcript if transcript is not None else Transcript()
        self.endpoints: dict[int, TcpEndpoint] = {
            party: TcpEndpoint(party, (host, 0), self.transcript, timeout)
            for party in parties
        }
        addresses = {party: ep.address for party, ep in self.endpoints.items()}
        for ep in self.endpoints.values():
            ep.set_peers(addresses)

    def endpoint(self, party: int) -> TcpEndpoint:
        return self.endpoints[party]

    def abort(self, reason: str):
        for ep in self.endpoints.values():
            ep._push(_Closed(reason))

    def close(self):
        for ep in self.endpoints.values():
            ep.close()
