"""The private PCA protocol: roles, sessions, and secure aggregation.

Three roles cooperate so that no party ever sees another party's plaintext
rows:

* data providers (parties 1..M) hold the horizontally partitioned rows,
* the server (party 0) decrypts or reconstructs aggregates, eigendecomposes
  the covariance, and broadcasts the transfer matrix,
* the data consumer (party M+1) receives only the dimension-reduced rows.

Secure addition is pluggable: the HE path encrypts local matrices under the
server's Paillier key and lets one designated provider p fold ciphertexts;
the SS path additively secret-shares local matrices among the providers and
lets the server reconstruct only the sum of local share sums.

Session flow (phases appear in transcripts and error messages):

    0  providers exchange sample counts with the server and each other
    1  HE: server broadcasts its public key    SS: providers share sums
    2  HE: providers send encrypted sums to p  SS: local share sums to server
    3  HE: p sends the aggregate to the server SS: server broadcasts the mean
    4  HE: server broadcasts the mean
    5  providers center locally; SS: providers share local covariance terms
    6  HE: encrypted covariance terms to p     SS: local share sums to server
    7  HE: p sends the aggregate to the server
    8  server broadcasts the transfer matrix
    9  providers send reduced rows to the consumer

Sample counts travel in plaintext: both the mean (divide by n) and each
local covariance term (scale by 1/(n-1)) need the global row count.  They
are treated as non-sensitive session metadata; deployments for which row
counts are themselves secret need a different protocol.
"""

from __future__ import annotations

import hashlib
import random
import threading
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg, paillier
from .encoding import (
    FixedPointConfig,
    FloatEncodingConfig,
    matrix_decode_fixed,
    matrix_encode_fixed,
)
from .errors import (
    ConfigError,
    DimensionError,
    ProtocolAbort,
    TransportError,
)
from .messages import (
    MsgType,
    ProtocolMessage,
    Transcript,
    decode_encrypted_matrix,
    decode_public_key,
    decode_real_matrix,
    decode_sample_count,
    decode_share_matrix,
    encode_encrypted_matrix,
    encode_public_key,
    encode_real_matrix,
    encode_sample_count,
    encode_share_matrix,
    make_step,
)
from .sharing import CounterPRG, add_local_matrix, reconstruct_matrix, share_matrix
from .transport import DEFAULT_TIMEOUT, SimulatedNetwork, TcpNetwork

SERVER = 0

METHOD_HE = "he"
METHOD_SS = "ss"

PHASE_SAMPLE_COUNT = 0
PHASE_PUBLIC_KEY = 1
PHASE_SHARE_SUMS = 1
PHASE_ENC_SUMS = 2
PHASE_LOCAL_SUM = 2
PHASE_SUM_AGGREGATE = 3
PHASE_MEAN_SS = 3
PHASE_MEAN_HE = 4
PHASE_SHARE_COV = 5
PHASE_ENC_COV = 6
PHASE_LOCAL_COV = 6
PHASE_COV_AGGREGATE = 7
PHASE_TRANSFER = 8
PHASE_REDUCED = 9


def consumer_index(parties: int) -> int:
    return parties + 1


def provider_indices(parties: int) -> list[int]:
    return list(range(1, parties + 1))


@dataclass(frozen=True)
class SessionConfig:
    """Everything a session needs beyond the data itself.

    ``seed`` switches the session into reproducible test mode: share
    randomness, key generation, and encryption randomness all derive from
    it.  Leave it ``None`` for entropy-pool randomness.
    """

    method: str
    parties: int
    k: int
    aggregator: int = 1
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)
    float_encoding: FloatEncodingConfig = field(default_factory=FloatEncodingConfig)
    key_bits: int = paillier.DEFAULT_KEY_BITS
    allow_test_key: bool = False
    seed: int | None = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.method not in (METHOD_HE, METHOD_SS):
            raise ConfigError(f"method must be '{METHOD_HE}' or '{METHOD_SS}'")
        if self.parties < 2:
            raise ConfigError(f"need at least 2 data providers, got {self.parties}")
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if self.method == METHOD_HE and not 1 <= self.aggregator <= self.parties - 1:
            raise ConfigError(
                f"aggregator must be a provider index in [1, {self.parties - 1}], "
                f"got {self.aggregator}"
            )

    @property
    def consumer(self) -> int:
        return consumer_index(self.parties)

    @property
    def providers(self) -> list[int]:
        return provider_indices(self.parties)


def _derived_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _rng_for(cfg: SessionConfig, label: str) -> random.Random:
    if cfg.seed is None:
        return random.SystemRandom()
    return random.Random(_derived_seed(cfg.seed, label))


def _prg_for(cfg: SessionConfig, label: str) -> CounterPRG:
    if cfg.seed is None:
        return CounterPRG(CounterPRG.random_seed())
    return CounterPRG(_derived_seed(cfg.seed, label))


@dataclass
class SessionResult:
    """Combined view of all role outputs after a simulated session."""

    method: str
    reduced: np.ndarray
    transfer: np.ndarray
    covariance: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray
    sample_count: int
    transcript: Transcript
    timings: dict[str, float]


class _Role:
    """Shared plumbing: message construction, typed receive, phase tracking."""

    def __init__(self, party: int, cfg: SessionConfig):
        self.party = party
        self.cfg = cfg
        self.phase = PHASE_SAMPLE_COUNT

    def _send(self, ep, receiver: int, msg_type: MsgType, phase: int, payload: bytes):
        ep.send(
            ProtocolMessage(
                msg_type=msg_type,
                sender=self.party,
                receiver=receiver,
                step=make_step(phase, receiver),
                payload=payload,
            )
        )

    def _recv(self, ep, sender: int, msg_type: MsgType, phase: int) -> ProtocolMessage:
        self.phase = phase
        msg = ep.recv(sender=sender)
        if msg.msg_type != msg_type or msg.phase != phase:
            raise ProtocolAbort(
                phase,
                f"party {self.party} expected {msg_type.name} in phase {phase} "
                f"from party {sender}, got {msg.msg_type.name} in phase {msg.phase}",
            )
        return msg

    def _exchange_sample_counts(self, ep, rows: int) -> int:
        """Phase 0: broadcast own row count, collect the others', return n."""
        cfg = self.cfg
        payload = encode_sample_count(rows)
        receivers = [SERVER] + [j for j in cfg.providers if j != self.party]
        for receiver in sorted(receivers):
            self._send(ep, receiver, MsgType.SAMPLE_COUNT, PHASE_SAMPLE_COUNT, payload)
        total = rows
        for j in cfg.providers:
            if j == self.party:
                continue
            msg = self._recv(ep, j, MsgType.SAMPLE_COUNT, PHASE_SAMPLE_COUNT)
            total += decode_sample_count(msg.payload)
        return total


class ProviderRole(_Role):
    """A data provider: owns rows, participates in secure aggregation."""

    def __init__(self, index: int, data, cfg: SessionConfig):
        super().__init__(index, cfg)
        self.data = linalg.check_matrix(data, name=f"provider {index} data")

    # -- HE path ----------------------------------------------------------

    def _he_aggregate_round(
        self, ep, pk, own_encrypted, msg_type: MsgType, agg_type: MsgType,
        send_phase: int, agg_phase: int,
    ):
        """Send to p, or (as p) fold all ciphertext matrices for the server."""
        cfg = self.cfg
        p = cfg.aggregator
        if self.party != p:
            self._send(
                ep, p, msg_type, send_phase, encode_encrypted_matrix(own_encrypted)
            )
            return
        collected = {self.party: own_encrypted}
        for j in cfg.providers:
            if j == p:
                continue
            msg = self._recv(ep, j, msg_type, send_phase)
            collected[j] = decode_encrypted_matrix(msg.payload, pk)
        aggregate = collected[cfg.providers[0]]
        for j in cfg.providers[1:]:
            aggregate = paillier.add_enc_matrix(pk, aggregate, collected[j])
        self._send(
            ep, SERVER, agg_type, agg_phase, encode_encrypted_matrix(aggregate)
        )

    def run_he(self, ep):
        cfg = self.cfg
        enc = cfg.float_encoding
        rng = _rng_for(cfg, f"encrypt/{self.party}")
        n = self._exchange_sample_counts(ep, self.data.shape[0])

        self.phase = PHASE_PUBLIC_KEY
        msg = self._recv(ep, SERVER, MsgType.PUBLIC_KEY, PHASE_PUBLIC_KEY)
        pk = decode_public_key(msg.payload)

        self.phase = PHASE_ENC_SUMS
        sums = linalg.column_sums(self.data).reshape(1, -1)
        self._he_aggregate_round(
            ep,
            pk,
            paillier.enc_matrix(pk, sums, rng, enc.base, enc.precision),
            MsgType.ENCRYPTED_SUMS,
            MsgType.ENCRYPTED_SUM_AGGREGATE,
            PHASE_ENC_SUMS,
            PHASE_SUM_AGGREGATE,
        )

        msg = self._recv(ep, SERVER, MsgType.PLAIN_MEAN, PHASE_MEAN_HE)
        mean = decode_real_matrix(msg.payload).ravel()
        centered = linalg.center_columns(self.data, mean)

        self.phase = PHASE_ENC_COV
        local_cov = linalg.gram(centered) / (n - 1)
        self._he_aggregate_round(
            ep,
            pk,
            paillier.enc_matrix(pk, local_cov, rng, enc.base, enc.precision),
            MsgType.ENCRYPTED_COV,
            MsgType.ENCRYPTED_COV_AGGREGATE,
            PHASE_ENC_COV,
            PHASE_COV_AGGREGATE,
        )

        msg = self._recv(ep, SERVER, MsgType.TRANSFER_MATRIX, PHASE_TRANSFER)
        transfer = decode_real_matrix(msg.payload)
        self.phase = PHASE_REDUCED
        reduced = linalg.project(centered, transfer)
        self._send(
            ep,
            cfg.consumer,
            MsgType.REDUCED_ROWS,
            PHASE_REDUCED,
            encode_real_matrix(reduced),
        )

    # -- SS path ----------------------------------------------------------

    def _ss_check_range(self, values: np.ndarray, what: str):
        """Eager overflow guard: the global sum of M in-range local terms
        must still fit the signed fixed-point range."""
        bound = self.cfg.fixed_point.max_magnitude / self.cfg.parties
        worst = float(np.max(np.abs(values)))
        if worst >= bound:
            raise ProtocolAbort(
                self.phase,
                f"party {self.party}: {what} magnitude {worst:g} exceeds the "
                f"fixed-point budget {bound:g} (l={self.cfg.fixed_point.l}, "
                f"f={self.cfg.fixed_point.f}, {self.cfg.parties} providers)",
            )

    def _ss_aggregate_round(
        self, ep, prg, values: np.ndarray, tag: str, share_phase: int, sum_phase: int
    ):
        """Share local values with every provider, sum received shares, and
        hand this party's share of the global sum to the server."""
        cfg = self.cfg
        fp = cfg.fixed_point
        ring = matrix_encode_fixed(values, fp)
        bundles = share_matrix(
            ring, cfg.parties, fp.l, prg, secret_id=f"{tag}/{self.party}"
        )
        for j in cfg.providers:
            if j == self.party:
                continue
            self._send(
                ep,
                j,
                MsgType.SHARE_BUNDLE,
                share_phase,
                encode_share_matrix(bundles[j - 1]),
            )
        held = {self.party: bundles[self.party - 1]}
        for j in cfg.providers:
            if j == self.party:
                continue
            msg = self._recv(ep, j, MsgType.SHARE_BUNDLE, share_phase)
            held[j] = decode_share_matrix(msg.payload)
        local_sum = add_local_matrix([held[j] for j in cfg.providers])
        self._send(
            ep,
            SERVER,
            MsgType.LOCAL_SHARE_SUM,
            sum_phase,
            encode_share_matrix(local_sum),
        )

    def run_ss(self, ep):
        cfg = self.cfg
        prg = _prg_for(cfg, f"shares/{self.party}")
        n = self._exchange_sample_counts(ep, self.data.shape[0])

        self.phase = PHASE_SHARE_SUMS
        sums = linalg.column_sums(self.data).reshape(1, -1)
        self._ss_check_range(sums, "column sums")
        self._ss_aggregate_round(
            ep, prg, sums, "sums", PHASE_SHARE_SUMS, PHASE_LOCAL_SUM
        )

        msg = self._recv(ep, SERVER, MsgType.PLAIN_MEAN, PHASE_MEAN_SS)
        mean = decode_real_matrix(msg.payload).ravel()
        centered = linalg.center_columns(self.data, mean)

        self.phase = PHASE_SHARE_COV
        local_cov = linalg.gram(centered) / (n - 1)
        self._ss_check_range(local_cov, "covariance terms")
        self._ss_aggregate_round(
            ep, prg, local_cov, "cov", PHASE_SHARE_COV, PHASE_LOCAL_COV
        )

        msg = self._recv(ep, SERVER, MsgType.TRANSFER_MATRIX, PHASE_TRANSFER)
        transfer = decode_real_matrix(msg.payload)
        self.phase = PHASE_REDUCED
        reduced = linalg.project(centered, transfer)
        self._send(
            ep,
            cfg.consumer,
            MsgType.REDUCED_ROWS,
            PHASE_REDUCED,
            encode_real_matrix(reduced),
        )

    def run(self, ep):
        if self.cfg.method == METHOD_HE:
            self.run_he(ep)
        else:
            self.run_ss(ep)


class ServerRole(_Role):
    """Decrypts/reconstructs aggregates, eigendecomposes, broadcasts T.

    Has no data input and never sees per-provider values, only sums.
    """

    def __init__(self, cfg: SessionConfig):
        super().__init__(SERVER, cfg)
        self.covariance: np.ndarray | None = None
        self.mean: np.ndarray | None = None
        self.transfer: np.ndarray | None = None
        self.eigenvalues: np.ndarray | None = None
        self.sample_count: int | None = None
        self.timings: dict[str, float] = {}

    def _collect_sample_counts(self, ep) -> int:
        total = 0
        for j in self.cfg.providers:
            msg = self._recv(ep, j, MsgType.SAMPLE_COUNT, PHASE_SAMPLE_COUNT)
            total += decode_sample_count(msg.payload)
        if total < 2:
            raise ProtocolAbort(
                PHASE_SAMPLE_COUNT,
                f"need at least 2 rows overall for covariance, got {total}",
            )
        self.sample_count = total
        return total

    def _broadcast(self, ep, msg_type: MsgType, phase: int, payload: bytes):
        for j in self.cfg.providers:
            self._send(ep, j, msg_type, phase, payload)

    def _finish(self, ep, covariance: np.ndarray):
        started = time.perf_counter()
        self.covariance = covariance
        pairs = linalg.jacobi_eigh(covariance)
        d = covariance.shape[0]
        if not 1 <= self.cfg.k < d:
            raise ProtocolAbort(
                PHASE_TRANSFER,
                f"k={self.cfg.k} must satisfy 1 <= k < d={d}",
            )
        self.transfer = linalg.top_k_transfer(pairs, self.cfg.k)
        self.eigenvalues = pairs.values
        self.timings["eigendecomposition"] = time.perf_counter() - started
        self._broadcast(
            ep, MsgType.TRANSFER_MATRIX, PHASE_TRANSFER, encode_real_matrix(self.transfer)
        )

    def run_he(self, ep):
        cfg = self.cfg
        p = cfg.aggregator
        n = self._collect_sample_counts(ep)

        self.phase = PHASE_PUBLIC_KEY
        started = time.perf_counter()
        pk, sk = paillier.keygen(
            cfg.key_bits, _rng_for(cfg, "keygen"), allow_test_key=cfg.allow_test_key
        )
        self.timings["keygen"] = time.perf_counter() - started
        self._broadcast(
            ep, MsgType.PUBLIC_KEY, PHASE_PUBLIC_KEY, encode_public_key(pk)
        )

        msg = self._recv(ep, p, MsgType.ENCRYPTED_SUM_AGGREGATE, PHASE_SUM_AGGREGATE)
        sums = paillier.dec_matrix(sk, decode_encrypted_matrix(msg.payload, pk))
        self.mean = (sums / n).ravel()
        self._broadcast(
            ep, MsgType.PLAIN_MEAN, PHASE_MEAN_HE, encode_real_matrix(self.mean.reshape(1, -1))
        )

        msg = self._recv(ep, p, MsgType.ENCRYPTED_COV_AGGREGATE, PHASE_COV_AGGREGATE)
        covariance = paillier.dec_matrix(sk, decode_encrypted_matrix(msg.payload, pk))
        self._finish(ep, covariance)

    def run_ss(self, ep):
        cfg = self.cfg
        fp = cfg.fixed_point
        n = self._collect_sample_counts(ep)

        self.phase = PHASE_LOCAL_SUM
        local_sums = [
            decode_share_matrix(
                self._recv(ep, j, MsgType.LOCAL_SHARE_SUM, PHASE_LOCAL_SUM).payload
            )
            for j in cfg.providers
        ]
        ring_sums = reconstruct_matrix(local_sums, party_count=cfg.parties)
        sums = matrix_decode_fixed(ring_sums, fp)
        self.mean = (sums / n).ravel()
        self._broadcast(
            ep, MsgType.PLAIN_MEAN, PHASE_MEAN_SS, encode_real_matrix(self.mean.reshape(1, -1))
        )

        self.phase = PHASE_LOCAL_COV
        local_covs = [
            decode_share_matrix(
                self._recv(ep, j, MsgType.LOCAL_SHARE_SUM, PHASE_LOCAL_COV).payload
            )
            for j in cfg.providers
        ]
        ring_cov = reconstruct_matrix(local_covs, party_count=cfg.parties)
        covariance = matrix_decode_fixed(ring_cov, fp)
        self._finish(ep, covariance)

    def run(self, ep):
        if self.cfg.method == METHOD_HE:
            self.run_he(ep)
        else:
            self.run_ss(ep)


class ConsumerRole(_Role):
    """Receives the reduced rows, stacked in provider order."""

    def __init__(self, cfg: SessionConfig):
        super().__init__(consumer_index(cfg.parties), cfg)
        self.reduced: np.ndarray | None = None

    def run(self, ep):
        blocks = []
        for j in self.cfg.providers:
            msg = self._recv(ep, j, MsgType.REDUCED_ROWS, PHASE_REDUCED)
            blocks.append(decode_real_matrix(msg.payload))
        widths = {b.shape[1] for b in blocks}
        if len(widths) != 1:
            raise ProtocolAbort(
                PHASE_REDUCED, f"providers sent mismatched widths {sorted(widths)}"
            )
        self.reduced = np.vstack(blocks)


def _validate_inputs(cfg: SessionConfig, data) -> list[np.ndarray]:
    if len(data) != cfg.parties:
        raise ConfigError(
            f"config names {cfg.parties} providers but {len(data)} matrices given"
        )
    matrices = [
        linalg.check_matrix(x, name=f"provider {i} data")
        for i, x in zip(cfg.providers, data)
    ]
    widths = {m.shape[1] for m in matrices}
    if len(widths) != 1:
        raise DimensionError(
            f"providers disagree on column count: {sorted(widths)}"
        )
    d = widths.pop()
    if not 1 <= cfg.k < d:
        raise ConfigError(f"k={cfg.k} must satisfy 1 <= k < d={d}")
    if sum(m.shape[0] for m in matrices) < 2:
        raise ConfigError("need at least 2 rows overall")
    return matrices


def run_session(
    cfg: SessionConfig, data, transport: str = "sim"
) -> SessionResult:
    """Execute a full session with every role in this process.

    ``transport`` selects the in-process bus (``"sim"``) or loopback TCP
    (``"tcp"``); both produce identical transcripts for identical seeds.
    """
    matrices = _validate_inputs(cfg, data)
    parties = [SERVER] + cfg.providers + [cfg.consumer]
    transcript = Transcript()
    if transport == "sim":
        network = SimulatedNetwork(transcript, timeout=cfg.timeout)
        endpoints = {party: network.endpoint(party) for party in parties}
    elif transport == "tcp":
        network = TcpNetwork(parties, transcript, timeout=cfg.timeout)
        endpoints = {party: network.endpoint(party) for party in parties}
    else:
        raise ConfigError(f"unknown transport {transport!r}")

    server = ServerRole(cfg)
    providers = [
        ProviderRole(i, m, cfg) for i, m in zip(cfg.providers, matrices)
    ]
    consumer = ConsumerRole(cfg)
    roles = [server, *providers, consumer]

    failures: list[tuple[_Role, BaseException]] = []
    failure_lock = threading.Lock()

    def _drive(role: _Role):
        try:
            role.run(endpoints[role.party])
        except BaseException as exc:  # noqa: BLE001 - must fan out the abort
            with failure_lock:
                failures.append((role, exc))
            network.abort(f"party {role.party} failed: {exc}")

    started = time.perf_counter()
    threads = [
        threading.Thread(target=_drive, args=(role,), name=f"pppca-party-{role.party}")
        for role in roles
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    total = time.perf_counter() - started
    if transport == "tcp":
        network.close()

    if failures:
        # Report the root cause, not the TransportClosed cascade it triggers.
        root = min(
            failures,
            key=lambda item: isinstance(item[1], TransportError),
        )
        role, exc = root
        if isinstance(exc, ProtocolAbort):
            raise exc
        raise ProtocolAbort(
            role.phase, f"party {role.party}: {exc}", cause=exc
        ) from exc

    timings = {"total": total, **{f"server.{k}": v for k, v in server.timings.items()}}
    return SessionResult(
        method=cfg.method,
        reduced=consumer.reduced,
        transfer=server.transfer,
        covariance=server.covariance,
        mean=server.mean,
        eigenvalues=server.eigenvalues,
        sample_count=server.sample_count,
        transcript=transcript,
        timings=timings,
    )


def run_he(cfg: SessionConfig, data) -> SessionResult:
    """Run the homomorphic-encryption session on the simulation bus."""
    if cfg.method != METHOD_HE:
        cfg = replace(cfg, method=METHOD_HE)
    return run_session(cfg, data, transport="sim")


def run_ss(cfg: SessionConfig, data) -> SessionResult:
    """Run the secret-sharing session on the simulation bus."""
    if cfg.method != METHOD_SS:
        cfg = replace(cfg, method=METHOD_SS)
    return run_session(cfg, data, transport="sim")


# --- secure-sum building blocks (no transport, for direct verification) ----


def secure_sum_he(
    matrices,
    pk: paillier.PublicKey,
    sk: paillier.PrivateKey,
    rng: random.Random | None = None,
    encoding: FloatEncodingConfig | None = None,
) -> np.ndarray:
    """The HE aggregation dataflow: encrypt each matrix, fold ciphertexts,
    decrypt the single aggregate."""
    enc = encoding if encoding is not None else FloatEncodingConfig()
    arrays = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionError(f"mismatched shapes {sorted(shapes)}")
    encrypted = [
        paillier.enc_matrix(pk, a, rng, enc.base, enc.precision) for a in arrays
    ]
    aggregate = encrypted[0]
    for other in encrypted[1:]:
        aggregate = paillier.add_enc_matrix(pk, aggregate, other)
    return paillier.dec_matrix(sk, aggregate)


def secure_sum_ss(
    matrices,
    fixed_point: FixedPointConfig | None = None,
    prg: CounterPRG | None = None,
) -> np.ndarray:
    """The SS aggregation dataflow: share each matrix among the holders,
    sum shares locally per party, reconstruct only the total."""
    fp = fixed_point if fixed_point is not None else FixedPointConfig()
    generator = prg if prg is not None else CounterPRG(CounterPRG.random_seed())
    arrays = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionError(f"mismatched shapes {sorted(shapes)}")
    parties = len(arrays)
    if parties == 0:
        raise ConfigError("secure sum needs at least one matrix")
    if parties == 1:
        # Degenerate single holder: nothing to share, just the encoding trip.
        return matrix_decode_fixed(matrix_encode_fixed(arrays[0], fp), fp)
    all_bundles = [
        share_matrix(matrix_encode_fixed(a, fp), parties, fp.l, generator, f"term/{i}")
        for i, a in enumerate(arrays)
    ]
    local_sums = [
        add_local_matrix([all_bundles[term][owner] for term in range(parties)])
        for owner in range(parties)
    ]
    return matrix_decode_fixed(
        reconstruct_matrix(local_sums, party_count=parties), fp
    )
