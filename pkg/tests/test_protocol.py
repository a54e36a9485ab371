import random

import numpy as np
import pytest

from pppca import linalg
from pppca.encoding import FixedPointConfig
from pppca.errors import ConfigError, DimensionError, ProtocolAbort
from pppca.protocol import (
    SessionConfig,
    run_he,
    run_session,
    run_ss,
    secure_sum_he,
    secure_sum_ss,
)
from pppca.sharing import CounterPRG

HAND_DATA = np.array(
    [
        [2.0, 1.0, 0.5],
        [4.0, 0.5, 1.5],
        [6.0, 1.5, 2.5],
        [8.0, 0.0, 3.5],
        [10.0, 2.0, 4.5],
        [12.0, 1.0, 5.5],
    ]
)


def he_cfg(parties=2, k=2, seed=0, **kw):
    return SessionConfig(
        method="he",
        parties=parties,
        k=k,
        seed=seed,
        key_bits=512,
        allow_test_key=True,
        **kw,
    )


def ss_cfg(parties=2, k=2, seed=0, **kw):
    return SessionConfig(method="ss", parties=parties, k=k, seed=seed, **kw)


def split(data, parts):
    return np.array_split(data, parts)


# --- run_he -------------------------------------------------------------------


def test_he_two_providers_match_centralized_oracle():
    result = run_he(he_cfg(), split(HAND_DATA, 2))
    transfer, reduced = linalg.centralized_pca(HAND_DATA, 2)
    assert np.max(np.abs(result.reduced - reduced)) <= 1e-6
    assert np.max(np.abs(result.transfer - transfer)) <= 1e-6


def test_single_provider_rejected():
    with pytest.raises(ConfigError):
        SessionConfig(method="he", parties=1, k=1)


def test_he_replicated_data_covariance_oracle():
    rng = np.random.default_rng(5)
    block = rng.normal(size=(7, 4))
    result = run_he(he_cfg(k=2), [block, block])
    n = 14
    centered = linalg.center_columns(block, linalg.column_means(block))
    expected = 2 * linalg.gram(centered) / (n - 1)
    assert np.max(np.abs(result.covariance - expected)) < 1e-9


def test_he_aggregator_choice():
    data = split(HAND_DATA, 3)
    base = run_he(he_cfg(parties=3, k=2), data)
    moved = run_he(he_cfg(parties=3, k=2, aggregator=2), data)
    assert np.allclose(base.covariance, moved.covariance, atol=1e-9)
    with pytest.raises(ConfigError):
        he_cfg(parties=3, aggregator=3)  # p must be at most M - 1
    with pytest.raises(ConfigError):
        he_cfg(parties=3, aggregator=0)


# --- run_ss ---------------------------------------------------------------------


def test_ss_two_providers_match_centralized_oracle():
    cfg = ss_cfg()
    result = run_ss(cfg, split(HAND_DATA, 2))
    transfer, reduced = linalg.centralized_pca(HAND_DATA, 2)
    tol = 2.0 ** (-cfg.fixed_point.f + 4)
    assert np.max(np.abs(result.reduced - reduced)) <= tol
    assert np.max(np.abs(result.transfer - transfer)) <= tol


def test_ss_zero_variance_column_completes():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(12, 4))
    data[:, 2] = 3.25  # constant in every partition
    result = run_ss(ss_cfg(k=3), split(data, 2))
    assert result.reduced.shape == (12, 3)
    assert abs(result.eigenvalues[-1]) < 1e-6


def test_ss_split_invariance_two_vs_four():
    rng = np.random.default_rng(7)
    data = rng.normal(size=(40, 5)) * [1, 2, 3, 4, 5]
    r2 = run_ss(ss_cfg(parties=2, k=3), split(data, 2))
    r4 = run_ss(ss_cfg(parties=4, k=3), split(data, 4))
    assert np.max(np.abs(r2.covariance - r4.covariance)) <= 4 * 2**-22
    assert np.max(np.abs(r2.transfer - r4.transfer)) <= 1e-5


def test_method_equivalence_he_vs_ss():
    rng = np.random.default_rng(8)
    data = [rng.normal(size=(9, 4)) * 3, rng.normal(size=(11, 4)) * 3]
    he = run_he(he_cfg(k=2), data)
    ss = run_ss(ss_cfg(k=2), data)
    assert np.max(np.abs(he.reduced - ss.reduced)) <= 1e-4
    assert np.max(np.abs(he.covariance - ss.covariance)) <= 1e-4


def test_party_count_invariance_of_covariance():
    rng = np.random.default_rng(9)
    data = rng.normal(size=(24, 4)) * 2
    covs = [
        run_ss(ss_cfg(parties=m, k=2), split(data, m)).covariance for m in (2, 3, 4)
    ]
    transfers = [
        run_ss(ss_cfg(parties=m, k=2), split(data, m)).transfer for m in (2, 3, 4)
    ]
    for cov in covs[1:]:
        assert np.max(np.abs(cov - covs[0])) <= 4 * 2**-22
    for t in transfers[1:]:
        assert np.max(np.abs(t - transfers[0])) <= 1e-5


def test_reduced_rows_stack_in_provider_order():
    parts = split(HAND_DATA, 3)
    result = run_ss(ss_cfg(parties=3, k=1), parts)
    offset = 0
    transfer = result.transfer
    for part in parts:
        centered = part - result.mean
        expected = centered @ transfer
        got = result.reduced[offset : offset + part.shape[0]]
        assert np.allclose(got, expected, atol=1e-9)
        offset += part.shape[0]


def test_protocol_determinism_byte_identical_transcripts():
    data = split(HAND_DATA, 2)
    a = run_ss(ss_cfg(seed=123), data)
    b = run_ss(ss_cfg(seed=123), data)
    assert a.transcript.canonical_bytes() == b.transcript.canonical_bytes()
    c = run_ss(ss_cfg(seed=124), data)
    assert a.transcript.canonical_bytes() != c.transcript.canonical_bytes()

    ha = run_he(he_cfg(seed=5), data)
    hb = run_he(he_cfg(seed=5), data)
    assert ha.transcript.canonical_bytes() == hb.transcript.canonical_bytes()


def test_transport_equivalence_sim_vs_tcp():
    rng = np.random.default_rng(10)
    data = split(rng.normal(size=(40, 5)), 2)
    cfg = ss_cfg(parties=2, k=3, seed=2024)
    sim = run_session(cfg, data, transport="sim")
    tcp = run_session(cfg, data, transport="tcp")
    assert sim.transcript.canonical_bytes() == tcp.transcript.canonical_bytes()
    assert np.array_equal(sim.reduced, tcp.reduced)


# --- aborts ---------------------------------------------------------------------


def test_abort_on_mismatched_columns():
    rng = np.random.default_rng(11)
    with pytest.raises(DimensionError):
        run_ss(ss_cfg(), [rng.normal(size=(4, 3)), rng.normal(size=(4, 4))])


def test_abort_on_bad_k():
    with pytest.raises(ConfigError):
        run_ss(ss_cfg(k=3), split(HAND_DATA, 2))  # k == d
    with pytest.raises(ConfigError):
        ss_cfg(k=0)


def test_abort_on_fixed_point_overflow_names_step():
    huge = np.full((4, 3), 1e12)  # column sums blow the 2^39 fixed-point bound
    with pytest.raises(ProtocolAbort) as err:
        run_ss(ss_cfg(), split(huge, 2))
    assert err.value.step == 1  # the sharing phase for column sums


def test_abort_on_empty_provider():
    from pppca.errors import MatrixValidationError

    with pytest.raises(MatrixValidationError):
        run_ss(ss_cfg(), [np.ones((1, 3)) * 2, np.zeros((0, 3))])


# --- secure sums ------------------------------------------------------------------


def test_secure_sum_he_identities(test_keypair):
    pk, sk = test_keypair
    rng = random.Random(1)
    eye = np.eye(3)
    got = secure_sum_he([eye, eye, eye], pk, sk, rng)
    assert np.allclose(got, 3 * eye, atol=1e-12)
    single = secure_sum_he([HAND_DATA], pk, sk, rng)
    assert np.array_equal(single, HAND_DATA)


def test_secure_sum_he_random_matches_plaintext(test_keypair):
    pk, sk = test_keypair
    rng = random.Random(2)
    nprng = np.random.default_rng(2)
    mats = [nprng.normal(size=(5, 5)) * 10 for _ in range(4)]
    got = secure_sum_he(mats, pk, sk, rng)
    assert np.max(np.abs(got - sum(mats))) < 1e-9


def test_secure_sum_ss_identities():
    eye = np.eye(3)
    got = secure_sum_ss([eye, eye, eye], prg=CounterPRG(1))
    assert np.max(np.abs(got - 3 * eye)) <= 3 * 2**-24
    single = secure_sum_ss([HAND_DATA], prg=CounterPRG(2))
    assert np.max(np.abs(single - HAND_DATA)) <= 2**-24


def test_secure_sum_ss_random_matches_plaintext():
    nprng = np.random.default_rng(3)
    mats = [nprng.normal(size=(5, 5)) * 10 for _ in range(4)]
    got = secure_sum_ss(mats, prg=CounterPRG(3))
    assert np.max(np.abs(got - sum(mats))) <= 4 * 2**-24


def test_secure_sum_shape_mismatch():
    with pytest.raises(DimensionError):
        secure_sum_ss([np.ones((2, 2)), np.ones((2, 3))], prg=CounterPRG(4))


# --- brute-force randomized oracle (desk-scale slice of the acceptance run) -------


def test_randomized_instances_match_direct_covariance():
    rng = np.random.default_rng(12)
    fp = FixedPointConfig()
    for trial in range(10):
        parties = int(rng.integers(2, 5))
        d = int(rng.integers(3, 7))
        k = int(rng.integers(1, d))
        rows = [int(rng.integers(2, 8)) for _ in range(parties)]
        data = [rng.normal(size=(r, d)) * 5 for r in rows]
        pooled = np.vstack(data)
        centered = linalg.center_columns(pooled, linalg.column_means(pooled))
        direct = linalg.gram(centered) / (pooled.shape[0] - 1)

        result = run_ss(ss_cfg(parties=parties, k=k, seed=trial), data)
        assert np.max(np.abs(result.covariance - direct)) <= parties * 2**-22
