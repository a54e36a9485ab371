import math
import random

import numpy as np
import pytest

from pppca import encoding
from pppca.encoding import (
    EncodedFloat,
    FixedPointConfig,
    align_exponents,
    decode_fixed,
    encode_fixed,
    encode_float,
)
from pppca.errors import EncodingRangeError

CFG = FixedPointConfig()  # l=64, f=24


# --- fixed point -------------------------------------------------------------


def test_fixed_zero():
    assert encode_fixed(0.0, CFG) == 0
    assert decode_fixed(0, CFG) == 0.0


def test_fixed_exact_dyadic():
    assert encode_fixed(1.5, CFG) == 3 * 2**23


def test_fixed_negative_one():
    assert decode_fixed(2**64 - 2**24, CFG) == -1.0
    assert encode_fixed(-1.0, CFG) == 2**64 - 2**24


def test_fixed_round_trip_error_bound():
    rng = random.Random(42)
    for _ in range(1000):
        x = rng.uniform(-1000.0, 1000.0)
        z = encode_fixed(x, CFG)
        assert abs(decode_fixed(z, CFG) - x) <= 2**-24


def test_fixed_rounding_half_away_from_zero():
    tiny = FixedPointConfig(l=16, f=4)
    # 0.5 / 16 lands exactly on a half ulp: rounds away from zero.
    assert encode_fixed(3.0 / 32, tiny) == 2  # 1.5 ulps -> 2
    assert encode_fixed(-3.0 / 32, tiny) == (1 << 16) - 2


def test_fixed_overflow_detected_eagerly():
    with pytest.raises(EncodingRangeError):
        encode_fixed(float(2 ** (64 - 24 - 1)), CFG)
    with pytest.raises(EncodingRangeError):
        encode_fixed(-float(2 ** (64 - 24 - 1)) - 1.0, CFG)
    # Just below the bound encodes fine.
    encode_fixed(float(2 ** (64 - 24 - 1)) * (1 - 1e-12), CFG)


def test_fixed_additive_homomorphism():
    rng = random.Random(7)
    modulus = CFG.modulus
    for _ in range(500):
        a = rng.uniform(-1e6, 1e6)
        b = rng.uniform(-1e6, 1e6)
        za, zb = encode_fixed(a, CFG), encode_fixed(b, CFG)
        got = decode_fixed((za + zb) % modulus, CFG)
        assert abs(got - (a + b)) <= 2**-23


def test_fixed_sum_of_many_operands():
    rng = random.Random(8)
    for count in (2, 5, 16):
        xs = [rng.uniform(-100, 100) for _ in range(count)]
        zs = [encode_fixed(x, CFG) for x in xs]
        got = decode_fixed(sum(zs) % CFG.modulus, CFG)
        assert abs(got - sum(xs)) <= count * 2**-24


def test_fixed_monotone():
    rng = random.Random(9)
    xs = sorted(rng.uniform(-500, 500) for _ in range(200))
    signed = [
        z - CFG.modulus if z >= 1 << (CFG.l - 1) else z
        for z in (encode_fixed(x, CFG) for x in xs)
    ]
    assert all(a <= b for a, b in zip(signed, signed[1:]))


def test_fixed_config_validation():
    with pytest.raises(ValueError):
        FixedPointConfig(l=64, f=64)
    with pytest.raises(ValueError):
        FixedPointConfig(l=200, f=24)
    with pytest.raises(ValueError):
        FixedPointConfig(l=32, f=0)


def test_decode_fixed_rejects_out_of_ring():
    with pytest.raises(ValueError):
        decode_fixed(CFG.modulus, CFG)


# --- float encoding ------------------------------------------------------------


def test_float_zero():
    enc = encode_float(0.0)
    assert (enc.significand, enc.exponent) == (0, 0)


def test_float_hand_example():
    enc = encode_float(2.5, base=16, precision=2)
    assert (enc.significand, enc.exponent) == (40, -1)
    assert enc.decode() == 2.5


def test_float_round_trip_default_precision():
    rng = random.Random(10)
    for _ in range(10_000):
        x = rng.uniform(-1, 1) * 10 ** rng.randint(-12, 12)
        err = abs(encode_float(x).decode() - x)
        assert err <= 1e-12 * abs(x)


def test_float_precision_bound_holds():
    rng = random.Random(11)
    for precision in (2, 4, 8):
        bound = 16.0 ** (1 - precision)
        for _ in range(500):
            x = rng.uniform(-1e6, 1e6)
            got = encode_float(x, base=16, precision=precision).decode()
            assert abs(got - x) <= bound * abs(x) + 1e-300


def test_float_powers_of_base_edge():
    for x in (16.0, 1.0, 1 / 16.0, 256.0, -16.0):
        enc = encode_float(x, base=16, precision=3)
        assert enc.decode() == x


def test_float_rejects_non_finite():
    with pytest.raises(EncodingRangeError):
        encode_float(math.inf)
    with pytest.raises(EncodingRangeError):
        encode_float(math.nan)


# --- exponent alignment ----------------------------------------------------------


def test_align_already_aligned():
    a, b = EncodedFloat(3, 0), EncodedFloat(5, 0)
    assert align_exponents(a, b) == (a, b)


def test_align_hand_shift():
    a, b = align_exponents(EncodedFloat(1, 1), EncodedFloat(5, 0))
    assert (a.significand, a.exponent) == (16, 0)
    assert (b.significand, b.exponent) == (5, 0)


def test_align_preserves_decoded_values_exactly():
    rng = random.Random(12)
    for _ in range(500):
        a = encode_float(rng.uniform(-1e8, 1e8), precision=rng.randint(3, 14))
        b = encode_float(rng.uniform(-1e-8, 1e-8), precision=rng.randint(3, 14))
        va, vb = a.decode(), b.decode()
        a2, b2 = align_exponents(a, b)
        assert a2.exponent == b2.exponent
        assert a2.decode() == va
        assert b2.decode() == vb


def test_align_mixed_bases_rejected():
    with pytest.raises(ValueError):
        align_exponents(EncodedFloat(1, 0, 16), EncodedFloat(1, 0, 10))


def test_align_overflow_guard():
    with pytest.raises(EncodingRangeError):
        align_exponents(
            EncodedFloat(1, 100), EncodedFloat(1, 0), max_significand=10**6
        )


# --- matrix lifts ------------------------------------------------------------------


def test_matrix_fixed_zero_and_dyadic_round_trip():
    zeros = np.zeros((3, 2))
    assert np.array_equal(
        encoding.matrix_decode_fixed(encoding.matrix_encode_fixed(zeros, CFG), CFG),
        zeros,
    )
    dyadic = np.array([[0.5, -0.25], [3.75, -8.0]])
    assert np.array_equal(
        encoding.matrix_decode_fixed(encoding.matrix_encode_fixed(dyadic, CFG), CFG),
        dyadic,
    )


def test_matrix_fixed_round_trip_bound():
    rng = np.random.default_rng(13)
    x = rng.normal(size=(11, 11)) * 50
    back = encoding.matrix_decode_fixed(encoding.matrix_encode_fixed(x, CFG), CFG)
    assert np.max(np.abs(back - x)) <= 2**-24


def test_matrix_float_round_trip():
    rng = np.random.default_rng(14)
    x = rng.normal(size=(5, 7)) * 1e4
    back = encoding.matrix_decode_float(encoding.matrix_encode_float(x))
    assert np.array_equal(back, x)


def test_matrix_errors_carry_location():
    bad = np.array([[1.0, 2.0], [3.0, float(2**45)]])
    with pytest.raises(EncodingRangeError, match=r"\(1, 1\)"):
        encoding.matrix_encode_fixed(bad, CFG)
