"""Reversible numeric encodings bridging real matrices to crypto domains.

Two encodings live here:

* fixed point over the ring Z_{2^l} (two's complement) for secret sharing,
* base-B significand/exponent pairs for homomorphic encryption, where the
  significand may be a plaintext integer or a ciphertext object supporting
  multiplication by a non-negative int.

Both protocols only ever ADD encoded values, so neither encoding needs a
truncation step; every multiplication in the pipeline is local plaintext.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, EncodingRangeError

DEFAULT_RING_BITS = 64
DEFAULT_FRACTIONAL_BITS = 24
DEFAULT_FLOAT_BASE = 16
# 14 base-16 digits carry 56 bits of significand, more than a binary64
# mantissa, so round-trips through the default float encoding are exact.
DEFAULT_FLOAT_PRECISION = 14


@dataclass(frozen=True)
class FixedPointConfig:
    """Parameters of the two's-complement ring encoding.

    ``l`` is the ring width in bits, ``f`` the number of fractional bits.
    Values must satisfy |x| < 2^(l - f - 1); one bit is reserved for sign.
    """

    l: int = DEFAULT_RING_BITS
    f: int = DEFAULT_FRACTIONAL_BITS

    def __post_init__(self):
        if not 0 < self.f < self.l <= 128:
            raise ValueError(
                f"need 0 < f < l <= 128, got l={self.l}, f={self.f}"
            )

    @property
    def modulus(self) -> int:
        return 1 << self.l

    @property
    def scale(self) -> int:
        return 1 << self.f

    @property
    def max_magnitude(self) -> float:
        """Exclusive bound on |x| for encodable reals."""
        return float(2 ** (self.l - self.f - 1))


def _round_half_away(value: float | Fraction) -> int:
    """Round to nearest integer, halves away from zero."""
    if value >= 0:
        return int(math.floor(value + Fraction(1, 2)))
    return -int(math.floor(-value + Fraction(1, 2)))


def encode_fixed(x: float, cfg: FixedPointConfig) -> int:
    """Map a real to Z_{2^l}: round(x * 2^f) in two's complement.

    Overflow is detected eagerly; values at or past the representable bound
    raise ``EncodingRangeError`` rather than wrapping silently.
    """
    if not math.isfinite(x):
        raise EncodingRangeError(f"cannot encode non-finite value {x!r}")
    if abs(x) >= cfg.max_magnitude:
        raise EncodingRangeError(
            f"|{x!r}| exceeds fixed-point bound 2^{cfg.l - cfg.f - 1}"
        )
    scaled = _round_half_away(Fraction(x) * cfg.scale)
    if abs(scaled) >= 1 << (cfg.l - 1):
        raise EncodingRangeError(
            f"{x!r} rounds outside the signed {cfg.l}-bit range"
        )
    return scaled % cfg.modulus


def decode_fixed(z: int, cfg: FixedPointConfig) -> float:
    """Inverse of :func:`encode_fixed`; z >= 2^(l-1) is negative."""
    if not 0 <= z < cfg.modulus:
        raise ValueError(f"ring element {z} outside [0, 2^{cfg.l})")
    signed = z - cfg.modulus if z >= 1 << (cfg.l - 1) else z
    return signed / cfg.scale


@dataclass(frozen=True)
class FloatEncodingConfig:
    base: int = DEFAULT_FLOAT_BASE
    precision: int = DEFAULT_FLOAT_PRECISION

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.precision < 1:
            raise ValueError(f"precision must be >= 1, got {self.precision}")


@dataclass(frozen=True)
class EncodedFloat:
    """A number as significand * base^exponent.

    The significand is either a plaintext int or a ciphertext object that
    supports ``cipher * int``; the exponent is always plaintext.
    """

    significand: object
    exponent: int
    base: int = DEFAULT_FLOAT_BASE

    @property
    def is_plain(self) -> bool:
        return isinstance(self.significand, int)

    def decode(self) -> float:
        if not self.is_plain:
            raise TypeError("cannot decode an encrypted significand")
        return float(Fraction(self.significand) * Fraction(self.base) ** self.exponent)


def encode_float(
    x: float,
    base: int = DEFAULT_FLOAT_BASE,
    precision: int = DEFAULT_FLOAT_PRECISION,
) -> EncodedFloat:
    """Encode a finite real with ``precision`` base-``base`` digits.

    Relative round-trip error is below base^(1 - precision); the default
    precision makes the round-trip exact for binary64 inputs.
    """
    if not math.isfinite(x):
        raise EncodingRangeError(f"cannot encode non-finite value {x!r}")
    if x == 0.0:
        return EncodedFloat(0, 0, base)
    mag = Fraction(abs(x))
    # floor(log_base |x|) via a float guess corrected by exact comparison.
    e = math.floor(math.log(abs(x), base))
    while Fraction(base) ** e > mag:
        e -= 1
    while Fraction(base) ** (e + 1) <= mag:
        e += 1
    exponent = e - (precision - 1)
    significand = _round_half_away(Fraction(x) / Fraction(base) ** exponent)
    return EncodedFloat(significand, exponent, base)


def align_exponents(
    a: EncodedFloat, b: EncodedFloat, max_significand: int | None = None
) -> tuple[EncodedFloat, EncodedFloat]:
    """Rescale the larger-exponent operand so both share one exponent.

    Multiplying a significand by base^delta and lowering the exponent keeps
    the decoded value unchanged, and works on ciphertext significands because
    scalar multiplication is homomorphic.  ``max_significand``, when given,
    bounds the scaled plaintext significand (ciphertext magnitudes cannot be
    inspected, so their overflow guard lives in the scalar-multiply itself).
    """
    if a.base != b.base:
        raise ValueError(f"mixed encoding bases {a.base} and {b.base}")
    if a.exponent == b.exponent:
        return a, b
    if a.exponent > b.exponent:
        return _shift_to(a, b.exponent, max_significand), b
    return a, _shift_to(b, a.exponent, max_significand)


def _shift_to(
    enc: EncodedFloat, exponent: int, max_significand: int | None
) -> EncodedFloat:
    factor = enc.base ** (enc.exponent - exponent)
    scaled = enc.significand * factor
    if max_significand is not None and isinstance(scaled, int):
        if abs(scaled) >= max_significand:
            raise EncodingRangeError(
                f"exponent alignment by base^{enc.exponent - exponent} "
                f"overflows the plaintext bound"
            )
    return EncodedFloat(scaled, exponent, enc.base)


def _elementwise(fn, matrix, what: str):
    out = []
    for r, row in enumerate(matrix):
        out_row = []
        for c, value in enumerate(row):
            try:
                out_row.append(fn(value))
            except (EncodingRangeError, ValueError, TypeError) as exc:
                raise EncodingRangeError(
                    f"{what} failed at ({r}, {c}): {exc}"
                ) from exc
        out.append(out_row)
    return out


def matrix_encode_fixed(x, cfg: FixedPointConfig) -> list[list[int]]:
    a = np.atleast_2d(np.asarray(x, dtype=float))
    return _elementwise(lambda v: encode_fixed(float(v), cfg), a, "fixed-point encode")


def matrix_decode_fixed(z: list[list[int]], cfg: FixedPointConfig) -> np.ndarray:
    rows = _elementwise(lambda v: decode_fixed(v, cfg), z, "fixed-point decode")
    return np.asarray(rows, dtype=float)


def matrix_encode_float(
    x, base: int = DEFAULT_FLOAT_BASE, precision: int = DEFAULT_FLOAT_PRECISION
) -> list[list[EncodedFloat]]:
    a = np.atleast_2d(np.asarray(x, dtype=float))
    return _elementwise(
        lambda v: encode_float(float(v), base, precision), a, "float encode"
    )


def matrix_decode_float(encoded: list[list[EncodedFloat]]) -> np.ndarray:
    rows = _elementwise(lambda e: e.decode(), encoded, "float decode")
    return np.asarray(rows, dtype=float)


def matrix_shape(matrix) -> tuple[int, int]:
    rows = len(matrix)
    if rows == 0:
        raise DimensionError("matrix has no rows")
    cols = len(matrix[0])
    if any(len(row) != cols for row in matrix):
        raise DimensionError("ragged matrix")
    return rows, cols
