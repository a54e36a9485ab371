"""Additive homomorphic encryption (Paillier, g = n + 1 variant).

The product of two ciphertexts decrypts to the sum of their plaintexts, and
raising a ciphertext to a plaintext power multiplies the underlying value.
That is everything the aggregation protocol needs; there is deliberately no
ciphertext-times-ciphertext operation.

Signed values are mapped into [0, n) by reducing mod n; decoded values above
n/2 are interpreted as negative.  Big-integer arithmetic uses gmpy2 when
available and falls back to the builtins otherwise.

Not hardened against side channels (big-integer operations are not constant
time) and no zero-knowledge proofs are provided; the threat model is
honest-but-curious protocol participants only.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .encoding import (
    DEFAULT_FLOAT_BASE,
    DEFAULT_FLOAT_PRECISION,
    EncodedFloat,
    align_exponents,
    encode_float,
    matrix_shape,
)
from .errors import EncodingRangeError, KeyMismatchError

try:
    import gmpy2

    def _powmod(base: int, exp: int, mod: int) -> int:
        return int(gmpy2.powmod(base, exp, mod))

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def _powmod(base: int, exp: int, mod: int) -> int:
        return pow(base, exp, mod)


DEFAULT_KEY_BITS = 2048
ALLOWED_KEY_BITS = (512, 1024, 2048, 3072)
MILLER_RABIN_ROUNDS = 40

_SMALL_PRIMES = [p for p in range(3, 2000) if all(p % q for q in range(2, p))]


def _is_probable_prime(n: int, rng: random.Random, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Trial division by small primes, then Miller-Rabin with random bases."""
    if n < 2 or n % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = _powmod(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = _powmod(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime(bits: int, rng: random.Random) -> int:
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_probable_prime(candidate, rng):
            return candidate


@dataclass(frozen=True)
class PublicKey:
    """Paillier public key with the simplified generator g = n + 1."""

    n: int
    n_squared: int = field(repr=False)
    fingerprint: str

    @property
    def g(self) -> int:
        return self.n + 1

    @property
    def max_plaintext(self) -> int:
        """Largest magnitude of a signed plaintext (n/2 threshold mapping)."""
        return self.n // 2

    @classmethod
    def from_modulus(cls, n: int) -> "PublicKey":
        return cls(n=n, n_squared=n * n, fingerprint=key_fingerprint(n))


@dataclass(frozen=True)
class PrivateKey:
    """Holds lambda = lcm(p-1, q-1) and its decryption inverse mu."""

    public_key: PublicKey
    lam: int = field(repr=False)
    mu: int = field(repr=False)


@dataclass(frozen=True)
class Ciphertext:
    """An integer in [0, n^2) tagged with the key it was produced under.

    ``cipher * s`` for a non-negative int s yields an encryption of s times
    the plaintext; ``a + b`` multiplies the raw values, encrypting the sum.
    """

    value: int
    public_key: PublicKey

    def __post_init__(self):
        if not 0 <= self.value < self.public_key.n_squared:
            raise ValueError("ciphertext value outside [0, n^2)")
        if math.gcd(self.value, self.public_key.n_squared) != 1:
            raise ValueError("ciphertext value not coprime to n^2")

    @property
    def fingerprint(self) -> str:
        return self.public_key.fingerprint

    def __add__(self, other: "Ciphertext") -> "Ciphertext":
        return add_cipher(self.public_key, self, other)

    def __mul__(self, scalar: int) -> "Ciphertext":
        return mul_plain(self.public_key, self, scalar)

    __rmul__ = __mul__


def key_fingerprint(n: int) -> str:
    return hashlib.sha256(n.to_bytes((n.bit_length() + 7) // 8, "big")).hexdigest()[:16]


def keygen(
    bits: int = DEFAULT_KEY_BITS,
    rng: random.Random | None = None,
    allow_test_key: bool = False,
) -> tuple[PublicKey, PrivateKey]:
    """Generate a keypair with an n of exactly ``bits`` bits.

    512-bit keys are far below a safe size and are admitted only with
    ``allow_test_key=True``.  Pass a seeded ``random.Random`` for
    reproducible keys in tests; the default draws from the system entropy
    pool.
    """
    if bits not in ALLOWED_KEY_BITS:
        raise ValueError(f"key size must be one of {ALLOWED_KEY_BITS}, got {bits}")
    if bits == 512 and not allow_test_key:
        raise ValueError("512-bit keys are test-only; pass allow_test_key=True")
    if rng is None:
        rng = random.SystemRandom()
    while True:
        p = _random_prime(bits // 2, rng)
        q = _random_prime(bits // 2, rng)
        if p == q:
            continue
        n = p * q
        if n.bit_length() == bits:
            break
    pk = PublicKey.from_modulus(n)
    lam = math.lcm(p - 1, q - 1)
    # L(g^lam mod n^2) with g = n + 1 reduces to lam mod n.
    mu = pow(lam % n, -1, n)
    return pk, PrivateKey(public_key=pk, lam=lam, mu=mu)


def encrypt(pk: PublicKey, m: int, rng: random.Random | None = None) -> Ciphertext:
    """Probabilistic encryption of m in [0, n): c = (1 + n)^m * r^n mod n^2."""
    if not 0 <= m < pk.n:
        raise ValueError(f"plaintext must lie in [0, n), got {m}")
    if rng is None:
        rng = random.SystemRandom()
    while True:
        r = rng.randrange(1, pk.n)
        if math.gcd(r, pk.n) == 1:
            break
    # g = n + 1 makes g^m mod n^2 a single multiplication.
    g_m = (1 + pk.n * m) % pk.n_squared
    return Ciphertext((g_m * _powmod(r, pk.n, pk.n_squared)) % pk.n_squared, pk)


def decrypt(sk: PrivateKey, c: Ciphertext) -> int:
    """Recover the plaintext in [0, n): L(c^lambda mod n^2) * mu mod n."""
    pk = sk.public_key
    if c.fingerprint != pk.fingerprint:
        raise KeyMismatchError(
            f"ciphertext under key {c.fingerprint} cannot be decrypted "
            f"with key {pk.fingerprint}"
        )
    u = _powmod(c.value, sk.lam, pk.n_squared)
    return ((u - 1) // pk.n) * sk.mu % pk.n


def _check_same_key(pk: PublicKey, *ciphers: Ciphertext):
    for c in ciphers:
        if c.fingerprint != pk.fingerprint:
            raise KeyMismatchError(
                f"ciphertext under key {c.fingerprint}, expected {pk.fingerprint}"
            )


def add_cipher(pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Homomorphic addition: the product decrypts to (u + v) mod n."""
    _check_same_key(pk, c1, c2)
    return Ciphertext(c1.value * c2.value % pk.n_squared, pk)


def mul_plain(pk: PublicKey, c: Ciphertext, s: int) -> Ciphertext:
    """Homomorphic scalar multiplication: c^s decrypts to s * u mod n."""
    _check_same_key(pk, c)
    if not isinstance(s, int):
        raise TypeError(f"scalar must be int, got {type(s).__name__}")
    if s < 0:
        raise ValueError(f"scalar must be non-negative, got {s}")
    if s >= pk.n:
        raise EncodingRangeError("scalar exceeds the plaintext space")
    return Ciphertext(_powmod(c.value, s, pk.n_squared), pk)


def encode_signed(pk: PublicKey, m: int) -> int:
    """Map a signed integer into [0, n); magnitudes must stay below n/2."""
    if abs(m) > pk.max_plaintext:
        raise EncodingRangeError(
            f"|{m}| exceeds the signed plaintext bound n/2 (~2^{pk.n.bit_length() - 1})"
        )
    return m % pk.n


def decode_signed(pk: PublicKey, v: int) -> int:
    """Inverse of :func:`encode_signed`: values above n/2 are negative."""
    if not 0 <= v < pk.n:
        raise ValueError("value outside [0, n)")
    return v - pk.n if v > pk.max_plaintext else v


def encrypt_encoded(
    pk: PublicKey, enc: EncodedFloat, rng: random.Random | None = None
) -> EncodedFloat:
    """Encrypt the significand of a plaintext EncodedFloat."""
    if not enc.is_plain:
        raise TypeError("significand is already encrypted")
    cipher = encrypt(pk, encode_signed(pk, enc.significand), rng)
    return EncodedFloat(cipher, enc.exponent, enc.base)


def decrypt_encoded(sk: PrivateKey, enc: EncodedFloat) -> EncodedFloat:
    """Decrypt an encrypted EncodedFloat back to a signed significand."""
    if enc.is_plain:
        raise TypeError("significand is not encrypted")
    raw = decrypt(sk, enc.significand)
    return EncodedFloat(decode_signed(sk.public_key, raw), enc.exponent, enc.base)


def add_encoded(pk: PublicKey, a: EncodedFloat, b: EncodedFloat) -> EncodedFloat:
    """Add two encrypted EncodedFloats after aligning their exponents."""
    a, b = align_exponents(a, b)
    return EncodedFloat(
        add_cipher(pk, a.significand, b.significand), a.exponent, a.base
    )


def enc_matrix(
    pk: PublicKey,
    x,
    rng: random.Random | None = None,
    base: int = DEFAULT_FLOAT_BASE,
    precision: int = DEFAULT_FLOAT_PRECISION,
) -> list[list[EncodedFloat]]:
    """Encode and encrypt a real matrix element-wise."""
    a = np.atleast_2d(np.asarray(x, dtype=float))
    return [
        [
            encrypt_encoded(pk, encode_float(float(v), base, precision), rng)
            for v in row
        ]
        for row in a
    ]


def add_enc_matrix(
    pk: PublicKey,
    a: list[list[EncodedFloat]],
    b: list[list[EncodedFloat]],
) -> list[list[EncodedFloat]]:
    """Element-wise homomorphic sum of two encrypted matrices."""
    sa, sb = matrix_shape(a), matrix_shape(b)
    if sa != sb:
        raise ValueError(f"shape mismatch: {sa} vs {sb}")
    return [
        [add_encoded(pk, x, y) for x, y in zip(row_a, row_b)]
        for row_a, row_b in zip(a, b)
    ]


def dec_matrix(sk: PrivateKey, encrypted: list[list[EncodedFloat]]) -> np.ndarray:
    """Decrypt an encrypted matrix back to floats."""
    return np.asarray(
        [[decrypt_encoded(sk, e).decode() for e in row] for row in encrypted],
        dtype=float,
    )
