"""Additive homomorphic encryption in action.

Adding two ciphertexts (multiplying them, really) yields an encryption of
the plaintext sum, and nobody without the private key learns the operands.
Matrices work the same way, element by element.
"""

import random

import numpy as np

from pppca import paillier

rng = random.Random(42)
pk, sk = paillier.keygen(512, rng, allow_test_key=True)  # small key: demo only
print(f"generated a {pk.n.bit_length()}-bit test key, fingerprint {pk.fingerprint}")

u, v = 1234, 8766
cu = paillier.encrypt(pk, u, rng)
cv = paillier.encrypt(pk, v, rng)
print(f"\nencrypt({u})  -> {str(cu.value)[:40]}...")
print(f"encrypt({v})  -> {str(cv.value)[:40]}...")

total = paillier.add_cipher(pk, cu, cv)
print(f"sum ciphertext -> {str(total.value)[:40]}...")
print(f"decrypt(sum)   =  {paillier.decrypt(sk, total)}   (expected {u + v})")

# Encryption is probabilistic: the same plaintext never repeats on the wire.
again = paillier.encrypt(pk, u, rng)
print(f"\nsame plaintext, fresh randomness: ciphertexts differ -> {cu.value != again.value}")

# Scalar multiplication: c^s decrypts to s * u.
tripled = paillier.mul_plain(pk, cu, 3)
print(f"3 * encrypt({u}) decrypts to {paillier.decrypt(sk, tripled)}")

# The same machinery lifted to real-valued matrices.
nprng = np.random.default_rng(7)
a = nprng.normal(size=(3, 3)).round(3)
b = nprng.normal(size=(3, 3)).round(3)
enc_sum = paillier.add_enc_matrix(
    pk, paillier.enc_matrix(pk, a, rng), paillier.enc_matrix(pk, b, rng)
)
decrypted = paillier.dec_matrix(sk, enc_sum)
print("\nmatrix A + matrix B through the ciphertext domain:")
print(np.array_str(decrypted, precision=3))
print("max deviation from plaintext sum:", np.max(np.abs(decrypted - (a + b))))
