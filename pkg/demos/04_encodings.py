"""The two encodings that carry real numbers into the crypto domains.

Secret sharing works in Z_{2^l}, so reals become fixed-point ring elements;
homomorphic encryption works modulo a key-sized integer, so reals become
significand/exponent pairs.  Both encodings preserve addition, which is the
only operation the protocol ever performs remotely.
"""

from pppca.encoding import (
    FixedPointConfig,
    align_exponents,
    decode_fixed,
    encode_fixed,
    encode_float,
)

cfg = FixedPointConfig()  # 64-bit ring, 24 fractional bits
print(f"fixed point: l={cfg.l}, f={cfg.f}, |x| < 2^{cfg.l - cfg.f - 1}")

for x in (0.0, 1.5, -1.0, 3.141592653589793, -271.828):
    z = encode_fixed(x, cfg)
    back = decode_fixed(z, cfg)
    print(f"  {x:>12.6f} -> {z:>22d} -> {back:>12.6f}  (err {abs(back - x):.2e})")

# Addition in the ring is addition of the encoded reals.
a, b = 12.75, -3.125
za, zb = encode_fixed(a, cfg), encode_fixed(b, cfg)
summed = decode_fixed((za + zb) % cfg.modulus, cfg)
print(f"\nring addition: {a} + {b} via Z_2^64 = {summed}")

print("\nfloat encoding (base 16):")
for x in (2.5, -0.001953125, 123456.789):
    enc = encode_float(x)
    print(f"  {x:>14} -> significand {enc.significand}, exponent {enc.exponent}")
    assert enc.decode() == x

# Significands may only be added once their exponents agree.
small = encode_float(0.25, precision=3)
large = encode_float(4096.0, precision=3)
print(f"\nbefore alignment: exponents {small.exponent} and {large.exponent}")
small2, large2 = align_exponents(small, large)
print(f"after alignment:  exponents {small2.exponent} and {large2.exponent}")
print(f"decoded values unchanged: {small2.decode()}, {large2.decode()}")
total = small2.significand + large2.significand
print(f"significand sum decodes to {float(total * 16.0 ** small2.exponent)}")
