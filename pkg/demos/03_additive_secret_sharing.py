"""n-out-of-n additive secret sharing over Z_{2^l}.

Each secret splits into random-looking ring elements that sum back to it.
Summing the shares of several secrets party-by-party computes the total
without any party revealing its input: exactly the aggregation primitive
the private PCA protocol is built on.
"""

from pppca.sharing import CounterPRG, add_local, reconstruct, share

L = 16
prg = CounterPRG(2024)

secret = 1337
shares = share(secret, 3, L, prg, secret_id="demo")
print(f"secret {secret} split three ways over Z_2^{L}:")
for s in shares:
    print(f"  party {s.owner}: {s.value}")
print(f"sum mod 2^{L} = {sum(s.value for s in shares) % 2**L}")
assert reconstruct(shares) == secret

# Any proper subset looks uniform; only all three together reveal anything.
print("\nfirst two shares alone:", [s.value for s in shares[:2]], "(no information)")

# Secure summation: three parties hold salaries they will not disclose.
salaries = {"alice": 61_000, "bob": 48_000, "carol": 75_000}
print("\nprivate inputs:", ", ".join(f"{k}=?" for k in salaries))

bundles = {
    name: share(value, 3, 32, prg, secret_id=name)
    for name, value in salaries.items()
}
# Party i receives one share of every salary and sums them locally.
local_sums = [
    add_local([bundles[name][i] for name in salaries]) for i in range(3)
]
print("local share sums (what the aggregator sees):", [s.value for s in local_sums])

total = reconstruct(local_sums, party_count=3)
print(f"reconstructed total: {total}  (expected {sum(salaries.values())})")
assert total == sum(salaries.values())
