#!/usr/bin/env python3
"""Independent generator for challenge bundles.

Re-implements the generator stream (mt19937_64 seeded through SplitMix64,
rejection-sampled bounded integers) and the seed commitment (scrypt over the
little-endian seed) without touching the C++ code, and writes the bundle as
JSON. The unit tests compare the C++ bundle against this output.

usage: bundle_oracle.py d k1 k2 n t m seed N r p > out.json
"""
import hashlib
import json
import sys

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & MASK
        self.idx = 312

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= 312:
            self._twist()
        y = self.mt[self.idx]
        self.idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


class Rng:
    def __init__(self, seed):
        self.e = MT19937_64(splitmix64(seed))

    def next(self):
        return self.e.next()

    def uniform(self, bound):
        limit = MASK - (MASK % bound)
        while True:
            x = self.e.next()
            if x < limit:
                return x % bound


def gen_clause(rng, d, k1, k2, n):
    k = d + k1 + k2
    if n >= 2 * k:
        out = []
        for _ in range(k):
            while True:
                c = rng.uniform(n)
                if c not in out:
                    break
            out.append(c)
        return out
    perm = list(range(n))
    out = []
    for i in range(k):
        r = i + rng.uniform(n - i)
        perm[i], perm[r] = perm[r], perm[i]
        out.append(perm[i])
    return out


def respond(sigma, d, k1, k2, clause):
    j = sum(sigma[clause[d + i]] for i in range(k1)) % d
    return (sigma[clause[j]] + sum(sigma[clause[d + k1 + i]] for i in range(k2))) % d


def main():
    d, k1, k2, n, t, m, seed, N, r, p = (int(a) for a in sys.argv[1:11])
    rng = Rng(seed)
    sigma_rng = Rng(rng.next())
    sigma = [sigma_rng.uniform(d) for _ in range(n)]
    pairs = []
    for _ in range(m):
        c = gen_clause(rng, d, k1, k2, n)
        pairs.append({"clause": c, "response": respond(sigma, d, k1, k2, c)})
    challenges = [[gen_clause(rng, d, k1, k2, n) for _ in range(t)] for _ in range(20)]
    digest = hashlib.scrypt(seed.to_bytes(8, "little"), salt=b"hcp-seed-commitment", n=N, r=r, p=p, dklen=32)
    doc = {
        "version": 1,
        "params": {"d": d, "k1": k1, "k2": k2, "n": n, "t": t},
        "commitment": {"algorithm": f"scrypt-n{N}-r{r}-p{p}", "digest": digest.hex()},
        "pairs": pairs,
        "password_challenges": challenges,
        "sealed_digits": "".join("0123456789abcdefghijklmnopqrstuvwxyz"[x] for x in sigma),
    }
    json.dump(doc, sys.stdout)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
