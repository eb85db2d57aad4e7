"""Prime generation and machine-word factorization.

* ``primes_in_range`` - segmented sieve of Eratosthenes (numpy bytemasks)
* ``is_prime`` - Miller-Rabin with a witness set that is deterministic below 2^64
* ``factor_u64`` - trial division to 10^4, then Brent's variant of Pollard rho
"""

from __future__ import annotations

import math
import random
from collections import Counter

import numpy as np

TRIAL_LIMIT = 10_000
SEGMENT = 1 << 18

# Deterministic for n < 3.3e24, which covers 64-bit inputs.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


_TRIAL_PRIMES = [int(p) for p in _small_primes(TRIAL_LIMIT)]


def primes_in_range(lo: int, hi: int, segment: int = SEGMENT) -> list[int]:
    """All primes p with lo <= p <= hi, ascending."""
    lo = max(lo, 2)
    if hi < lo:
        return []
    base = _small_primes(math.isqrt(hi))
    out: list[int] = []
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        mask = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, (start + p - 1) // p * p)
            mask[first - start :: p] = False
        if start < 2:
            mask[: 2 - start] = False
        out.extend((np.flatnonzero(mask) + start).tolist())
        start = stop
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite ``n``."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_u64(n: int) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as {prime: multiplicity}.

    >>> factor_u64(10403)
    {101: 1, 103: 1}
    """
    if n < 1:
        raise ValueError("factor_u64 needs a positive integer")
    fac: Counter[int] = Counter()
    for p in _TRIAL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            fac[p] += 1
            n //= p
    if n > 1:
        # seeded so factorizations are reproducible run to run
        rng = random.Random(n)
        stack = [n]
        while stack:
            m = stack.pop()
            if m < TRIAL_LIMIT * TRIAL_LIMIT or is_prime(m):
                # below 10^8 trial division above left only primes
                fac[m] += 1
                continue
            d = _brent(m, rng)
            stack += [d, m // d]
    return dict(sorted(fac.items()))


def valuation(n: int, ell: int) -> int:
    """ell-adic valuation of the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v
