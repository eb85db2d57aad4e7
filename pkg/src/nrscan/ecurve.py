"""Short Weierstrass curves y^2 = x^3 + a x + b over Q and over F_p.

Points are ``None`` (the point at infinity) or an ``(x, y)`` pair: Fractions
over Q, ints in [0, p) over F_p.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .primes import factor_u64

PointQ = Optional[Tuple[Fraction, Fraction]]
PointFp = Optional[Tuple[int, int]]

# Orders of rational torsion points on elliptic curves over Q.
MAZUR_ORDERS = frozenset(range(1, 11)) | {12}
MAX_TORSION = 12
NAIVE_COUNT_LIMIT = 1 << 20


class SingularCurve(ValueError):
    pass


class BadPrime(ArithmeticError):
    """Reduction of the curve or the point is not defined at this prime."""


@dataclass(frozen=True)
class CurveQ:
    a: int
    b: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise SingularCurve(f"y^2 = x^3 + {self.a}x + {self.b} is singular (discriminant 0)")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a**3 + 27 * self.b**2)

    def contains(self, P: PointQ) -> bool:
        if P is None:
            return True
        x, y = P
        return y * y == x**3 + self.a * x + self.b

    def has_good_reduction(self, p: int) -> bool:
        return p > 3 and self.discriminant % p != 0

    def __str__(self):
        return f"y^2 = x^3 + ({self.a})x + ({self.b})"


def point(x, y) -> PointQ:
    return (Fraction(x), Fraction(y))


@dataclass(frozen=True)
class PointClass:
    """Torsion of exact order ``order``, or infinite order when ``order`` is None."""

    order: Optional[int]

    @property
    def is_torsion(self) -> bool:
        return self.order is not None

    def __str__(self):
        return f"Torsion({self.order})" if self.is_torsion else "InfiniteOrder"


INFINITE_ORDER = PointClass(None)


# --- arithmetic over Q -----------------------------------------------------


def neg_q(P: PointQ) -> PointQ:
    return None if P is None else (P[0], -P[1])


def add_q(E: CurveQ, P: PointQ, Q: PointQ) -> PointQ:
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if y1 != y2 or y1 == 0:
            return None
        lam = (3 * x1 * x1 + E.a) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def sub_q(E: CurveQ, P: PointQ, Q: PointQ) -> PointQ:
    return add_q(E, P, neg_q(Q))


def mul_q(E: CurveQ, n: int, P: PointQ) -> PointQ:
    if n < 0:
        return mul_q(E, -n, neg_q(P))
    acc, base = None, P
    while n:
        if n & 1:
            acc = add_q(E, acc, base)
        base = add_q(E, base, base)
        n >>= 1
    return acc


def classify_point(E: CurveQ, P: PointQ) -> PointClass:
    """Exact torsion order via the Mazur bound, else infinite order."""
    Q = P
    for n in range(1, MAX_TORSION + 1):
        if Q is None:
            return PointClass(n)
        Q = add_q(E, Q, P)
    return INFINITE_ORDER


def torsion_order(E: CurveQ, P: PointQ) -> Optional[int]:
    return classify_point(E, P).order if P is not None else 1


def denominator_primes(P: PointQ) -> set[int]:
    if P is None:
        return set()
    d = P[0].denominator * P[1].denominator
    return set(factor_u64(d))


def reduce_point(E: CurveQ, P: PointQ, p: int) -> PointFp:
    """Reduction modulo p of a rational point through its projective model.

    For x = u/d^2, y = v/d^3 in lowest terms the projective point is
    (u d : v : d^3); it reduces to infinity exactly when p divides d.
    """
    if not E.has_good_reduction(p):
        raise BadPrime(f"{E} has no good short Weierstrass reduction at {p}")
    if P is None:
        return None
    x, y = P
    if x.denominator % p == 0 or y.denominator % p == 0:
        return None
    return (x.numerator * pow(x.denominator, -1, p) % p, y.numerator * pow(y.denominator, -1, p) % p)


# --- arithmetic over F_p ---------------------------------------------------


def on_curve_fp(a: int, b: int, p: int, P: PointFp) -> bool:
    if P is None:
        return True
    x, y = P
    return (y * y - x * x * x - a * x - b) % p == 0


def add_fp(a: int, p: int, P: PointFp, Q: PointFp) -> PointFp:
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def mul_fp(a: int, p: int, n: int, P: PointFp) -> PointFp:
    if n < 0:
        n, P = -n, (None if P is None else (P[0], -P[1] % p))
    acc, base = None, P
    while n:
        if n & 1:
            acc = add_fp(a, p, acc, base)
        base = add_fp(a, p, base, base)
        n >>= 1
    return acc


def count_points_naive(a: int, b: int, p: int) -> int:
    """|E(F_p)| = p + 1 + sum_x chi(x^3 + a x + b), vectorized over x."""
    x = np.arange(p, dtype=np.int64)
    is_square = np.zeros(p, dtype=bool)
    is_square[x * x % p] = True
    f = ((x * x % p) * x + (a % p) * x + (b % p)) % p
    zeros = int(np.count_nonzero(f == 0))
    squares = int(np.count_nonzero(is_square[f])) - zeros
    return 1 + zeros + 2 * squares


def _hasse_window(p: int) -> tuple[int, int]:
    w = 2 * math.isqrt(p) + 2
    return max(p + 1 - w, 1), p + 1 + w


def order_from_multiple(a: int, p: int, P: PointFp, N: int) -> int:
    """Exact order of P given any N with N P = O."""
    t = N
    for q, e in factor_u64(N).items():
        for _ in range(e):
            if mul_fp(a, p, t // q, P) is None:
                t //= q
            else:
                break
    return t


def point_multiple_bsgs(a: int, p: int, P: PointFp) -> int:
    """Some N in the Hasse interval with N P = O, by baby-step giant-step.

    Baby steps store x(jP) for 0 < j <= m; giant steps walk
    (lo + 2 m i) P.  A collision of x-coordinates means (lo + 2 m i -+ j) P = O.
    """
    lo, hi = _hasse_window(p)
    if P is None:
        return lo
    m = math.isqrt(hi - lo) // 2 + 1
    baby: dict[int, int] = {}
    Q = None
    for j in range(1, m + 1):
        Q = add_fp(a, p, Q, P)
        if Q is None:
            return j * ((lo + j - 1) // j)
        baby.setdefault(Q[0], j)
    step = mul_fp(a, p, 2 * m, P)
    R = mul_fp(a, p, lo + m, P)
    n = lo + m
    while n - m <= hi:
        if R is None:
            return n
        j = baby.get(R[0])
        if j is not None:
            jP = mul_fp(a, p, j, P)
            return n - j if jP == R else n + j
        R = add_fp(a, p, R, step)
        n += 2 * m
    raise ArithmeticError(f"no multiple of the point order in the Hasse interval at p={p}")


def group_order_bsgs(a: int, b: int, p: int, rng: random.Random | None = None, max_points: int = 40) -> int:
    """|E(F_p)| as the unique multiple of lcm(point orders) in the Hasse interval."""
    lo, hi = _hasse_window(p)
    rng = rng or random.Random(p)
    L = 1
    for _ in range(max_points):
        pt = random_point_fp(a, b, p, rng)
        L = math.lcm(L, order_from_multiple(a, p, pt, point_multiple_bsgs(a, p, pt)))
        cands = [N for N in range((lo + L - 1) // L * L, hi + 1, L) if (N - p - 1) ** 2 <= 4 * p]
        if len(cands) == 1:
            return cands[0]
    # exponent too small to pin the order down (rare); fall back to counting
    return count_points_naive(a, b, p)


def _sqrt_mod(n: int, p: int) -> Optional[int]:
    n %= p
    if n == 0:
        return 0
    if pow(n, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        bpow = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, bpow * bpow % p, t * bpow * bpow % p, r * bpow % p
    return r


def random_point_fp(a: int, b: int, p: int, rng: random.Random) -> PointFp:
    while True:
        x = rng.randrange(p)
        y = _sqrt_mod(x * x * x + a * x + b, p)
        if y is not None:
            return (x, y)


def group_order_fp(E: CurveQ, p: int, method: str = "auto") -> int:
    """|E(F_p)| for a prime of good reduction.

    ``method`` is "naive" (character sum), "bsgs", or "auto" (naive up to
    2^20, BSGS above).
    """
    if not E.has_good_reduction(p):
        raise BadPrime(f"{E} has bad reduction at {p}")
    if method == "auto":
        method = "naive" if p <= NAIVE_COUNT_LIMIT else "bsgs"
    if method == "naive":
        return count_points_naive(E.a, E.b, p)
    if method == "bsgs":
        return group_order_bsgs(E.a % p, E.b % p, p)
    raise ValueError(f"unknown point counting method {method!r}")


def point_order_fp(E: CurveQ, P: PointFp, p: int, group_order: int) -> int:
    """Order of P in E(F_p), by stripping prime factors from the group order."""
    if P is None:
        return 1
    return order_from_multiple(E.a % p, p, P, group_order)


def point_order_fp_bsgs(E: CurveQ, P: PointFp, p: int) -> int:
    """Order of P without the group order: BSGS multiple, then strip factors."""
    if P is None:
        return 1
    a = E.a % p
    return order_from_multiple(a, p, P, point_multiple_bsgs(a, p, P))
