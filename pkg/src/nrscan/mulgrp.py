"""The multiplicative group Q* = {+-1} x (free abelian group on the primes).

Points of a split torus G_m^k over Q are k-tuples of nonzero rationals.  The
smallest algebraic subgroup containing such a tuple is cut out by its lattice
of multiplicative relations, and the number of its connected components is
the order of the torsion part of Z^k / relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .intlin import IntLattice, IntMatrix, hnf, left_kernel, torsion_order_of_quotient
from .primes import factor_u64


class BadReduction(ArithmeticError):
    """The prime divides the support of the point; reduction is undefined."""


@dataclass(frozen=True)
class FactoredRational:
    """(-1)^sign * prod p^e, with only nonzero exponents stored."""

    sign: int
    exponents: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.sign not in (0, 1):
            raise ValueError("sign bit must be 0 or 1")
        if any(e == 0 for _, e in self.exponents):
            raise ValueError("zero exponents must not be stored")

    @classmethod
    def from_map(cls, sign: int, exponents: Mapping[int, int]) -> FactoredRational:
        return cls(sign, tuple(sorted((p, e) for p, e in exponents.items() if e)))

    @property
    def exponent_map(self) -> dict[int, int]:
        return dict(self.exponents)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exponents)

    def is_torsion(self) -> bool:
        return not self.exponents

    def numerator(self) -> int:
        n = 1
        for p, e in self.exponents:
            if e > 0:
                n *= p**e
        return -n if self.sign else n

    def denominator(self) -> int:
        d = 1
        for p, e in self.exponents:
            if e < 0:
                d *= p**-e
        return d

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator(), self.denominator())

    def __mul__(self, other: FactoredRational) -> FactoredRational:
        exps = self.exponent_map
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + e
        return FactoredRational.from_map(self.sign ^ other.sign, exps)

    def __pow__(self, n: int) -> FactoredRational:
        return FactoredRational.from_map(self.sign & (n & 1), {p: e * n for p, e in self.exponents})

    def __str__(self):
        return str(self.to_fraction())


ONE = FactoredRational(0)


def factor_rational(numerator: int, denominator: int = 1) -> FactoredRational:
    """Factor numerator/denominator.

    >>> factor_rational(2, 3)
    FactoredRational(sign=0, exponents=((2, 1), (3, -1)))
    """
    if numerator == 0 or denominator == 0:
        raise ValueError("zero is not an element of Q*")
    q = Fraction(numerator, denominator)
    exps = dict(factor_u64(abs(q.numerator)))
    for p, e in factor_u64(q.denominator).items():
        exps[p] = -e
    return FactoredRational.from_map(int(q < 0), exps)


def parse_rational(text: str) -> FactoredRational:
    """Parse '-4', '2/3' or '-7/12' into a FactoredRational."""
    q = Fraction(text.strip())
    return factor_rational(q.numerator, q.denominator)


def _support(tup: Sequence[FactoredRational]) -> list[int]:
    return sorted({p for r in tup for p in r.support})


def exponent_matrix(tup: Sequence[FactoredRational]) -> IntMatrix:
    """k x (#primes) matrix of exponents, primes in ascending order."""
    primes = _support(tup)
    rows = [[r.exponent_map.get(p, 0) for p in primes] for r in tup]
    return IntMatrix.from_rows(rows, len(primes))


def relation_lattice(tup: Sequence[FactoredRational]) -> IntLattice:
    """Lattice of v in Z^k with prod r_i^{v_i} = 1.

    First the relations among the prime-exponent parts (an integer left
    kernel), then the sublattice of index 1 or 2 where the signs cancel.
    """
    k = len(tup)
    if k == 0:
        raise ValueError("empty tuple")
    K0 = left_kernel(exponent_matrix(tup))
    signs = [r.sign for r in tup]
    basis = K0.vectors()
    parity = [sum(v * s for v, s in zip(b, signs)) % 2 for b in basis]
    if not any(parity):
        return K0
    # lambda with sum lambda_j * parity_j even: kernel of [parity; 2] dropped to
    # the first len(basis) coordinates
    aug = IntMatrix.from_rows([[c] for c in parity] + [[2]], 1)
    lam = left_kernel(aug).vectors()
    gens = [[sum(l[j] * basis[j][i] for j in range(len(basis))) for i in range(k)] for l in lam]
    return IntLattice(k, hnf(IntMatrix.from_rows(gens, k)))


def evaluate_relation(tup: Sequence[FactoredRational], v: Sequence[int]) -> FactoredRational:
    out = ONE
    for r, e in zip(tup, v):
        out = out * r**e
    return out


@dataclass(frozen=True)
class TorusTupleReport:
    dimension: int
    n_components: int
    relation_lattice: IntLattice
    independent: bool
    torsion: bool


def torus_report(tup: Sequence[FactoredRational]) -> TorusTupleReport:
    lat = relation_lattice(tup)
    k = len(tup)
    dim = k - lat.rank
    return TorusTupleReport(
        dimension=dim,
        n_components=torsion_order_of_quotient(lat),
        relation_lattice=lat,
        independent=lat.rank == 0,
        torsion=all(r.is_torsion() for r in tup),
    )


def reduce_mod_p(r: FactoredRational, p: int) -> int:
    if p in r.support:
        raise BadReduction(f"{p} divides the support of {r}")
    num = r.numerator() % p
    return num * pow(r.denominator(), -1, p) % p


def order_of_unit(a: int, p: int, p_minus_1_factors: Mapping[int, int] | None = None) -> int:
    """Multiplicative order of the unit ``a`` modulo the prime ``p``."""
    a %= p
    if a == 0:
        raise BadReduction(f"{p} divides the element")
    if p_minus_1_factors is None:
        p_minus_1_factors = factor_u64(p - 1)
    t = p - 1
    for q, e in p_minus_1_factors.items():
        for _ in range(e):
            if pow(a, t // q, p) == 1:
                t //= q
            else:
                break
    return t


def mult_order_mod_p(
    r: FactoredRational, p: int, p_minus_1_factors: Mapping[int, int] | None = None
) -> int:
    """Order of (r mod p) in F_p^*; raises BadReduction when p is in the support."""
    return order_of_unit(reduce_mod_p(r, p), p, p_minus_1_factors)
