"""Prime sweeps: orders of (R mod p), their running gcd, and density counters.

Per-prime work is pure, so a range can be split into contiguous chunks and
evaluated in worker processes; records are reassembled in prime order before
aggregation, which makes every summary independent of the partitioning.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .ecurve import CurveQ, group_order_fp, point_order_fp, point_order_fp_bsgs, reduce_point
from .mulgrp import order_of_unit, reduce_mod_p
from .predictor import EllipticFactor, GroupPointSpec, TorusCoord, is_independent, predicted_nr
from .primes import factor_u64, primes_in_range, valuation

WILSON_Z = 1.959963984540054  # two-sided 95%

# Skip reasons, as written into the CSV status column.
SKIP_SMALL = "small_prime"
SKIP_DISC = "discriminant"
SKIP_SUPPORT = "support"
SKIP_DENOM = "denominator"


class HypothesisError(ValueError):
    """A requested computation violates the hypothesis of the statement it measures."""


@dataclass(frozen=True)
class ReductionRecord:
    p: int
    status: str  # "good" or a skip reason
    factor_orders: tuple[int, ...] = ()
    combined_order: Optional[int] = None
    valuations: tuple[tuple[int, int], ...] = ()

    @property
    def good(self) -> bool:
        return self.status == "good"


class _Evaluator:
    """Everything about a spec that does not depend on the prime, precomputed."""

    def __init__(self, spec: GroupPointSpec, ells: Sequence[int] = (), ec_method: str = "naive"):
        if ec_method not in ("naive", "bsgs"):
            raise ValueError(f"unknown elliptic order method {ec_method!r}")
        self.ells = tuple(sorted(set(ells)))
        self.ec_method = ec_method
        self.kinds: list[tuple] = []
        self.support: set[int] = set()
        self.discs: list[int] = []
        self.denoms: list[int] = []
        for f in spec.factors:
            if isinstance(f, TorusCoord):
                self.kinds.append(("gm", f.value))
                self.support.update(f.value.support)
            else:
                assert isinstance(f, EllipticFactor)
                P = f.point
                self.kinds.append(("ec", f.curve, P))
                self.discs.append(f.curve.discriminant)
                for Q in (f.base_point, f.translate, P):
                    if Q is not None:
                        self.denoms.append(Q[0].denominator * Q[1].denominator)
        self.has_elliptic = bool(self.discs)

    def skip_reason(self, p: int) -> Optional[str]:
        if p == 2 or (p == 3 and self.has_elliptic):
            return SKIP_SMALL
        if any(d % p == 0 for d in self.discs):
            return SKIP_DISC
        if p in self.support:
            return SKIP_SUPPORT
        if any(d % p == 0 for d in self.denoms):
            return SKIP_DENOM
        return None

    def record(self, p: int) -> ReductionRecord:
        reason = self.skip_reason(p)
        if reason:
            return ReductionRecord(p, reason)
        pm1 = None
        group_orders: dict[CurveQ, int] = {}
        orders = []
        for kind in self.kinds:
            if kind[0] == "gm":
                if pm1 is None:
                    pm1 = factor_u64(p - 1)
                orders.append(order_of_unit(reduce_mod_p(kind[1], p), p, pm1))
            else:
                _, E, P = kind
                Pp = reduce_point(E, P, p)
                if self.ec_method == "bsgs":
                    orders.append(point_order_fp_bsgs(E, Pp, p))
                else:
                    if E not in group_orders:
                        group_orders[E] = group_order_fp(E, p, "naive")
                    orders.append(point_order_fp(E, Pp, p, group_orders[E]))
        combined = math.lcm(*orders)
        vals = tuple((ell, valuation(combined, ell)) for ell in self.ells)
        return ReductionRecord(p, "good", tuple(orders), combined, vals)


def reduction_order(spec: GroupPointSpec, p: int, ells: Sequence[int] = (), ec_method: str = "naive") -> ReductionRecord:
    """Orders of the reduction of each factor of R at p, and their lcm."""
    return _Evaluator(spec, ells, ec_method).record(p)


def _chunk_records(spec, primes, ells, ec_method):
    ev = _Evaluator(spec, ells, ec_method)
    return [ev.record(p) for p in primes]


def _split(xs: list, parts: int) -> list[list]:
    size = -(-len(xs) // parts)
    return [xs[i : i + size] for i in range(0, len(xs), size)]


def scan_records(
    spec: GroupPointSpec,
    lo: int,
    hi: int,
    ells: Sequence[int] = (),
    threads: int = 1,
    ec_method: str = "naive",
) -> list[ReductionRecord]:
    """One record per prime in [lo, hi], in ascending order."""
    primes = primes_in_range(lo, hi)
    if not primes:
        raise ValueError(f"no primes in [{lo}, {hi}]")
    if threads <= 1 or len(primes) < 2:
        return _chunk_records(spec, primes, ells, ec_method)
    chunks = _split(primes, threads)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_chunk_records, [spec] * len(chunks), chunks, [ells] * len(chunks), [ec_method] * len(chunks))
        return [r for part in parts for r in part]


@dataclass(frozen=True)
class DensityCounter:
    name: str
    hits: int
    total: int

    @property
    def estimate(self) -> float:
        return self.hits / self.total if self.total else math.nan

    def wilson(self, z: float = WILSON_Z) -> tuple[float, float]:
        """Wilson score interval for the hit proportion."""
        n = self.total
        if n == 0:
            return (0.0, 1.0)
        phat = self.hits / n
        denom = 1 + z * z / n
        centre = (phat + z * z / (2 * n)) / denom
        half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
        lo = 0.0 if self.hits == 0 else max(0.0, centre - half)
        hi = 1.0 if self.hits == n else min(1.0, centre + half)
        return (lo, hi)

    @property
    def lower(self) -> float:
        return self.wilson()[0]

    def __str__(self):
        lo, hi = self.wilson()
        return f"{self.name}: {self.hits}/{self.total} = {self.estimate:.5f}  [95% Wilson {lo:.5f}, {hi:.5f}]"


@dataclass(frozen=True)
class DensityRequest:
    """One density measurement; ``kind`` is valuation, joint, multiple or coprime.

    For ``multiple``, ``over="factors"`` asks m to divide the order of every
    factor, ``over="point"`` only the order of R itself.
    """

    kind: str
    m: Optional[int] = None
    m_list: tuple[int, ...] = ()
    ells: tuple[int, ...] = ()
    threshold: float = 0.0
    over: str = "factors"

    @property
    def name(self) -> str:
        if self.kind == "joint":
            target = "m=(" + ",".join(map(str, self.m_list)) + ")"
        else:
            target = f"m={self.m}"
        s = f" S={{{','.join(map(str, self.ells))}}}" if self.ells else ""
        over = " over=point" if self.kind == "multiple" and self.over == "point" else ""
        return f"{self.kind} {target}{s}{over}"


def check_density_request(spec: GroupPointSpec, req: DensityRequest) -> None:
    """Refuse requests whose hypotheses fail; these are never internal errors."""
    if req.kind == "valuation":
        n = predicted_nr(spec)
        if req.m is None or req.m <= 0 or req.m % n:
            raise HypothesisError(f"valuation density needs m > 0 to be a multiple of n_R = {n}; got m = {req.m}")
        if not req.ells:
            raise HypothesisError("valuation density needs a nonempty finite set S of primes")
    elif req.kind == "joint":
        if not is_independent(spec):
            raise HypothesisError("joint valuation density needs an independent point (closure of Z.R equal to G)")
        if len(req.m_list) != len(spec.factors):
            raise HypothesisError(f"joint density needs one target per factor ({len(spec.factors)}), got {len(req.m_list)}")
        if any(m == 0 for m in req.m_list):
            raise HypothesisError("joint density targets must be nonzero")
        if not req.ells:
            raise HypothesisError("joint density needs a nonempty finite set S of primes")
    elif req.kind == "multiple":
        if req.m is None or req.m < 1:
            raise HypothesisError("multiple-of-m density needs m >= 1")
        if req.over not in ("factors", "point"):
            raise ValueError(f"over must be 'factors' or 'point', got {req.over!r}")
    elif req.kind == "coprime":
        n = predicted_nr(spec)
        if n != 1:
            raise HypothesisError(f"coprime-order density needs a connected closure (n_R = 1); here n_R = {n}")
        if not req.m:
            raise HypothesisError("coprime-order density needs m != 0")
    else:
        raise ValueError(f"unknown density kind {req.kind!r}")
    if spec.is_torsion():
        raise HypothesisError("densities are measured for points of infinite order only")


def _hit(req: DensityRequest, rec: ReductionRecord) -> bool:
    if req.kind == "valuation":
        return all(valuation(rec.combined_order, ell) == valuation(req.m, ell) for ell in req.ells)
    if req.kind == "joint":
        return all(
            valuation(o, ell) == valuation(abs(m), ell)
            for o, m in zip(rec.factor_orders, req.m_list)
            for ell in req.ells
        )
    if req.kind == "multiple":
        if req.over == "point":
            return rec.combined_order % req.m == 0
        return all(o % req.m == 0 for o in rec.factor_orders)
    return math.gcd(rec.combined_order, req.m) == 1


def count_density(req: DensityRequest, records: Iterable[ReductionRecord], burn_in: int = 0) -> DensityCounter:
    hits = total = 0
    for rec in records:
        if rec.good and rec.p >= burn_in:
            total += 1
            hits += _hit(req, rec)
    return DensityCounter(req.name, hits, total)


def measure_density(
    spec: GroupPointSpec,
    req: DensityRequest,
    lo: int,
    hi: int,
    burn_in: Optional[int] = None,
    records: Optional[Sequence[ReductionRecord]] = None,
    **scan_kw,
) -> DensityCounter:
    check_density_request(spec, req)
    if records is None:
        records = scan_records(spec, lo, hi, **scan_kw)
    else:
        records = [r for r in records if lo <= r.p <= hi]
    return count_density(req, records, lo if burn_in is None else burn_in)


def density_valuation(spec, m, S, lo, hi, **kw) -> DensityCounter:
    """Primes where v_l(order) = v_l(m) for every l in S."""
    return measure_density(spec, DensityRequest("valuation", m=m, ells=tuple(sorted(S))), lo, hi, **kw)


def density_joint(spec, m_list, S, lo, hi, **kw) -> DensityCounter:
    """Primes where v_l(order of factor i) = v_l(m_i) for every factor i and l in S."""
    return measure_density(spec, DensityRequest("joint", m_list=tuple(m_list), ells=tuple(sorted(S))), lo, hi, **kw)


def density_multiple(spec, m, lo, hi, over="factors", **kw) -> DensityCounter:
    """Primes where m divides the order of every factor (or of R, with over="point")."""
    return measure_density(spec, DensityRequest("multiple", m=m, over=over), lo, hi, **kw)


def density_coprime(spec, m, lo, hi, **kw) -> DensityCounter:
    """Primes where the order of R is coprime to m."""
    return measure_density(spec, DensityRequest("coprime", m=m), lo, hi, **kw)


@dataclass(frozen=True)
class ScanSummary:
    lo: int
    hi: int
    burn_in: int
    good_count: int
    skipped: tuple[tuple[int, str], ...]
    running_gcd: int
    gcd_stabilized_at: int
    histograms: dict[int, dict[int, int]]
    exceptions: tuple[int, ...]
    density_counters: dict[str, DensityCounter] = field(default_factory=dict)
    records: tuple[ReductionRecord, ...] = field(default=(), repr=False)

    @property
    def range(self) -> tuple[int, int]:
        return (self.lo, self.hi)


def summarize(
    records: Sequence[ReductionRecord],
    lo: int,
    hi: int,
    burn_in: int,
    ells: Sequence[int] = (),
    densities: Sequence[DensityCounter] = (),
) -> ScanSummary:
    """Fold records (ascending p) into a summary.

    The gcd and histograms use good primes p >= burn_in.  ``exceptions`` lists
    good primes below burn_in whose order is not a multiple of the final gcd.
    """
    g, stabilized = 0, None
    hist: dict[int, dict[int, int]] = {ell: {} for ell in sorted(set(ells))}
    good = 0
    for rec in records:
        if not rec.good or rec.p < burn_in:
            continue
        good += 1
        new = math.gcd(g, rec.combined_order)
        if new != g:
            g, stabilized = new, rec.p
        for ell in hist:
            v = valuation(rec.combined_order, ell)
            hist[ell][v] = hist[ell].get(v, 0) + 1
    if not good:
        raise ValueError(f"no good primes in [{max(lo, burn_in)}, {hi}]")
    exceptions = tuple(r.p for r in records if r.good and r.p < burn_in and r.combined_order % g)
    return ScanSummary(
        lo=lo,
        hi=hi,
        burn_in=burn_in,
        good_count=good,
        skipped=tuple((r.p, r.status) for r in records if not r.good),
        running_gcd=g,
        gcd_stabilized_at=stabilized,
        histograms={ell: dict(sorted(h.items())) for ell, h in hist.items()},
        exceptions=exceptions,
        density_counters={c.name: c for c in densities},
        records=tuple(records),
    )


def run_scan(
    spec: GroupPointSpec,
    lo: int,
    hi: int,
    burn_in: Optional[int] = None,
    ells: Sequence[int] = (),
    threads: int = 1,
    ec_method: str = "naive",
    densities: Sequence[DensityRequest] = (),
) -> ScanSummary:
    """Sweep the primes of [lo, hi]; gcd taken over good primes p >= burn_in."""
    burn_in = lo if burn_in is None else burn_in
    if not lo <= burn_in <= hi:
        raise ValueError(f"need lo <= burn_in <= hi, got {lo}, {burn_in}, {hi}")
    if lo < 2:
        raise ValueError("prime range must start at 2 or above")
    if spec.is_torsion():
        raise HypothesisError("R has finite order; the gcd characterization is stated for points of infinite order")
    for req in densities:
        check_density_request(spec, req)
    ells = tuple(sorted(set(ells)))
    records = scan_records(spec, lo, hi, ells, threads, ec_method)
    counters = [count_density(req, records, burn_in) for req in densities]
    return summarize(records, lo, hi, burn_in, ells, counters)
