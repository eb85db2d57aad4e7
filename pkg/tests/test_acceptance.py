"""Exit criteria, each at its stated size and tolerance.

Every test records a PASS/FAIL line shown in pytest's terminal summary.
"""

import io
import itertools
import math
import random
import time

import pytest

from nrscan.cli import EXIT_OK, cmd_predict, cmd_verify, records_csv
from nrscan.config import parse_config
from nrscan.ecurve import (
    CurveQ,
    add_fp,
    add_q,
    classify_point,
    group_order_fp,
    point,
    point_order_fp,
    reduce_point,
)
from nrscan.intlin import IntLattice, determinant, left_kernel, snf_divisors
from nrscan.mulgrp import ONE, FactoredRational, evaluate_relation, exponent_matrix, factor_rational, relation_lattice
from nrscan.predictor import EllipticFactor, GroupPointSpec, TorusCoord
from nrscan.primes import primes_in_range, valuation
from nrscan.scan import density_multiple, density_valuation, run_scan, scan_records

from conftest import brute_left_kernel, torus

TORUS_CFG = """
[group]
gm -4
gm 2
[scan]
range = 3..100000
burn_in = 10
ells = 2
"""

BLOCK_CFG = """
[group]
ec a=-25 b=0 px=-4 py=6 block=B1
ec a=-25 b=0 px=-4 py=6 tx=0 ty=0 block=B1
[scan]
range = 7..10000
burn_in = 20
"""


@pytest.fixture
def criterion(record_property):
    def record(num, label, ok, detail=""):
        record_property("criterion", num)
        record_property("label", label)
        record_property("detail", detail)
        assert ok, f"criterion {num} failed: {detail}"

    return record


def brute_point_order(a, p, P):
    t, Q = 1, P
    while Q is not None:
        Q = add_fp(a, p, Q, P)
        t += 1
    return t


def brute_count(a, b, p):
    return 1 + sum((y * y - x**3 - a * x - b) % p == 0 for x in range(p) for y in range(p))


_verify_cache = {}


def verify(text):
    if text not in _verify_cache:
        t0 = time.perf_counter()
        code, rep = cmd_verify(parse_config(text), out=io.StringIO())
        _verify_cache[text] = (code, rep, time.perf_counter() - t0)
    return _verify_cache[text]


def test_criterion_01_torus_flagship(criterion):
    tup = [factor_rational(-4), factor_rational(2)]
    brute = [v for v in itertools.product(range(-10, 11), repeat=2) if evaluate_relation(tup, v) == ONE]
    shortest = min((v for v in brute if any(v)), key=lambda v: v[0] ** 2 + v[1] ** 2)
    oracle_nr = math.gcd(*shortest)
    lat = relation_lattice(tup)
    box_agrees = all(lat.contains(v) == (v in brute) for v in itertools.product(range(-10, 11), repeat=2))
    predicted = cmd_predict(parse_config(TORUS_CFG), out=io.StringIO()).predicted_nr
    code, rep, secs = verify(TORUS_CFG)
    ok = oracle_nr == 2 and box_agrees and predicted == 2 and rep.empirical_gcd == 2 and code == EXIT_OK and secs < 10
    criterion(1, "torus (-4,2): n_R = 2 = gcd over [3,1e5], exit 0, < 10 s", ok,
              f"oracle={oracle_nr} predicted={predicted} gcd={rep.empirical_gcd} exit={code} t={secs:.2f}s")


def test_criterion_02_independence_baseline(criterion):
    s = run_scan(torus(2), 3, 7, 3)
    orders = [r.combined_order for r in s.records]
    ok = orders == [2, 4, 3] and s.running_gcd == 1 and s.gcd_stabilized_at <= 7
    criterion(2, "torus (2,): gcd reaches 1 by p = 7", ok, f"orders at 3,5,7 = {orders}, gcd={s.running_gcd}")


def test_criterion_03_elliptic_baseline(criterion):
    E = CurveQ(0, -2)
    P = point(3, 5)
    cls = classify_point(E, P)
    orders = {}
    for p in (5, 7):
        Pp = reduce_point(E, P, p)
        N = brute_count(0, -2, p)
        Nfast = group_order_fp(E, p)
        orders[p] = (point_order_fp(E, Pp, p, Nfast), brute_point_order(0, p, Pp), N == Nfast)
    t0 = time.perf_counter()
    s = run_scan(GroupPointSpec([EllipticFactor(E, P)]), 5, 10**4)
    secs = time.perf_counter() - t0
    ok = (
        not cls.is_torsion
        and orders[5] == (2, 2, True)
        and orders[7] == (7, 7, True)
        and s.running_gcd == 1
        and secs < 60
    )
    criterion(3, "y^2=x^3-2, P=(3,5): infinite order, orders 2 and 7, gcd 1", ok,
              f"class={cls} ord5={orders[5][0]} ord7={orders[7][0]} gcd={s.running_gcd} t={secs:.2f}s")


def test_criterion_04_translate_flagship(criterion):
    predicted = cmd_predict(parse_config(BLOCK_CFG), out=io.StringIO()).predicted_nr
    code, rep, secs = verify(BLOCK_CFG)
    ok = predicted == 2 and rep.empirical_gcd == 2 and code == EXIT_OK
    criterion(4, "y^2=x^3-25x block (P, P+X): n_R = 2 = gcd over [7,1e4], exit 0", ok,
              f"predicted={predicted} gcd={rep.empirical_gcd} exit={code} t={secs:.2f}s")


def test_criterion_05_valuation_density(criterion):
    recs = scan_records(torus(2), 3, 10**6)
    whole = density_valuation(torus(2), 4, {2}, 3, 10**6, records=recs)
    first = density_valuation(torus(2), 4, {2}, 3, 5 * 10**5, records=recs)
    second = density_valuation(torus(2), 4, {2}, 5 * 10**5, 10**6, records=recs)
    gap = abs(first.estimate - second.estimate)
    ok = whole.lower > 0.01 and gap < 0.02
    criterion(5, "torus (2,), m=4, S={2}, p <= 1e6: Wilson lower > 0.01, window gap < 0.02", ok,
              f"lower={whole.lower:.4f} windows {first.estimate:.4f} / {second.estimate:.4f} gap={gap:.4f}")


def test_criterion_06_nr_divides(criterion):
    out = []
    for cfg in (TORUS_CFG, BLOCK_CFG):
        _, rep, _ = verify(cfg)
        n = rep.computed_nr
        bad = [r.p for r in rep.summary.records if r.good and r.p >= rep.summary.burn_in and r.combined_order % n]
        out.append((n, len(bad), len(rep.violations)))
    ok = all(b == 0 and v == 0 for _, b, v in out)
    criterion(6, "n_R divides every order for good p >= burn_in (specs 1 and 4)", ok,
              f"violations: torus={out[0][1]} block={out[1][1]}")


def test_criterion_07_multiple_density(criterion):
    spec = GroupPointSpec([TorusCoord(factor_rational(2)), EllipticFactor(CurveQ(0, -2), point(3, 5))])
    c = density_multiple(spec, 6, 5, 10**5)
    criterion(7, "2 in G_m with (3,5) on y^2=x^3-2, m=6, p <= 1e5: lower > 0.005", c.lower > 0.005, str(c))


def test_criterion_08_property_suites(criterion):
    violations = {}
    # Hasse bound and point order | group order on both curves of criteria 3 and 4
    hasse = divides = 0
    for E, P in ((CurveQ(0, -2), point(3, 5)), (CurveQ(-25, 0), point(-4, 6))):
        for p in primes_in_range(5, 10**4):
            if not E.has_good_reduction(p):
                continue
            N = group_order_fp(E, p)
            hasse += (N - p - 1) ** 2 > 4 * p
            divides += N % point_order_fp(E, reduce_point(E, P, p), p, N) != 0
    violations["hasse"] = hasse
    violations["point|group"] = divides
    # multiplicative orders divide p - 1; v_l(lcm) = max on every record
    _, rep, _ = verify(TORUS_CFG)
    md = vl = 0
    for r in rep.summary.records:
        if r.good:
            md += any((r.p - 1) % o for o in r.factor_orders)
            for ell in (2, 3, 5):
                vl += valuation(r.combined_order, ell) != max(valuation(o, ell) for o in r.factor_orders)
    _, brep, _ = verify(BLOCK_CFG)
    for r in brep.summary.records:
        if r.good:
            vl += valuation(r.combined_order, 2) != max(valuation(o, 2) for o in r.factor_orders)
    violations["ord|p-1"] = md
    violations["v_l(lcm)=max"] = vl
    # homomorphism on (P, X, P + X) for 20 good primes
    E, P, X = CurveQ(-25, 0), point(-4, 6), point(0, 0)
    S = add_q(E, P, X)
    hom = 0
    primes = [p for p in primes_in_range(7, 500) if E.has_good_reduction(p)][:20]
    for p in primes:
        hom += add_fp(E.a % p, p, reduce_point(E, P, p), reduce_point(E, X, p)) != reduce_point(E, S, p)
    violations["homomorphism"] = hom
    ok = len(primes) == 20 and not any(violations.values())
    criterion(8, "Hasse, ord | p-1, point | group order, v_l(lcm) rule, reduction homomorphism", ok,
              ", ".join(f"{k}={v}" for k, v in violations.items()))


def test_criterion_09_determinism(criterion):
    cfg = parse_config(TORUS_CFG)
    summaries, csvs = [], []
    for threads in (1, 2, 8):
        s = run_scan(cfg.spec, cfg.lo, cfg.hi, cfg.burn_in, cfg.ells, threads=threads)
        summaries.append(s)
        csvs.append(records_csv(s.records, len(cfg.spec.factors), cfg.ells).encode())
    ok = summaries[0] == summaries[1] == summaries[2] and csvs[0] == csvs[1] == csvs[2]
    criterion(9, "summary and CSV byte-identical for threads 1, 2, 8", ok, f"csv bytes={len(csvs[0])}")


def test_criterion_10_oracle_equivalence(criterion):
    rng = random.Random(20261014)
    bound = 4
    mismatches = 0
    for _ in range(100):
        k = rng.randint(1, 3)
        tup = [
            FactoredRational.from_map(rng.randint(0, 1), {q: rng.randint(-3, 3) for q in (2, 3, 5)})
            for _ in range(k)
        ]
        box = list(itertools.product(range(-bound, bound + 1), repeat=k))
        lat = relation_lattice(tup)
        brute_rel = {v for v in box if evaluate_relation(tup, v) == ONE}
        M = exponent_matrix(tup)
        K0 = left_kernel(M)
        rows = M.tolist() if M.ncols else [[0] for _ in range(k)]
        brute_ker = set(brute_left_kernel(rows, bound))
        for v in box:
            mismatches += lat.contains(v) != (v in brute_rel)
            mismatches += K0.contains(v) != (v in brute_ker)
    det_bad = 0
    seen = 0
    while seen < 100:
        A = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
        d = determinant(A)
        if d:
            seen += 1
            det_bad += math.prod(snf_divisors(A)) != abs(d)
    ok = mismatches == 0 and det_bad == 0
    criterion(10, "left_kernel / relation_lattice vs exhaustive search; SNF product = |det|", ok,
              f"membership mismatches={mismatches}, det mismatches={det_bad}")
