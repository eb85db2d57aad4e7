import itertools

import pytest

from nrscan.ecurve import CurveQ, point
from nrscan.mulgrp import factor_rational
from nrscan.predictor import EllipticFactor, GroupPointSpec, TorusCoord


def torus(*values):
    return GroupPointSpec([TorusCoord(factor_rational(v)) for v in values])


def brute_left_kernel(M, bound):
    """All v with |v_i| <= bound and v.M = 0."""
    rows = len(M)
    cols = len(M[0]) if M else 0
    return [
        v
        for v in itertools.product(range(-bound, bound + 1), repeat=rows)
        if all(sum(v[i] * M[i][j] for i in range(rows)) == 0 for j in range(cols))
    ]


@pytest.fixture
def congruent_curve():
    """y^2 = x^3 - 25x with P = (-4, 6) of infinite order and X = (0, 0) of order 2."""
    return CurveQ(-25, 0), point(-4, 6), point(0, 0)


@pytest.fixture
def translate_block(congruent_curve):
    E, P, X = congruent_curve
    return GroupPointSpec([EllipticFactor(E, P, None, "B1"), EllipticFactor(E, P, X, "B1")])


@pytest.fixture
def mordell_spec():
    return GroupPointSpec([EllipticFactor(CurveQ(0, -2), point(3, 5))])


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call" or "test_acceptance" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" not in props:
                continue
            tag = "PASS" if outcome == "passed" else "FAIL"
            lines.append((props["criterion"], f"{tag}  {props['criterion']:>2}. {props.get('label', '')}  {props.get('detail', '')}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
