"""Line-oriented experiment configuration.

Example::

    [group]
    gm -4
    gm 2
    ec a=-25 b=0 px=-4 py=6 tx=0 ty=0 block=B1
    assume non_isogenous

    [scan]
    range = 3..100000
    burn_in = 10
    ells = 2, 3
    threads = 1
    ec_method = naive
    out = orders.csv
    expected_nr = 2

    [density]
    valuation m=4 S=2 threshold=0.01
    joint m=1,2 S=2
    multiple m=6 threshold=0.005
    multiple m=2 over=point
    coprime m=6

``#`` starts a comment.  Rationals may be written as ``-7/12``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .ecurve import CurveQ, SingularCurve
from .mulgrp import parse_rational
from .predictor import Assumptions, EllipticFactor, GroupPointSpec, InvalidSpec, TorusCoord
from .scan import DensityRequest

SECTIONS = ("group", "scan", "density")
ASSUMPTIONS = ("non_isogenous", "no_cm")
EC_KEYS = {"a", "b", "px", "py", "tx", "ty", "block"}


class ConfigError(ValueError):
    def __init__(self, msg: str, lineno: Optional[int] = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


@dataclass
class ExperimentConfig:
    spec: GroupPointSpec
    lo: Optional[int] = None
    hi: Optional[int] = None
    burn_in: Optional[int] = None
    ells: tuple[int, ...] = ()
    threads: int = 1
    ec_method: str = "naive"
    out: Optional[str] = None
    expected_nr: Optional[int] = None
    densities: list[DensityRequest] = field(default_factory=list)

    def require_range(self) -> tuple[int, int, int]:
        if self.lo is None:
            raise ConfigError("[scan] range is required for this command")
        return self.lo, self.hi, self.burn_in if self.burn_in is not None else self.lo


def _int(text: str, what: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{what}: expected an integer, got {text!r}", lineno) from None


def _int_list(text: str, what: str, lineno: int) -> tuple[int, ...]:
    items = [t for t in re.split(r"[,\s]+", text.strip().strip("{}")) if t]
    if not items:
        raise ConfigError(f"{what}: empty list", lineno)
    return tuple(_int(t, what, lineno) for t in items)


def _rational(text: str, what: str, lineno: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what}: expected a rational number, got {text!r}", lineno) from None


def _kv(tokens: list[str], lineno: int, allowed: set[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or not val:
            raise ConfigError(f"expected key=value, got {tok!r}", lineno)
        if key not in allowed:
            raise ConfigError(f"unknown field {key!r} (allowed: {', '.join(sorted(allowed))})", lineno)
        if key in out:
            raise ConfigError(f"field {key!r} given twice", lineno)
        out[key] = val
    return out


def _ec_factor(tokens: list[str], lineno: int) -> EllipticFactor:
    kv = _kv(tokens, lineno, EC_KEYS)
    for key in ("a", "b", "px", "py"):
        if key not in kv:
            raise ConfigError(f"ec factor is missing {key}=", lineno)
    if ("tx" in kv) != ("ty" in kv):
        raise ConfigError("a translate needs both tx= and ty=", lineno)
    try:
        E = CurveQ(_int(kv["a"], "a", lineno), _int(kv["b"], "b", lineno))
    except SingularCurve as exc:
        raise ConfigError(str(exc), lineno) from None
    P = (_rational(kv["px"], "px", lineno), _rational(kv["py"], "py", lineno))
    if not E.contains(P):
        raise ConfigError(f"point ({P[0]}, {P[1]}) is not on {E}", lineno)
    X = None
    if "tx" in kv:
        X = (_rational(kv["tx"], "tx", lineno), _rational(kv["ty"], "ty", lineno))
        if not E.contains(X):
            raise ConfigError(f"translate ({X[0]}, {X[1]}) is not on {E}", lineno)
    return EllipticFactor(E, P, X, kv.get("block"))


def _density(tokens: list[str], lineno: int) -> DensityRequest:
    kind = tokens[0]
    if kind not in ("valuation", "joint", "multiple", "coprime"):
        raise ConfigError(f"unknown density kind {kind!r}", lineno)
    kv = _kv(tokens[1:], lineno, {"m", "S", "threshold", "over"})
    if "m" not in kv:
        raise ConfigError(f"{kind} density needs m=", lineno)
    threshold = 0.0
    if "threshold" in kv:
        try:
            threshold = float(kv["threshold"])
        except ValueError:
            raise ConfigError(f"threshold: expected a number, got {kv['threshold']!r}", lineno) from None
    ells = _int_list(kv["S"], "S", lineno) if "S" in kv else ()
    if kind in ("valuation", "joint") and not ells:
        raise ConfigError(f"{kind} density needs S=", lineno)
    if kind == "joint":
        return DensityRequest("joint", m_list=_int_list(kv["m"], "m", lineno), ells=tuple(sorted(ells)), threshold=threshold)
    over = kv.get("over", "factors")
    if over not in ("factors", "point") or (over != "factors" and kind != "multiple"):
        raise ConfigError(f"over= takes factors or point and applies to multiple only, got {over!r}", lineno)
    return DensityRequest(kind, m=_int(kv["m"], "m", lineno), ells=tuple(sorted(ells)), threshold=threshold, over=over)


def parse_config(text: str) -> ExperimentConfig:
    section = None
    factors = []
    flags = set()
    scan: dict[str, tuple[str, int]] = {}
    densities = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[(\w+)\]", line)
        if m:
            section = m.group(1)
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise ConfigError("content before the first [section]", lineno)
        if section == "group":
            tokens = line.split()
            kind = tokens[0]
            if kind == "gm":
                if len(tokens) != 2:
                    raise ConfigError("gm takes exactly one nonzero rational", lineno)
                q = _rational(tokens[1], "gm", lineno)
                if q == 0:
                    raise ConfigError("gm coordinate must be a nonzero rational", lineno)
                factors.append(TorusCoord(parse_rational(tokens[1])))
            elif kind == "ec":
                factors.append(_ec_factor(tokens[1:], lineno))
            elif kind == "assume":
                for flag in tokens[1:]:
                    if flag not in ASSUMPTIONS:
                        raise ConfigError(f"unknown assumption {flag!r} (known: {', '.join(ASSUMPTIONS)})", lineno)
                    flags.add(flag)
            else:
                raise ConfigError(f"unknown factor kind {kind!r} (expected gm, ec or assume)", lineno)
        elif section == "scan":
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep:
                raise ConfigError(f"expected key = value in [scan], got {line!r}", lineno)
            scan[key] = (val, lineno)
        else:
            densities.append(_density(line.split(), lineno))
    if not factors:
        raise ConfigError("[group] declares no factors")
    try:
        spec = GroupPointSpec(tuple(factors), Assumptions(**{f: True for f in flags}))
    except InvalidSpec as exc:
        raise ConfigError(str(exc)) from None
    cfg = ExperimentConfig(spec=spec, densities=densities)
    for key, (val, lineno) in scan.items():
        if key == "range":
            m = re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", val)
            if not m:
                raise ConfigError(f"range: expected lo..hi, got {val!r}", lineno)
            cfg.lo, cfg.hi = int(m.group(1)), int(m.group(2))
            if cfg.lo < 2 or cfg.lo > cfg.hi:
                raise ConfigError(f"range: need 2 <= lo <= hi, got {val}", lineno)
        elif key == "burn_in":
            cfg.burn_in = _int(val, key, lineno)
        elif key == "ells":
            cfg.ells = tuple(sorted(set(_int_list(val, key, lineno))))
        elif key == "threads":
            cfg.threads = _int(val, key, lineno)
            if cfg.threads < 1:
                raise ConfigError("threads must be at least 1", lineno)
        elif key == "ec_method":
            if val not in ("naive", "bsgs"):
                raise ConfigError(f"ec_method must be naive or bsgs, got {val!r}", lineno)
            cfg.ec_method = val
        elif key == "out":
            cfg.out = val
        elif key == "expected_nr":
            cfg.expected_nr = _int(val, key, lineno)
        else:
            raise ConfigError(f"unknown [scan] key {key!r}", lineno)
    if cfg.burn_in is not None:
        if cfg.lo is None:
            raise ConfigError("burn_in given without range", scan["burn_in"][1])
        if not cfg.lo <= cfg.burn_in <= cfg.hi:
            raise ConfigError(f"burn_in must lie in the scan range {cfg.lo}..{cfg.hi}", scan["burn_in"][1])
    return cfg
