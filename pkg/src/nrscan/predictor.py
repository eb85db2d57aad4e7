"""Theoretical component count n_R for products of split tori and elliptic curves over Q.

A point R of G = G_m^k x E_1^{n_1} x ... is grouped into blocks: all torus
coordinates form one block, and elliptic factors sharing a ``block_id`` form
a block of points P + X_i on one curve (P fixed, X_i torsion).  Blocks on
pairwise non-isogenous curves do not interact, so the closure of Z.R is the
product of the block closures up to finite index and

    n_R = lcm(n_block for each block).

Block values:

* torus block: torsion order of Z^k / (relation lattice)
* elliptic block, P of infinite order: order of the point (X_i - X_1)_i, since
  the identity component is the diagonal copy of E
* elliptic block, P torsion: order of the (finite) block point itself
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .ecurve import CurveQ, PointQ, add_q, classify_point, sub_q, torsion_order
from .intlin import IntLattice
from .mulgrp import FactoredRational, TorusTupleReport, torus_report


class InvalidSpec(ValueError):
    """The factor list does not describe a point on the declared group."""


class UnsupportedConfiguration(Exception):
    """n_R is not computable for this configuration by the supported rules."""


@dataclass(frozen=True)
class TorusCoord:
    value: FactoredRational


@dataclass(frozen=True)
class EllipticFactor:
    curve: CurveQ
    base_point: PointQ
    translate: PointQ = None
    block_id: Optional[str] = None

    @property
    def point(self) -> PointQ:
        """The coordinate of R on this factor: base point plus translate."""
        return add_q(self.curve, self.base_point, self.translate)


FactorSpec = Union[TorusCoord, EllipticFactor]


@dataclass(frozen=True)
class Assumptions:
    """Structural hypotheses the library cannot check; echoed in every report."""

    non_isogenous: bool = False
    no_cm: bool = False

    def describe(self) -> list[str]:
        return [
            f"curves pairwise non-isogenous across blocks: {'asserted' if self.non_isogenous else 'not asserted'}",
            f"no CM: {'asserted' if self.no_cm else 'not asserted'}",
        ]


@dataclass(frozen=True)
class GroupPointSpec:
    factors: tuple[FactorSpec, ...]
    assumptions: Assumptions = field(default_factory=Assumptions)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidSpec("a group spec needs at least one factor")
        for i, f in enumerate(self.factors, 1):
            if isinstance(f, EllipticFactor):
                if f.base_point is None:
                    raise InvalidSpec(f"factor {i}: base point must be affine")
                if not f.curve.contains(f.base_point):
                    raise InvalidSpec(f"factor {i}: base point {_fmt(f.base_point)} is not on {f.curve}")
                if f.translate is not None:
                    if not f.curve.contains(f.translate):
                        raise InvalidSpec(f"factor {i}: translate {_fmt(f.translate)} is not on {f.curve}")
                    if not classify_point(f.curve, f.translate).is_torsion:
                        raise InvalidSpec(f"factor {i}: translate {_fmt(f.translate)} has infinite order")
            elif not isinstance(f, TorusCoord):
                raise InvalidSpec(f"factor {i}: unknown factor type {type(f).__name__}")

    @property
    def torus_coords(self) -> list[FactoredRational]:
        return [f.value for f in self.factors if isinstance(f, TorusCoord)]

    def elliptic_blocks(self) -> dict[str, list[EllipticFactor]]:
        """Elliptic factors grouped by block, in order of first appearance."""
        blocks: dict[str, list[EllipticFactor]] = {}
        for i, f in enumerate(self.factors):
            if isinstance(f, EllipticFactor):
                key = f.block_id if f.block_id is not None else f"#{i + 1}"
                blocks.setdefault(key, []).append(f)
        return blocks

    def is_torsion(self) -> bool:
        """True when R itself has finite order."""
        if not all(r.is_torsion() for r in self.torus_coords):
            return False
        return all(
            classify_point(f.curve, f.point).is_torsion
            for f in self.factors
            if isinstance(f, EllipticFactor) and f.point is not None
        )


def _fmt(P: PointQ) -> str:
    return "O" if P is None else f"({P[0]}, {P[1]})"


@dataclass(frozen=True)
class BlockPrediction:
    label: str
    n_components: int
    dimension: int
    detail: str


@dataclass(frozen=True)
class Prediction:
    n_r: int
    dimension: int
    independent: bool
    torus: Optional[TorusTupleReport]
    blocks: tuple[BlockPrediction, ...]
    assumptions: Assumptions

    @property
    def relation_lattice(self) -> Optional[IntLattice]:
        return self.torus.relation_lattice if self.torus else None


def _elliptic_block(label: str, factors: list[EllipticFactor]) -> BlockPrediction:
    E, P = factors[0].curve, factors[0].base_point
    for f in factors[1:]:
        if f.curve != E:
            raise UnsupportedConfiguration(f"block {label}: factors on different curves")
        if f.base_point != P:
            raise UnsupportedConfiguration(
                f"block {label}: factors with different base points (relations between "
                "distinct points of one curve are not supported)"
            )
    if not classify_point(E, P).is_torsion:
        X1 = factors[0].translate
        n = 1
        for f in factors[1:]:
            n = math.lcm(n, torsion_order(E, sub_q(E, f.translate, X1)))
        return BlockPrediction(label, n, 1, f"{len(factors)} translate(s) of an infinite-order point on {E}")
    n = 1
    for f in factors:
        n = math.lcm(n, torsion_order(E, f.point))
    return BlockPrediction(label, n, 0, f"torsion block on {E}")


def _check_blocks(spec: GroupPointSpec, blocks: dict[str, list[EllipticFactor]]) -> None:
    if len(blocks) < 2:
        return
    curves = [fs[0].curve for fs in blocks.values()]
    if len(set(curves)) < len(curves):
        raise UnsupportedConfiguration(
            "two elliptic blocks on the same curve; cross-block relations are not supported"
        )
    if not spec.assumptions.non_isogenous:
        raise UnsupportedConfiguration(
            "several elliptic blocks require the assertion that their curves are pairwise non-isogenous"
        )


def predict(spec: GroupPointSpec) -> Prediction:
    coords = spec.torus_coords
    torus = torus_report(coords) if coords else None
    blocks = spec.elliptic_blocks()
    _check_blocks(spec, blocks)
    preds = [_elliptic_block(label, fs) for label, fs in blocks.items()]
    n = math.lcm(torus.n_components if torus else 1, *(b.n_components for b in preds))
    dim = (torus.dimension if torus else 0) + sum(b.dimension for b in preds)
    independent = (
        (torus is None or torus.independent)
        and all(len(fs) == 1 and not classify_point(fs[0].curve, fs[0].point).is_torsion for fs in blocks.values())
    )
    return Prediction(n, dim, independent, torus, tuple(preds), spec.assumptions)


def predicted_nr(spec: GroupPointSpec) -> int:
    """Number of connected components of the closure of Z.R."""
    return predict(spec).n_r


def is_independent(spec: GroupPointSpec) -> bool:
    """Whether the closure of Z.R is all of G (R generates a free End-module)."""
    try:
        return predict(spec).independent
    except UnsupportedConfiguration:
        return False
