"""Component counts of algebraic subgroups generated by rational points, and
the orders of their reductions modulo primes."""

from .ecurve import CurveQ, classify_point, group_order_fp, point_order_fp, reduce_point
from .mulgrp import FactoredRational, factor_rational, mult_order_mod_p, relation_lattice, torus_report
from .predictor import (
    Assumptions,
    EllipticFactor,
    GroupPointSpec,
    TorusCoord,
    UnsupportedConfiguration,
    is_independent,
    predict,
    predicted_nr,
)
from .scan import (
    DensityCounter,
    HypothesisError,
    density_coprime,
    density_joint,
    density_multiple,
    density_valuation,
    reduction_order,
    run_scan,
)

__version__ = "0.1.0"
