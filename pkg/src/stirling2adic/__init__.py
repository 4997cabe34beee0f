"""Exact 2-adic valuations of Stirling numbers of the second kind.

Modular and exact engines, closed-form valuation predictors, deterministic
sweep verification, and a scanner for the open Mersenne-shaped difference
case.
"""

from ._version import __version__
from .base2 import (
    BinaryProfile,
    Valuation,
    brute_force_J,
    ceil_log2,
    count_J,
    delta_conjecture,
    delta_theorem,
    digit_additive,
    is_power_of_two,
    kummer_binomial_val,
    legendre_factorial_val,
    mersenne_power_val,
    nu2,
    nu2_int,
    s2,
    s2_scaled_difference,
    theta,
)
from .bell import PolyMod, bell_poly, junod_check
from .engine import (
    PrecisionPolicy,
    Residue,
    check_convolution,
    check_symmetric_identity,
    stirling_exact,
    stirling_explicit_mod2,
    stirling_mod2,
    stirling_row_mod2,
    stirling_rows_mod2,
    val_stirling,
    val_stirling_difference,
)
from .errors import DomainError, PrecisionError, ResourceCapError
from .predictors import (
    Prediction,
    f_conjectured,
    predict_val,
    predict_val_difference,
    predict_val_shifted_power,
    predict_val_shifted_triple,
    predict_val_theta,
)
from .verify import (
    SweepConfig,
    SweepReport,
    check_diff_congruence,
    cross_validate,
    run_sweep,
    scan_conjecture_mersenne,
    sweep_targets,
)

__all__ = [
    "__version__",
    "BinaryProfile",
    "Valuation",
    "Residue",
    "PrecisionPolicy",
    "PolyMod",
    "Prediction",
    "SweepConfig",
    "SweepReport",
    "DomainError",
    "PrecisionError",
    "ResourceCapError",
    "nu2",
    "nu2_int",
    "s2",
    "ceil_log2",
    "is_power_of_two",
    "legendre_factorial_val",
    "kummer_binomial_val",
    "digit_additive",
    "s2_scaled_difference",
    "count_J",
    "brute_force_J",
    "mersenne_power_val",
    "theta",
    "delta_theorem",
    "delta_conjecture",
    "stirling_exact",
    "stirling_mod2",
    "stirling_explicit_mod2",
    "stirling_row_mod2",
    "stirling_rows_mod2",
    "val_stirling",
    "val_stirling_difference",
    "check_convolution",
    "check_symmetric_identity",
    "bell_poly",
    "junod_check",
    "predict_val",
    "predict_val_shifted_power",
    "predict_val_shifted_triple",
    "predict_val_difference",
    "predict_val_theta",
    "f_conjectured",
    "run_sweep",
    "sweep_targets",
    "scan_conjecture_mersenne",
    "check_diff_congruence",
    "cross_validate",
]
