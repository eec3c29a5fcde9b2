"""Vilenkin systems and entropy-number estimates for multiplier operators."""
from __future__ import annotations

__version__ = "0.1.0"

from ._accel import backend, set_backend
from .bounds import (
    BoundReport,
    chi_k,
    constants,
    levy_mean_estimate,
    lower_bound_expr,
    sup_A,
    upper_bound_expr,
)
from .entropy_oracle import (
    BodySpec,
    cover_and_pack,
    entropy_estimate,
    mc_volume_ratio,
    urysohn_check,
)
from .errors import BracketError, InputError, PrecisionError, ResourceError
from .index_lattice import MultiIndex, NormMode, count_A, layer_enumerate, layer_table, proposition_check
from .multiplier import K_eps_check, MultiplierSpec, dyadic_levels
from .product_system import CoefficientVector, LayerWindow, ProductSpec, lp_norm, spherical_partial_sum
from .radix_group import ParityClass, RadixSequence, classify, neg, oplus, ominus, parse_radix
from .vilenkin_basis import OrderingMode, psi, real_basis, vilenkin_table

__all__ = [
    "BodySpec", "BoundReport", "BracketError", "CoefficientVector", "InputError", "K_eps_check",
    "LayerWindow", "MultiIndex", "MultiplierSpec", "NormMode", "OrderingMode", "ParityClass",
    "PrecisionError", "ProductSpec", "RadixSequence", "ResourceError", "backend", "chi_k",
    "classify", "constants", "count_A", "cover_and_pack", "dyadic_levels", "entropy_estimate",
    "layer_enumerate", "layer_table", "levy_mean_estimate", "lower_bound_expr", "lp_norm",
    "mc_volume_ratio", "neg", "ominus", "oplus", "parse_radix", "proposition_check", "psi",
    "real_basis", "set_backend", "spherical_partial_sum", "sup_A", "upper_bound_expr",
    "urysohn_check", "vilenkin_table",
]
