"""Toolkit for designing rational filter functions for Hermitian interior
eigenvalue computation: weighted least-squares fitting, quasi-Newton
minimization with box and shape constraints, convergence-rate analysis,
algorithmic weight design, and a desk-scale subspace-iteration simulator."""

from .filters import (
    FilterDomainError,
    RationalFilter,
    SearchInterval,
    builtin_filter,
    builtin_filter_names,
    canonicalize,
    gauss_legendre_filter,
    load_filter,
    save_filter,
    worst_case_condition_number,
)
from .loss import SliseObjective, from_real, to_real
from .weights import StepWeightFunction, builtin_weight, builtin_weight_names

__all__ = [
    "FilterDomainError",
    "RationalFilter",
    "SearchInterval",
    "SliseObjective",
    "StepWeightFunction",
    "builtin_filter",
    "builtin_filter_names",
    "builtin_weight",
    "builtin_weight_names",
    "canonicalize",
    "from_real",
    "gauss_legendre_filter",
    "load_filter",
    "save_filter",
    "to_real",
    "worst_case_condition_number",
]

__version__ = "0.1.0"
