"""Numerical toolkit for weighted grand Herz-Morrey spaces with variable exponents.

Grids and sampled functions, variable-exponent Lebesgue norms, Muckenhoupt-type
weight constants, grand Herz-Morrey norms, maximal and size-condition operators,
Littlewood-Paley filter banks, Triebel-Lizorkin type norms, and a verification
harness (``herzlab`` CLI) that estimates the constants of the associated
inequalities on a test-function corpus.
"""

from .grid import GridSpec, SampledFunction, make_grid
from .exponents import ExponentFunction, Weight, parse_exponent, parse_weight
from .lebesgue import luxemburg_norm, weighted_norm
from .herz import HerzParams, grand_herz_morrey_norm, make_herz_params, split_norm
from .report import ConstantReport

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "SampledFunction",
    "make_grid",
    "ExponentFunction",
    "Weight",
    "parse_exponent",
    "parse_weight",
    "luxemburg_norm",
    "weighted_norm",
    "HerzParams",
    "make_herz_params",
    "grand_herz_morrey_norm",
    "split_norm",
    "ConstantReport",
]
