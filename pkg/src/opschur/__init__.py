"""Operator-valued block matrices, Schur products and operator-valued measures on the circle."""
from . import block_matrix, gallery, measures, operator_core, toeplitz, torus
from .block_matrix import opnorm, schur_product
from .operator_core import DimensionError, TensorElement, rank_one, spectral_norm, trace_norm

__version__ = "0.1.0"
