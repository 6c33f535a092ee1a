"""Log-price grid and implicit upwinded finite-difference operator"""

from .grid import SpatialGrid, build_grid, truncation_half_width, DEFAULT_K_STD
from .operator import (TridiagonalOperator, alpha, beta, assemble_operator,
                       apply_inverse, inverse_norm_bound)

__all__ = ['SpatialGrid', 'build_grid', 'truncation_half_width', 'DEFAULT_K_STD',
           'TridiagonalOperator', 'alpha', 'beta', 'assemble_operator',
           'apply_inverse', 'inverse_norm_bound']
