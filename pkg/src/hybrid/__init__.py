"""Hybrid tree / finite-difference pricer and its convergence harness"""

from .scheme import (SchemeConfig, ValueSurface, HybridScheme, build_operators,
                     terminal_surface, backward_step, price_surface, price)
from .convergence import (ConvergenceRow, ErrorDecomposition, convergence_study,
                          error_decomposition, observed_order)

__all__ = ['SchemeConfig', 'ValueSurface', 'HybridScheme', 'build_operators',
           'terminal_surface', 'backward_step', 'price_surface', 'price',
           'ConvergenceRow', 'ErrorDecomposition', 'convergence_study',
           'error_decomposition', 'observed_order']
