"""Payoff mollification for the convergence harness"""

from .mollifier import (MollifiedPayoff, mollify, extend, bump, kernel_weights,
                        DEFAULT_QUADRATURE)

__all__ = ['MollifiedPayoff', 'mollify', 'extend', 'bump', 'kernel_weights',
           'DEFAULT_QUADRATURE']
