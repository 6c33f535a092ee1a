"""Heston model parameters, coordinate transforms and payoffs"""

from .params import HestonParams, to_transformed, from_transformed, mu_x, mu_y
from .payoff import Payoff, PayoffKind, payoff_transformed

__all__ = ['HestonParams', 'to_transformed', 'from_transformed', 'mu_x', 'mu_y',
           'Payoff', 'PayoffKind', 'payoff_transformed']
