"""Monte-Carlo verification oracle"""

from .simulator import (McConfig, McEstimate, simulate_terminal, mc_price, estimate,
                        block_generator, PATH_BLOCK)

__all__ = ['McConfig', 'McEstimate', 'simulate_terminal', 'mc_price', 'estimate',
           'block_generator', 'PATH_BLOCK']
