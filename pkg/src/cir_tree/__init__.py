"""Recombining binomial lattice for the CIR variance process"""

from .tree import (CIRTree, node_value, jump_indices, jump_prob, build_tree,
                   forward_probabilities, chain_moment)

__all__ = ['CIRTree', 'node_value', 'jump_indices', 'jump_prob', 'build_tree',
           'forward_probabilities', 'chain_moment']
