"""Critical exponents and length spectra of free-group representations in SL(2) and SL(3)."""

from .automaton import (GroupWord, LabeledGraph, builtin_f2_abc, builtin_f2_standard,
                        enumerate_cycles, evaluate_path, recurrent_subgraph,
                        validate_strong_markov, vertex_adjacency)
from .pants import FGParams, holonomy, is_admissible, shear_family, sl3_transfer_root
from .pressure import (NonPositiveWeight, ReducibleMatrix, perron_root, pressure_edge_weighted,
                       solve_exponent)
from .prox import NotProximal, cartan_projection, jordan_projection, separation_margin
from .rep import (Representation, approximating_exponents, brute_force_exponent,
                  busemann_depth_k_exponent, certify_separation, exponent_bounds,
                  periodic_exponent, thurston_estimate)
from .weyl import (CartanVector, Functional, functional_from_roots, functional_from_weights,
                   r_epsilon, r_vector)

__version__ = "0.1.0"

__all__ = [
    "GroupWord", "LabeledGraph", "builtin_f2_abc", "builtin_f2_standard", "enumerate_cycles",
    "evaluate_path", "recurrent_subgraph", "validate_strong_markov", "vertex_adjacency",
    "FGParams", "holonomy", "is_admissible", "shear_family", "sl3_transfer_root",
    "NonPositiveWeight", "ReducibleMatrix", "perron_root", "pressure_edge_weighted",
    "solve_exponent", "NotProximal", "cartan_projection", "jordan_projection", "separation_margin",
    "Representation", "approximating_exponents", "brute_force_exponent",
    "busemann_depth_k_exponent", "certify_separation", "exponent_bounds", "periodic_exponent",
    "thurston_estimate", "CartanVector", "Functional", "functional_from_roots",
    "functional_from_weights", "r_epsilon", "r_vector",
]
