"""Homotopy of nanowords and nanophrases: moves, invariants and decomposition."""

from .core import (Nanomultiphrase, Nanophrase, canonical_key, canonicalize, chi,
                   component_word, empty_phrase, is_isomorphic, nanoword, project_out, subphrase)
from .decompose import (DecomposedPhrase, ReducedClass, compare_reduced, complete_invariant,
                        gamma, hr_report, omega, psi, reduce_fully, split_by_factor,
                        symmetry_obstruction)
from .errors import *  # noqa: F401,F403
from .hdt import (ALPHA_F, ALPHA_G, UNIT, Factorization, HomotopyDataTriple, is_factor,
                  prime_factorize, product, product_many)
from .invariants import (fukunaga_so, linking_matrix, u_invariant, u_realizability_check,
                         u_to_v, v_invariant)
from .rewrite import (Decision, MoveSite, SearchBudget, apply_move, bfs_equivalent,
                      decide_equal, decide_reducible, enumerate_moves, normal_form_empty_S)
from .textio import parse_multiphrase, parse_phrase, parse_triple, render_phrase, render_triple

__version__ = "0.1.0"
