"""Invariant boundary conditions for one-dimensional Gaussian Markov chains."""
from .errors import AssumptionViolation, EigenbcError, NumericalFailure, ValidationError
from .invariant import (InvariantBoundaries, dirichlet_solve, free_energy, invariant_boundaries,
                        transfer_matrices, verify_invariance)
from .numkit import BlockToeplitz, circle_quadrature, is_hermitian_pd, numerical_rank
from .process import (ChainLaw, PeriodicChainLaw, assemble_chain, conditional_law,
                      covariance_toeplitz, periodic_chain, sample)
from .symbol import (SymbolSpectrum, compute_spectrum, eval_phi, flip, fourier_coefficient,
                     inverse_phi)
from .szego import (TrigPolySymbol, asymptotic_report, block_reduce, corrected_toeplitz,
                    plain_toeplitz_det)
from .weights import (BoundaryWeight, GaussianWeight, act_left, act_right, glue,
                      make_boundary_weight, make_gaussian_weight, normalize_pair, pair,
                      partition_function, schur_power)

__version__ = "0.1.0"
