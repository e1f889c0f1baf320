"""Numerical laboratory for nodal sets of Laplace eigenfunctions.

Eigenfunctions on the flat tori and the round sphere, doubling indices of
eigenfunctions and their harmonic lifts, the subdivision cascade, nodal-set
extraction and the experiment runner.
"""
from .cascade import (CascadeParams, CascadeReport, binomial_group_sizes, good_cube_fraction,
                      lln_j0, lln_tail, run_cascade)
from .doubling import (DoublingParams, check_linfty_estimate, check_monotonicity, doubling_index,
                       doubling_indices, tilde_index, tilde_indices, verify_subdivision_lemma)
from .eigen import (Eigenfunction, LiftedFunction, TrigPolynomial, eigenvalue_list, lift,
                    nearest_eigenvalue, product_mode, sectoral, synth_random)
from .errors import (ChartError, MassUnderflowError, NodalLabError, PreconditionError,
                     QuadratureError)
from .geometry import BallSpec, CubeSpec, Manifold, dilate, subdivide
from .nodal import (NodalMeasure, density_radius, extract_nodal_2d, extract_nodal_3d,
                    local_lower_bound_check, sign_ball_search)
from .quad import QuadratureSpec, integrate_sq, sup_abs
from .runner import ExperimentConfig, fit_exponent, load_config, sweep_nodal_measure
from .wavescale import (WavescaleParams, check_gradient_bound, check_harnack_corollary,
                        check_sided_sup, check_weak_max)

__version__ = "0.1.0"
