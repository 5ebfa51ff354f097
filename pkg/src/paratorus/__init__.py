"""paratorus: spectral paracontrolled calculus on the 2-torus.

Discrete Littlewood-Paley analysis, Bony paraproducts, banded
pseudodifferential symbols, white-noise renormalization constants, and an
IMEX integrator for the renormalized nonlocal quasilinear equation, with
coupled-seed Monte-Carlo convergence studies.
"""

__version__ = "0.1.0"

from .errors import BlowUpError, ConfigurationError, EllipticityError
from .grid import (Grid, TorusField, Trajectory, forward_transform,
                   heat_semigroup, inverse_laplacian, laplacian, multiply,
                   read_field, write_field)
from .littlewood_paley import (DyadicPartition, besov_norm, lp_project,
                               make_partition, parabolic_norm)
from .nonlinear import (NonlinearFn, clamped_linear_fn, constant_fn,
                        shifted_tanh_fn, tanh_fn)
from .noise import (CutoffProfile, NoiseRealization, make_X, mix_seed,
                    noise_regularity_report, regularize, sample_white_noise)
from .paraproducts import (TimeMollifier, corrector, merge_defect,
                           modified_para, modified_para_at, para,
                           paralin_remainder, resonant)
from .renorm import (CauchyStudy, EnhancedNoise, assemble_enhanced,
                     cauchy_study, commutator_gap, renorm_constant,
                     renormalized_product)
from .solver import (AblationStudy, ConvergenceStudy, ParacontrolledPair,
                     SolverConfig, convergence_study, counterterm_ablation,
                     exact_linear_solve, extract_paracontrolled,
                     solve_renormalized)
from .symbols import (Symbol, SymbolValidationError, apply_op, check_symbol,
                      commutator_para, gaussian_symbol, identity_symbol,
                      load_symbol, make_convolution_symbol,
                      make_modulated_symbol, oscillation_symbol,
                      positivity_certificate, power_symbol, save_symbol)
