"""Classical and quantum oscillator with mass m(x) = m0/(1+gamma x)^2."""

__version__ = "0.1.0"

from .errors import (ConfigError, ConvergenceError, DomainError, GridTooCoarse, MomentDivergenceError,
                     NonNormalizableError, OpenRegimeError, PdmError, PoleError, RegimeError, UnboundError,
                     WallCollisionError)
from .params import ModelParams
from .classical import (ClassicalState, DeformedState, OrbitSpec, Regime, Trajectory, classical_density,
                        classical_moments, classify_orbit, deformed_phase, exact_momentum, exact_position,
                        exact_pseudomomentum, exact_trajectory, hamiltonian, morse_catalog, morse_hamiltonian,
                        orbit_residual, rk4_integrate, to_deformed, from_deformed)
from .quantum import (Eigenstate, GridWavefunction, bound_state_count, correspondence_check, eigenfunction,
                      energy_level, expectation_quadrature, expectation_suite, fd_diagonalize, nu_n,
                      uncertainty_report)
from .algebra import (OperatorOnGrid, ShapeChain, apply_operator, commutator_check, deformed_factorial,
                      en_plus_beta, ladder_coefficients, partner_potentials, psi_minus, psi_n_beta,
                      shape_invariance_remainder, su11_check)
from .coherent import (CatState, CoherentState, cat_overlap, cat_overlap_exact, cat_state, cs_dispersions,
                       cs_evolved_expectations, cs_frequency, cs_moments, cs_phase, cs_time_uncertainties,
                       cs_wavefunction)
from .special import assoc_laguerre, gauss_laguerre, log_gamma
