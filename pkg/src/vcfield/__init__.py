"""Stationary states, evolution, and virial diagnostics for variable-coefficient
semilinear scalar-field equations on the line."""

from .coeffs import (AdmissibilityReport, CoefficientField, check_orbital,
                     check_sign_conditions, check_vacuum_admissible, fit_decay,
                     make_coefficients, make_grid, transform_to_y)
from .driver import RunResult, run_simulation
from .evolve import (FieldState, Grid, SpongeProfile, Stepper, energy,
                     initial_data, stability_limit)
from .greensolve import (GreenOperator, JostPair, SteadyState,
                         build_green_operator, construct_steady_state,
                         greens_apply, solve_jost, verify_decay, wronskian)
from .potentials import (Potential, VacuumInfo, evolution_nonlinearity,
                         make_potential, nonlinear_remainder, vacuum_info)
from .virial import (VirialFrame, bilinear_B, fterm_check, make_frame,
                     psi_prime_check, sech_cross, sech_cross_rate, virial,
                     virial_rate, weighted_norms)

__version__ = "0.1.0"
