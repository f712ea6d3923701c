"""Green-function solution of the FitzHugh-Nagumo system on a strip.

The linear operator

    L u = u_t - eps u_xx + a u + b int_0^t exp(-beta (t - s)) u(x, s) ds

has an explicit fundamental solution K0; its 2L-periodic image sums give
Green kernels for flux (Neumann) and value (Dirichlet) boundary data. The
package evaluates these kernels, solves the linear problems in closed
form, solves the nonlinear system by Picard iteration on its integral
equation, and checks the a priori bounds against computed solutions. A
finite-difference solver serves as the independent reference.
"""

from .certificate import BoundCertificate
from .config import PRESETS, RunConfig, build_config, parse_config
from .errors import (ConfigError, ConvergenceError, DivergenceError, DomainError, FhnError,
                     RegimeError, StabilityError, ToleranceError, TruncationError)
from .estimates import (Scenario, asymptotic_decay, run_certification_suite,
                        standard_scenarios, suite_passed)
from .fieldio import read_field_csv, write_field_csv
from .kernels import (FhnParams, aux_quantities, certify_kernel_bounds, decay_e, k0, k0_x, k_i,
                      l1_norm_x, l1_norm_xt, laplace_check_k0)
from .linear import (BoundaryData, Field, InitialData, mckean_linear_scenario,
                     solve_linear_dirichlet, solve_linear_neumann)
from .nonlinear import (FhnSolution, JosephsonSource, Kinetics, PicardReport,
                        certify_nonlinear_bounds, cubic_kinetics, josephson_params,
                        josephson_source, phi_cubic, recover_v, solve_fhn_dirichlet,
                        solve_fhn_neumann, source_F)
from .oracle import FdConfig, FdScenario, fd_convergence_study, fd_solve
from .propagator import Grid, Propagator
from .special import bessel_j0, bessel_j1, j0, j1, j1_over_z
from .theta import green, theta

__version__ = "0.1.0"

import types as _types

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not isinstance(obj, _types.ModuleType))
