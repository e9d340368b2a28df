"""Pseudo-spectral simulator and numerical-verification harness for the
3-D anisotropic compressible MHD system near the background field e2."""

from .errors import CFLViolationError, ConfigError, VacuumProximityError
from .spectral import (Grid, SpectralField, dealias, derivative,
                       inner_product, lambda_h, norm_Hm, norm_Hm_tan,
                       set_num_threads, to_physical, to_spectral)
from .models import (Params, PerturbState, PrimitiveState, from_perturbation,
                     linear_symbol, rhs_full, rhs_limit, rhs_perturb,
                     to_perturbation)
from .integrate import (RunConfig, TimeSeries, initial_state,
                        project_div_free_b, simulate, step, step_full)
from .functionals import (C0_of_initial, DiagnosticsRow, diagnostics_row,
                          diff_energy_Ebar, dissipation_D, dissipation_D_tan,
                          energy_E, energy_E_tan, growth_factors_AB,
                          lyapunov_Etilde_tan, weighted_energy_balance)

__version__ = "0.1.0"
