"""todakit: real hyperelliptic Toda curves, their periods and deformations,
Pell certificates, finite-gap Toda lattice solutions and the triangular
constrained Schlesinger solution."""
from .curve import BranchId, CurveSpec, build_curve
from .equilibrium import (equilibrium_measures, equilibrium_report, isoequilibrium_flow,
                          rational_measure_detect)
from .errors import InputError, NumericalError, TodakitError
from .identities import residue_identities
from .isoflow import first_order_rhs, integrate_flow, newton_period_corrector, second_order_rhs
from .pell import (PellCertificate, chebyshev_from_curve, chebyshev_on_support,
                   parity_reduce, parity_reduce_odd, pell_residual)
from .periods import (PeriodData, differential_periods, normalized_holomorphic_basis,
                      second_kind_differential, third_kind_differential)
from .schlesinger import build_residue_matrices, constrained_residual, sum_rule_check
from .theta import (ThetaParams, lattice_residual, periodicity_check, riemann_theta,
                    toda_solution, toda_wave_vectors, volterra_data,
                    volterra_time_vector)
from .variational import validate_variational

__version__ = "0.1.0"
