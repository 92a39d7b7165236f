"""Spectral laboratory for the coupled lowest-Landau-level system.

Solutions live in the Bargmann-Fock space and are represented by truncated
coefficient vectors in the special Hermite basis; the projected cubic
nonlinearity is an exact coefficient-space convolution kernel.
"""

from .dynamics import (ConservationError, DiagnosticsRecord, MonitorConfig, SimState,
                       divergence_bounds, growth_monitor, integrate, rhs, suggested_dt)
from .experiments import (CauchyReport, DecayFit, LiftReport, MultiSolitonRun,
                          SeparationSweep, build_multisoliton, cauchy_in_M,
                          fit_residual_decay, harmonic_lift, superposition_run,
                          superposition_sweep)
from .fock import (FockVector, RadialWeightTable, ResolutionError, WeightSpec,
                   basis_vector, build_weight_table, carlen_check, coherent_vector,
                   evaluate, from_json_dict, inner, l2_norm, random_unit_vector,
                   sup_norm_estimate, tail_mass, to_json_dict, weighted_l2_norm,
                   zero_vector)
from .operators import (ConservedQuantities, TrilinearKernelTable, build_kernel_table,
                        conserved_quantities, harmonic_propagate, load_kernel_table,
                        magnetic_translate, projected_triple,
                        projector_quadrature_oracle, rotate, save_kernel_table)
from .quadrature import PolarGrid, polar_grid
from .waves import (DerivedParams, SolitonEnsemble, StationaryFit, WaveSpec,
                    amplitude_for_speed, ansatz_residual, build_stationary_pair,
                    build_wave_pair, derive_params, ensemble_profile_sum,
                    shifted_basis, soliton_profile, stationary_check)

__version__ = "0.1.0"
