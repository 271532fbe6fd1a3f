"""Complex angular momentum pole analysis of integral cross sections.

Reconstructs S(E, J) from integer-J data by rational interpolation, locates
first-quadrant complex-J poles, follows them along Regge trajectories, and
splits the integral cross section into a smooth background plus per-pole
resonance terms.
"""
from .constants import HBAR2_OVER_2U
from .datamodel import (ChannelSpec, ConfigError, EnergyFileError, RunConfig,
                        SeriesPoint, SMatrixRecord, apply_parity_flip,
                        format_energy_file, parse_energy_file,
                        parse_run_config, read_series, write_series)
from .ics import (Decomposition, IcsError, QuadratureError, WaveNumber,
                  imag_axis_term, integral_term, modified_mulholland_term,
                  mulholland_term, pws_cross_section, pws_from_model,
                  subtract_trajectories, wavenumber)
from .pade import (PadeError, PadeModel, PhasePoly, PoleEvaluationError,
                   build_rational_interpolant, evaluate,
                   extract_quadratic_phase, inject_noise,
                   interpolation_residual, iterate_reconstruction)
from .pipeline import RunError, run_step_one, run_step_two
from .poles import (CamRegion, PoleAnalysisError, PoleRecord, conjugate_value,
                    make_pole_record, remove_froissart, residue_at,
                    select_in_region)
from .shellmodel import (DATASET_VARIANTS, ShellModelError, ShellModelParams,
                         complex_j_pole_oracle, find_bound_state_energy,
                         generate_dataset, s_matrix_element)
from .trajectory import (ReggeTrajectory, SessionState, TrajectoryError,
                         export_trajectory, finish_trajectory, follow_auto,
                         follow_manual, seed_trajectory)

__version__ = "0.1.0"
