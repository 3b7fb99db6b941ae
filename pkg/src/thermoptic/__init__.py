"""Quantum estimation limits for far-field thermal light.

Covariance-matrix construction, the Gao--Lee quantum Fisher information and
SLD engine, Planck-law frequency design for temperature estimation, optimal
and practical counting schemes for spatial coherence, and a truncated-basis
POVM search, all at desk scale.
"""

__version__ = "0.1.0"

from .blackbody import (
    BlackbodyScene,
    FrequencyGrid,
    PriorTable,
    mean_photon_number,
    multimode_qfi,
    optimal_frequencies,
    prior_averaged_design,
    regime_check,
    spectral_qfi,
    variance_bound_cofactor,
)
from .bench import ft_scheme_cost, random_phase_cost, ratio_map
from .counting import (
    CountDistribution,
    DiagThermalParams,
    count_fisher,
    fock_oracle,
    p_in,
    p_out_bs,
    p_out_ft,
    u_phase_bs,
)
from .fisher import FisherMatrix, classical_fisher, cost, crb_bound, qfi_gaussian, sld_gaussian
from .gaussian import (
    GaussianState,
    SpatialParams,
    SymplecticForm,
    TwoModeUnitary,
    apply_mode_unitary,
    physicality_check,
    thermal_spectral_covariance,
    two_spatial_covariance,
)
from .operators import FockCutoff, QuadraticObservable, qo_commutator, qo_expectation, qo_fock_matrix
from .povm import MixturePovm, TruncatedState, gill_massar_bounds, optimize_povm, povm_fisher, truncated_state
from .spatial import (
    PqrCoefficients,
    WeightedSchemeResult,
    measurement_fisher_x,
    qfi_spatial,
    sld_spatial,
    weighted_scheme,
    x_operators,
)
