"""Predictive information decomposition of stationary VAR processes.

Splits the information the past of a network carries about its present into
unique, redundant and synergistic parts, computed analytically from VAR
parameters, with surrogate-based significance tests.
"""

__version__ = "0.1.0"

from .errors import (
    ConsistencyError,
    InputError,
    NonStationaryError,
    NumericalError,
    PredInfoError,
    SingularMatrixError,
)
from .gaussian_info import (
    InfoContext,
    predictive_information,
    q_sensitivity,
    subset_mutual_information,
)
from .lagged_moments import (
    LagCovarianceSet,
    RestrictedModel,
    lag_covariances,
    restricted_model,
    solve_discrete_lyapunov,
)
from .lattice import (
    Atom,
    PridResult,
    RedundancyLattice,
    atom_leq,
    build_lattice,
    coarse_grain,
    decompose,
    mmi_redundancy,
    moebius_inversion,
)
from .pipeline import AnalysisSettings, analyze_series
from .surrogates import SurrogateConfig, make_surrogate, significance_test
from .sweep import SweepSpec, run_sweep, three_unit_model
from .var_model import (
    TimeSeries,
    VarModel,
    check_stability,
    estimate_var,
    select_order,
    simulate_var,
)
