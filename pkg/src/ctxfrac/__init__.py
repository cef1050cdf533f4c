"""Contextual fraction of empirical models and a contextuality-based entanglement measure."""

from .contextual import CfResult, build_cf_lp, contextual_fraction, is_noncontextual
from .entanglement import distinguished_cf, threshold_entropy
from .scenario import (
    EmpiricalModel,
    GlobalDistribution,
    MeasurementScenario,
    fixture_model,
    marginalize,
    mix_models,
    validate_model,
)
from .simplex import LpProblem, LpSolution, LpStatus, solve_lp
from .states import (
    BellScenario,
    BlochBasis,
    PureState,
    born_model,
    diag_state,
    entanglement_entropy,
    ghz_state,
    schmidt_decompose,
)

__version__ = "0.1.0"
