"""Crossing coefficients for max-stable random fields on the integer lattice.

The package computes three views of the same quantity and checks them
against each other:

    exact      closed forms under the radial-partition model (`model`)
    estimated  rank-based estimates from replicated samples (`estimate`)
    finite-u   level-counting Monte-Carlo oracles (`empirical`)

plus seeded simulation (`simulate`), lattice geometry (`lattice`), a
FastAPI service (`service`) and a command-line client (`cli`).
"""

from ._version import __version__
from .empirical import (
    NoExceedances,
    ScoreField,
    crossinggram_at_level,
    oscillation_identity_check,
    sweep,
    uniformize,
    zeta_star_at_level,
)
from .estimate import (
    MissingSupport,
    RankScores,
    beta_hat,
    rank_transform,
    theta_hat,
    zeta_hat,
    zeta_star_hat,
)
from .lattice import (
    NormKind,
    Point,
    Region,
    dilate,
    make_annulus,
    make_disk,
    make_square,
    neighborhood,
    neighborhood_size,
    v_sum,
)
from .model import (
    DEMO_CONFIG,
    ModelConfig,
    PartitionModel,
    exponent_function_exact,
    gamma_exact,
    joint_cdf_exact,
    lambda_conditional_exact,
    lambda_pair_exact,
    theta_exact,
    theta_pair_exact,
    zeta_exact,
    zeta_star_exact,
)
from .reports import CoefficientReport, LevelEntry, LevelSweep
from .simulate import (
    FieldSample,
    read_sample,
    sample_from_csv,
    sample_to_csv,
    sample_unit_frechet,
    simulate_field,
    simulate_independent,
    simulate_totally_dependent,
    write_sample,
)

__all__ = [
    "__version__",
    "CoefficientReport",
    "DEMO_CONFIG",
    "FieldSample",
    "LevelEntry",
    "LevelSweep",
    "MissingSupport",
    "ModelConfig",
    "NoExceedances",
    "NormKind",
    "PartitionModel",
    "Point",
    "RankScores",
    "Region",
    "ScoreField",
    "beta_hat",
    "crossinggram_at_level",
    "dilate",
    "exponent_function_exact",
    "gamma_exact",
    "joint_cdf_exact",
    "lambda_conditional_exact",
    "lambda_pair_exact",
    "make_annulus",
    "make_disk",
    "make_square",
    "neighborhood",
    "neighborhood_size",
    "oscillation_identity_check",
    "rank_transform",
    "read_sample",
    "sample_from_csv",
    "sample_to_csv",
    "sample_unit_frechet",
    "simulate_field",
    "simulate_independent",
    "simulate_totally_dependent",
    "sweep",
    "theta_exact",
    "theta_hat",
    "theta_pair_exact",
    "uniformize",
    "v_sum",
    "write_sample",
    "zeta_exact",
    "zeta_hat",
    "zeta_star_at_level",
    "zeta_star_exact",
    "zeta_star_hat",
]
