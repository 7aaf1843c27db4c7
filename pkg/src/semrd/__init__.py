"""Finite-alphabet semantic rate-distortion toolkit.

Computes the minimum rate compatible with a posterior-divergence (semantic)
distortion bound and a per-symbol (symbolic) distortion bound, validates the
numerical solver against the exact binary closed form, and demonstrates
achievability with a one-shot channel-simulation codec.
"""

from .backend import BACKEND
from .binary_rd import (
    BinarySourceSpec,
    closed_form_rate,
    gamma_symbolic,
    lambda_semantic,
    optimal_channel,
    threshold_a,
)
from .distortion import (
    DistortionSpec,
    ObservationMeasure,
    SemanticMeasure,
    expected_observation_distortion,
    expected_semantic_distortion,
    observation_distance,
    semantic_distance,
    sequence_observation_distortion,
    sequence_semantic_distortion,
)
from .errors import SemrdError
from .pfr import PfrConfig, PfrReport, PfrTrialRecord, decode, encode, pfr_select, simulate
from .probcore import (
    Channel,
    Distribution,
    JointSource,
    RDPoint,
    binary_entropy,
    entropy_bits,
    load_source_json,
    marginal_x,
    mutual_information,
    output_distribution,
    posterior_given_x,
    posterior_given_y,
)
from .solver import SolverConfig, SolverResult, feasibility_check, solve_rd, sweep, sweep_results

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BinarySourceSpec",
    "Channel",
    "Distribution",
    "DistortionSpec",
    "JointSource",
    "ObservationMeasure",
    "PfrConfig",
    "PfrReport",
    "PfrTrialRecord",
    "RDPoint",
    "SemanticMeasure",
    "SemrdError",
    "SolverConfig",
    "SolverResult",
    "binary_entropy",
    "closed_form_rate",
    "decode",
    "encode",
    "entropy_bits",
    "expected_observation_distortion",
    "expected_semantic_distortion",
    "feasibility_check",
    "gamma_symbolic",
    "lambda_semantic",
    "load_source_json",
    "marginal_x",
    "mutual_information",
    "observation_distance",
    "optimal_channel",
    "output_distribution",
    "pfr_select",
    "posterior_given_x",
    "posterior_given_y",
    "semantic_distance",
    "sequence_observation_distortion",
    "sequence_semantic_distortion",
    "simulate",
    "solve_rd",
    "sweep",
    "sweep_results",
    "threshold_a",
]
