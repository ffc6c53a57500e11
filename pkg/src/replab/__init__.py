"""Certified witness search for the repetition property of skew-shift orbits."""

from .cfrac import (
    ContinuedFraction,
    build_liouville_like,
    diophantine_inf,
    golden,
    parse_real,
    sqrt2_frac,
)
from .errors import (
    Anomaly,
    DimensionMismatch,
    HorizonExceeded,
    HypothesisViolation,
    InsufficientPrecision,
    ResourceLimit,
)
from .repetition.engine import (
    ConvergentDenominators,
    Exhaustive,
    MultiplierLift,
    NotFound,
    RepetitionQuery,
    RepetitionWitness,
    find_joint_witness,
    find_witness,
    max_block_dist,
)
from .repetition.grammar import parse_sequence
from .torus import SkewShift, TorusVector

__version__ = "0.1.0"
