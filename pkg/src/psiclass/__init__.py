"""Exact psi-class intersection numbers and their large-genus lower bound."""
from .arith import ExactRational, double_factorial, factorial, rational
from .bounds import (
    EpsilonReport,
    SweepSummary,
    delta_dilaton,
    delta_string,
    delta_virasoro,
    epsilon,
    epsilon_ones_closed_form,
    floor_bracket,
    lambda_factor,
    verify_theorem,
    verify_two_point,
)
from .cache import MemoCache, cache_load, cache_save
from .correlator import CorrelatorEngine, correlator, correlator_genus0_oracle
from .kernel import BACKEND
from .partitions import (
    CorrelatorKey,
    canonicalize,
    dimension_ok,
    enumerate_partitions,
    enumerate_pi_L,
)

__version__ = "0.1.0"
