"""Precision limits of noisy quantum metrology computed from single-particle channels."""

from .bounds import (
    all_bounds,
    ce_bound,
    channel_qfi,
    extended_channel_qfi,
    finite_n_ce,
    qs_bound,
    quantum_enhancement,
    rld_bound,
)
from .channels import KrausSet, NoiseModel, choi_from_kraus, make_noise_channel
from .fisher import ParametrizedState, qfi_purification_min, qfi_state
from .geometry import cs_bound
from .reports import BoundReport

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "KrausSet",
    "NoiseModel",
    "ParametrizedState",
    "all_bounds",
    "ce_bound",
    "channel_qfi",
    "choi_from_kraus",
    "cs_bound",
    "extended_channel_qfi",
    "finite_n_ce",
    "make_noise_channel",
    "qfi_purification_min",
    "qfi_state",
    "qs_bound",
    "quantum_enhancement",
    "rld_bound",
]
