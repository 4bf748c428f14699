"""Implicit cooperative positioning for vehicular networks.

Vehicles fuse GNSS fixes with relative observations of shared passive
features (pedestrians, traffic lights, parked cars).  Feature information is
pooled over V2V links by an average-consensus protocol nested inside a
Gaussian message-passing loop, so vehicles improve their own position
without any vehicle-to-vehicle ranging.  The package also ships the
centralized Kalman oracle, Fisher-information lower bounds for the
symmetric all-to-all case, scenario generation/trace ingestion, and a
Monte Carlo experiment harness.
"""

__version__ = "0.1.0"

from .gaussian import (
    DegenerateMessageError,
    InfoMessage,
    MomentGaussian,
    POSITION_PROJECTOR,
    from_moments,
    info_divide,
    info_product,
    lift_position_observation,
    position_marginal,
    to_moments,
)

__all__ = [
    "DegenerateMessageError",
    "InfoMessage",
    "MomentGaussian",
    "POSITION_PROJECTOR",
    "from_moments",
    "info_divide",
    "info_product",
    "lift_position_observation",
    "position_marginal",
    "to_moments",
    "__version__",
]
