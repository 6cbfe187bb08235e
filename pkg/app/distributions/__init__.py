from .distribution_interface import DistributionInterface, UnboundedSupportError
from .implementations.exponential_fading import ExponentialFading
from .implementations.pathloss import PathLossDistribution
from .implementations.point_mass import PointMassDistribution
from .implementations.tabulated_channel import TabulatedChannelDistribution
from .implementations.vu_fading import UndefinedDistributionError, WeightedExponentialFading

__all__ = [
    "DistributionInterface",
    "UnboundedSupportError",
    "ExponentialFading",
    "PathLossDistribution",
    "PointMassDistribution",
    "TabulatedChannelDistribution",
    "UndefinedDistributionError",
    "WeightedExponentialFading",
]
