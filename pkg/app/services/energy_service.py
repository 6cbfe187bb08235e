"""
Path: app/services/energy_service.py
Description: System energy per bit of an opportunistic scheduling policy
Purpose: Builds the fading distribution of scheduled virtual users from a solved chain,
mixes it with path loss into the VU channel distribution, and evaluates E_b/N0 for
imperfect transmitter CSI (CST) and imperfect transmitter and receiver CSI (CSO)
"""

import math
from typing import Callable, Optional, Sequence, Tuple, Union
import numpy as np

from app.distributions import (
    DistributionInterface,
    TabulatedChannelDistribution,
    UndefinedDistributionError,
    WeightedExponentialFading,
)
from app.models.chain import ChainSolution
from app.models.policy import Policy, ThresholdTable
from app.models.vu import VuDistribution
from app.schemas.energy import EnergyReport
from app.schemas.system import SystemConfig
from app.services.chain_service import ChainService
from app.services.channel_service import ChannelService, QuadratureError
from app.settings import get_settings
from app.logging_config import get_logger

logger = get_logger(__name__)

LN2 = math.log(2.0)
# probability left above the top of the channel table
TAIL_PROBABILITY = 1e-15
# relative offset of the first grid point above the lower support edge
EDGE_OFFSET = 1e-7
# widest log-gain panel of the energy quadrature
PANEL_WIDTH = 0.5
GAUSS_ORDER = 20


class InvalidChannelKnowledgeError(ValueError):
    """CSO energy is only defined for error-free packet transmission (nu_d = 0)."""


class EnergyService:
    def __init__(
        self,
        config: SystemConfig,
        channel: Optional[ChannelService] = None,
        chain: Optional[ChainService] = None,
        grid_points: Optional[int] = None,
        epsabs: Optional[float] = None,
        panel_width: float = PANEL_WIDTH,
    ):
        settings = get_settings()
        self.config = config
        self.channel = channel or ChannelService(config)
        self.chain = chain or ChainService(self.channel.fading)
        self.grid_points = grid_points or settings.energy_grid_points
        self.epsabs = epsabs if epsabs is not None else settings.energy_epsabs
        self.panel_width = panel_width

    def vu_fading_distribution(
        self,
        policy: Policy,
        pi: np.ndarray,
        thresholds: Optional[ThresholdTable] = None,
    ) -> VuDistribution:
        """
        Weight the fading density by sum_p pi_p L(p, y): every finite threshold
        kappa[p][q] raises the packet count of state p by one above it.

        Raises:
            UndefinedDistributionError: the policy never schedules a packet.
        """
        thresholds = thresholds or self.chain.thresholds_from_policy(policy)
        steps = {}
        for p, row in enumerate(thresholds.kappa):
            if pi[p] <= 0:
                continue
            for kappa in row:
                if np.isfinite(kappa):
                    steps[float(kappa)] = steps.get(float(kappa), 0.0) + float(pi[p])
        if not steps:
            raise UndefinedDistributionError("policy never schedules a packet")
        edges = np.array(sorted(steps))
        weights = np.cumsum([steps[e] for e in edges])
        fading = WeightedExponentialFading(edges, weights)
        return VuDistribution(
            fading=fading,
            pi=np.asarray(pi, dtype=float),
            thresholds=thresholds,
            nu_d=policy.spec.nu_d,
        )

    def vu_channel_distribution(self, vu: VuDistribution) -> TabulatedChannelDistribution:
        """
        Tabulate P_{h,VU}(x) with channel.gain_cdf on log(x) nodes: half of them
        uniform over the support, half geometric in log(x / x_lo) so that they crowd
        the lower edge x_lo where the CDF starts quadratically.
        """
        if vu.channel is not None:
            return vu.channel
        lower = vu.fading.lower_edge * self.channel.pathloss.support()[0]
        if lower <= 0:
            raise UndefinedDistributionError("VU channel support reaches zero gain")
        upper = float(vu.fading.quantile(1.0 - TAIL_PROBABILITY)) * self.channel.pathloss.support()[1]
        span = math.log(upper / lower)
        half = self.grid_points // 2
        offsets = np.unique(np.concatenate((
            np.linspace(0.0, span, self.grid_points - half),
            np.geomspace(EDGE_OFFSET * span, span, half),
        )))
        gains = lower * np.exp(offsets)
        probabilities = self.channel.gain_cdf(gains, vu.fading)
        return TabulatedChannelDistribution(gains, probabilities)

    def with_channel(self, vu: VuDistribution) -> VuDistribution:
        return vu.model_copy(update={"channel": self.vu_channel_distribution(vu)})

    def energy_cst(self, vu: Union[VuDistribution, DistributionInterface]) -> float:
        """
        ln2 * integral of 2^(C P(x)) / x dP(x), integrated by parts into
        (1/C) * integral_{x_lo}^inf (2^(C P(x)) - 1) / x^2 dx.

        A VU channel that reaches zero gain (lowest threshold exactly 0) has an
        infinite energy; this is logged and returned as inf.
        """
        return self._energy_integrals(vu)[0]

    def energy_cso(self, vu: Union[VuDistribution, DistributionInterface], beta2: float) -> float:
        """
        CST energy plus beta2 * ln2 * integral of 2^(2 C P(x)) / x^2 dP(x).

        Raises:
            InvalidChannelKnowledgeError: the policy was designed with nu_d > 0.
        """
        self._check_cso(vu, beta2)
        return self._combine(*self._energy_integrals(vu), beta2)

    def cso_correction(self, vu: Union[VuDistribution, DistributionInterface]) -> float:
        """The beta2-free factor of the CSO term; CSO energy is linear in beta2."""
        return self._energy_integrals(vu)[1]

    def cso_sweep(self, vu: VuDistribution, betas: Sequence[float]) -> np.ndarray:
        """CSO energy over a grid of estimation error variances for one policy."""
        if vu.nu_d > 0:
            raise InvalidChannelKnowledgeError(
                f"CSO energy assumes error-free transmission, got nu_d={vu.nu_d}"
            )
        cst, correction = self._energy_integrals(vu)
        return np.array([cst + b * correction for b in betas])

    def energy_monte_carlo(
        self,
        vu: VuDistribution,
        rng: np.random.Generator,
        samples: int = 1_000_000,
    ) -> Tuple[float, float]:
        """Sample-mean estimate of the CST energy and its standard error."""
        channel = self._channel_of(vu)
        if channel is None:
            return math.inf, math.inf
        C = self.config.spectral_efficiency
        draws = self.channel.gain_sample(rng, samples, vu.fading)
        values = LN2 * np.power(2.0, C * channel.cdf(draws.gain)) / draws.gain
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))

    def evaluate(
        self,
        policy: Policy,
        solution: ChainSolution,
        beta2: Optional[float] = None,
    ) -> EnergyReport:
        vu = self.vu_fading_distribution(policy, solution.pi)
        if beta2 is not None:
            self._check_cso(vu, beta2)
        cst, correction = self._energy_integrals(vu)
        cso = None if beta2 is None else self._combine(cst, correction, beta2)
        return EnergyReport(
            ebn0_cst=cst,
            ebn0_cso=cso,
            beta2=beta2,
            theta_r=solution.theta_r,
            gamma=solution.gamma,
        )

    @staticmethod
    def _check_cso(vu, beta2: float) -> None:
        if beta2 < 0:
            raise ValueError("estimation error variance must be nonnegative")
        if isinstance(vu, VuDistribution) and vu.nu_d > 0:
            raise InvalidChannelKnowledgeError(
                f"CSO energy assumes error-free transmission, got nu_d={vu.nu_d}"
            )

    @staticmethod
    def _combine(cst: float, correction: float, beta2: float) -> float:
        if beta2 == 0 or not math.isfinite(cst):
            return cst
        return cst + beta2 * correction

    def _channel_of(self, vu) -> Optional[DistributionInterface]:
        if not isinstance(vu, VuDistribution):
            return vu
        if vu.fading.lower_edge <= 0:
            logger.warning("VU fading has positive density at zero gain; energy per bit diverges")
            return None
        return self.vu_channel_distribution(vu)

    def _cdf_pieces(self, vu) -> Optional[Tuple[Callable, float, float, np.ndarray, float]]:
        """
        The channel CDF with its support, every gain where it stops being analytic
        and the absolute error of each CDF value. For a VU distribution the CDF is
        the exact path-loss mixture, whose pieces join wherever a fading edge meets
        either end of the path-loss support.
        """
        if isinstance(vu, VuDistribution):
            if vu.fading.lower_edge <= 0:
                logger.warning("VU fading has positive density at zero gain; energy per bit diverges")
                return None
            s_lo, s_hi = self.channel.pathloss.support()
            lower = vu.fading.lower_edge * s_lo
            upper = float(vu.fading.quantile(1.0 - TAIL_PROBABILITY)) * s_hi
            edges = np.asarray(vu.fading.breakpoints, dtype=float)
            breaks = np.concatenate((edges * s_lo, edges * s_hi))
            fading = vu.fading
            return (lambda x: self.channel.gain_cdf(x, fading)), lower, upper, breaks, self.channel.epsabs

        lower, upper = vu.support()
        if lower <= 0:
            logger.warning("channel has mass near zero gain; energy per bit diverges")
            return None
        if not math.isfinite(upper):
            upper = float(vu.quantile(1.0 - TAIL_PROBABILITY))
        return vu.cdf, lower, upper, np.asarray(vu.breakpoints, dtype=float), 0.0

    def _panels(self, lower: float, upper: float, breaks: np.ndarray) -> np.ndarray:
        """Panel edges in log(x), split at every break and no wider than panel_width."""
        a, b = math.log(lower), math.log(upper)
        inner = np.log(breaks[(breaks > lower) & (breaks < upper)])
        cuts = np.unique(np.concatenate(([a], inner, [b])))
        edges = [cuts[:1]]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            count = max(1, math.ceil((hi - lo) / self.panel_width))
            edges.append(np.linspace(lo, hi, count + 1)[1:])
        return np.concatenate(edges)

    def _energy_integrals(self, vu) -> Tuple[float, float]:
        """
        CST energy and the CSO correction from one pass over the channel CDF:

            E_CST = (1/C) * integral (2^(C P) - 1) x^-2 dx
            corr  = (1/C) * integral (2^(2 C P) - 1) x^-3 dx

        Both run in t = log(x) over panels on which P is analytic, with
        Gauss-Legendre rules of two orders; their difference is the error estimate.
        Above the top of the support P = 1 and the tails are closed form.

        Raises:
            QuadratureError: if the two rules differ by more than the tolerance.
        """
        pieces = self._cdf_pieces(vu)
        if pieces is None:
            return math.inf, math.inf
        cdf, lower, upper, breaks, cdf_error = pieces
        C = self.config.spectral_efficiency
        cst_tail = (2.0 ** C - 1.0) / upper
        corr_tail = (2.0 ** (2.0 * C) - 1.0) / (2.0 * upper ** 2)
        if upper <= lower:
            return cst_tail / C, corr_tail / C

        edges = self._panels(lower, upper, breaks)
        fine_nodes, fine_weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
        coarse_nodes, coarse_weights = np.polynomial.legendre.leggauss(GAUSS_ORDER // 2)
        unit_nodes = np.concatenate((fine_nodes, coarse_nodes))

        cst = np.zeros(2)
        corr = np.zeros(2)
        for lo, hi in zip(edges[:-1], edges[1:]):
            half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
            t = mid + half * unit_nodes
            p = np.asarray(cdf(np.exp(t)), dtype=float)
            f_cst = np.expm1(C * LN2 * p) * np.exp(-t)
            f_corr = np.expm1(2.0 * C * LN2 * p) * np.exp(-2.0 * t)
            cst += half * np.array([fine_weights @ f_cst[:GAUSS_ORDER], coarse_weights @ f_cst[GAUSS_ORDER:]])
            corr += half * np.array([fine_weights @ f_corr[:GAUSS_ORDER], coarse_weights @ f_corr[GAUSS_ORDER:]])

        # CDF errors pass through 2^(C P) and the x^-k weights
        floors = (2.0 * LN2 * cdf_error * 2.0 ** C / lower, 2.0 * LN2 * cdf_error * 2.0 ** (2.0 * C) / lower ** 2)
        for name, values, floor in (("CST energy", cst, floors[0]), ("CSO correction", corr, floors[1])):
            error = abs(values[0] - values[1])
            if error > max(self.epsabs, 1e-8 * abs(values[0]), floor):
                logger.error(f"{name} quadrature error {error:.3e} exceeds tolerance {self.epsabs:.1e}")
                raise QuadratureError(f"{name} integral did not converge: error {error:.3e}")
        return (cst[0] + cst_tail) / C, (corr[0] + corr_tail) / C
