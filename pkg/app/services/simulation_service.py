"""
Path: app/services/simulation_service.py
Description: Packet-level Monte Carlo simulation of the opportunistic scheduler
Purpose: Replays the scheduling scheme slot by slot (one arrival per slot, threshold
decisions on the drawn fading, ACK/NACK feedback) and checks the empirical occupancy,
drop rate, violation frequency and VU fading histogram against the analytic chain
"""

import math
from bisect import bisect_left
from collections import Counter
from typing import Optional
import numpy as np
from scipy import stats

from app.models.chain import ChainSolution
from app.models.policy import ThresholdTable
from app.models.vu import VuDistribution
from app.schemas.qos import QosSpec
from app.schemas.simulation import SimReport, ValidationVerdict
from app.services.channel_service import ChannelService
from app.services.energy_service import LN2
from app.services.random_streams import Seed, as_seed_sequence, seed_label
from app.settings import get_settings
from app.logging_config import get_logger

logger = get_logger(__name__)

HISTOGRAM_BINS = 50
# below this many slots a validation is reported as inconclusive
MIN_CONCLUSIVE_SLOTS = 10_000


class SimulationService:
    def __init__(self, channel: ChannelService, batches: Optional[int] = None):
        self.channel = channel
        self.batches = batches or get_settings().sim_batches

    def simulate(
        self,
        thresholds: ThresholdTable,
        spec: QosSpec,
        slots: int,
        seed: Seed = 0,
        vu: Optional[VuDistribution] = None,
    ) -> SimReport:
        """
        Run the scheme for `slots` slots starting from the empty state.

        Each slot one packet arrives and a fading value is drawn. In state p the
        transmitter schedules L packets where L counts the thresholds of row p below
        the fading; an ACK moves the chain to min(p,B) - L + 1. A NACK or an idle
        slot moves it forward exactly like the chain's forward transition; every
        forward move out of p >= B is one dropped packet and the M -> M self loop is
        a continuity violation. When `vu` carries a tabulated channel, the energy
        per bit is estimated from the drawn gains of the scheduled packets.
        """
        if slots < 1:
            raise ValueError("slots must be positive")
        if thresholds.buffer != spec.buffer or thresholds.states != spec.states:
            raise ValueError("threshold table does not match the QoS spec")
        sequence = as_seed_sequence(seed)
        rng = np.random.default_rng(sequence)
        B, M, N = spec.buffer, spec.states, spec.ccon

        fading = self.channel.fading_sample(rng, slots)
        feedback = rng.random(slots)
        landing = None
        if spec.heterogeneous:
            values = np.arange(1, N + 1)
            cumulative = np.cumsum([spec.zeta(n) for n in values])
            picks = np.minimum(np.searchsorted(cumulative, rng.random(slots), side="right"), N - 1)
            landing = (B + 1 + (N - values[picks])).tolist()

        ascending = [sorted(row.tolist()) for row in thresholds.kappa]
        buffered = [min(p, B) for p in range(M + 1)]
        states = np.empty(slots, dtype=np.int64)
        scheduled = np.zeros(slots, dtype=np.int64)
        drops = np.zeros(slots, dtype=bool)
        violations = np.zeros(slots, dtype=bool)
        bursts = Counter()
        landings = Counter()
        nacks = 0
        run = 0
        p = 0
        nu_d = spec.nu_d
        fading_values = fading.tolist()
        feedback_values = feedback.tolist()

        for t in range(slots):
            states[t] = p
            count = bisect_left(ascending[p], fading_values[t])
            if count > 0:
                scheduled[t] = count
                if feedback_values[t] >= nu_d:
                    if run:
                        bursts[run] += 1
                        run = 0
                    p = buffered[p] - count + 1
                    continue
                nacks += 1
            if p >= B:
                drops[t] = True
                run += 1
            if p == M:
                violations[t] = True
            elif landing is not None and p == B:
                p = landing[t]
                landings[p] += 1
            else:
                p += 1
        if run:
            bursts[run] += 1

        transmissions = int(np.count_nonzero(scheduled))
        pi = np.bincount(states, minlength=M + 1) / slots
        edges = self._histogram_edges(fading[scheduled > 0], vu)
        histogram = self._histogram(fading, scheduled, edges)

        energy = energy_stderr = None
        if vu is not None and vu.channel is not None and transmissions:
            pathloss = self.channel.pathloss_sample(rng, slots)
            energy, energy_stderr = self._energy_estimate(vu, fading * pathloss, scheduled)

        batches = self._batch_slices(slots)
        report = SimReport(
            slots=slots,
            empirical_pi=pi,
            pi_stderr=np.array([self._batch_stderr(states == p, batches) for p in range(M + 1)]),
            empirical_theta_r=float(drops.mean()),
            theta_r_stderr=self._batch_stderr(drops, batches),
            empirical_gamma=float(violations.mean()),
            gamma_stderr=self._batch_stderr(violations, batches),
            burst_histogram=dict(sorted(bursts.items())),
            max_burst=max(bursts, default=0),
            transmissions=transmissions,
            nack_fraction=nacks / transmissions if transmissions else 0.0,
            landing_counts=dict(sorted(landings.items())),
            vu_fading_edges=edges,
            vu_fading_histogram=histogram,
            energy_estimate=energy,
            energy_stderr=energy_stderr,
            seed=seed_label(sequence),
        )
        logger.info(
            f"simulated {slots} slots: theta_r={report.empirical_theta_r:.5f}, "
            f"gamma={report.empirical_gamma:.5f}, max burst {report.max_burst}"
        )
        return report

    def validate_against_chain(
        self,
        sim: SimReport,
        solution: ChainSolution,
        confidence: float = 3.0,
    ) -> ValidationVerdict:
        """
        z-test of every empirical quantity against the analytic solution using the
        batch-means standard errors; a metric fails when |z| exceeds `confidence`.
        The error is never taken below the binomial error of the analytic value, so
        rarely visited states are not failed on a handful of slots.
        """
        if sim.empirical_pi.shape != solution.pi.shape:
            raise ValueError("simulation and chain solution have different state counts")
        metrics = {f"pi[{p}]": (sim.empirical_pi[p], solution.pi[p], sim.pi_stderr[p]) for p in range(solution.pi.size)}
        metrics["theta_r"] = (sim.empirical_theta_r, solution.theta_r, sim.theta_r_stderr)
        metrics["gamma"] = (sim.empirical_gamma, solution.gamma, sim.gamma_stderr)

        z_scores = {}
        failures = []
        for name, (empirical, analytic, stderr) in metrics.items():
            floor = max(1.0 / sim.slots, math.sqrt(max(analytic * (1.0 - analytic), 0.0) / sim.slots))
            sigma = max(float(stderr), floor) if math.isfinite(stderr) else math.inf
            z = abs(float(empirical) - float(analytic)) / sigma
            z_scores[name] = z
            if z > confidence:
                failures.append(name)

        conclusive = sim.slots >= MIN_CONCLUSIVE_SLOTS and all(math.isfinite(z) for z in z_scores.values())
        if not conclusive:
            logger.warning(f"validation over {sim.slots} slots is inconclusive")
        if failures:
            logger.info(f"simulation disagrees with the chain on {', '.join(failures)}")
        return ValidationVerdict(
            passed=not failures,
            conclusive=conclusive,
            confidence=confidence,
            statistics=z_scores,
            failures=failures,
        )

    def vu_histogram_check(
        self,
        sim: SimReport,
        vu: VuDistribution,
        significance: float = 0.01,
    ) -> ValidationVerdict:
        """Chi-square goodness of fit of the scheduled-fading histogram against the VU density."""
        probabilities = np.diff(np.asarray(vu.fading.cdf(sim.vu_fading_edges), dtype=float))
        observed = np.asarray(sim.vu_fading_histogram, dtype=float)
        keep = probabilities > 0
        expected = probabilities[keep] / probabilities[keep].sum() * observed.sum()
        statistic, p_value = stats.chisquare(observed[keep], expected)
        passed = bool(p_value >= significance)
        if not passed:
            logger.info(f"VU fading histogram rejected: chi2={statistic:.2f}, p={p_value:.2e}")
        return ValidationVerdict(
            passed=passed,
            conclusive=bool(observed.sum() >= 5 * keep.sum()),
            confidence=1.0 - significance,
            statistics={"chi2": float(statistic), "p_value": float(p_value)},
            failures=[] if passed else ["vu_fading_histogram"],
        )

    @staticmethod
    def _histogram_edges(values: np.ndarray, vu: Optional[VuDistribution]) -> np.ndarray:
        """Equiprobable bins under the VU fading law when it is known, equal-width otherwise."""
        if vu is not None:
            inner = np.asarray(vu.fading.quantile(np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)[1:-1]), dtype=float)
            return np.concatenate(([vu.fading.lower_edge], inner, [np.inf]))
        if values.size == 0:
            return np.array([0.0, np.inf])
        return np.histogram_bin_edges(values, bins=HISTOGRAM_BINS)

    @staticmethod
    def _histogram(fading: np.ndarray, scheduled: np.ndarray, edges: np.ndarray) -> np.ndarray:
        """Scheduled fading values, each counted once per packet sent in its slot."""
        mask = scheduled > 0
        bins = np.clip(np.searchsorted(edges, fading[mask], side="right") - 1, 0, edges.size - 2)
        return np.bincount(bins, weights=scheduled[mask], minlength=edges.size - 1)

    def _energy_estimate(self, vu: VuDistribution, gains: np.ndarray, scheduled: np.ndarray):
        C = self.channel.config.spectral_efficiency
        weights = scheduled.astype(float)
        values = np.zeros_like(gains)
        mask = scheduled > 0
        values[mask] = LN2 * np.power(2.0, C * vu.channel.cdf(gains[mask])) / gains[mask]
        estimate = float(np.sum(weights * values) / weights.sum())
        ratios = [
            np.sum(weights[part] * values[part]) / np.sum(weights[part])
            for part in self._batch_slices(gains.size)
            if np.sum(weights[part]) > 0
        ]
        stderr = float(np.std(ratios, ddof=1) / math.sqrt(len(ratios))) if len(ratios) > 1 else math.inf
        return estimate, stderr

    def _batch_slices(self, slots: int):
        count = max(1, min(self.batches, slots))
        size = slots // count
        return [slice(i * size, (i + 1) * size) for i in range(count)]

    @staticmethod
    def _batch_stderr(indicator: np.ndarray, batches) -> float:
        """Standard error of the mean of a serially correlated indicator from batch means."""
        if len(batches) < 2:
            return math.inf
        means = np.array([indicator[part].mean() for part in batches])
        return float(means.std(ddof=1) / math.sqrt(len(means)))
