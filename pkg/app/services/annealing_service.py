"""
Path: app/services/annealing_service.py
Description: Simulated annealing over scheduling policies
Purpose: Minimizes the CST energy per bit subject to the drop-rate target and, optionally,
the CCON violation bound; derives the violation boundaries gamma_m and gamma_0 and runs
the buffer-size search
"""

import math
from typing import List, Optional, Sequence, Tuple
import numpy as np

from app.distributions import UndefinedDistributionError
from app.models.chain import ChainSolution
from app.models.policy import Policy
from app.schemas.optimization import BufferSearchResult, OptimizationResult
from app.schemas.qos import QosSpec
from app.schemas.schedule import AnnealSchedule
from app.schemas.energy import to_db
from app.services.chain_service import (
    ChainConsistencyError,
    ChainService,
    PolicyValidationError,
    ReducibleChainError,
)
from app.services.channel_service import QuadratureError
from app.services.energy_service import EnergyService
from app.services.random_streams import Seed, as_seed_sequence, seed_label
from app.logging_config import get_logger

logger = get_logger(__name__)

# acceptance of an average worsening move at the first and the last temperature
INITIAL_ACCEPTANCE = 0.8
FINAL_ACCEPTANCE = 0.01


class AnnealingService:
    def __init__(self, energy: EnergyService, chain: Optional[ChainService] = None):
        self.energy = energy
        self.chain = chain or energy.chain

    @staticmethod
    def fa_temperature(schedule: AnnealSchedule, b: int) -> float:
        """Fast-annealing schedule T_b = T0 / (c_sa * b + 1)."""
        if not schedule.calibrated:
            raise ValueError("schedule needs t0 and c_sa; calibrate it first")
        if b < 0:
            raise ValueError("temperature step must be nonnegative")
        return schedule.t0 / (schedule.c_sa * b + 1.0)

    @staticmethod
    def random_candidate(spec: QosSpec, rng: np.random.Generator) -> List[np.ndarray]:
        """
        Uniform point on the simplex per state: min(p,B)+2 normalized exponentials,
        the last coordinate being the no-schedule mass.
        """
        rows = []
        for p in range(spec.states + 1):
            draws = rng.standard_exponential(min(p, spec.buffer) + 2)
            rows.append(draws[:-1] / draws.sum())
        return rows

    def propose(
        self,
        spec: QosSpec,
        schedule: AnnealSchedule,
        current: Optional[List[np.ndarray]],
        temperature: float,
        rng: np.random.Generator,
    ) -> List[np.ndarray]:
        fresh = self.random_candidate(spec, rng)
        if schedule.proposal == "independent" or current is None:
            return fresh
        eta = max(schedule.eta_min, min(1.0, temperature / schedule.t0))
        return [(1.0 - eta) * old + eta * new for old, new in zip(current, fresh)]

    def evaluate(self, rows: List[np.ndarray], spec: QosSpec) -> Optional[Tuple[Policy, ChainSolution]]:
        """Build and solve a candidate; degenerate chains are skipped, not raised."""
        try:
            policy = self.chain.build_policy(rows, spec)
            return policy, self.chain.solve(policy)
        except (ReducibleChainError, PolicyValidationError, ChainConsistencyError) as e:
            logger.debug(f"candidate rejected: {e}")
            return None

    def candidate_energy(self, policy: Policy, solution: ChainSolution) -> float:
        try:
            return self.energy.evaluate(policy, solution).ebn0_cst
        except (UndefinedDistributionError, QuadratureError) as e:
            logger.debug(f"candidate energy unavailable: {e}")
            return math.inf

    def calibrate(self, spec: QosSpec, schedule: AnnealSchedule, rng: np.random.Generator) -> AnnealSchedule:
        """
        Pick T0 so that an average worsening move between feasible candidates is
        accepted with probability 0.8 at the first temperature, and c_sa so that
        it is accepted with probability 0.01 at the last one.
        """
        energies = []
        for _ in range(schedule.calibration_samples):
            rows = self.random_candidate(spec, rng)
            evaluated = self.evaluate(rows, spec)
            if evaluated is None or not self.chain.check_constraints(evaluated[1], spec):
                continue
            energy = self.candidate_energy(*evaluated)
            if math.isfinite(energy):
                energies.append(energy)
        steps = np.diff(energies)
        worsening = steps[steps > 0]
        if worsening.size == 0:
            logger.warning("calibration found no worsening moves; using T0=1, c_sa=1")
            mean_delta = None
        else:
            mean_delta = float(worsening.mean())

        t0 = schedule.t0 or (mean_delta / math.log(1.0 / INITIAL_ACCEPTANCE) if mean_delta else 1.0)
        if schedule.c_sa is not None:
            c_sa = schedule.c_sa
        elif mean_delta:
            t_final = mean_delta / math.log(1.0 / FINAL_ACCEPTANCE)
            c_sa = max((t0 / t_final - 1.0) / max(schedule.temp_steps - 1, 1), 1e-12)
        else:
            c_sa = 1.0
        logger.info(f"calibrated schedule: T0={t0:.4g}, c_sa={c_sa:.4g} from {len(energies)} feasible samples")
        return schedule.model_copy(update={"t0": t0, "c_sa": c_sa})

    def anneal(self, spec: QosSpec, schedule: AnnealSchedule, seed: Seed = 0) -> OptimizationResult:
        """
        Simulated annealing with Metropolis acceptance: a feasible candidate
        replaces the current policy with probability min(1, exp(-(E - E_cur) / T)).
        The best feasible policy ever seen is returned. Energy is computed only for
        candidates that pass the drop-rate and violation constraints.
        """
        sequence = as_seed_sequence(seed)
        rng = np.random.default_rng(sequence)
        if not schedule.calibrated:
            schedule = self.calibrate(spec, schedule, rng)
        per_temperature = schedule.candidates_per_temperature(spec.states)
        logger.info(
            f"annealing B={spec.buffer} N={spec.ccon} theta_tar={spec.theta_tar} "
            f"epsilon={spec.epsilon} nu_d={spec.nu_d}: {schedule.temp_steps} temperatures x {per_temperature} candidates"
        )

        current_rows, current_energy = None, math.inf
        best = None
        best_energy = math.inf
        evaluations = energy_evaluations = 0
        for b in range(schedule.temp_steps):
            temperature = self.fa_temperature(schedule, b)
            if schedule.t_min is not None and temperature < schedule.t_min:
                break
            accepted = 0
            for _ in range(per_temperature):
                rows = self.propose(spec, schedule, current_rows, temperature, rng)
                evaluations += 1
                evaluated = self.evaluate(rows, spec)
                if evaluated is None or not self.chain.check_constraints(evaluated[1], spec):
                    continue
                policy, solution = evaluated
                energy = self.candidate_energy(policy, solution)
                energy_evaluations += 1
                if not math.isfinite(energy):
                    continue
                r = rng.random()
                if current_rows is None or r < math.exp(min(0.0, -(energy - current_energy) / temperature)):
                    current_rows = [np.array(row) for row in policy.sched_probs]
                    current_energy = energy
                    accepted += 1
                if energy < best_energy:
                    best, best_energy = (policy, solution), energy
            logger.debug(
                f"T_{b}={temperature:.4g}: accepted {accepted}, current {to_db(current_energy):.3f} dB, "
                f"best {to_db(best_energy):.3f} dB"
            )

        if best is None:
            logger.info("annealing found no feasible policy")
            return OptimizationResult(
                feasible=False,
                evaluations=evaluations,
                energy_evaluations=energy_evaluations,
                seed=seed_label(sequence),
                schedule=schedule,
            )
        logger.info(
            f"best energy {to_db(best_energy):.3f} dB, theta_r={best[1].theta_r:.4f}, gamma={best[1].gamma:.3e}"
        )
        return OptimizationResult(
            best_policy=best[0],
            best_energy=best_energy,
            solution=best[1],
            feasible=True,
            evaluations=evaluations,
            energy_evaluations=energy_evaluations,
            seed=seed_label(sequence),
            schedule=schedule,
        )

    def gamma_max(self, spec: QosSpec, schedule: AnnealSchedule, seed: Seed = 0) -> Tuple[Optional[float], OptimizationResult]:
        """gamma_m: violation probability of the best policy when epsilon is not imposed."""
        result = self.anneal(spec.model_copy(update={"epsilon": None}), schedule, seed)
        return result.gamma, result

    def gamma_min(
        self,
        spec: QosSpec,
        schedule: AnnealSchedule,
        seed: Seed = 0,
        steps: int = 8,
        upper: Optional[float] = None,
    ) -> Tuple[Optional[float], List[OptimizationResult]]:
        """
        gamma_0: smallest epsilon for which a constrained anneal still finds a
        feasible policy, by bisection on [0, gamma_m].
        """
        children = as_seed_sequence(seed).spawn(steps + 1)
        runs = []
        if upper is None:
            upper, first = self.gamma_max(spec, schedule, children[0])
            runs.append(first)
            if upper is None:
                return None, runs
        low, high = 0.0, upper
        for child in children[1:]:
            middle = 0.5 * (low + high)
            result = self.anneal(spec.model_copy(update={"epsilon": middle}), schedule, child)
            runs.append(result)
            if result.feasible:
                high = middle
            else:
                low = middle
        logger.info(f"gamma_0 in ({low:.3e}, {high:.3e}]")
        return high, runs

    def epsilon_sweep(
        self,
        spec: QosSpec,
        epsilons: Sequence[float],
        schedule: AnnealSchedule,
        seed: Seed = 0,
    ) -> List[OptimizationResult]:
        children = as_seed_sequence(seed).spawn(len(epsilons))
        return [
            self.anneal(spec.model_copy(update={"epsilon": eps}), schedule, child)
            for eps, child in zip(epsilons, children)
        ]

    def buffer_search(
        self,
        spec: QosSpec,
        buffers: Sequence[int],
        delta_e_db: float,
        epsilon: Optional[float],
        schedule: AnnealSchedule,
        seed: Seed = 0,
    ) -> BufferSearchResult:
        """
        Smallest B in the candidate set whose constrained optimum improves on the
        smallest candidate by at least delta_e_db while keeping gamma <= epsilon.
        """
        if not buffers:
            raise ValueError("candidate buffer set must not be empty")
        candidates = sorted(buffers)
        children = as_seed_sequence(seed).spawn(len(candidates))
        runs = [
            self.anneal(spec.model_copy(update={"buffer": b, "epsilon": epsilon}), schedule, child)
            for b, child in zip(candidates, children)
        ]
        baseline = runs[0]
        gains = {
            b: (baseline.best_energy_db - run.best_energy_db) if run.feasible and baseline.feasible else -math.inf
            for b, run in zip(candidates, runs)
        }
        b_star = None
        if baseline.feasible:
            for b, run in zip(candidates, runs):
                within = epsilon is None or (run.gamma is not None and run.gamma <= epsilon + 1e-12)
                if run.feasible and within and gains[b] >= delta_e_db:
                    b_star = b
                    break
        if b_star is None:
            logger.info(f"no buffer in {candidates} reaches a {delta_e_db} dB gain")
        else:
            logger.info(f"B*={b_star} with gain {gains[b_star]:.2f} dB")
        return BufferSearchResult(
            b_star=b_star,
            baseline_buffer=candidates[0],
            target_gain_db=delta_e_db,
            gains_db=gains,
            runs=runs,
        )
