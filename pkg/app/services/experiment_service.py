"""
Path: app/services/experiment_service.py
Description: Batch experiment runner behind the command-line interface
Purpose: Expands an experiment config into (sweep value, seed) jobs, runs each job
through the library services (in worker processes when asked to) and turns the
outcomes into result rows and per-sweep-value summaries
"""

import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple
import numpy as np

from app.distributions import UndefinedDistributionError
from app.schemas.energy import FiniteKInstance, to_db
from app.schemas.experiment import ExperimentConfig, FiniteKRow, JobOutcome, ResultRow, SummaryRow
from app.services.annealing_service import AnnealingService
from app.services.chain_service import ChainService, PolicyValidationError
from app.services.channel_service import ChannelService
from app.services.energy_service import EnergyService
from app.services.finite_k_service import FiniteKService, InfeasibleErrorVarianceError
from app.services.random_streams import as_seed_sequence
from app.services.simulation_service import SimulationService
from app.logging_config import get_logger

logger = get_logger(__name__)

COMMANDS = ("optimize", "sweep", "simulate", "gamma-max", "buffer-search", "finite-k")
# commands whose energy column can switch to the CSO energy through beta2
ANNEALING_COMMANDS = ("optimize", "sweep", "simulate", "gamma-max", "buffer-search")

Task = Tuple[str, ExperimentConfig, Optional[float], int]


class ConfigurationError(ValueError):
    """A config that parses but cannot drive the requested command."""


def run_task(task: Task) -> JobOutcome:
    command, config, value, seed = task
    return ExperimentService(config).run_point(command, value, seed)


class ExperimentService:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.channel = ChannelService(config.system)
        self.chain = ChainService(self.channel.fading)
        self.energy = EnergyService(config.system, self.channel, self.chain)
        self.annealer = AnnealingService(self.energy, self.chain)
        self.simulator = SimulationService(self.channel)
        self.finite_k = FiniteKService()

    def check(self, command: str) -> None:
        """Raise ConfigurationError when the config lacks what `command` needs."""
        if command not in COMMANDS:
            raise ConfigurationError(f"unknown command {command!r}")
        config = self.config
        if command == "sweep" and (config.sweep is None or not config.sweep.values):
            raise ConfigurationError("the sweep command needs a sweep axis with values")
        if command == "buffer-search":
            if config.buffer_search is None:
                raise ConfigurationError("buffer-search needs a buffer_search block")
            if config.sweep is not None and config.sweep.axis == "B":
                raise ConfigurationError("buffer-search cannot sweep B")
        if command == "finite-k" and config.finite_k is None:
            raise ConfigurationError("finite-k needs a finite_k block")
        for value in self.values(command):
            point = config.at(value)
            if command in ANNEALING_COMMANDS and point.beta2 is not None and point.qos.nu_d > 0:
                raise ConfigurationError("CSO energy (beta2) needs error-free transmission, nu_d = 0")
            if command == "simulate" and point.policy is not None:
                try:
                    self.chain.build_policy(point.policy, point.qos)
                except PolicyValidationError as e:
                    raise ConfigurationError(f"policy does not fit the QoS spec: {e}") from e

    def values(self, command: str) -> List[Optional[float]]:
        if command == "optimize":
            return [None]
        values = self.config.sweep_values()
        if values == [None]:
            return values
        return sorted(values)

    def tasks(self, command: str) -> List[Task]:
        seeds = sorted(self.config.seeds)
        if command == "finite-k":
            seeds = seeds[:1]
        return [(command, self.config, value, seed) for value in self.values(command) for seed in seeds]

    def run(self, command: str, jobs: int = 1) -> List[JobOutcome]:
        """Run every (sweep value, seed) job; outcomes come back in task order for any job count."""
        self.check(command)
        tasks = self.tasks(command)
        logger.info(f"running {command}: {len(tasks)} jobs on {jobs} worker(s)")
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(run_task, tasks))
        return [run_task(task) for task in tasks]

    def run_point(self, command: str, value: Optional[float], seed: int) -> JobOutcome:
        point = self.config.at(value)
        start = time.perf_counter()
        handlers = {
            "optimize": self._optimize,
            "sweep": self._optimize,
            "gamma-max": self._gamma_max,
            "simulate": self._simulate,
            "buffer-search": self._buffer_search,
            "finite-k": self._finite_k,
        }
        try:
            outcome = handlers[command](command, point, seed)
        except Exception as e:
            logger.error(f"{command} failed at sweep value {value}, seed {seed}: {e}")
            raise
        wall_ms = (time.perf_counter() - start) * 1000.0
        rows = [row.model_copy(update={"wall_ms": wall_ms, "sweep_value": value}) for row in outcome.rows]
        return outcome.model_copy(update={"rows": rows})

    @staticmethod
    def _energy_values(energy: Optional[float]) -> Dict[str, Optional[float]]:
        return {"ebn0_linear": energy, "ebn0_db": None if energy is None else to_db(energy)}

    def _reported_energy(self, point: ExperimentConfig, result) -> Optional[float]:
        """CST energy of the best policy, or its CSO energy when the point sets beta2."""
        if not result.feasible:
            return None
        if point.beta2 is None:
            return result.best_energy
        return self.energy.evaluate(result.best_policy, result.solution, point.beta2).ebn0_cso

    def _optimize(self, command: str, point: ExperimentConfig, seed: int) -> JobOutcome:
        result = self.annealer.anneal(point.qos, point.schedule, seed)
        row = ResultRow.for_point(
            command,
            point,
            seed,
            theta_r=result.theta_r,
            gamma=result.gamma,
            feasible=result.feasible,
            evaluations=result.evaluations,
            **self._energy_values(self._reported_energy(point, result)),
        )
        return JobOutcome(rows=[row])

    def _gamma_max(self, command: str, point: ExperimentConfig, seed: int) -> JobOutcome:
        gamma_m, result = self.annealer.gamma_max(point.qos, point.schedule, seed)
        unconstrained = point.model_copy(update={"qos": point.qos.model_copy(update={"epsilon": None})})
        row = ResultRow.for_point(
            command,
            unconstrained,
            seed,
            theta_r=result.theta_r,
            gamma=gamma_m,
            feasible=result.feasible,
            evaluations=result.evaluations,
            **self._energy_values(self._reported_energy(point, result)),
        )
        return JobOutcome(rows=[row])

    def _simulate(self, command: str, point: ExperimentConfig, seed: int) -> JobOutcome:
        anneal_seed, sim_seed = as_seed_sequence(seed).spawn(2)
        evaluations = 0
        if point.policy is not None:
            policy = self.chain.build_policy(point.policy, point.qos)
        else:
            result = self.annealer.anneal(point.qos, point.schedule, anneal_seed)
            evaluations = result.evaluations
            if not result.feasible:
                row = ResultRow.for_point(command, point, seed, feasible=False, evaluations=evaluations)
                return JobOutcome(rows=[row], notes=[f"seed {seed}: no feasible policy to simulate"])
            policy = result.best_policy

        solution = self.chain.solve(policy)
        try:
            vu = self.energy.with_channel(self.energy.vu_fading_distribution(policy, solution.pi))
        except UndefinedDistributionError as e:
            logger.warning(f"simulating without an energy estimate: {e}")
            vu = None
        thresholds = self.chain.thresholds_from_policy(policy)
        report = self.simulator.simulate(thresholds, point.qos, point.slots, sim_seed, vu)
        verdict = self.simulator.validate_against_chain(report, solution)
        row = ResultRow.for_point(
            command,
            point,
            seed,
            theta_r=report.empirical_theta_r,
            gamma=report.empirical_gamma,
            feasible=self.chain.check_constraints(solution, point.qos),
            evaluations=evaluations,
            **self._energy_values(report.energy_estimate),
        )
        worst = max(verdict.statistics.values())
        status = "agrees with" if verdict.passed else "disagrees with"
        note = f"seed {seed}: simulation {status} the chain (max |z| = {worst:.2f})"
        if verdict.failures:
            note += f", outside the band: {', '.join(verdict.failures)}"
        return JobOutcome(rows=[row], notes=[note])

    def _buffer_search(self, command: str, point: ExperimentConfig, seed: int) -> JobOutcome:
        search = point.buffer_search
        found = self.annealer.buffer_search(
            point.qos, search.buffers, search.delta_e_db, point.qos.epsilon, point.schedule, seed
        )
        rows = []
        for b, result in zip(sorted(search.buffers), found.runs):
            candidate = point.model_copy(update={"qos": point.qos.model_copy(update={"buffer": b})})
            rows.append(
                ResultRow.for_point(
                    command,
                    candidate,
                    seed,
                    theta_r=result.theta_r,
                    gamma=result.gamma,
                    feasible=result.feasible,
                    evaluations=result.evaluations,
                    **self._energy_values(self._reported_energy(candidate, result)),
                )
            )
        if found.found:
            note = f"seed {seed}: B*={found.b_star} (gain {found.gains_db[found.b_star]:.2f} dB)"
        else:
            note = f"seed {seed}: no buffer reaches {search.delta_e_db} dB"
        return JobOutcome(rows=rows, notes=[note])

    def _finite_k(self, command: str, point: ExperimentConfig, seed: int) -> JobOutcome:
        block = point.finite_k
        instance = FiniteKInstance.from_load_factors(
            block.gains,
            point.system.spectral_efficiency,
            block.load_factors,
            beta2=block.beta2,
            noise_density=point.system.noise_density,
        )
        exact = rank_one = None
        try:
            exact = self.finite_k.finite_k_sic_energy(instance)
        except InfeasibleErrorVarianceError as e:
            logger.info(str(e))
        first_order = self.finite_k.finite_k_approximation(instance, first_order=True)
        try:
            rank_one = self.finite_k.finite_k_approximation(instance, first_order=False)
        except InfeasibleErrorVarianceError as e:
            logger.info(str(e))

        def entry(values, k):
            return None if values is None else float(values[k])

        users = [
            FiniteKRow(
                beta2=instance.beta2,
                user=k,
                gain=instance.gains[k],
                rate=instance.rates[k],
                energy_exact=entry(exact, k),
                energy_first_order=entry(first_order, k),
                energy_rank_one=entry(rank_one, k),
            )
            for k in range(instance.users)
        ]
        energy = None if exact is None else float(np.sum(exact) / np.sum(instance.rates))
        row = ResultRow.for_point(
            command,
            point.model_copy(update={"beta2": instance.beta2}),
            seed,
            feasible=exact is not None,
            **self._energy_values(energy),
        )
        return JobOutcome(rows=[row], finite_k_rows=users)

    def summarize(self, outcomes: List[JobOutcome]) -> List[SummaryRow]:
        """Mean, min and max over seeds for every (sweep value, N, B) group."""
        axis = self.config.sweep.axis if self.config.sweep is not None else ""
        groups: Dict[tuple, List[ResultRow]] = {}
        for outcome in outcomes:
            for row in outcome.rows:
                groups.setdefault((row.command, row.sweep_value, row.N, row.B), []).append(row)

        summary = []
        for (command, value, N, B), rows in groups.items():
            stats = {}
            for column in ("ebn0_db", "theta_r", "gamma"):
                data = np.array(
                    [getattr(r, column) for r in rows if r.feasible and getattr(r, column) is not None],
                    dtype=float,
                )
                data = data[np.isfinite(data)]
                if data.size:
                    stats.update({
                        f"{column}_mean": float(data.mean()),
                        f"{column}_min": float(data.min()),
                        f"{column}_max": float(data.max()),
                    })
            summary.append(
                SummaryRow(
                    command=command,
                    axis=axis if value is not None else "",
                    value=value,
                    N=N,
                    B=B,
                    runs=len(rows),
                    feasible=sum(r.feasible for r in rows),
                    **stats,
                )
            )
        return summary
