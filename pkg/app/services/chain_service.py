"""
Path: app/services/chain_service.py
Description: Finite-state Markov chain of the opportunistic scheduler
Purpose: Builds transition matrices from scheduling probabilities (homogeneous and
heterogeneous CCON populations), converts between probabilities and fading thresholds,
and solves for the steady state, the average drop rate and the CCON violation probability
"""

import warnings
from typing import List, Optional, Sequence
import numpy as np
from scipy import linalg

from app.distributions import DistributionInterface, ExponentialFading
from app.models.chain import ChainSolution
from app.models.policy import Policy, ThresholdTable, frozen_array
from app.schemas.qos import QosSpec
from app.logging_config import get_logger

logger = get_logger(__name__)

PROBABILITY_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-10
CONSTRAINT_SLACK = 1e-12


class PolicyValidationError(ValueError):
    pass


class ReducibleChainError(ArithmeticError):
    """The balance equations have no unique solution (reducible or degenerate chain)."""


class ChainConsistencyError(ArithmeticError):
    pass


class ChainService:
    def __init__(self, fading: Optional[DistributionInterface] = None):
        self.fading = fading or ExponentialFading()

    # State decoding
    @staticmethod
    def buffered(p: int, spec: QosSpec) -> int:
        return min(p, spec.buffer)

    @staticmethod
    def successive_drops(p: int, spec: QosSpec) -> int:
        return max(0, p - spec.buffer)

    def validate_rows(self, rows: Sequence[Sequence[float]], spec: QosSpec) -> List[np.ndarray]:
        M, B = spec.states, spec.buffer
        if len(rows) != M + 1:
            raise PolicyValidationError(f"expected {M + 1} rows, got {len(rows)}")
        checked = []
        for p, row in enumerate(rows):
            row = np.asarray(row, dtype=float)
            expected = min(p, B) + 1
            if row.shape != (expected,):
                raise PolicyValidationError(
                    f"row {p} must have {expected} entries, got shape {row.shape}"
                )
            if np.any(~np.isfinite(row)) or np.any(row < -PROBABILITY_TOLERANCE) or np.any(row > 1 + PROBABILITY_TOLERANCE):
                raise PolicyValidationError(f"row {p} has probabilities outside [0, 1]")
            if row.sum() > 1 + PROBABILITY_TOLERANCE:
                raise PolicyValidationError(f"row {p} sums to {row.sum()} > 1")
            row = np.clip(row, 0.0, 1.0)
            total = row.sum()
            if total > 1.0:
                row = row / total
            checked.append(row)
        return checked

    def build_policy(self, rows: Sequence[Sequence[float]], spec: QosSpec) -> Policy:
        """
        Q[p][q] = nu_s * a[p][q] for q <= min(p,B); the no-schedule mass plus the
        NACK mass moves p to p+1 (state M stays in M).
        """
        if spec.heterogeneous:
            return self.build_heterogeneous_policy(rows, spec)
        checked = self.validate_rows(rows, spec)
        matrix = self._scheduling_block(checked, spec)
        M = spec.states
        for p, row in enumerate(checked):
            forward = 1.0 - spec.nu_s * row.sum()
            matrix[p, min(p + 1, M)] += forward
        return self._policy(checked, matrix, spec)

    def build_heterogeneous_policy(self, rows: Sequence[Sequence[float]], spec: QosSpec) -> Policy:
        """
        Row B spreads its drop mass over burst-start states: a user with CCON value
        N_a starts its burst at q = B + 1 + (N - N_a), with weight zeta(N_a).
        """
        if not spec.heterogeneous:
            raise PolicyValidationError("heterogeneous policy needs a ccon_distribution")
        checked = self.validate_rows(rows, spec)
        matrix = self._scheduling_block(checked, spec)
        M, B, N = spec.states, spec.buffer, spec.ccon
        for p, row in enumerate(checked):
            forward = 1.0 - spec.nu_s * row.sum()
            if p == B:
                for n_a in range(1, N + 1):
                    matrix[B, B + 1 + (N - n_a)] += spec.zeta(n_a) * forward
            else:
                matrix[p, min(p + 1, M)] += forward
        return self._policy(checked, matrix, spec)

    def _scheduling_block(self, rows: List[np.ndarray], spec: QosSpec) -> np.ndarray:
        M = spec.states
        matrix = np.zeros((M + 1, M + 1))
        for p, row in enumerate(rows):
            matrix[p, : row.size] = spec.nu_s * row
        return matrix

    def _policy(self, rows: List[np.ndarray], matrix: np.ndarray, spec: QosSpec) -> Policy:
        row_sums = matrix.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > PROBABILITY_TOLERANCE:
            raise PolicyValidationError(f"transition matrix rows do not sum to one: {row_sums}")
        return Policy(
            spec=spec,
            sched_probs=tuple(frozen_array(row) for row in rows),
            matrix=frozen_array(matrix),
        )

    # Thresholds
    def thresholds_from_policy(self, policy: Policy) -> ThresholdTable:
        """kappa[p][q] = F^-1(1 - sum_{m<=q} a[p][m]); never-selected intervals map to inf."""
        kappa = []
        for row in policy.sched_probs:
            cumulative = np.cumsum(row)
            levels = 1.0 - cumulative
            values = np.empty_like(levels)
            values[levels <= PROBABILITY_TOLERANCE] = self.fading.support()[0]
            values[levels >= 1.0] = np.inf
            interior = (levels > PROBABILITY_TOLERANCE) & (levels < 1.0)
            if np.any(interior):
                values[interior] = self.fading.quantile(levels[interior])
            kappa.append(frozen_array(np.maximum.accumulate(values[::-1])[::-1]))
        return ThresholdTable(buffer=policy.buffer, kappa=tuple(kappa))

    def policy_from_thresholds(self, table: ThresholdTable) -> List[np.ndarray]:
        """a[p][q] = F(kappa[p][q-1]) - F(kappa[p][q]) with kappa[p][-1] = inf."""
        rows = []
        for row in table.kappa:
            cdf = np.asarray(self.fading.cdf(np.asarray(row, dtype=float)), dtype=float)
            upper = np.concatenate(([1.0], cdf[:-1]))
            rows.append(np.clip(upper - cdf, 0.0, 1.0))
        return rows

    @staticmethod
    def scheduled_count(p: int, f: float, table: ThresholdTable, buffer: int) -> int:
        """
        Packets scheduled in state p at fading f: L = min(p,B) - q + 1 where
        kappa[p][q] < f <= kappa[p][q-1]; zero when f is at or below the lowest threshold.
        """
        row = table.kappa[p]
        count = int(np.count_nonzero(row < f))
        return min(count, min(p, buffer) + 1)

    def mean_scheduled_packets(self, policy: Policy) -> np.ndarray:
        """Expected packets scheduled per slot in each state."""
        means = []
        for p, row in enumerate(policy.sched_probs):
            mu = min(p, policy.buffer)
            means.append(float(np.dot(row, mu - np.arange(row.size) + 1)))
        return np.array(means)

    # Steady state
    def steady_state(self, policy: Policy) -> np.ndarray:
        """
        Solve pi Q = pi with one balance equation replaced by sum(pi) = 1.

        Raises:
            ReducibleChainError: singular or ill-conditioned system, or a solution
                that fails the residual check.
        """
        Q = policy.matrix
        row_sums = Q.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > PROBABILITY_TOLERANCE:
            raise PolicyValidationError("transition matrix is not stochastic")
        n = Q.shape[0]
        system = Q.T - np.eye(n)
        system[-1, :] = 1.0
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", linalg.LinAlgWarning)
                pi = linalg.solve(system, rhs)
        except (linalg.LinAlgError, linalg.LinAlgWarning) as e:
            raise ReducibleChainError(f"steady-state system is singular: {e}") from e

        if np.any(pi < -RESIDUAL_TOLERANCE):
            raise ReducibleChainError("steady-state solution has negative mass")
        pi = np.clip(pi, 0.0, None)
        pi = pi / pi.sum()
        residual = np.max(np.abs(pi @ Q - pi))
        if residual > RESIDUAL_TOLERANCE:
            raise ReducibleChainError(f"steady-state residual {residual:.2e} too large")
        return pi

    def drop_rate(self, policy: Policy, pi: np.ndarray) -> float:
        """
        Average drop rate: the non-delivered mass of states B..M. The
        transition-counting form is evaluated as a cross-check.
        """
        spec = policy.spec
        B, M = spec.buffer, spec.states
        Q = policy.matrix
        delivered = spec.nu_s * policy.scheduled_mass
        canonical = float(np.sum((1.0 - delivered[B:]) * pi[B:]))

        transitions = float(sum(Q[p, p + 1] * pi[p] for p in range(B, M)) + Q[M, M] * pi[M])
        if policy.heterogeneous:
            transitions += float(pi[B] * Q[B, B + 2:].sum())
        if abs(canonical - transitions) > PROBABILITY_TOLERANCE:
            raise ChainConsistencyError(
                f"drop-rate forms disagree: {canonical!r} vs {transitions!r}"
            )
        return canonical

    def ccon_violation(self, policy: Policy, pi: np.ndarray) -> float:
        """Mass of the state-M self transition: (1 - nu_s sum_q a[M][q]) pi_M."""
        spec = policy.spec
        M = spec.states
        return float((1.0 - spec.nu_s * policy.sched_probs[M].sum()) * pi[M])

    def solve(self, policy: Policy) -> ChainSolution:
        pi = self.steady_state(policy)
        return ChainSolution(
            pi=frozen_array(pi),
            theta_r=self.drop_rate(policy, pi),
            gamma=self.ccon_violation(policy, pi),
        )

    @staticmethod
    def check_constraints(solution: ChainSolution, spec: QosSpec) -> bool:
        """Drop-rate target, and the CCON violation bound when one is set."""
        if solution.theta_r > spec.theta_tar + CONSTRAINT_SLACK:
            return False
        if spec.constrained and solution.gamma > spec.epsilon + CONSTRAINT_SLACK:
            return False
        return True
