"""
Path: app/services/finite_k_service.py
Description: Finite-user power allocation under superposition coding and SIC
Purpose: Reference energies for K simultaneously scheduled users with fixed rates, exact
(closed telescoping form or the linear system with channel estimation error) and the
first-order approximation in the error variance
"""

from typing import Optional, Sequence
import numpy as np
from scipy import linalg

from app.schemas.energy import FiniteKInstance
from app.logging_config import get_logger

logger = get_logger(__name__)


class InfeasibleErrorVarianceError(ArithmeticError):
    """The estimation error variance is too large for any finite power allocation."""


class FiniteKService:
    @staticmethod
    def default_order(instance: FiniteKInstance) -> np.ndarray:
        """Decreasing gain: the weakest user is decoded last, free of interference."""
        return np.argsort(-np.asarray(instance.gains), kind="stable")

    def closed_form_energy(self, instance: FiniteKInstance) -> np.ndarray:
        """
        E_k = Z0 / h_k * (2^{sum_{i<=k} R_i} - 2^{sum_{i<k} R_i}) with users ranked by
        increasing gain. Only valid without estimation error.
        """
        gains = np.asarray(instance.gains, dtype=float)
        rates = np.asarray(instance.rates, dtype=float)
        ranked = np.argsort(gains, kind="stable")
        cumulative = np.concatenate(([0.0], np.cumsum(rates[ranked])))
        energies = np.empty_like(gains)
        energies[ranked] = (
            instance.noise_density / gains[ranked] * (2.0 ** cumulative[1:] - 2.0 ** cumulative[:-1])
        )
        return energies

    def coupling_matrices(self, instance: FiniteKInstance, order: Optional[Sequence[int]] = None):
        """
        Coupling matrix B and rank-one rate matrix R in decoding order: row k
        carries h_k on the diagonal and -rho_k h_j for every user j decoded after k.
        """
        order = np.asarray(order if order is not None else self.default_order(instance))
        gains = np.asarray(instance.gains, dtype=float)[order]
        rho = 2.0 ** np.asarray(instance.rates, dtype=float)[order] - 1.0
        coupling = np.diag(gains) - np.triu(np.outer(rho, gains), k=1)
        rate_matrix = np.outer(rho, np.ones_like(rho))
        return coupling, rate_matrix, rho, order

    def linear_system_energy(self, instance: FiniteKInstance, order: Optional[Sequence[int]] = None) -> np.ndarray:
        """
        Solve E = Z0 [B - beta2 R]^{-1} rho. Estimation error acts as extra
        interference beta2 * sum_j E_j on every user.

        Raises:
            InfeasibleErrorVarianceError: 1 - beta2 * 1^T B^{-1} rho <= 0.
        """
        coupling, rate_matrix, rho, order = self.coupling_matrices(instance, order)
        base = linalg.solve_triangular(coupling, rho)
        load = instance.beta2 * base.sum()
        if load >= 1.0:
            raise InfeasibleErrorVarianceError(
                f"beta2={instance.beta2} leaves no feasible allocation (load {load:.3f} >= 1)"
            )
        solution = linalg.solve(coupling - instance.beta2 * rate_matrix, rho)
        energies = np.empty_like(solution)
        energies[order] = instance.noise_density * solution
        return energies

    def finite_k_sic_energy(self, instance: FiniteKInstance, order: Optional[Sequence[int]] = None) -> np.ndarray:
        """Per-user energies in input order."""
        if instance.beta2 == 0 and order is None:
            return self.closed_form_energy(instance)
        return self.linear_system_energy(instance, order)

    def trace_term(self, instance: FiniteKInstance) -> float:
        gains = np.asarray(instance.gains, dtype=float)
        rho = 2.0 ** np.asarray(instance.rates, dtype=float) - 1.0
        return float(np.sum(rho / gains))

    def finite_k_approximation(self, instance: FiniteKInstance, first_order: bool = True) -> np.ndarray:
        """
        Scale the error-free energies by 1 + (beta2 / K) sum_k rho_k / h_k, or, with
        first_order=False, by the rank-one form 1 + x / ((1 - x) K), x = beta2 sum_k rho_k / h_k.
        """
        K = instance.users
        x = instance.beta2 * self.trace_term(instance)
        if first_order:
            factor = 1.0 + x / K
        else:
            if x >= 1.0:
                raise InfeasibleErrorVarianceError(f"rank-one approximation undefined for x={x:.3f}")
            factor = 1.0 + x / ((1.0 - x) * K)
        return factor * self.closed_form_energy(instance)
