import math

import numpy as np
import pytest

from app.schemas.qos import QosSpec
from app.schemas.schedule import AnnealSchedule
from app.services.annealing_service import AnnealingService


def test_fast_annealing_temperatures():
    schedule = AnnealSchedule(t0=100.0, c_sa=96.0)
    assert AnnealingService.fa_temperature(schedule, 0) == pytest.approx(100.0)
    assert AnnealingService.fa_temperature(schedule, 1) == pytest.approx(100.0 / 97.0)
    temperatures = [AnnealingService.fa_temperature(schedule, b) for b in range(50)]
    assert all(a > b for a, b in zip(temperatures, temperatures[1:]))


def test_temperature_needs_calibration():
    with pytest.raises(ValueError):
        AnnealingService.fa_temperature(AnnealSchedule(), 0)
    with pytest.raises(ValueError):
        AnnealingService.fa_temperature(AnnealSchedule(t0=1.0, c_sa=1.0), -1)


def test_candidates_per_temperature_default():
    assert AnnealSchedule().candidates_per_temperature(3) == 200
    assert AnnealSchedule(configs_per_temp=7).candidates_per_temperature(3) == 7


def test_random_candidate_is_uniform_on_the_simplex(rng):
    spec = QosSpec(buffer=2, ccon=1, theta_tar=0.3)
    draws = [AnnealingService.random_candidate(spec, rng) for _ in range(10_000)]
    for p in range(spec.states + 1):
        rows = np.array([d[p] for d in draws])
        k = min(p, spec.buffer) + 2
        assert rows.shape == (10_000, k - 1)
        assert np.all(rows >= 0) and np.all(rows.sum(axis=1) <= 1.0 + 1e-12)
        sigma = math.sqrt((k - 1) / (k * k * (k + 1)) / rows.shape[0])
        assert np.all(np.abs(rows.mean(axis=0) - 1.0 / k) < 4 * sigma)


def test_random_candidate_is_seeded(basic_spec):
    first = AnnealingService.random_candidate(basic_spec, np.random.default_rng(3))
    second = AnnealingService.random_candidate(basic_spec, np.random.default_rng(3))
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)


def test_local_proposal_stays_on_the_simplex(annealing_service, rng):
    spec = QosSpec(buffer=1, ccon=2, theta_tar=0.3)
    schedule = AnnealSchedule(t0=1.0, c_sa=1.0)
    current = annealing_service.random_candidate(spec, rng)
    proposal = annealing_service.propose(spec, schedule, current, 0.5, rng)
    for old, new in zip(current, proposal):
        assert new.shape == old.shape
        assert np.all(new >= 0) and new.sum() <= 1.0 + 1e-12
    annealing_service.chain.build_policy(proposal, spec)


def test_anneal_finds_feasible_policy(annealing_service, fast_energy_service, chain_service, basic_spec, short_schedule):
    result = annealing_service.anneal(basic_spec, short_schedule, seed=1)
    assert result.feasible
    assert result.seed == 1
    assert result.theta_r <= basic_spec.theta_tar + 1e-12
    assert result.evaluations == short_schedule.temp_steps * short_schedule.configs_per_temp
    assert 0 < result.energy_evaluations <= result.evaluations

    recheck = chain_service.solve(result.best_policy)
    assert recheck.theta_r == pytest.approx(result.theta_r, abs=1e-12)
    report = fast_energy_service.evaluate(result.best_policy, recheck)
    assert report.ebn0_cst == pytest.approx(result.best_energy, rel=1e-12)


def test_anneal_is_reproducible(annealing_service, basic_spec, short_schedule):
    first = annealing_service.anneal(basic_spec, short_schedule, seed=7)
    second = annealing_service.anneal(basic_spec, short_schedule, seed=7)
    assert first.best_energy == second.best_energy
    for a, b in zip(first.best_policy.sched_probs, second.best_policy.sched_probs):
        np.testing.assert_array_equal(a, b)


def test_unreachable_drop_target_is_infeasible(annealing_service, short_schedule):
    spec = QosSpec(buffer=0, ccon=1, theta_tar=0.0, nu_d=0.02)
    result = annealing_service.anneal(spec, short_schedule, seed=0)
    assert not result.feasible
    assert result.best_policy is None
    assert math.isinf(result.best_energy)
    assert result.gamma is None


def test_calibration(annealing_service, basic_spec, rng):
    schedule = AnnealSchedule(temp_steps=10, calibration_samples=30)
    calibrated = annealing_service.calibrate(basic_spec, schedule, rng)
    assert calibrated.calibrated
    assert calibrated.t0 > 0 and calibrated.c_sa > 0
    assert calibrated.temp_steps == 10

    fixed = annealing_service.calibrate(basic_spec, schedule.model_copy(update={"t0": 2.0}), rng)
    assert fixed.t0 == 2.0


def test_violation_boundaries(annealing_service, short_schedule):
    spec = QosSpec(buffer=0, ccon=2, theta_tar=0.3, nu_d=0.02)
    gamma_m, result = annealing_service.gamma_max(spec, short_schedule, seed=0)
    assert result.feasible
    assert gamma_m == result.gamma
    assert 0 <= gamma_m <= spec.theta_tar

    gamma_0, runs = annealing_service.gamma_min(spec, short_schedule, seed=0, steps=3, upper=gamma_m)
    assert len(runs) == 3
    assert 0 <= gamma_0 <= gamma_m


def test_epsilon_sweep(annealing_service, basic_spec, short_schedule):
    results = annealing_service.epsilon_sweep(basic_spec, [0.1, 0.3], short_schedule, seed=0)
    assert len(results) == 2
    for eps, result in zip([0.1, 0.3], results):
        if result.feasible:
            assert result.gamma <= eps + 1e-12


def test_buffer_search_without_gain_target(annealing_service, basic_spec, short_schedule):
    search = annealing_service.buffer_search(basic_spec, [1, 0], 0.0, None, short_schedule, seed=0)
    assert search.baseline_buffer == 0
    assert search.b_star == 0
    assert search.found
    assert search.gains_db[0] == 0.0
    assert len(search.runs) == 2


def test_buffer_search_needs_candidates(annealing_service, basic_spec, short_schedule):
    with pytest.raises(ValueError):
        annealing_service.buffer_search(basic_spec, [], 1.0, None, short_schedule)
