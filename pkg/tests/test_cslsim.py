import numpy as np
import pytest
from scipy.linalg import expm

from src.core.cslsim import (
    CHUNK_SIZE, ToySystem, build_toy_system, coherent_state, default_observables,
    dephasing_solution, ensemble_expectation, evolve_master, evolve_trajectory, min_eigenvalue,
    perturbative_expectation, purity, three_way_comparison, trajectory_rng,
)
from src.utils.error_handler import ConfigError, DomainError


@pytest.fixture
def dephasing_system():
    ell = np.array([0.0, 1.0, 2.0, 3.0])
    return ToySystem(dim=4, omega=1.0, gamma_eff=0.3, collapse_op=np.diag(ell),
                     hamiltonian=np.zeros((4, 4)), label="dephasing"), ell


def uniform_state(dim):
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def test_master_equation_matches_dephasing_solution(dephasing_system):
    system, ell = dephasing_system
    psi = uniform_state(4)
    rho0 = np.outer(psi, psi.conj())
    times = [0.0, 0.5, 2.0]
    states = evolve_master(system, rho0, times)
    for t, rho in zip(times, states):
        assert np.max(np.abs(rho - dephasing_solution(rho0, ell, 0.3, t))) < 1e-8
    assert purity(states[-1]) < purity(states[0])
    assert min_eigenvalue(states[-1]) > -1e-10


@pytest.mark.parametrize("collapse_op", ["number", "position-sq", "hamiltonian"])
def test_purity_never_increases_along_the_trajectory(collapse_op):
    system = build_toy_system(6, 1.0, 0.05, collapse_op)
    psi = coherent_state(6, 0.5)
    states = evolve_master(system, np.outer(psi, psi.conj()), np.linspace(0.0, 2.0, 41))
    purities = np.array([purity(rho) for rho in states])
    assert purities[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(purities) <= 1e-10)
    assert purities[-1] < purities[0]


def test_master_equation_keeps_trace_and_energy():
    system = build_toy_system(6, 1.0, 0.01, "hamiltonian")
    psi = coherent_state(6, 0.5)
    rho0 = np.outer(psi, psi.conj())
    rho = evolve_master(system, rho0, [0.0, 1.0])[-1]
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-8)
    energy = lambda r: np.trace(system.hamiltonian @ r).real
    assert energy(rho) == pytest.approx(energy(rho0), rel=1e-10)


def test_master_equation_rejects_bad_state():
    system = build_toy_system(4, 1.0, 0.1)
    with pytest.raises(DomainError):
        evolve_master(system, 2.0 * np.eye(4) / 4, [0.0, 1.0])


def test_zero_noise_trajectory_is_unitary():
    system = build_toy_system(6, 1.0, 0.002, "position-sq")
    psi0 = coherent_state(6, 0.5)
    dt, t_final = 1e-4, 1.0
    steps = int(round(t_final / dt))
    trajectory = evolve_trajectory(system, psi0, dt, seed=0, t_final=t_final,
                                   noise=np.zeros(steps), record_every=steps)
    expected = expm(-1j * system.hamiltonian * t_final) @ psi0
    assert np.max(np.abs(trajectory.states[-1] - expected)) < 1e-6
    assert trajectory.norms[-1] == pytest.approx(1.0, abs=1e-12)


def test_trajectories_are_reproducible():
    system = build_toy_system(5, 1.0, 0.01, "number")
    psi0 = coherent_state(5, 0.4)
    one = evolve_trajectory(system, psi0, 1e-2, seed=7, t_final=0.5, record_every=10)
    two = evolve_trajectory(system, psi0, 1e-2, seed=7, t_final=0.5, record_every=10)
    other = evolve_trajectory(system, psi0, 1e-2, seed=8, t_final=0.5, record_every=10)
    assert all(np.array_equal(a, b) for a, b in zip(one.states, two.states))
    assert not np.array_equal(one.states[-1], other.states[-1])
    assert np.allclose(one.norms, 1.0, atol=1e-12)
    assert len(one.expectation(system.collapse_op)) == len(one.times)


def test_trajectory_streams_are_independent():
    a = trajectory_rng(3, 0).standard_normal(4)
    b = trajectory_rng(3, 1).standard_normal(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, trajectory_rng(3, 0).standard_normal(4))


def test_step_size_precondition():
    system = build_toy_system(6, 1.0, 1.0, "position-sq")
    with pytest.raises(ConfigError):
        evolve_trajectory(system, coherent_state(6, 0.5), 0.1, seed=0, t_final=1.0)


def test_ensemble_independent_of_threads():
    system = build_toy_system(5, 1.0, 0.05, "number")
    psi0 = coherent_state(5, 0.5)
    observables = default_observables(system)
    ntraj = CHUNK_SIZE + 300
    single = ensemble_expectation(system, psi0, observables, 0.2, 1e-2, ntraj, master_seed=11, threads=1)
    pooled = ensemble_expectation(system, psi0, observables, 0.2, 1e-2, ntraj, master_seed=11, threads=3)
    assert single.means == pooled.means
    assert single.standard_errors == pooled.standard_errors
    assert single.mean_weight == pytest.approx(1.0, abs=1e-10)


@pytest.mark.slow
def test_ensemble_agrees_with_master_equation():
    system = build_toy_system(5, 1.0, 0.01, "position-sq")
    table = three_way_comparison(system, coherent_state(5, 0.5), default_observables(system),
                                 t_final=1.0, dt=2e-3, ntraj=4000, master_seed=2024)
    assert (table["ensemble_sigma"] < 3.0).all()


def test_perturbative_formula_in_its_regime():
    system = build_toy_system(6, 1.0, 2e-4, "number")
    psi0 = coherent_state(6, 0.5)
    x2 = default_observables(system)["x2"]
    rho0 = np.outer(psi0, psi0.conj())
    master = np.trace(x2 @ evolve_master(system, rho0, [0.0, 1.0])[-1]).real
    result = perturbative_expectation(system, x2, psi0, 1.0)
    assert result.perturbative
    assert result.regime_parameter < 0.1
    assert result.correction != 0.0
    assert abs(result.value - master) < 0.01 * abs(master)


def test_perturbative_formula_flags_strong_collapse():
    system = build_toy_system(6, 1.0, 0.5, "number")
    result = perturbative_expectation(system, system.collapse_op, coherent_state(6, 0.5), 1.0)
    assert not result.perturbative
    assert result.correction == pytest.approx(0.0, abs=1e-12)


def test_three_way_table_columns():
    system = build_toy_system(4, 1.0, 1e-3, "position-sq")
    table = three_way_comparison(system, coherent_state(4, 0.3), default_observables(system),
                                 t_final=0.2, dt=1e-2, ntraj=64, master_seed=1)
    assert list(table["observable"]) == ["L", "L2", "x2"]
    assert {"master", "ensemble", "ensemble_se", "perturbative", "regime_parameter"} <= set(table.columns)


def test_toy_system_validation():
    with pytest.raises(DomainError):
        build_toy_system(2, 1.0, 0.1)
    with pytest.raises(DomainError):
        build_toy_system(4, 1.0, 0.1, "momentum")
    with pytest.raises(DomainError):
        ToySystem(dim=3, omega=1.0, gamma_eff=0.1, collapse_op=np.triu(np.ones((3, 3))),
                  hamiltonian=np.eye(3))
    with pytest.raises(DomainError):
        build_toy_system(4, 1.0, -0.1)
