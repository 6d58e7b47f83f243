# src/core/cslsim.py
"""
Single-Mode Collapse Toy
A truncated oscillator evolved under the collapse dynamics three ways: the
double-commutator master equation, an ensemble of linear Stratonovich
trajectories and the second-order interaction-picture formula.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.linalg import eigvalsh, expm

from src.core.quadrature import parallel_map, uniform_rule
from src.utils.error_handler import ConfigError, DomainError, IntegrationError
from src.utils.logger import get_logger

logger = get_logger("CSLSim")

COLLAPSE_OPERATORS = ("number", "position-sq", "hamiltonian")
HERMITIAN_TOL = 1e-12
TRACE_DRIFT_TOL = 1e-8
POSITIVITY_TOL = 1e-10
STEP_BOUND = 0.1  # lambda dt ||L||^2 per trajectory step
PERTURBATIVE_BOUND = 0.1  # lambda t ||L||^2 for the second-order formula
MASTER_RTOL = 1e-12
MASTER_ATOL = 1e-14
CHUNK_SIZE = 1024  # trajectories per batch, fixed so results do not depend on threads
TPRIME_ORDER = 16


def _hermitian_error(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def _spectral_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(eigvalsh(matrix)))) if matrix.size else 0.0


@dataclass(frozen=True)
class ToySystem:
    """Truncated single-mode system with one Hermitian collapse operator"""
    dim: int
    omega: float
    gamma_eff: float  # effective collapse strength after contracting the spatial correlator
    collapse_op: np.ndarray = field(repr=False)
    hamiltonian: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        if self.dim < 3:
            raise DomainError(f"dim must be >= 3, got {self.dim}")
        if not (math.isfinite(self.gamma_eff) and self.gamma_eff >= 0):
            raise DomainError(f"gamma_eff must be finite and >= 0, got {self.gamma_eff!r}")
        for name in ("collapse_op", "hamiltonian"):
            matrix = np.asarray(getattr(self, name), dtype=complex)
            if matrix.shape != (self.dim, self.dim):
                raise DomainError(f"{name} must be {self.dim}x{self.dim}, got {matrix.shape}")
            if _hermitian_error(matrix) > HERMITIAN_TOL:
                raise DomainError(f"{name} is not Hermitian (error {_hermitian_error(matrix):.2e})")
            object.__setattr__(self, name, matrix)

    @property
    def collapse_norm(self) -> float:
        return _spectral_norm(self.collapse_op)


@dataclass
class Trajectory:
    """One noise realization; norms are tracked apart from the stored vectors"""
    seed: int
    times: List[float]
    states: List[np.ndarray]
    norms: List[float]

    def expectation(self, observable: np.ndarray) -> np.ndarray:
        """<psi|O|psi> along the trajectory, unnormalized"""
        return np.array([np.real(np.vdot(psi, observable @ psi)) for psi in self.states])


def build_toy_system(dim: int, omega: float, lambda_eff: float,
                     collapse_op: str = "number") -> ToySystem:
    """
    Truncated oscillator H = omega (n + 1/2) with x = (a + a^dagger)/sqrt(2 omega).

    Args:
        dim: Fock-space truncation
        omega: oscillator frequency
        lambda_eff: effective collapse strength
        collapse_op: "number", "position-sq" (x^2) or "hamiltonian" (H itself)
    """
    if collapse_op not in COLLAPSE_OPERATORS:
        raise DomainError(f"collapse_op must be one of {COLLAPSE_OPERATORS}, got {collapse_op!r}")
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    if dim < 3:
        raise DomainError(f"dim must be >= 3, got {dim}")
    n = np.arange(dim, dtype=float)
    lower = np.diag(np.sqrt(n[1:]), k=1).astype(complex)
    hamiltonian = np.diag(omega * (n + 0.5)).astype(complex)
    if collapse_op == "number":
        op = np.diag(n).astype(complex)
    elif collapse_op == "position-sq":
        x = (lower + lower.conj().T) / math.sqrt(2.0 * omega)
        op = x @ x
    else:
        op = hamiltonian.copy()
    return ToySystem(dim=dim, omega=omega, gamma_eff=lambda_eff, collapse_op=op,
                     hamiltonian=hamiltonian, label=collapse_op)


def position_operator(system: ToySystem) -> np.ndarray:
    n = np.arange(system.dim, dtype=float)
    lower = np.diag(np.sqrt(n[1:]), k=1).astype(complex)
    return (lower + lower.conj().T) / math.sqrt(2.0 * system.omega)


def coherent_state(dim: int, alpha: complex) -> np.ndarray:
    """Truncated, renormalized coherent state"""
    n = np.arange(dim)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    amps = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * log_fact) * np.power(complex(alpha), n)
    return amps / np.linalg.norm(amps)


# -- master equation ---------------------------------------------------------

def _master_rhs(system: ToySystem, rho: np.ndarray) -> np.ndarray:
    h, l = system.hamiltonian, system.collapse_op
    drho = -1j * (h @ rho - rho @ h)
    if system.gamma_eff:
        inner = l @ rho - rho @ l
        drho -= 0.5 * system.gamma_eff * (l @ inner - inner @ l)
    return drho


def _check_density_matrix(rho: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DomainError(f"rho0 must be {dim}x{dim}, got {rho.shape}")
    if _hermitian_error(rho) > HERMITIAN_TOL:
        raise DomainError("rho0 is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_DRIFT_TOL:
        raise DomainError(f"rho0 must have unit trace, got {np.trace(rho)!r}")
    if min_eigenvalue(rho) < -POSITIVITY_TOL:
        raise DomainError("rho0 is not positive semidefinite")
    return rho


def evolve_master(system: ToySystem, rho0: np.ndarray, t_grid: Sequence[float]) -> List[np.ndarray]:
    """
    rho(t) on t_grid for d rho/dt = -i[H, rho] - (lambda/2)[L, [L, rho]].

    Integrated with solve_ivp (DOP853) on the flattened density matrix.

    Raises:
        IntegrationError: solver failure, trace drift above 1e-8 or loss of positivity
    """
    rho = _check_density_matrix(rho0, system.dim)
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0):
        raise DomainError("t_grid must be a non-empty, non-decreasing sequence")
    if times[-1] == times[0]:
        return [rho.copy() for _ in times]

    shape = rho.shape

    def rhs(_t, y):
        return _master_rhs(system, y.reshape(shape)).ravel()

    solution = solve_ivp(rhs, (times[0], times[-1]), rho.ravel(), method="DOP853", t_eval=times,
                         rtol=MASTER_RTOL, atol=MASTER_ATOL)
    if not solution.success:
        raise IntegrationError(f"master equation solver failed: {solution.message}")
    states = []
    for t, column in zip(times, solution.y.T):
        rho = column.reshape(shape)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > TRACE_DRIFT_TOL:
            raise IntegrationError(f"trace drifted by {drift:.2e} at t = {t:.6g}")
        lowest = min_eigenvalue(rho)
        if lowest < -POSITIVITY_TOL:
            raise IntegrationError(f"density matrix lost positivity at t = {t:.6g} (min eig {lowest:.2e})")
        states.append(rho)
    return states


def dephasing_solution(rho0: np.ndarray, eigenvalues: Sequence[float], lambda_eff: float,
                       t: float) -> np.ndarray:
    """rho_ij(0) exp(-(lambda/2)(l_i - l_j)^2 t) for H = 0 and diagonal L"""
    ell = np.asarray(eigenvalues, dtype=float)
    gap = ell[:, None] - ell[None, :]
    return np.asarray(rho0, dtype=complex) * np.exp(-0.5 * lambda_eff * gap ** 2 * t)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(np.min(eigvalsh(0.5 * (rho + np.conj(rho).T))))


# -- linear stochastic unraveling --------------------------------------------

def _check_step(system: ToySystem, dt: float):
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt!r}", field_name="dt")
    measure = system.gamma_eff * dt * system.collapse_norm ** 2
    if measure >= STEP_BOUND:
        raise ConfigError(
            f"step too large: lambda dt ||L||^2 = {measure:.3g} must stay below {STEP_BOUND}",
            field_name="dt")


def _check_state(psi0: np.ndarray, dim: int) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex).ravel()
    if psi.shape != (dim,):
        raise DomainError(f"psi0 must have {dim} components, got {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DomainError("psi0 must be normalized")
    return psi


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent stream for trajectory `index` of an ensemble seeded with master_seed"""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),)))


def _midpoint_steps(system: ToySystem, psi: np.ndarray, increments: np.ndarray, dt: float) -> np.ndarray:
    """
    Stratonovich midpoint steps for a batch of states.

    psi has shape (batch, dim) and increments (batch, steps). Each step solves
    (1 + i theta/2) psi_new = (1 - i theta/2) psi with theta = H dt + sqrt(lambda) L dW,
    which keeps the norm for Hermitian theta.
    """
    eye = np.eye(system.dim, dtype=complex)
    h, l = system.hamiltonian, system.collapse_op
    root = math.sqrt(system.gamma_eff)
    for step in range(increments.shape[1]):
        theta = dt * h[None, :, :] + root * increments[:, step, None, None] * l[None, :, :]
        lhs = eye[None, :, :] + 0.5j * theta
        rhs = np.einsum("bij,bj->bi", eye[None, :, :] - 0.5j * theta, psi)
        psi = np.linalg.solve(lhs, rhs[:, :, None])[:, :, 0]
    return psi


def evolve_trajectory(system: ToySystem, psi0: np.ndarray, dt: float, seed: int,
                      t_final: float, noise: Optional[np.ndarray] = None,
                      record_every: int = 1) -> Trajectory:
    """
    One trajectory of d psi = -i (H dt + sqrt(lambda) L o dW) psi.

    Args:
        system: toy system
        psi0: normalized initial state
        dt: step; lambda dt ||L||^2 must stay below 0.1
        seed: stream seed; equal seeds give bit-identical trajectories
        t_final: end time
        noise: explicit Wiener increments (e.g. zeros for the noise-free limit)
        record_every: store every n-th state

    Raises:
        ConfigError: step-size precondition violated
    """
    _check_step(system, dt)
    psi = _check_state(psi0, system.dim)
    steps = max(1, int(round(t_final / dt)))
    if noise is None:
        increments = trajectory_rng(seed, 0).standard_normal(steps) * math.sqrt(dt)
    else:
        increments = np.asarray(noise, dtype=float).ravel()
        if increments.size != steps:
            raise DomainError(f"noise must have {steps} increments, got {increments.size}")
    batch = psi[None, :]
    states, norms, times = [psi.copy()], [1.0], [0.0]
    for start in range(0, steps, record_every):
        stop = min(steps, start + record_every)
        batch = _midpoint_steps(system, batch, increments[None, start:stop], dt)
        if not np.all(np.isfinite(batch)):
            raise IntegrationError(f"trajectory {seed} diverged at step {stop}")
        states.append(batch[0].copy())
        norms.append(float(np.linalg.norm(batch[0])))
        times.append(stop * dt)
    return Trajectory(seed=seed, times=times, states=states, norms=norms)


@dataclass
class EnsembleResult:
    """Linear-unraveling averages E[<psi|O|psi>] with standard errors"""
    means: Dict[str, float]
    standard_errors: Dict[str, float]
    ntraj: int
    t_final: float
    mean_weight: float  # E[||psi||^2]

    def as_dict(self) -> Dict[str, object]:
        return {"means": self.means, "standard_errors": self.standard_errors, "ntraj": self.ntraj,
                "t_final": self.t_final, "mean_weight": self.mean_weight}


def ensemble_expectation(system: ToySystem, psi0: np.ndarray, observables: Mapping[str, np.ndarray],
                         t_final: float, dt: float, ntraj: int, master_seed: int = 0,
                         threads: int = 1) -> EnsembleResult:
    """
    Average of <psi(t)|O|psi(t)> over ntraj trajectories.

    Trajectory i draws its increments from trajectory_rng(master_seed, i); batches
    of CHUNK_SIZE run in parallel and are reduced in index order, so the result
    does not depend on the thread count.
    """
    _check_step(system, dt)
    psi = _check_state(psi0, system.dim)
    if ntraj < 2:
        raise DomainError(f"ntraj must be >= 2, got {ntraj}")
    steps = max(1, int(round(t_final / dt)))
    ops = {name: np.asarray(op, dtype=complex) for name, op in observables.items()}

    def run_chunk(start: int) -> Dict[str, np.ndarray]:
        indices = range(start, min(ntraj, start + CHUNK_SIZE))
        increments = np.stack([trajectory_rng(master_seed, i).standard_normal(steps) for i in indices])
        final = _midpoint_steps(system, np.repeat(psi[None, :], len(indices), axis=0),
                                increments * math.sqrt(dt), dt)
        values = {name: np.real(np.einsum("bi,ij,bj->b", final.conj(), op, final))
                  for name, op in ops.items()}
        values["__weight__"] = np.real(np.einsum("bi,bi->b", final.conj(), final))
        return values

    chunks = parallel_map(run_chunk, range(0, ntraj, CHUNK_SIZE), threads)
    means, errors = {}, {}
    for name in list(ops) + ["__weight__"]:
        samples = np.concatenate([chunk[name] for chunk in chunks])
        means[name] = float(np.mean(samples))
        errors[name] = float(np.std(samples, ddof=1) / math.sqrt(samples.size))
    weight = means.pop("__weight__")
    errors.pop("__weight__")
    logger.debug(f"Ensemble of {ntraj} trajectories, mean weight {weight:.12f}")
    return EnsembleResult(means=means, standard_errors=errors, ntraj=ntraj, t_final=t_final,
                          mean_weight=weight)


# -- second-order interaction picture ----------------------------------------

@dataclass
class PerturbativeResult:
    value: float
    zeroth_order: float
    correction: float
    regime_parameter: float  # lambda t ||L||^2
    perturbative: bool


def perturbative_expectation(system: ToySystem, observable: np.ndarray, psi0: np.ndarray,
                             t: float, order: int = TPRIME_ORDER) -> PerturbativeResult:
    """
    <O>_0 - (lambda/2) int_0^t dt' <[L_I(t'), [L_I(t'), O_I(t)]]>_0

    Interaction-picture operators come from exact matrix exponentials; the t'
    integral uses composite Gauss-Legendre panels sized to the spectral width of H.
    A regime parameter lambda t ||L||^2 above 0.1 is flagged, not rejected.
    """
    psi = _check_state(psi0, system.dim)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    op = np.asarray(observable, dtype=complex)
    h, l = system.hamiltonian, system.collapse_op
    u_t = expm(-1j * h * t)
    o_t = u_t.conj().T @ op @ u_t
    zeroth = float(np.real(np.vdot(psi, o_t @ psi)))
    regime = system.gamma_eff * t * system.collapse_norm ** 2
    perturbative = regime <= PERTURBATIVE_BOUND
    if not perturbative:
        logger.warning(f"⚠️ second-order formula outside its regime: lambda t ||L||^2 = {regime:.3g}")
    if system.gamma_eff == 0 or t == 0:
        return PerturbativeResult(zeroth, zeroth, 0.0, regime, perturbative)

    spread = float(np.ptp(eigvalsh(h)))
    panels = max(2, int(math.ceil(spread * t / math.pi)))
    nodes, weights = uniform_rule(0.0, t, panels, order)

    def integrand(tp: float) -> float:
        u = expm(-1j * h * tp)
        l_i = u.conj().T @ l @ u
        inner = l_i @ o_t - o_t @ l_i
        double = l_i @ inner - inner @ l_i
        return float(np.real(np.vdot(psi, double @ psi)))

    integral = float(np.dot(weights, [integrand(float(tp)) for tp in nodes]))
    correction = -0.5 * system.gamma_eff * integral
    return PerturbativeResult(zeroth + correction, zeroth, correction, regime, perturbative)


def three_way_comparison(system: ToySystem, psi0: np.ndarray, observables: Mapping[str, np.ndarray],
                         t_final: float, dt: float, ntraj: int, master_seed: int = 0,
                         threads: int = 1) -> pd.DataFrame:
    """Master equation, trajectory ensemble and second-order formula side by side"""
    psi = _check_state(psi0, system.dim)
    rho0 = np.outer(psi, psi.conj())
    rho_t = evolve_master(system, rho0, [0.0, t_final])[-1]
    ensemble = ensemble_expectation(system, psi, observables, t_final, dt, ntraj, master_seed, threads)
    rows = []
    for name, op in observables.items():
        master = float(np.real(np.trace(np.asarray(op) @ rho_t)))
        pert = perturbative_expectation(system, op, psi, t_final)
        se = ensemble.standard_errors[name]
        rows.append({
            "observable": name,
            "master": master,
            "ensemble": ensemble.means[name],
            "ensemble_se": se,
            "ensemble_sigma": abs(ensemble.means[name] - master) / se if se > 0 else 0.0,
            "perturbative": pert.value,
            "perturbative_rel_diff": abs(pert.value - master) / abs(master) if master else abs(pert.value),
            "regime_parameter": pert.regime_parameter,
        })
    logger.info(f"✅ Three-way comparison over {len(rows)} observables, {ntraj} trajectories")
    return pd.DataFrame(rows)


def default_observables(system: ToySystem) -> Dict[str, np.ndarray]:
    """L, L^2 and x^2 for a toy system"""
    x = position_operator(system)
    return {"L": system.collapse_op, "L2": system.collapse_op @ system.collapse_op, "x2": x @ x}
