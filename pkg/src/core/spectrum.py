# src/core/spectrum.py
"""
Curvature Power Spectrum
Standard spectrum, closed-form collapse corrections for both eras and the
linearized operator, nested quadrature of the correction integrals and the
collapse-rate bound.
"""

import math
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.core.background import (
    CosmoParams, Era, resolve_era, scale_factor, z_factor,
)
from src.core.kernels import (
    KernelVariant, effective_kernel_scaled, kernel_linear, kernel_symmetrized,
    kernel_symmetrized_scaled, linear_kernel_leading_scaled,
)
from src.core.modes import mode
from src.core.quadrature import (
    RefinementResult, gauss_legendre, log_rule, ordered_sum, panels_for, parallel_map,
    refine, uniform_rule,
)
from src.core.scaled import ScaledArray, scaled_exp
from src.core.units import (
    DEFAULT_CONSTANTS, LAMBDA_BOUND_STATE_OF_ART_SI, LAMBDA_GRW_SI, PIVOT_PLANCK,
    R_C_PRESETS, PlanckConstants, rate_si_to_planck, wavenumber_planck_to_mpc,
)
from src.utils.error_handler import DomainError, NonConvergenceError
from src.utils.logger import get_logger

logger = get_logger("Spectrum")

# observational reference at the pivot scale
PLANCK_AMPLITUDE = 2.099e-9
PLANCK_AMPLITUDE_ERROR = 0.014e-9
PLANCK_TILT = 0.9649
PLANCK_TILT_ERROR = 0.0042
OBSERVATIONAL_ERROR = 1e-11
GAUSSIAN_TIME_FACTOR = 135.0 / 4.0


class Method(str, Enum):
    CLOSED_FORM = "ClosedForm"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class CslParams:
    """Collapse-model parameters; lambda_planck is derived from lambda_si"""
    lambda_si: float = LAMBDA_GRW_SI  # s^-1
    r_c_planck: float = R_C_PRESETS["grw"]  # M_P^-1
    m0_planck: float = DEFAULT_CONSTANTS.nucleon_mass_planck  # M_P
    lambda_grw_si: float = LAMBDA_GRW_SI  # s^-1
    constants: PlanckConstants = field(default=DEFAULT_CONSTANTS, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.lambda_si) and self.lambda_si >= 0):
            raise DomainError(f"lambda_si must be finite and >= 0, got {self.lambda_si!r}")
        for name in ("r_c_planck", "m0_planck", "lambda_grw_si"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def lambda_planck(self) -> float:
        return rate_si_to_planck(self.lambda_si, self.constants)

    def with_lambda(self, lambda_si: float) -> "CslParams":
        return replace(self, lambda_si=lambda_si)

    def as_dict(self) -> Dict[str, float]:
        return {"lambda_si": self.lambda_si, "lambda_planck": self.lambda_planck,
                "r_c_planck": self.r_c_planck, "m0_planck": self.m0_planck,
                "lambda_grw_si": self.lambda_grw_si}


@dataclass(frozen=True)
class QuadratureConfig:
    """Grids of the nested (eta', p, cos theta) quadrature"""
    q_window: Tuple[float, float] = (2e-62, 2e-58)  # M_P
    q_points: int = 5
    p_decades: int = 8
    points_per_decade: int = 32
    costheta_order: int = 24
    eta_points_per_decade: int = 8
    gl_order: int = 8
    rel_tol: float = 1e-3
    gaussian_cutoff: float = 36.0
    max_levels: int = 4
    leading_terms: int = 4
    full_window: bool = False
    eta_points_per_period: int = 8
    max_panels: int = 200_000

    def __post_init__(self):
        lo, hi = self.q_window
        if not (0 < lo < hi and math.isfinite(hi)):
            raise DomainError(f"q_window must satisfy 0 < lo < hi, got {self.q_window!r}")
        if not (0 < self.rel_tol <= 0.1):
            raise DomainError(f"rel_tol must lie in (0, 0.1], got {self.rel_tol!r}")
        for name in ("q_points", "p_decades", "points_per_decade", "costheta_order",
                     "eta_points_per_decade", "gl_order", "max_levels", "eta_points_per_period"):
            if getattr(self, name) < 2:
                raise DomainError(f"{name} must be >= 2, got {getattr(self, name)!r}")
        if not self.gaussian_cutoff > 0:
            raise DomainError(f"gaussian_cutoff must be > 0, got {self.gaussian_cutoff!r}")
        if self.leading_terms not in (2, 4):
            raise DomainError(f"leading_terms must be 2 or 4, got {self.leading_terms!r}")

    def refined(self, level: int) -> "QuadratureConfig":
        """Grid with every node count doubled `level` times"""
        factor = 2 ** level
        return replace(
            self,
            points_per_decade=self.points_per_decade * factor,
            costheta_order=self.costheta_order * factor,
            eta_points_per_decade=self.eta_points_per_decade * factor,
            eta_points_per_period=self.eta_points_per_period * factor,
        )

    def q_grid(self) -> np.ndarray:
        lo, hi = self.q_window
        return np.logspace(math.log10(lo), math.log10(hi), self.q_points)

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["q_window"] = list(self.q_window)
        return data


@dataclass
class SpectrumResult:
    """Per-log-q spectra on k_grid; delta_p keeps the scaled representation"""
    k_grid: np.ndarray  # M_P
    p_standard: np.ndarray
    delta_p: ScaledArray
    method: Method
    kernel_variant: Optional[str]
    era: str
    error_estimate: float  # max relative change under the last grid refinement
    rel_err: np.ndarray
    params_snapshot: Dict[str, Any]
    delta_r2: Optional[ScaledArray] = None  # integral of delta_p over ln q
    levels: int = 0
    elapsed_seconds: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.p_standard) <= 0):
            raise DomainError("p_standard must be positive everywhere")
        if not self.error_estimate >= 0:
            raise DomainError("error_estimate must be >= 0")

    @property
    def k_mpc(self) -> np.ndarray:
        return wavenumber_planck_to_mpc(np.asarray(self.k_grid))


def snapshot(params: CosmoParams, csl: Optional[CslParams] = None,
             quad: Optional[QuadratureConfig] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {"cosmo": params.as_dict()}
    if csl is not None:
        data["csl"] = csl.as_dict()
    if quad is not None:
        data["quad"] = quad.as_dict()
    return data


# -- standard spectrum -------------------------------------------------------

def power_spectrum_standard(k: float, eta: float, era: Union[Era, str], params: CosmoParams) -> float:
    """
    P_R = (c_s^2/(2 eps M_P^2)) (k^3/(2 pi^2)) |v_k|^2 / a^2 = k^3 |v/z|^2 / (2 pi^2)

    Superhorizon inflation gives H^2/(8 pi^2 eps), independent of k.
    """
    era = resolve_era(era, params)
    state = mode(era, k, eta, params)
    z = z_factor(era, eta, params)
    return float(k ** 3 * abs(complex(state.v) / z) ** 2 / (2 * math.pi ** 2))


def power_spectrum_u(k: float, eta: float, era: Union[Era, str], params: CosmoParams) -> float:
    """k^3 |v_k|^2 / (2 pi^2)"""
    state = mode(resolve_era(era, params), k, eta, params)
    return float(k ** 3 * abs(complex(state.v)) ** 2 / (2 * math.pi ** 2))


def power_spectrum_u_superhorizon(eta: float) -> float:
    """1/(2 pi eta)^2"""
    if eta == 0:
        raise DomainError("eta must be nonzero")
    return 1.0 / (2 * math.pi * eta) ** 2


def power_law_spectrum(k, amplitude: float = PLANCK_AMPLITUDE, tilt: float = PLANCK_TILT,
                       k_pivot: float = PIVOT_PLANCK):
    """A (k/k_pivot)^(n - 1)"""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0) or k_pivot <= 0:
        raise DomainError("wavenumbers must be positive")
    value = amplitude * (k / k_pivot) ** (tilt - 1.0)
    return float(value) if value.ndim == 0 else value


# -- closed forms ------------------------------------------------------------

def delta_p_inflation_closed(params: CosmoParams, csl: CslParams) -> float:
    """-(17/36) (lambda H^3/(eps pi^2 M_P^2 m0^2)) ln(eta_e/eta_0)"""
    lam, m0 = csl.lambda_planck, csl.m0_planck
    return (-(17.0 / 36.0) * lam * params.h_inf ** 3 / (params.eps_inf * math.pi ** 2 * m0 ** 2)
            * math.log(params.eta_e / params.eta0))


def delta_p_radiation_closed(params: CosmoParams, csl: CslParams) -> float:
    """9 lambda H^3 eta_e^2 / (2 eps^3 (eta_r - 2 eta_e)^2 pi^2 m0^2) ln((2 eta_e - eta_r)/eta_e)"""
    lam, m0 = csl.lambda_planck, csl.m0_planck
    eta_e, eta_r = params.eta_e, params.eta_r
    ratio = (2 * eta_e - eta_r) / eta_e
    if ratio <= 0:
        raise DomainError("need (2 eta_e - eta_r)/eta_e > 0")
    return (9.0 * lam * params.h_inf ** 3 * eta_e ** 2
            / (2.0 * params.eps_inf ** 3 * (eta_r - 2 * eta_e) ** 2 * math.pi ** 2 * m0 ** 2)
            * math.log(ratio))


def delta_p_linear_closed(q, params: CosmoParams, csl: CslParams,
                          with_gaussian_factor: bool = False) -> ScaledArray:
    """
    eps^2 lambda H^5/(m0^2 q^8 r_C^4), the linearized-operator correction.

    The value is far outside double range for CMB wavenumbers, so it is returned
    scaled. with_gaussian_factor keeps the 135/4 that the time integral produces.
    """
    q_arr = np.asarray(q, dtype=float)
    if np.any(q_arr <= 0):
        raise DomainError(f"q must be positive, got {q!r}")
    value = (ScaledArray(params.eps_inf) ** 2 * csl.lambda_planck * ScaledArray(params.h_inf) ** 5
             / (ScaledArray(csl.m0_planck) ** 2 * ScaledArray(q_arr) ** 8
                * ScaledArray(csl.r_c_planck) ** 4))
    return value * GAUSSIAN_TIME_FACTOR if with_gaussian_factor else value


def lambda_bound(delta_p_per_lambda_grw: float, observational_error: float = OBSERVATIONAL_ERROR,
                 lambda_grw_si: float = LAMBDA_GRW_SI) -> float:
    """Largest collapse rate (s^-1) whose correction stays below the observational error"""
    if not (delta_p_per_lambda_grw > 0 and observational_error > 0):
        raise DomainError("delta_p_per_lambda_grw and observational_error must be > 0")
    return lambda_grw_si * observational_error / delta_p_per_lambda_grw


def orders_above_state_of_art(lambda_max_si: float,
                              reference_si: float = LAMBDA_BOUND_STATE_OF_ART_SI) -> float:
    if lambda_max_si <= 0:
        raise DomainError("lambda_max_si must be > 0")
    return math.log10(lambda_max_si / reference_si)


def perturbativity_ratio(delta_p, p_standard):
    """(|delta P| / P, is_log10): the log10 of the ratio when it overflows a double"""
    delta = ScaledArray.coerce(delta_p).abs() / ScaledArray.coerce(np.asarray(p_standard, dtype=float))
    if np.any(delta.overflows()):
        return float(np.max(delta.log10_abs())), True
    values = delta.to_numpy()
    return (float(values) if np.ndim(values) == 0 else values), False


# -- nested quadrature -------------------------------------------------------

def _era_prefactor(era: Era, params: CosmoParams, csl: CslParams, variant: KernelVariant) -> ScaledArray:
    """Lambda-free prefactor of the eta' integral; lambda multiplies last"""
    r3 = ScaledArray(csl.r_c_planck) ** 3
    m2 = ScaledArray(csl.m0_planck) ** 2
    if variant == KernelVariant.LINEARIZED:
        a_e = scale_factor(era, params.eta_e, params)
        return -r3 / (2.0 * m2 * math.pi ** 1.5 * params.eps_inf * ScaledArray(a_e) ** 2)
    if era.is_inflation:
        a_e = scale_factor(era, params.eta_e, params)
        return -r3 / (8.0 * params.eps_inf * m2 * ScaledArray(a_e) ** 2 * math.pi ** 4.5)
    a_r = scale_factor(era, params.eta_r, params)
    return -r3 / (48.0 * m2 * ScaledArray(a_r) ** 2 * math.pi ** 4.5)


@dataclass(frozen=True)
class _EtaNode:
    eta: float
    weight: float  # includes the Jacobian of the log substitution


def _eta_rule(era: Era, params: CosmoParams, quad: QuadratureConfig,
              oscillation_scale: Optional[float] = None) -> List[_EtaNode]:
    """
    Log-uniform eta' panels: in ln|eta'| for inflation, ln(eta' - 2 eta_e) for radiation.
    oscillation_scale switches radiation to linear panels resolving that frequency.
    """
    order = quad.gl_order
    if era.is_inflation:
        lo, hi = math.log(-params.eta_e), math.log(-params.eta0)
        u, w = uniform_rule(lo, hi, panels_for(quad.eta_points_per_decade, (hi - lo) / math.log(10), order), order)
        mag = np.exp(u)
        return [_EtaNode(-m, wt * m) for m, wt in zip(mag, w)]
    if oscillation_scale is None:
        lo, hi = math.log(-params.eta_e), math.log(params.eta_r - 2 * params.eta_e)
        v, w = uniform_rule(lo, hi, panels_for(quad.eta_points_per_decade, (hi - lo) / math.log(10), order), order)
        mag = np.exp(v)
        return [_EtaNode(m + 2 * params.eta_e, wt * m) for m, wt in zip(mag, w)]
    period = math.sqrt(3.0) * math.pi / oscillation_scale
    span = params.eta_r - params.eta_e
    panels = panels_for(quad.eta_points_per_period, span / period, order)
    if panels > quad.max_panels:
        raise NonConvergenceError(
            f"resolving the radiation-era oscillations needs {panels:.3g} eta' panels, "
            f"more than max_panels = {quad.max_panels}",
            partial_result=None, refinement_ratio=None)
    eta, w = uniform_rule(params.eta_e, params.eta_r, panels, order)
    return [_EtaNode(float(e), float(wt)) for e, wt in zip(eta, w)]


@dataclass(frozen=True)
class _MomentumGrid:
    """Flattened (p, cos theta) nodes in units of the support radius R"""
    x: np.ndarray  # p / R
    costheta: np.ndarray
    weight: np.ndarray  # quadrature weight * 2 pi x^2 * Gaussian


def _momentum_grid(y: float, quad: QuadratureConfig, x_lo: float = 0.0,
                   x_hi: float = math.inf) -> _MomentumGrid:
    """
    Nodes covering the Gaussian support |p + q| <= R with y = q/R.

    The radial variable is t = x - y so the narrow shell around x = y stays
    resolved when y >> 1, and the angular variable is w = 1 + cos theta on
    [0, min(2, (1 - t^2)/(2 x y))], the region where the exponent stays below
    the cutoff.
    """
    order = quad.gl_order
    if y > 1.0:
        t_lo, t_hi = max(-1.0, x_lo - y), min(1.0, x_hi - y)
        if t_lo >= t_hi:
            return _MomentumGrid(np.empty(0), np.empty(0), np.empty(0))
        t, wt = uniform_rule(t_lo, t_hi, panels_for(quad.points_per_decade, (t_hi - t_lo) / 2.0, order), order)
        x = y + t
    else:
        hi = min(y + 1.0, x_hi)
        lo = max((y + 1.0) * 10.0 ** (-quad.p_decades), x_lo)
        if lo >= hi:
            return _MomentumGrid(np.empty(0), np.empty(0), np.empty(0))
        x, wt = log_rule(lo, hi, quad.points_per_decade, order)
        t = x - y
    inside = t * t < 1.0
    x, t, wt = x[inside], t[inside], wt[inside]
    w_max = np.minimum(2.0, (1.0 - t * t) / (2.0 * x * y))
    nodes, weights = gauss_legendre(quad.costheta_order)
    w = 0.5 * w_max[:, None] * (1.0 + nodes[None, :])
    ww = 0.5 * w_max[:, None] * weights[None, :]
    gauss = np.exp(-quad.gaussian_cutoff * (t[:, None] ** 2 + 2.0 * (x * y)[:, None] * w))
    weight = wt[:, None] * ww * 2.0 * math.pi * x[:, None] ** 2 * gauss
    xx = np.broadcast_to(x[:, None], w.shape)
    return _MomentumGrid(xx.ravel(), (w - 1.0).ravel(), weight.ravel())


class _IntegrandBuilder:
    """eta'-node integrand a^-4(eta') * inner(eta') for one q and one grid level"""

    def __init__(self, era: Era, variant: KernelVariant, q: float, params: CosmoParams,
                 csl: CslParams, quad: QuadratureConfig, linear_leading: bool = True):
        self.era = era
        self.variant = variant
        self.q = q
        self.params = params
        self.csl = csl
        self.quad = quad
        self.linear_leading = linear_leading
        self.eta_end = params.eta_e if era.is_inflation else params.eta_r

    def support_radius(self, a: float) -> float:
        return a * math.sqrt(self.quad.gaussian_cutoff) / self.csl.r_c_planck

    def __call__(self, node: _EtaNode) -> ScaledArray:
        a = scale_factor(self.era, node.eta, self.params)
        a_inv4 = ScaledArray(a) ** -4
        if self.variant == KernelVariant.LINEARIZED:
            return a_inv4 * self._linear(node.eta, a) * node.weight
        return a_inv4 * self._quadratic(node.eta, a) * node.weight

    def _linear(self, eta: float, a: float) -> ScaledArray:
        x = self.csl.r_c_planck * self.q / a
        gauss = scaled_exp(-x * x)
        if self.linear_leading:
            kernel = linear_kernel_leading_scaled(self.q, eta, self.params)
        else:
            kernel = kernel_linear(self.q, eta, self.params, variant="exact").scaled
        return gauss * kernel

    def _quadratic(self, eta: float, a: float) -> ScaledArray:
        radius = self.support_radius(a)
        y = self.q / radius
        x_lo, x_hi = 0.0, math.inf
        if self.variant == KernelVariant.EXACT_QUADRATIC:
            x_lo = self.quad.q_window[0] / radius
            if not self.era.is_inflation and not self.quad.full_window:
                x_hi = 1.0 / (abs(eta) * radius)
        grid = _momentum_grid(y, self.quad, x_lo, x_hi)
        if grid.weight.size == 0:
            return ScaledArray(0.0)
        r3 = ScaledArray(radius) ** 3
        if self.variant == KernelVariant.LEADING_QUADRATIC:
            kernel = effective_kernel_scaled(self.era, self.q, eta, self.params, self.quad.leading_terms)
            return r3 * kernel * float(np.sum(grid.weight))
        p = grid.x * radius
        costheta = np.clip(grid.costheta, -1.0, 1.0)
        fast = kernel_symmetrized_scaled(self.era, p, self.q, costheta, eta, self.eta_end, self.params)
        unresolved = np.flatnonzero(~fast.resolved())
        mantissas, exponents = fast.value.mantissa.copy(), fast.value.exponent.copy()
        for i in unresolved:
            value = kernel_symmetrized(self.era, float(p[i]), self.q, float(costheta[i]),
                                       eta, self.eta_end, self.params)
            mantissas[i], exponents[i] = value.mantissa, value.exponent
        if unresolved.size:
            logger.debug(f"q={self.q:.3e} eta'={eta:.3e}: {unresolved.size}/{p.size} nodes in extended precision")
        kernel = ScaledArray(mantissas, exponents)
        return r3 * (kernel * grid.weight).sum()


def _delta_p_at_q(era: Era, variant: KernelVariant, q: float, params: CosmoParams,
                  csl: CslParams, quad: QuadratureConfig, threads: int,
                  linear_leading: bool) -> ScaledArray:
    """Lambda-free per-log-q correction 4 pi q^3 C integral(...)"""
    builder = _IntegrandBuilder(era, variant, q, params, csl, quad, linear_leading)
    oscillation = None
    if (variant == KernelVariant.EXACT_QUADRATIC and not era.is_inflation and quad.full_window):
        a_r = scale_factor(era, params.eta_r, params)
        oscillation = q + a_r * math.sqrt(quad.gaussian_cutoff) / csl.r_c_planck
    nodes = _eta_rule(era, params, quad, oscillation)
    pieces = parallel_map(builder, nodes, threads)
    total = ordered_sum(pieces)
    return 4.0 * math.pi * ScaledArray(q) ** 3 * _era_prefactor(era, params, csl, variant) * total


def _trapezoid_ln(k_grid: np.ndarray, values: ScaledArray) -> ScaledArray:
    """Trapezoid integral over ln k in scaled arithmetic"""
    if k_grid.size < 2:
        return values.sum()
    ln_k = np.log(k_grid)
    weights = np.zeros_like(ln_k)
    steps = np.diff(ln_k)
    weights[:-1] += 0.5 * steps
    weights[1:] += 0.5 * steps
    return (values * weights).sum()


def delta_r2_numeric(era: Union[Era, str], kernel_variant: Union[str, KernelVariant],
                     params: CosmoParams, csl: CslParams, quad: Optional[QuadratureConfig] = None,
                     threads: int = 1, linear_variant: str = "leading",
                     q_grid: Optional[Sequence[float]] = None) -> SpectrumResult:
    """
    Per-log-q correction delta P(q) and its integral delta R^2 by nested quadrature.

    Args:
        era: inflation or radiation
        kernel_variant: exact, leading or linear (linear is inflation only)
        params: background parameters
        csl: collapse parameters
        quad: grid configuration; every level doubles all node counts
        threads: worker threads for the eta' nodes; results do not depend on it
        linear_variant: "leading" or "exact" kernel for the linearized operator
        q_grid: explicit wavenumbers, defaulting to quad.q_grid()

    Returns:
        SpectrumResult with method Quadrature

    Raises:
        NonConvergenceError: when refinement stalls above rel_tol, carrying the partial result
    """
    started = time.perf_counter()
    era = resolve_era(era, params)
    variant = KernelVariant.parse(kernel_variant)
    quad = quad or QuadratureConfig()
    if variant == KernelVariant.LINEARIZED and not era.is_inflation:
        raise DomainError("the linearized-operator correction is defined for inflation only")
    if linear_variant not in ("leading", "exact"):
        raise DomainError(f"linear_variant must be 'leading' or 'exact', got {linear_variant!r}")
    k_grid = np.asarray(quad.q_grid() if q_grid is None else q_grid, dtype=float)
    label = f"{era.tag.value}/{variant.value}"
    logger.info(f"Integrating {label} correction on {k_grid.size} wavenumbers")

    def evaluate(level: int) -> ScaledArray:
        grid = quad.refined(level)
        values = [_delta_p_at_q(era, variant, float(q), params, csl, grid, threads,
                                linear_variant == "leading") for q in k_grid]
        return ScaledArray(np.array([v.mantissa.item() for v in values]),
                           np.array([int(v.exponent.item()) for v in values], dtype=np.int64))

    lam = ScaledArray(csl.lambda_planck)
    try:
        refined = refine(evaluate, quad.rel_tol, quad.max_levels, label=label)
    except NonConvergenceError as error:
        partial: RefinementResult = error.partial_result
        error.partial_result = _result(era, variant, k_grid, partial, lam, params, csl, quad, started)
        raise
    result = _result(era, variant, k_grid, refined, lam, params, csl, quad, started)
    logger.info(f"✅ {label}: {refined.levels} levels, relative change {refined.error:.2e}")
    return result


def _result(era, variant, k_grid, refined: RefinementResult, lam: ScaledArray, params, csl, quad,
            started) -> SpectrumResult:
    delta = refined.value * lam
    p_std = np.array([power_spectrum_standard(float(k), params.eta_e if era.is_inflation else params.eta_r,
                                              era, params) for k in k_grid])
    rel_err = np.asarray(refined.element_errors, dtype=float)
    return SpectrumResult(
        k_grid=k_grid, p_standard=p_std, delta_p=delta, method=Method.QUADRATURE,
        kernel_variant=variant.value, era=era.tag.value,
        error_estimate=float(refined.error) if math.isfinite(refined.error) else math.inf,
        rel_err=rel_err, params_snapshot=snapshot(params, csl, quad),
        delta_r2=_trapezoid_ln(k_grid, delta), levels=refined.levels,
        elapsed_seconds=time.perf_counter() - started,
    )


def closed_form_spectrum(era: Union[Era, str], params: CosmoParams, csl: CslParams,
                         quad: Optional[QuadratureConfig] = None,
                         variant: Union[str, KernelVariant] = KernelVariant.LEADING_QUADRATIC,
                         with_gaussian_factor: bool = False) -> SpectrumResult:
    """Closed-form delta P tabulated on the q grid"""
    started = time.perf_counter()
    era = resolve_era(era, params)
    variant = KernelVariant.parse(variant)
    quad = quad or QuadratureConfig()
    if variant == KernelVariant.LINEARIZED and not era.is_inflation:
        raise DomainError("the linearized-operator correction is defined for inflation only")
    if variant == KernelVariant.EXACT_QUADRATIC:
        raise DomainError("the exact kernel has no closed form; use the quadrature method")
    k_grid = quad.q_grid()
    if variant == KernelVariant.LINEARIZED:
        delta = delta_p_linear_closed(k_grid, params, csl, with_gaussian_factor)
    else:
        value = (delta_p_inflation_closed(params, csl) if era.is_inflation
                 else delta_p_radiation_closed(params, csl))
        delta = ScaledArray(np.full(k_grid.shape, value))
    eta_end = params.eta_e if era.is_inflation else params.eta_r
    p_std = np.array([power_spectrum_standard(float(k), eta_end, era, params) for k in k_grid])
    return SpectrumResult(
        k_grid=k_grid, p_standard=p_std, delta_p=delta, method=Method.CLOSED_FORM,
        kernel_variant=variant.value, era=era.tag.value, error_estimate=0.0,
        rel_err=np.zeros(k_grid.shape), params_snapshot=snapshot(params, csl, quad),
        delta_r2=_trapezoid_ln(k_grid, delta), elapsed_seconds=time.perf_counter() - started,
    )


def standard_spectrum_table(params: CosmoParams, quad: Optional[QuadratureConfig] = None,
                            era: Union[Era, str] = "inflation") -> pd.DataFrame:
    """P_R at the end of the era next to the observational power law"""
    era = resolve_era(era, params)
    quad = quad or QuadratureConfig()
    k_grid = quad.q_grid()
    eta_end = params.eta_e if era.is_inflation else params.eta_r
    return pd.DataFrame({
        "q_planck": k_grid,
        "q_mpc_inv": wavenumber_planck_to_mpc(k_grid),
        "p_standard": [power_spectrum_standard(float(k), eta_end, era, params) for k in k_grid],
        "p_power_law": power_law_spectrum(k_grid),
    })


def compare_kernels(params: CosmoParams, csl: CslParams, quad: Optional[QuadratureConfig] = None,
                    era: Union[Era, str] = "inflation", include_exact: bool = False,
                    threads: int = 1) -> pd.DataFrame:
    """Per-q delta P from the closed form, the 2- and 4-term leading kernels and optionally the exact one"""
    era = resolve_era(era, params)
    quad = quad or QuadratureConfig()
    closed = (delta_p_inflation_closed(params, csl) if era.is_inflation
              else delta_p_radiation_closed(params, csl))
    columns: Dict[str, Any] = {"q_planck": quad.q_grid()}
    columns["q_mpc_inv"] = wavenumber_planck_to_mpc(columns["q_planck"])
    columns["closed_form"] = np.full(quad.q_points, closed)
    term_options = (2, 4) if era.is_inflation else (4,)
    for terms in term_options:
        result = delta_r2_numeric(era, KernelVariant.LEADING_QUADRATIC, params, csl,
                                  replace(quad, leading_terms=terms), threads)
        columns[f"leading_{terms}"] = result.delta_p.to_numpy()
        columns[f"leading_{terms}_rel_err"] = result.rel_err
    if include_exact:
        result = delta_r2_numeric(era, KernelVariant.EXACT_QUADRATIC, params, csl, quad, threads)
        columns["exact"] = result.delta_p.to_numpy()
        columns["exact_rel_err"] = result.rel_err
    return pd.DataFrame(columns)
