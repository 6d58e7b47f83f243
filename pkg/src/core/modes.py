# src/core/modes.py
"""
Mode Functions
Closed-form Mukhanov-Sasaki modes v_k(eta), their first and second conformal
time derivatives, and the curvature perturbation built from them.

Every constructor evaluates in doubles by default, or in extended precision
through mpmath when a working precision `dps` is given. Values computed with
`dps` are mpmath numbers and must be combined under the same precision.
"""

import math
from contextlib import contextmanager
from dataclasses import dataclass
from types import SimpleNamespace
from typing import Iterable, Iterator, Optional, Tuple, Union

import mpmath
import numpy as np
import pandas as pd

from src.core.background import CosmoParams, Era, conformal_hubble, resolve_era, z_factor
from src.core.scaled import ScaledArray
from src.utils.error_handler import DomainError

Complex = Union[complex, mpmath.mpc]

# below this |k eta| the inflationary mode is assembled from its split form
SPLIT_THRESHOLD = 1e-8
NORMALIZATIONS = ("matched", "canonical")
# Wronskian digits lost per decade of 1/|k eta| below 1
WRONSKIAN_DPS_BASE = 25
WRONSKIAN_DPS_PER_DECADE = {"inflation": 3, "radiation": 5}

_DOUBLE = SimpleNamespace(num=float, exp=np.exp, cos=np.cos, sin=np.sin, sqrt=np.sqrt, j=1j)
_MP = SimpleNamespace(num=mpmath.mpf, exp=mpmath.exp, cos=mpmath.cos, sin=mpmath.sin,
                      sqrt=mpmath.sqrt, j=mpmath.mpc(0, 1))


@contextmanager
def precision(dps: Optional[int]) -> Iterator[SimpleNamespace]:
    """Numeric namespace for doubles (dps=None) or mpmath at dps digits"""
    if dps is None:
        yield _DOUBLE
    else:
        with mpmath.workdps(int(dps)):
            yield _MP


def _scalar(value):
    if isinstance(value, np.ndarray) and value.ndim == 0:
        return value.item()
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass(frozen=True)
class ModeState:
    """Mode amplitude and its conformal time derivative at (k, eta)"""
    k: float  # M_P
    eta: float  # M_P^-1
    v: Complex  # M_P^-1/2
    v_dot: Complex  # M_P^1/2
    dps: Optional[int] = None

    def wronskian(self) -> Complex:
        return wronskian(self)


def wronskian(state: ModeState) -> Complex:
    """v conj(v_dot) - conj(v) v_dot, evaluated at the precision of the state"""
    with precision(state.dps):
        v, vd = state.v, state.v_dot
        return _scalar(v * vd.conjugate() - v.conjugate() * vd)


def _check_positive(name: str, value) -> None:
    if np.any(np.asarray(value, dtype=float) <= 0) or not np.all(np.isfinite(np.asarray(value, dtype=float))):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


# -- harmonic oscillator fixture ---------------------------------------------

def mode_sho(omega: float, t: float, dps: Optional[int] = None) -> ModeState:
    """v = exp(-i omega t)/sqrt(2 omega), v_dot = -i omega v"""
    _check_positive("omega", omega)
    with precision(dps) as m:
        w, tt = m.num(omega), m.num(t)
        v = m.exp(-m.j * w * tt) / m.sqrt(2 * w)
        return ModeState(omega, t, _scalar(v), _scalar(-m.j * w * v), dps)


# -- inflation ---------------------------------------------------------------

def _inflation_terms(m, k, eta):
    """(v, v_dot, v_ddot) of the Bunch-Davies de Sitter mode at x = k eta"""
    x = k * eta
    phase = m.exp(-m.j * x)
    if abs(x) < SPLIT_THRESHOLD:
        # leading 1/x part factored out so the O(1) remainder stays exact
        lead = -m.j / x
        v = phase / m.sqrt(2 * k) * lead * (1 + m.j * x)
        v_dot = phase * m.sqrt(k / 2) * (m.j / x ** 2) * (1 + m.j * x - x ** 2)
    else:
        v = phase * (1 - m.j / x) / m.sqrt(2 * k)
        v_dot = m.sqrt(k / 2) * phase * (-m.j - 1 / x + m.j / x ** 2)
    v_ddot = k * m.sqrt(k / 2) * phase * (-1 + m.j / x + 2 / x ** 2 - 2 * m.j / x ** 3)
    return v, v_dot, v_ddot


def mode_inflation(k: float, eta: float, dps: Optional[int] = None) -> ModeState:
    """
    Bunch-Davies mode during inflation.

    v = e^{-ix}(1 - i/x)/sqrt(2k) and v_dot = sqrt(k/2) e^{-ix}(-i - 1/x + i/x^2), x = k eta.

    Args:
        k: comoving wavenumber in M_P
        eta: conformal time in M_P^-1, strictly negative
        dps: mpmath working precision, None for doubles

    Returns:
        ModeState with unit Wronskian
    """
    _check_positive("k", k)
    if np.any(np.asarray(eta, dtype=float) >= 0):
        raise DomainError(f"inflationary modes need eta < 0, got {eta!r}")
    with precision(dps) as m:
        v, v_dot, _ = _inflation_terms(m, m.num(k), m.num(eta))
        return ModeState(k, eta, _scalar(v), _scalar(v_dot), dps)


# -- radiation ---------------------------------------------------------------

def _radiation_terms(m, k, eta, eta_e, eps_inf, normalization):
    """
    Radiation-era mode matched to the inflationary one at eta_e, written as
    e^{-ix}[(x^2 - ix)(cos t - i sqrt3 sin t) + i sqrt3 sin t] with x = k eta_e and
    t = k (eta - eta_e)/sqrt3, which has no large cancelling terms.
    """
    s3 = m.sqrt(3)
    x = k * eta_e
    theta = k * (eta - eta_e) / s3
    c, s = m.cos(theta), m.sin(theta)
    phase = m.exp(-m.j * x)
    poly = x ** 2 - m.j * x
    norm = s3 / (eta_e ** 2 * m.sqrt(eps_inf))
    if normalization == "canonical":
        norm = norm / m.sqrt(6 / eps_inf)
    v = norm / (k ** 2 * m.sqrt(k)) * phase * (poly * (c - m.j * s3 * s) + m.j * s3 * s)
    v_dot = norm / (k * m.sqrt(k)) * phase * (poly * (-s / s3 - m.j * c) + m.j * c)
    v_ddot = norm / (s3 * m.sqrt(k)) * phase * (poly * (-c / s3 + m.j * s) - m.j * s)
    return v, v_dot, v_ddot


def _check_radiation(k, eta, eta_e, eps_inf, normalization):
    _check_positive("k", k)
    _check_positive("eps_inf", eps_inf)
    if not eta_e < 0:
        raise DomainError(f"eta_e must be negative, got {eta_e!r}")
    if np.any(np.asarray(eta, dtype=float) < eta_e):
        raise DomainError(f"radiation modes need eta >= eta_e = {eta_e}, got {eta!r}")
    if normalization not in NORMALIZATIONS:
        raise DomainError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")


def mode_radiation(k: float, eta: float, eta_e: float, eps_inf: float,
                   normalization: str = "matched", dps: Optional[int] = None) -> ModeState:
    """
    Radiation-era mode, oscillating at frequency k/sqrt(3).

    "matched" continues R = v/z and its derivative across eta_e; its Wronskian is
    i * 6/eps_inf because z jumps by sqrt(6/eps_inf) there. "canonical" divides
    that factor out and has unit Wronskian.
    """
    _check_radiation(k, eta, eta_e, eps_inf, normalization)
    with precision(dps) as m:
        v, v_dot, _ = _radiation_terms(m, m.num(k), m.num(eta), m.num(eta_e),
                                       m.num(eps_inf), normalization)
        return ModeState(k, eta, _scalar(v), _scalar(v_dot), dps)


def expected_wronskian(era: Era, eps_inf: float, normalization: str = "matched") -> complex:
    if era.is_inflation or normalization == "canonical":
        return 1j
    return 1j * 6.0 / eps_inf


# -- era dispatch ------------------------------------------------------------

def mode(era: Union[Era, str], k: float, eta: float, params: CosmoParams,
         normalization: str = "matched", dps: Optional[int] = None) -> ModeState:
    era = resolve_era(era, params)
    if era.is_inflation:
        return mode_inflation(k, eta, dps)
    return mode_radiation(k, eta, params.eta_e, params.eps_inf, normalization, dps)


def scaled_mode(era: Union[Era, str], k, eta, params: CosmoParams,
                normalization: str = "matched") -> Tuple[ScaledArray, ScaledArray]:
    """
    (v, v_dot) as ScaledArray products of factors that each fit in a double.

    k and eta broadcast against each other. Inflationary modes keep 1/(k eta)
    as a separate scaled factor, so |k eta| far below 1e-154 still gives finite
    mantissas.
    """
    era = resolve_era(era, params)
    _check_positive("k", k)
    k, eta = np.asarray(k, dtype=float), np.asarray(eta, dtype=float)
    if era.is_inflation:
        if np.any(eta >= 0):
            raise DomainError(f"inflationary modes need eta < 0, got {eta!r}")
        x = k * eta
        phase = ScaledArray(np.exp(-1j * x))
        inv_x = ScaledArray(1.0 / x)
        v = phase * ScaledArray(1.0 / np.sqrt(2.0 * k)) * inv_x * (x - 1j)
        v_dot = phase * np.sqrt(k / 2.0) * (inv_x * inv_x * (1j - x) - 1j)
        return v, v_dot

    eta_e, eps_inf = params.eta_e, params.eps_inf
    _check_radiation(k, eta, eta_e, eps_inf, normalization)
    s3 = math.sqrt(3.0)
    x = k * eta_e
    theta = k * (eta - eta_e) / s3
    c, s = np.cos(theta), np.sin(theta)
    poly = x * x - 1j * x
    phase = ScaledArray(np.exp(-1j * x))
    norm = ScaledArray(math.sqrt(3.0 / eps_inf)) / ScaledArray(eta_e) ** 2
    if normalization == "canonical":
        norm = norm / math.sqrt(6.0 / eps_inf)
    sk = ScaledArray(k)
    v = norm / (sk ** 2 * np.sqrt(k)) * phase * (poly * (c - 1j * s3 * s) + 1j * s3 * s)
    v_dot = norm / (sk * np.sqrt(k)) * phase * (poly * (-s / s3 - 1j * c) + 1j * c)
    return v, v_dot


def mode_second_derivative(era: Union[Era, str], k: float, eta: float, params: CosmoParams,
                           normalization: str = "matched", dps: Optional[int] = None) -> Complex:
    """Analytic v_ddot"""
    era = resolve_era(era, params)
    _check_positive("k", k)
    if era.is_inflation:
        if np.any(np.asarray(eta, dtype=float) >= 0):
            raise DomainError(f"inflationary modes need eta < 0, got {eta!r}")
        with precision(dps) as m:
            return _scalar(_inflation_terms(m, m.num(k), m.num(eta))[2])
    _check_radiation(k, eta, params.eta_e, params.eps_inf, normalization)
    with precision(dps) as m:
        terms = _radiation_terms(m, m.num(k), m.num(eta), m.num(params.eta_e),
                                 m.num(params.eps_inf), normalization)
        return _scalar(terms[2])


def ode_residual(era: Union[Era, str], k: float, eta: float, params: CosmoParams,
                 normalization: str = "matched", dps: Optional[int] = None) -> float:
    """|v_ddot + omega^2(eta) v| / |v_ddot|, omega^2 = k^2 - 2/eta^2 or k^2/3"""
    era = resolve_era(era, params)
    state = mode(era, k, eta, params, normalization, dps)
    v_ddot = mode_second_derivative(era, k, eta, params, normalization, dps)
    with precision(dps) as m:
        kk, ee = m.num(k), m.num(eta)
        omega2 = kk ** 2 - 2 / ee ** 2 if era.is_inflation else kk ** 2 / 3
        residual = abs(v_ddot + omega2 * state.v) / abs(v_ddot)
        return float(residual)


def curvature_perturbation(era: Union[Era, str], state: ModeState,
                           params: CosmoParams) -> Tuple[Complex, Complex]:
    """(R, R_dot) with R = v/z and R_dot = (v_dot - (a'/a) v)/z"""
    era = resolve_era(era, params)
    z = z_factor(era, state.eta, params)
    hubble = conformal_hubble(era, state.eta, params)
    with precision(state.dps) as m:
        zz, hh = m.num(z), m.num(hubble)
        return _scalar(state.v / zz), _scalar((state.v_dot - hh * state.v) / zz)


def wronskian_dps(era: Union[Era, str], k: float, eta: float, params: CosmoParams) -> int:
    """Working precision that keeps W = v v_dot* - v* v_dot resolved at (k, eta)"""
    era = resolve_era(era, params)
    scales = [abs(k * eta)]
    if not era.is_inflation:
        scales.append(abs(k * params.eta_e))
    smallest = min(scales)
    decades = max(0.0, -math.log10(smallest)) if smallest > 0 else 0.0
    return int(WRONSKIAN_DPS_BASE + WRONSKIAN_DPS_PER_DECADE[era.tag.value] * math.ceil(decades))


def mode_grid_table(era: Union[Era, str], k_values: Iterable[float], eta_values: Iterable[float],
                    params: CosmoParams, normalization: str = "matched",
                    dps: Optional[int] = None) -> pd.DataFrame:
    """
    Tabulate modes on a (k, eta) grid.

    Each row runs at wronskian_dps(k, eta), raised to `dps` when that is larger;
    wronskian_error is |W - W_expected| / |W_expected| at that precision.
    """
    era = resolve_era(era, params)
    expected = expected_wronskian(era, params.eps_inf, normalization)
    rows = []
    for k in k_values:
        for eta in eta_values:
            row_dps = max(wronskian_dps(era, float(k), float(eta), params), dps or 0)
            state = mode(era, float(k), float(eta), params, normalization, row_dps)
            with precision(row_dps):
                error = abs(state.wronskian() - expected) / abs(expected)
            v, v_dot = complex(state.v), complex(state.v_dot)
            rows.append({
                "k": float(k), "eta": float(eta),
                "re_v": v.real, "im_v": v.imag,
                "re_v_dot": v_dot.real, "im_v_dot": v_dot.imag,
                "wronskian_error": float(error),
            })
    return pd.DataFrame(rows, columns=["k", "eta", "re_v", "im_v", "re_v_dot", "im_v_dot",
                                       "wronskian_error"])


def log_grid(lo: float, hi: float, num: int, negative: bool = False) -> np.ndarray:
    """num log-spaced magnitudes between |lo| and |hi|, optionally negated"""
    a, b = sorted((abs(lo), abs(hi)))
    if a <= 0:
        raise DomainError("log grid bounds must be nonzero")
    grid = np.logspace(math.log10(a), math.log10(b), int(num))
    return -grid if negative else grid
