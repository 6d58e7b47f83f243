# src/core/background.py
"""
FLRW Background
Scale factor, z-factor and epoch boundary times for the inflationary
(de Sitter) and radiation-dominated eras, in reduced Planck units.
"""

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from src.utils.error_handler import DomainError

REDUCED_PLANCK_MASS = 1.0  # M_P in its own units
RADIATION_EPS = 2.0
RADIATION_SOUND_SPEED = 1.0 / math.sqrt(3.0)
SLOW_ROLL_BOUND = 0.1

# main-text fiducials
FIDUCIAL_H_INF = 1e-5
FIDUCIAL_EPS_INF = 0.005
FIDUCIAL_N_STAR = 60.0
FIDUCIAL_K_STAR = 5e-60
FIDUCIAL_RADIATION_EXPANSION = 3e26
# round epoch boundaries
ROUND_ETA_E = -1e34
ROUND_ETA_R = 3e60

PRESETS = ("paper-main", "paper-sm-e")
PRESET_ALIASES = {"fiducial": "paper-main", "round-epochs": "paper-sm-e"}


class EraTag(str, Enum):
    INFLATION = "inflation"
    RADIATION = "radiation"


@dataclass(frozen=True)
class Era:
    """Cosmological era with its sound speed and (constant) slow-roll epsilon"""
    tag: EraTag
    sound_speed: float
    eps: float

    def __post_init__(self):
        if self.tag == EraTag.RADIATION and self.eps != RADIATION_EPS:
            raise DomainError(f"radiation era has eps = 2 exactly, got {self.eps}")

    @classmethod
    def inflation(cls, eps_inf: float) -> "Era":
        return cls(EraTag.INFLATION, 1.0, eps_inf)

    @classmethod
    def radiation(cls) -> "Era":
        return cls(EraTag.RADIATION, RADIATION_SOUND_SPEED, RADIATION_EPS)

    @property
    def is_inflation(self) -> bool:
        return self.tag == EraTag.INFLATION


@dataclass(frozen=True)
class CosmoParams:
    """Background parameters, all in reduced Planck units"""
    h_inf: float  # M_P
    eps_inf: float
    eps2: float  # second slow-roll parameter, linearized operator only
    eta0: float  # M_P^-1, start of inflation (negative)
    eta_e: float  # M_P^-1, end of inflation (negative)
    eta_r: float  # M_P^-1, end of radiation era (positive)
    n_star: float
    k_star: float  # M_P

    def __post_init__(self):
        values = asdict(self)
        for name, value in values.items():
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not (self.eta0 < self.eta_e < 0 < self.eta_r):
            raise DomainError(
                f"need eta0 < eta_e < 0 < eta_r, got ({self.eta0}, {self.eta_e}, {self.eta_r})")
        if not (0 < self.eps_inf < SLOW_ROLL_BOUND):
            raise DomainError(f"eps_inf must lie in (0, {SLOW_ROLL_BOUND}), got {self.eps_inf}")
        if self.h_inf <= 0 or self.k_star <= 0:
            raise DomainError("h_inf and k_star must be positive")

    def era(self, tag: Union[EraTag, str]) -> Era:
        tag = EraTag(tag)
        return Era.inflation(self.eps_inf) if tag == EraTag.INFLATION else Era.radiation()

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def resolve_era(era: Union[Era, EraTag, str], params: CosmoParams) -> Era:
    return era if isinstance(era, Era) else params.era(era)


def derive_times(n_star: float, k_star: float, h_inf: float,
                 radiation_expansion: float) -> Tuple[float, float, float]:
    """
    Epoch boundaries from the pivot e-fold chain.

    Args:
        n_star: e-folds between pivot horizon crossing and the end of inflation
        k_star: pivot wavenumber in M_P
        h_inf: inflationary Hubble rate in M_P
        radiation_expansion: a(eta_r)/a(eta_e)

    Returns:
        (eta0, eta_e, eta_r) in M_P^-1
    """
    if not (50.0 <= n_star <= 60.0):
        raise DomainError(f"n_star must lie in [50, 60], got {n_star}")
    if k_star <= 0 or h_inf <= 0:
        raise DomainError("k_star and h_inf must be positive")
    if not radiation_expansion > 1.0:
        raise DomainError(f"radiation_expansion must exceed 1, got {radiation_expansion}")

    eta0 = -1.0 / k_star
    a_star = k_star / h_inf
    a_e = a_star * math.exp(n_star)
    eta_e = -1.0 / (h_inf * a_e)
    # (eta_r - 2 eta_e) / (-eta_e) = radiation_expansion
    eta_r = eta_e * (2.0 - radiation_expansion)
    return eta0, eta_e, eta_r


def canonical_preset(name: str) -> str:
    """Canonical preset name; fiducial and round-epochs are accepted as aliases"""
    canonical = PRESET_ALIASES.get(name, name)
    if canonical not in PRESETS:
        known = PRESETS + tuple(PRESET_ALIASES)
        raise DomainError(f"unknown preset {name!r}, expected one of {known}")
    return canonical


def params_from_preset(preset: str = "paper-main", h_inf: float = FIDUCIAL_H_INF,
                       eps_inf: float = FIDUCIAL_EPS_INF, eps2: float = 0.0,
                       n_star: float = FIDUCIAL_N_STAR, k_star: float = FIDUCIAL_K_STAR,
                       radiation_expansion: float = FIDUCIAL_RADIATION_EXPANSION,
                       eta_e: Optional[float] = None, eta_r: Optional[float] = None) -> CosmoParams:
    """CosmoParams for a named preset; explicit eta_e/eta_r override the preset"""
    preset = canonical_preset(preset)
    eta0, chain_eta_e, chain_eta_r = derive_times(n_star, k_star, h_inf, radiation_expansion)
    if preset == "paper-sm-e":
        chain_eta_e, chain_eta_r = ROUND_ETA_E, ROUND_ETA_R
    return CosmoParams(
        h_inf=h_inf, eps_inf=eps_inf, eps2=eps2, eta0=eta0,
        eta_e=chain_eta_e if eta_e is None else eta_e,
        eta_r=chain_eta_r if eta_r is None else eta_r,
        n_star=n_star, k_star=k_star,
    )


def check_window(era: Era, eta, params: CosmoParams) -> np.ndarray:
    arr = np.asarray(eta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"eta must be finite, got {eta!r}")
    if era.is_inflation:
        lo, hi = params.eta0, params.eta_e
    else:
        lo, hi = params.eta_e, params.eta_r
    if np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"eta {eta!r} outside the {era.tag.value} window [{lo:.6g}, {hi:.6g}]")
    if np.any(arr == 0.0):
        raise DomainError(f"eta = 0 is not an admissible conformal time in the {era.tag.value} era")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if np.ndim(arr) == 0 else arr


def scale_factor(era: Union[Era, str], eta, params: CosmoParams):
    """a(eta): -1/(H eta) during inflation, (eta - 2 eta_e)/(H eta_e^2) during radiation"""
    era = resolve_era(era, params)
    x = check_window(era, eta, params)
    if era.is_inflation:
        return _out(-1.0 / (params.h_inf * x))
    return _out((x - 2.0 * params.eta_e) / (params.h_inf * params.eta_e ** 2))


def z_factor(era: Union[Era, str], eta, params: CosmoParams):
    """z = a M_P sqrt(2 eps) / c_s"""
    era = resolve_era(era, params)
    a = np.asarray(scale_factor(era, eta, params))
    return _out(a * REDUCED_PLANCK_MASS * math.sqrt(2.0 * era.eps) / era.sound_speed)


def conformal_hubble(era: Union[Era, str], eta, params: CosmoParams):
    """a'/a with respect to conformal time"""
    era = resolve_era(era, params)
    x = check_window(era, eta, params)
    if era.is_inflation:
        return _out(-1.0 / x)
    return _out(1.0 / (x - 2.0 * params.eta_e))


def accel_ratio(era: Union[Era, str], eta, params: CosmoParams):
    """a''/a: 2/eta^2 in de Sitter, 0 for linear radiation-era growth"""
    era = resolve_era(era, params)
    x = check_window(era, eta, params)
    if era.is_inflation:
        return _out(2.0 / x ** 2)
    return _out(np.zeros_like(x))


def slow_roll_epsilon(era: Union[Era, str], eta, params: CosmoParams):
    """eps = 1 - h'/h^2 from the analytic conformal Hubble rate h = a'/a"""
    era = resolve_era(era, params)
    x = check_window(era, eta, params)
    if era.is_inflation:
        h, h_dot = -1.0 / x, 1.0 / x ** 2
    else:
        shifted = x - 2.0 * params.eta_e
        h, h_dot = 1.0 / shifted, -1.0 / shifted ** 2
    return _out(1.0 - h_dot / h ** 2)


def scale_factor_ratio(params: CosmoParams) -> float:
    """a(eta_r)/a(eta_e)"""
    return (params.eta_r - 2.0 * params.eta_e) / (-params.eta_e)


def horizon_crossing_time(k: float) -> float:
    """Conformal time -1/k at which |k eta| = 1 during inflation"""
    if k <= 0:
        raise DomainError(f"k must be positive, got {k}")
    return -1.0 / k
