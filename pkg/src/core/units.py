# src/core/units.py
"""
Reduced Planck Units
Conversions between the SI quantities quoted for collapse models and the
internal unit system (hbar = c = 1, everything in powers of M_P)
"""

import math
from dataclasses import dataclass
from typing import Dict, Union

import numpy as np

from src.utils.error_handler import DomainError

ArrayLike = Union[float, np.ndarray]

SPEED_OF_LIGHT_SI = 299_792_458.0  # m/s, exact
HBAR_GEV_SECONDS = 6.582119569e-25  # GeV s
REDUCED_PLANCK_MASS_GEV = 2.435e18
NUCLEON_MASS_GEV = 0.938272
# pivot anchor: 0.05 Mpc^-1 <-> 5e-60 M_P
PIVOT_MPC_INV = 0.05
PIVOT_PLANCK = 5e-60

LAMBDA_GRW_SI = 1e-16  # s^-1
LAMBDA_BOUND_STATE_OF_ART_SI = 1e-10  # s^-1

# correlation length presets in M_P^-1
R_C_PRESETS: Dict[str, float] = {
    "grw": 1.24e27,
    "rounded": 1e27,
}


@dataclass(frozen=True)
class PlanckConstants:
    """Conversion constants of the reduced Planck unit system"""
    planck_time_seconds: float  # seconds per unit of 1/M_P
    planck_length_meters: float  # meters per unit of 1/M_P
    mpc_in_planck_inverse_mass: float  # 1 Mpc^-1 expressed in M_P
    nucleon_mass_planck: float  # m0 in M_P

    def __post_init__(self):
        for name in ("planck_time_seconds", "planck_length_meters",
                     "mpc_in_planck_inverse_mass", "nucleon_mass_planck"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        mismatch = abs(self.planck_time_seconds * SPEED_OF_LIGHT_SI - self.planck_length_meters)
        if mismatch > 1e-12 * self.planck_length_meters:
            raise DomainError("planck_length_meters must equal planck_time_seconds * c")

    @classmethod
    def from_planck_mass(cls, planck_mass_gev: float = REDUCED_PLANCK_MASS_GEV,
                         nucleon_mass_gev: float = NUCLEON_MASS_GEV) -> "PlanckConstants":
        """Derive every constant from the reduced Planck mass in GeV"""
        if not (math.isfinite(planck_mass_gev) and planck_mass_gev > 0):
            raise DomainError(f"planck_mass_gev must be positive, got {planck_mass_gev!r}")
        t_p = HBAR_GEV_SECONDS / planck_mass_gev
        return cls(
            planck_time_seconds=t_p,
            planck_length_meters=t_p * SPEED_OF_LIGHT_SI,
            mpc_in_planck_inverse_mass=PIVOT_PLANCK / PIVOT_MPC_INV,
            nucleon_mass_planck=nucleon_mass_gev / planck_mass_gev,
        )

    def as_dict(self) -> Dict[str, float]:
        return {
            "planck_time_seconds": self.planck_time_seconds,
            "planck_length_meters": self.planck_length_meters,
            "mpc_in_planck_inverse_mass": self.mpc_in_planck_inverse_mass,
            "nucleon_mass_planck": self.nucleon_mass_planck,
        }


DEFAULT_CONSTANTS = PlanckConstants.from_planck_mass()


def _checked(value: ArrayLike, name: str, strictly_positive: bool = False) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if strictly_positive and np.any(arr <= 0):
        raise DomainError(f"{name} must be > 0, got {value!r}")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return arr


def _out(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def rate_si_to_planck(rate: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Rate in s^-1 -> units of M_P"""
    return _out(_checked(rate, "rate") * constants.planck_time_seconds)


def rate_planck_to_si(rate: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Rate in units of M_P -> s^-1"""
    return _out(_checked(rate, "rate") / constants.planck_time_seconds)


def length_si_to_planck(length: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Length in meters -> units of 1/M_P"""
    return _out(_checked(length, "length") / constants.planck_length_meters)


def length_planck_to_si(length: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Length in units of 1/M_P -> meters"""
    return _out(_checked(length, "length") * constants.planck_length_meters)


def wavenumber_mpc_to_planck(k: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Comoving wavenumber in Mpc^-1 -> units of M_P (anchored on the pivot scale)"""
    return _out(_checked(k, "k", strictly_positive=True) * constants.mpc_in_planck_inverse_mass)


def wavenumber_planck_to_mpc(k: ArrayLike, constants: PlanckConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Comoving wavenumber in M_P -> Mpc^-1"""
    return _out(_checked(k, "k", strictly_positive=True) / constants.mpc_in_planck_inverse_mass)
