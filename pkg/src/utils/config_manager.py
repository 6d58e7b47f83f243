# src/utils/config_manager.py
"""
Run Configuration
JSON5 run files validated section by section; every section builds the frozen
parameter object the numerical modules take.
"""

import re
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

import json5
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.background import FIDUCIAL_K_STAR, CosmoParams, canonical_preset, params_from_preset
from src.core.cslsim import COLLAPSE_OPERATORS, ToySystem, build_toy_system
from src.core.kernels import KernelVariant
from src.core.spectrum import CslParams, QuadratureConfig
from src.core.units import (
    DEFAULT_CONSTANTS, LAMBDA_GRW_SI, NUCLEON_MASS_GEV, R_C_PRESETS, REDUCED_PLANCK_MASS_GEV,
    PlanckConstants, wavenumber_mpc_to_planck,
)
from src.utils.error_handler import ConfigError
from src.utils.logger import get_logger

logger = get_logger("Config")

DEFAULT_CONFIG_PATH = Path("config/settings.json5")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UnitsSection(_Section):
    planck_mass_gev: float = Field(REDUCED_PLANCK_MASS_GEV, gt=0, description="reduced Planck mass, GeV")
    nucleon_mass_gev: float = Field(NUCLEON_MASS_GEV, gt=0, description="reference nucleon mass, GeV")

    def to_constants(self) -> PlanckConstants:
        return PlanckConstants.from_planck_mass(self.planck_mass_gev, self.nucleon_mass_gev)


class CosmoSection(_Section):
    preset: str = Field("paper-main", description="paper-main (N_* chain) or paper-sm-e")
    h_inf: float = Field(1e-5, gt=0, description="Hubble rate during inflation, M_P")
    eps_inf: float = Field(0.005, gt=0, lt=0.1, description="first slow-roll parameter")
    eps2: float = Field(0.0, description="second slow-roll parameter")
    n_star: float = Field(60.0, ge=50, le=60, description="e-folds after pivot crossing")
    k_star: Optional[float] = Field(None, gt=0, description="pivot wavenumber, M_P")
    k_star_mpc: Optional[float] = Field(None, gt=0, description="pivot wavenumber, Mpc^-1")
    radiation_expansion: float = Field(3e26, gt=1, description="a(eta_r)/a(eta_e)")
    eta_e: Optional[float] = Field(None, lt=0, description="override for the end of inflation")
    eta_r: Optional[float] = Field(None, gt=0, description="override for the end of radiation")

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value: str) -> str:
        return canonical_preset(value)

    @model_validator(mode="after")
    def _consistent(self) -> "CosmoSection":
        if self.k_star is not None and self.k_star_mpc is not None:
            raise ValueError("give k_star or k_star_mpc, not both")
        self.to_params()
        return self

    def pivot(self, constants: PlanckConstants = DEFAULT_CONSTANTS) -> float:
        """Pivot wavenumber in M_P"""
        if self.k_star_mpc is not None:
            return wavenumber_mpc_to_planck(self.k_star_mpc, constants)
        return FIDUCIAL_K_STAR if self.k_star is None else self.k_star

    def to_params(self, constants: PlanckConstants = DEFAULT_CONSTANTS) -> CosmoParams:
        return params_from_preset(
            self.preset, h_inf=self.h_inf, eps_inf=self.eps_inf, eps2=self.eps2,
            n_star=self.n_star, k_star=self.pivot(constants),
            radiation_expansion=self.radiation_expansion, eta_e=self.eta_e, eta_r=self.eta_r,
        )


class CslSection(_Section):
    lambda_si: float = Field(LAMBDA_GRW_SI, ge=0, description="collapse rate, s^-1")
    r_c: Union[float, str] = Field("grw", description="correlation length in M_P^-1 or a preset name")
    m0_planck: Optional[float] = Field(None, gt=0, description="reference mass in M_P; None follows units")
    lambda_grw_si: float = Field(LAMBDA_GRW_SI, gt=0, description="reference collapse rate, s^-1")

    @field_validator("r_c")
    @classmethod
    def _known_length(cls, value: Union[float, str]) -> Union[float, str]:
        if isinstance(value, str):
            if value in R_C_PRESETS:
                return value
            try:
                value = float(value)
            except ValueError:
                raise ValueError(f"must be a number or one of {tuple(R_C_PRESETS)}") from None
        if not value > 0:
            raise ValueError("must be > 0")
        return value

    @property
    def r_c_planck(self) -> float:
        return R_C_PRESETS[self.r_c] if isinstance(self.r_c, str) else float(self.r_c)

    def to_params(self, constants: PlanckConstants = DEFAULT_CONSTANTS) -> CslParams:
        m0 = constants.nucleon_mass_planck if self.m0_planck is None else self.m0_planck
        return CslParams(lambda_si=self.lambda_si, r_c_planck=self.r_c_planck, m0_planck=m0,
                         lambda_grw_si=self.lambda_grw_si, constants=constants)


class QuadSection(_Section):
    q_window: Tuple[float, float] = (2e-62, 2e-58)
    q_points: int = Field(5, ge=2)
    p_decades: int = Field(8, ge=2)
    points_per_decade: int = Field(32, ge=2)
    costheta_order: int = Field(24, ge=2)
    eta_points_per_decade: int = Field(8, ge=2)
    gl_order: int = Field(8, ge=2)
    rel_tol: float = Field(1e-3, gt=0, le=0.1)
    gaussian_cutoff: float = Field(36.0, gt=0)
    max_levels: int = Field(4, ge=2)
    leading_terms: Literal[2, 4] = 4
    full_window: bool = False
    eta_points_per_period: int = Field(8, ge=2)
    max_panels: int = Field(200_000, ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> "QuadSection":
        self.to_config()
        return self

    def to_config(self) -> QuadratureConfig:
        return QuadratureConfig(**self.model_dump())


class SimSection(_Section):
    dim: int = Field(6, ge=3, description="Fock-space truncation")
    omega: float = Field(1.0, gt=0)
    lambda_eff: float = Field(5e-4, ge=0)
    collapse_op: str = "position-sq"
    alpha: float = Field(0.5, description="coherent-state amplitude of the initial state")
    t_final: float = Field(1.0, gt=0)
    dt: float = Field(1e-3, gt=0)
    ntraj: int = Field(10_000, ge=2)
    seed: int = Field(0, ge=0)

    @field_validator("collapse_op")
    @classmethod
    def _known_operator(cls, value: str) -> str:
        if value not in COLLAPSE_OPERATORS:
            raise ValueError(f"must be one of {COLLAPSE_OPERATORS}")
        return value

    def to_system(self) -> ToySystem:
        return build_toy_system(self.dim, self.omega, self.lambda_eff, self.collapse_op)


class RunSection(_Section):
    threads: int = Field(1, ge=1)
    era: Literal["inflation", "radiation"] = "inflation"
    kernel_variant: str = "leading"
    linear_variant: Literal["leading", "exact"] = "leading"
    with_gaussian_factor: bool = False
    observational_error: float = Field(1e-11, gt=0)
    normalization: Literal["matched", "canonical"] = "matched"

    @field_validator("kernel_variant")
    @classmethod
    def _known_variant(cls, value: str) -> str:
        return KernelVariant.parse(value).value


class RunConfig(_Section):
    """Complete run configuration; every block validates on construction"""
    units: UnitsSection = Field(default_factory=UnitsSection)
    cosmo: CosmoSection = Field(default_factory=CosmoSection)
    csl: CslSection = Field(default_factory=CslSection)
    quad: QuadSection = Field(default_factory=QuadSection)
    sim: SimSection = Field(default_factory=SimSection)
    run: RunSection = Field(default_factory=RunSection)

    def constants(self) -> PlanckConstants:
        return self.units.to_constants()

    def cosmo_params(self) -> CosmoParams:
        return self.cosmo.to_params(self.constants())

    def csl_params(self) -> CslParams:
        return self.csl.to_params(self.constants())

    def quad_config(self) -> QuadratureConfig:
        return self.quad.to_config()

    def snapshot(self) -> Dict[str, Any]:
        """JSON-ready copy; RunConfig.model_validate(snapshot) rebuilds this run"""
        return self.model_dump(mode="json")

    def with_overrides(self, section: str, **values: Any) -> "RunConfig":
        data = self.snapshot()
        data[section].update({k: v for k, v in values.items() if v is not None})
        return validate_config(data)


def _location(error: ValueError) -> Tuple[Optional[int], Optional[int]]:
    """Line and column from a json5 parse error message"""
    text = str(error)
    line = re.search(r":(\d+)\b", text)
    column = re.search(r"column (\d+)", text)
    return (int(line.group(1)) if line else None, int(column.group(1)) if column else None)


def validate_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        field_name = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"invalid value for {field_name}: {first['msg']}",
                          field_name=field_name) from error


def load_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Load and validate a JSON5 (or JSON) run file.

    Args:
        path: run file; None or an empty file gives the defaults

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: unreadable file, parse error (with line/column) or invalid field
    """
    if path is None:
        logger.debug("No config file given, using defaults")
        return get_default_config()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read config file {path}: {error}") from error
    if not text.strip():
        logger.info(f"⚠️ Config file {path} is empty, using defaults")
        return get_default_config()
    try:
        data = json5.loads(text)
    except ValueError as error:
        line, column = _location(error)
        raise ConfigError(f"cannot parse {path}: {error}", line=line, column=column) from error
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold an object at the top level")
    config = validate_config(data)
    logger.info(f"✅ Loaded configuration from {path}")
    return config


def get_default_config() -> RunConfig:
    """Fiducial configuration"""
    return RunConfig()
