# src/core/reproduce.py
"""
Headline Checks
Closed-form corrections for both eras, the collapse-rate bound and the
linearized-operator contrast, each compared against its accepted band, plus
quadrature cross-checks of the closed forms.
"""

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.core.background import CosmoParams
from src.core.kernels import KernelVariant
from src.core.spectrum import (
    CslParams, QuadratureConfig, delta_p_inflation_closed, delta_p_linear_closed,
    delta_p_radiation_closed, delta_r2_numeric, lambda_bound, orders_above_state_of_art,
    perturbativity_ratio, power_spectrum_standard,
)
from src.utils.error_handler import ReproductionError
from src.utils.logger import get_logger

logger = get_logger("Reproduce")

INFLATION_BAND = (1e-35, 1e-33)
RADIATION_BAND = (1e-82, 1e-80)
LAMBDA_MAX_BAND = (1e6, 1e8)  # s^-1
STATE_OF_ART_ORDERS_BAND = (16.0, 18.0)
LINEAR_CONTRAST_FLOOR = 1e100
LINEAR_PROBE_Q = 1e-60  # M_P
QUADRATURE_TOLERANCE = 0.05

# default grids on three wavenumbers
CROSS_CHECK_QUAD = QuadratureConfig(q_points=3)


@dataclass
class CheckRow:
    name: str
    value: float
    lower: float
    upper: float
    passed: bool
    note: str = ""


@dataclass
class ReproductionReport:
    rows: List[CheckRow] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def add(self, name: str, value: float, lower: float, upper: float, note: str = "") -> CheckRow:
        ok = bool(np.isfinite(value) and lower <= value <= upper)
        row = CheckRow(name, float(value), lower, upper, ok, note)
        self.rows.append(row)
        logger.info(f"{'✅' if ok else '❌'} {name}: {value:.4g} in [{lower:.3g}, {upper:.3g}]")
        return row

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(row) for row in self.rows])

    def as_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": [asdict(row) for row in self.rows],
                "extras": self.extras, "elapsed_seconds": self.elapsed_seconds}


def _quadrature_ratio(era: str, closed: float, params: CosmoParams, csl: CslParams,
                      quad: QuadratureConfig, threads: int, terms: int) -> float:
    result = delta_r2_numeric(era, KernelVariant.LEADING_QUADRATIC, params, csl,
                              replace(quad, leading_terms=terms), threads)
    values = result.delta_p.to_numpy()
    return float(np.max(np.abs(values / closed - 1.0)))


def run_reproduce(params: CosmoParams, csl: CslParams, quad: Optional[QuadratureConfig] = None,
                  threads: int = 1, observational_error: float = 1e-11,
                  with_quadrature: bool = True, strict: bool = True) -> ReproductionReport:
    """
    Compute the headline numbers and check them against their bands.

    Args:
        params: background parameters
        csl: collapse parameters; lambda_si is ignored, values are quoted at lambda_grw_si
        quad: grid for the quadrature cross-checks
        threads: worker threads for the cross-checks
        observational_error: error on the measured amplitude used for the bound
        with_quadrature: include the leading-kernel quadrature cross-checks
        strict: raise when any check fails

    Raises:
        ReproductionError: a check fell outside its band (strict mode), carrying the report
        NonConvergenceError: a quadrature cross-check did not reach quad.rel_tol
    """
    started = time.perf_counter()
    reference = csl.with_lambda(csl.lambda_grw_si)
    report = ReproductionReport()

    inflation = delta_p_inflation_closed(params, reference)
    radiation = delta_p_radiation_closed(params, reference)
    report.add("inflation |delta P| at lambda_GRW", abs(inflation), *INFLATION_BAND, "closed form")
    report.add("radiation |delta P| at lambda_GRW", abs(radiation), *RADIATION_BAND, "closed form")

    lambda_max = lambda_bound(abs(inflation), observational_error, reference.lambda_grw_si)
    report.add("lambda_max [s^-1]", lambda_max, *LAMBDA_MAX_BAND, f"observational error {observational_error:g}")
    report.add("orders above the laboratory bound", orders_above_state_of_art(lambda_max),
               *STATE_OF_ART_ORDERS_BAND)

    linear = delta_p_linear_closed(LINEAR_PROBE_Q, params, reference)
    linear_log10 = float(linear.log10_abs())
    report.add("log10 linearized-operator delta P at q = 1e-60", linear_log10,
               math.log10(LINEAR_CONTRAST_FLOOR), math.inf, "exceeds the quadratic result by hundreds of orders")

    p_std = power_spectrum_standard(params.k_star, params.eta_e, "inflation", params)
    ratio, _ = perturbativity_ratio(inflation, p_std)
    report.extras.update({
        "delta_p_inflation": inflation,
        "delta_p_radiation": radiation,
        "lambda_max_si": lambda_max,
        "p_standard_pivot": p_std,
        "perturbativity_ratio": ratio,
        "linear_log10_delta_p": linear_log10,
    })

    if with_quadrature:
        quad = quad or CROSS_CHECK_QUAD
        rel = _quadrature_ratio("inflation", inflation, params, reference, quad, threads, 2)
        report.add("inflation quadrature vs closed form (2 terms)", rel, 0.0, QUADRATURE_TOLERANCE)
        report.extras["inflation_four_term_shift"] = _quadrature_ratio(
            "inflation", inflation, params, reference, quad, threads, 4)
        rel = _quadrature_ratio("radiation", radiation, params, reference, quad, threads, 4)
        report.add("radiation quadrature vs closed form", rel, 0.0, QUADRATURE_TOLERANCE)

    report.elapsed_seconds = time.perf_counter() - started
    if strict and not report.passed:
        failed = ", ".join(row.name for row in report.rows if not row.passed)
        raise ReproductionError(f"headline checks failed: {failed}", report=report)
    return report
