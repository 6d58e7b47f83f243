# src/utils/result_writer.py
"""
Result Files
CSV and JSON output with every number written as a 17-significant-digit decimal
string; values held in scaled form also carry their binary mantissa and exponent.
"""

import json
import math
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import mpmath
import numpy as np
import pandas as pd

from src.core.scaled import ScaledArray
from src.core.spectrum import SpectrumResult
from src.utils.error_handler import DomainError
from src.utils.logger import get_logger

logger = get_logger("ResultWriter")

SIGNIFICANT_DIGITS = 17
SPECTRUM_COLUMNS = ("q_planck", "q_mpc_inv", "p_standard", "delta_p", "rel_err")


def format_float(value: float) -> str:
    """17 significant digits; enough to recover the double exactly"""
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def format_scaled(mantissa: float, exponent: int) -> str:
    """Decimal string of mantissa * 2**exponent at any magnitude"""
    if mantissa == 0:
        return "0"
    return mpmath.nstr(mpmath.ldexp(mpmath.mpf(float(mantissa)), int(exponent)), SIGNIFICANT_DIGITS,
                       strip_zeros=False)


def scaled_entries(values: ScaledArray) -> List[Dict[str, Any]]:
    mantissas = np.real(np.atleast_1d(values.mantissa)).ravel()
    exponents = np.atleast_1d(values.exponent).ravel()
    return [{"value": format_scaled(m, e), "mantissa": format_float(m), "exponent": int(e)}
            for m, e in zip(mantissas, exponents)]


def to_plain(value: Any) -> Any:
    """Recursively turn numbers into strings so JSON output never rounds"""
    if isinstance(value, ScaledArray):
        entries = scaled_entries(value)
        return entries[0] if value.mantissa.ndim == 0 else entries
    if isinstance(value, (bool, np.bool_)) or value is None:
        return bool(value) if value is not None else None
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, pd.DataFrame):
        return [to_plain(row) for row in value.to_dict(orient="records")]
    if isinstance(value, Enum):
        return value.value
    return value


def spectrum_frame(result: SpectrumResult) -> pd.DataFrame:
    """Per-q table; number columns are decimal strings, delta_p also as mantissa/exponent"""
    entries = scaled_entries(result.delta_p)
    return pd.DataFrame({
        "q_planck": [format_float(k) for k in result.k_grid],
        "q_mpc_inv": [format_float(k) for k in result.k_mpc],
        "p_standard": [format_float(p) for p in result.p_standard],
        "delta_p": [e["value"] for e in entries],
        "rel_err": [format_float(r) for r in np.broadcast_to(result.rel_err, result.k_grid.shape)],
        "delta_p_mantissa": [e["mantissa"] for e in entries],
        "delta_p_exponent": [e["exponent"] for e in entries],
    })


def spectrum_payload(result: SpectrumResult, run_snapshot: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    payload = {
        "method": result.method.value,
        "kernel_variant": result.kernel_variant,
        "era": result.era,
        "error_estimate": result.error_estimate,
        "levels": result.levels,
        "elapsed_seconds": result.elapsed_seconds,
        "params_snapshot": result.params_snapshot,
        "spectrum": spectrum_frame(result).to_dict(orient="records"),
        "delta_r2": result.delta_r2,
    }
    if run_snapshot is not None:
        payload["run_config"] = run_snapshot
    return payload


def _prepare(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = _prepare(path)
    document = {"written_at": datetime.now().isoformat(), **to_plain(payload)}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, ensure_ascii=False, indent=2)
    logger.info(f"✅ Wrote {path}")
    return path


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """CSV with float columns rendered at 17 significant digits"""
    path = _prepare(path)
    out = frame.copy()
    for column in out.columns:
        if pd.api.types.is_float_dtype(out[column]):
            out[column] = out[column].map(format_float)
    out.to_csv(path, index=False)
    logger.info(f"✅ Wrote {path} ({len(out)} rows)")
    return path


def write_result(result: Union[SpectrumResult, pd.DataFrame, Dict[str, Any]], path: Union[str, Path],
                 run_snapshot: Optional[Dict[str, Any]] = None) -> Path:
    """
    Persist a result by file suffix: .csv (tables and spectra) or .json (anything).

    Raises:
        DomainError: unsupported suffix, or a dict sent to .csv
    """
    suffix = Path(path).suffix.lower()
    if suffix not in (".csv", ".json"):
        raise DomainError(f"output must end in .csv or .json, got {path!r}")
    if isinstance(result, SpectrumResult):
        if suffix == ".csv":
            return write_table(spectrum_frame(result), path)
        return write_json(spectrum_payload(result, run_snapshot), path)
    if isinstance(result, pd.DataFrame):
        if suffix == ".csv":
            return write_table(result, path)
        payload: Dict[str, Any] = {"table": result}
    else:
        if suffix == ".csv":
            raise DomainError("only tables and spectra can be written as CSV")
        payload = dict(result)
    if run_snapshot is not None:
        payload["run_config"] = run_snapshot
    return write_json(payload, path)


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def parse_scaled(entries: List[Dict[str, Any]]) -> ScaledArray:
    """Inverse of scaled_entries; exact since the mantissa string holds 17 digits"""
    mantissas = np.array([float(e["mantissa"]) for e in entries])
    exponents = np.array([int(e["exponent"]) for e in entries], dtype=np.int64)
    return ScaledArray(mantissas, exponents)
