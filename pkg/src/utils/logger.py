# src/utils/logger.py
"""
Logging setup for the CSL cosmology toolkit
"""

import logging
import os
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(verbose: bool = False, log_file: Optional[str] = "logs/cslcosmo.log") -> logging.Logger:
    """
    Configure the root handlers once, from the entry point only.

    Args:
        verbose: DEBUG level when True, INFO otherwise
        log_file: Path of the log file; None disables the file handler

    Returns:
        The top-level "CSLCosmo" logger
    """
    handlers = [logging.StreamHandler()]
    if log_file:
        os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
        handlers.insert(0, logging.FileHandler(log_file))

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
    return logging.getLogger("CSLCosmo")


def get_logger(component: str) -> logging.Logger:
    """Hierarchical component logger, e.g. get_logger("Spectrum") -> CSLCosmo.Spectrum"""
    return logging.getLogger(f"CSLCosmo.{component}")
