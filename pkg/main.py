#!/usr/bin/env python3
"""
CSL Cosmology Toolkit - Main Application Entry Point
Collapse-model corrections to the inflationary curvature power spectrum
"""

import os
import sys

# Make `src` importable when run from a checkout
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli.app import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
