"""
Skew Motzkin Paths

An exact enumeration and verification toolkit for skew Motzkin paths: lattice
paths with up, down and flat steps that may also take a left step, as long as
the left step never follows or precedes an up step.

Features:
- Path model, validation and a brute-force enumeration oracle
- Exact truncated power series with rational (and mark-polynomial) coefficients
- Kernel-method closed forms: return paths, paths ending at level j, layers,
  totals over all levels, flat/left marks and bounded height
- Dynamic-programming count tables, height profiles and exact mean height
- High-precision singularity constants and the average-height law
- Exact uniform random generation
- A command-line front end with JSON, CSV, b-file and text output

Every result can be cross-checked against the others with ``run_verification``.
"""

import logging
from typing import Optional, Tuple, Union

from .config import Config, get_config
from .errors import (
    ConvergenceError,
    EmptyClassError,
    InvalidPathError,
    OracleLimitError,
    SeriesError,
    SkewMotzkinError,
    VerificationError,
)
from .paths import Path, Step, enumerate_paths, validate
from .series import MarkPoly, TruncatedSeries
from .closedforms import gf_bounded, gf_level, gf_marked, gf_sm, gf_total
from .dpcount import build_table, count, height_distribution, layer_counts, marked_distribution
from .asymptotics import build_report, find_rho, height_constants
from .sampler import SamplerSpec, sample_uniform
from .verify import run_verification

__all__: Tuple[str, ...] = (
    "Config",
    "get_config",
    "SkewMotzkinError",
    "InvalidPathError",
    "OracleLimitError",
    "SeriesError",
    "EmptyClassError",
    "ConvergenceError",
    "VerificationError",
    "Path",
    "Step",
    "validate",
    "enumerate_paths",
    "TruncatedSeries",
    "MarkPoly",
    "gf_sm",
    "gf_level",
    "gf_total",
    "gf_marked",
    "gf_bounded",
    "build_table",
    "count",
    "height_distribution",
    "layer_counts",
    "marked_distribution",
    "find_rho",
    "height_constants",
    "build_report",
    "SamplerSpec",
    "sample_uniform",
    "run_verification",
)

__version__ = "1.0.0"
__license__ = "Apache License 2.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())


def get_version() -> str:
    """Return the current version of the package."""
    return __version__


def setup_logger(level: Optional[Union[int, str]] = None) -> None:
    """
    Set up basic logging for the package on standard error.

    Args:
        level (Optional[Union[int, str]]): The logging level. Defaults to None.
    """
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
