"""
Command-line front end: config parsing, commands and result files.
"""

from .config_parser import parse_config, load_config
from .commands import (
    RateQuantity,
    CompareResult,
    RateFit,
    cmd_run,
    cmd_stagewise,
    cmd_compare,
    cmd_ratefit,
)
from .csv_io import (
    STAGES_COLUMNS,
    COMPARE_COLUMNS,
    write_metrics_csv,
    read_metrics_csv,
    write_vector_csv,
    write_stages_csv,
    write_compare_csv,
)

__all__ = [
    "parse_config",
    "load_config",
    "RateQuantity",
    "CompareResult",
    "RateFit",
    "cmd_run",
    "cmd_stagewise",
    "cmd_compare",
    "cmd_ratefit",
    "STAGES_COLUMNS",
    "COMPARE_COLUMNS",
    "write_metrics_csv",
    "read_metrics_csv",
    "write_vector_csv",
    "write_stages_csv",
    "write_compare_csv",
]
