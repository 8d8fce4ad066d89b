"""Configuration paths and constants for rlift."""

from pathlib import Path

# Base configuration directory
RLIFT_CONFIG_DIR = Path.home() / ".config" / "rlift"

# Truncation degree N used when neither the command line nor the settings say otherwise
DEFAULT_DEGREE = 4

# The lift iteration starts from rho_3, so N = 3 is the smallest meaningful cap
MIN_DEGREE = 3

# Table sizes grow combinatorially with N
MAX_DEGREE = 12

# Legs served by one algebra context; the cocycle conditions live on four legs
DEFAULT_LEGS = 4

# Highest degree of the build-time dual-model cross-check
MAX_CROSS_CHECK_DEGREE = 4

EMIT_KINDS = ("lift", "braiding", "report", "audit")

# Process exit codes
EXIT_OK = 0
EXIT_AXIOM_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3
