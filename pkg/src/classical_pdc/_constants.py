"""Numeric tolerances, work budgets and environment variable names."""

from __future__ import annotations

# Absolute tolerance for closed-form exactness claims on unit-scale amplitudes
EXACTNESS_TOL = 1e-12

# lambda_max at or below this is a classically-forbidden verdict
FORBIDDEN_GAIN_TOL = 1e-12

# Quantum probabilities below this count as exact zeros
ZERO_PROBABILITY_TOL = 1e-24

# Quantum probabilities above this must be classically allowed
ALLOWED_PROBABILITY_FLOOR = 1e-6

JACOBI_OFFDIAG_TOL = 1e-14
JACOBI_MAX_SWEEPS = 64

ODE_MAX_STEPS = 10_000_000
ODE_SNAPSHOT_STRIDE = 100

FORCED_ZERO_FRACTION = 0.1
FORCED_ZERO_REJECT = 1e-6

# Significant digits for serialized floats, enough for a lossless double round trip
SERIAL_DIGITS = 17

THREADS_ENV = "JORCA_THREADS"
