# qaoatransfer/errors.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Exception hierarchy for the QAOA transferability toolkit
# Each error carries the CLI exit code it maps to


class QaoaTransferError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 1


class ConfigError(QaoaTransferError, ValueError):
    """Invalid or inconsistent experiment configuration."""
    exit_code = 2


class InfeasibleError(QaoaTransferError, ValueError):
    """Input constraints that no graph or sequence can satisfy."""
    exit_code = 3


class CapacityError(QaoaTransferError):
    """Problem too large for the requested exact method (qubit cap, solver cap)."""
    exit_code = 3


class VerificationError(QaoaTransferError):
    """Manifest hashes no longer match the artifacts on disk."""
    exit_code = 4


class MetricError(QaoaTransferError, ValueError):
    """Degenerate statistic or denominator (zero variance, zero energy, empty set)."""
    exit_code = 2
