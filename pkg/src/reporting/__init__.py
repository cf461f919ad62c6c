"""
Mesure mémoire structurelle et rapports d'expérience.
"""

from .experiment_reporter import (
    CSV_COLUMNS,
    ExperimentReporter,
    aggregate_rows,
    build_summary,
    confidence_interval,
    relative_gain,
    trend_checks,
)
from .memory_meter import LiveState, MemorySampler, measure_memory, premise_bytes, state_bytes

__all__ = [
    'CSV_COLUMNS',
    'ExperimentReporter',
    'aggregate_rows',
    'build_summary',
    'confidence_interval',
    'relative_gain',
    'trend_checks',
    'LiveState',
    'MemorySampler',
    'measure_memory',
    'premise_bytes',
    'state_bytes',
]
