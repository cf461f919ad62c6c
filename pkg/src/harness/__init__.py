"""
Exécution de la grille d'expérience et calcul des métriques PFR, CT et MU.
"""

from .experiment import (
    COMPOSERS,
    DENSITY_LEVELS,
    LENGTH_LEVELS,
    ExperimentConfig,
    ExperimentResult,
    RunMetrics,
    RunResult,
    build_composer,
    compute_pfr,
    merge_metrics,
    run_experiment,
    run_single,
)
from ..reporting.experiment_reporter import CSV_COLUMNS

__all__ = [
    'COMPOSERS',
    'CSV_COLUMNS',
    'DENSITY_LEVELS',
    'LENGTH_LEVELS',
    'ExperimentConfig',
    'ExperimentResult',
    'RunMetrics',
    'RunResult',
    'build_composer',
    'compute_pfr',
    'merge_metrics',
    'run_experiment',
    'run_single',
]
