"""
Module de reporting des expériences de composition.

Produit le CSV des lignes (cellule × compositeur), le CSV des réplications
et un résumé YAML: moyennes avec intervalles de confiance de Student à 95%,
différences relatives COPERNIC / références et vérifications de tendances.
"""

from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
from collections import OrderedDict, defaultdict
from datetime import datetime
from pathlib import Path
import logging
import math

import numpy as np
from scipy import stats

from ..exceptions.composition_exceptions import MetricsError
from ..utils.file_handlers import read_csv, write_csv, write_jsonl, write_yaml

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    'composer', 'density', 'length', 'mobility', 'seed',
    'issued', 'failed', 'pfr', 'ct_mean', 'mu_mean', 'mu_peak',
)
ROW_KEY = ('composer', 'density', 'length', 'mobility')

RESULTS_FILE = 'results.csv'
REPLICATIONS_FILE = 'replications.csv'
SUMMARY_FILE = 'summary.yaml'

CONFIDENCE = 0.95
REFERENCE = 'copernic'
BASELINES = ('gocomo', 'coopc')


def _float(value: Any) -> float:
    if value is None or value == '':
        return math.nan
    return float(value)


def confidence_interval(values: Iterable[float], level: float = CONFIDENCE) -> Tuple[float, float]:
    """
    Moyenne et demi-largeur de l'intervalle de Student.

    Les valeurs nan sont ignorées; la demi-largeur est nulle pour moins de
    deux valeurs.
    """
    data = np.array([v for v in values if not math.isnan(v)], dtype=float)
    if data.size == 0:
        return math.nan, math.nan
    mean = float(data.mean())
    if data.size < 2:
        return mean, 0.0
    sem = float(data.std(ddof=1)) / math.sqrt(data.size)
    return mean, float(stats.t.ppf((1.0 + level) / 2.0, data.size - 1)) * sem


def relative_gain(reference: float, other: float) -> float:
    """Gain relatif de `reference` sur `other`, en pourcentage de `other`."""
    if math.isnan(reference) or math.isnan(other) or other == 0:
        return math.nan
    return (other - reference) / other * 100.0


def aggregate_rows(rows: Sequence[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    """
    Agrège des lignes de même clé (compositeur, densité, longueur, mobilité).

    PFR sur les totaux, CT pondéré par les succès, MU moyen pondéré par les
    requêtes, MU crête maximal; la graine retenue est la plus petite.

    Raises:
        MetricsError: Si une ligne n'a émis aucune requête
    """
    groups: Dict[Tuple[str, ...], List[Mapping[str, Any]]] = OrderedDict()
    for row in rows:
        groups.setdefault(tuple(str(row[k]) for k in ROW_KEY), []).append(row)

    merged = []
    for key, members in groups.items():
        issued = sum(int(row['issued']) for row in members)
        failed = sum(int(row['failed']) for row in members)
        if issued <= 0:
            raise MetricsError("no requests issued")
        successes = [(int(row['issued']) - int(row['failed']), _float(row['ct_mean'])) for row in members]
        ct_weight = sum(count for count, value in successes if count > 0 and not math.isnan(value))
        ct_mean = (
            sum(count * value for count, value in successes if count > 0 and not math.isnan(value)) / ct_weight
            if ct_weight else math.nan
        )
        mu_mean = sum(int(row['issued']) * _float(row['mu_mean']) for row in members) / issued
        record = dict(zip(ROW_KEY, key))
        record.update({
            'seed': min(int(row['seed']) for row in members),
            'issued': issued,
            'failed': failed,
            'pfr': f"{failed / issued:.6f}",
            'ct_mean': f"{ct_mean:.6f}",
            'mu_mean': f"{mu_mean:.6f}",
            'mu_peak': f"{max(_float(row['mu_peak']) for row in members):.6f}",
        })
        merged.append(record)
    return merged


def _means(rows: Sequence[Mapping[str, Any]]) -> Dict[Tuple[str, ...], Dict[str, float]]:
    return {
        tuple(str(row[k]) for k in ROW_KEY): {
            'pfr': _float(row['pfr']),
            'ct': _float(row['ct_mean']),
            'mu': _float(row['mu_mean']),
        }
        for row in rows
    }


def trend_checks(rows: Sequence[Mapping[str, Any]]) -> Dict[str, Any]:
    """
    Tendances attendues sur les lignes agrégées.

    - mise à l'échelle mémoire: MU(CL-10) / MU(CL-5) par compositeur
    - ordre des temps de composition sur chaque cellule CL-10
    - tendance de densité: PFR(SD-S) > PFR(SD-D) par compositeur et mobilité
    - écart de sensibilité à la mobilité PFR(copernic) - PFR(gocomo)
    """
    means = _means(rows)
    composers = sorted({key[0] for key in means})
    checks: Dict[str, Any] = {}

    scaling: Dict[str, Any] = {}
    for composer in composers:
        ratios = []
        for (name, density, length, mobility), values in means.items():
            if name != composer or length != 'CL-10':
                continue
            short = means.get((name, density, 'CL-5', mobility))
            if short and short['mu'] > 0:
                ratios.append(values['mu'] / short['mu'])
        if ratios:
            scaling[composer] = round(float(np.mean(ratios)), 6)
    if scaling:
        checks['memory_scaling'] = scaling

    ordering = []
    for (name, density, length, mobility), values in means.items():
        if name != REFERENCE or length != 'CL-10':
            continue
        ct = [means.get((c, density, length, mobility), {}).get('ct', math.nan) for c in (REFERENCE,) + BASELINES]
        if any(math.isnan(v) for v in ct):
            continue
        ordering.append({
            'cell': f"{density}/{length}/{mobility}",
            'ordered': bool(ct[0] < ct[1] < ct[2]),
            'faster_than_gocomo_pct': round(relative_gain(ct[0], ct[1]), 3),
        })
    if ordering:
        checks['ct_ordering'] = ordering

    density_trend = []
    for composer in composers:
        for mobility in sorted({key[3] for key in means}):
            sparse = [v['pfr'] for k, v in means.items() if k[0] == composer and k[1] == 'SD-S' and k[3] == mobility]
            dense = [v['pfr'] for k, v in means.items() if k[0] == composer and k[1] == 'SD-D' and k[3] == mobility]
            if sparse and dense:
                density_trend.append({
                    'composer': composer,
                    'mobility': mobility,
                    'holds': bool(np.mean(sparse) > np.mean(dense)),
                })
    if density_trend:
        checks['density_trend'] = density_trend

    def gap(density: str, mobility: str) -> Optional[float]:
        ours = [v['pfr'] for k, v in means.items() if k[0] == REFERENCE and k[1] == density and k[3] == mobility]
        theirs = [v['pfr'] for k, v in means.items() if k[0] == 'gocomo' and k[1] == density and k[3] == mobility]
        if not ours or not theirs:
            return None
        return float(np.mean(ours) - np.mean(theirs))

    calm, agitated = gap('SD-S', 'M-S'), gap('SD-D', 'M-F')
    if calm is not None and agitated is not None:
        checks['mobility_sensitivity'] = {
            'gap_sparse_slow': round(calm, 6),
            'gap_dense_fast': round(agitated, 6),
            'holds': bool(agitated <= calm),
        }
    return checks


def build_summary(replication_rows: Sequence[Mapping[str, Any]]) -> Dict[str, Any]:
    """
    Résumé structuré: moyennes avec IC à 95%, différences relatives et tendances.
    """
    groups: Dict[Tuple[str, ...], List[Mapping[str, Any]]] = OrderedDict()
    for row in replication_rows:
        groups.setdefault(tuple(str(row[k]) for k in ROW_KEY), []).append(row)
    aggregated = aggregate_rows(replication_rows)

    entries = []
    for row in aggregated:
        members = groups[tuple(str(row[k]) for k in ROW_KEY)]
        entry: Dict[str, Any] = {k: row[k] for k in ROW_KEY}
        entry['seed'] = row['seed']
        entry['replications'] = len(members)
        for metric, column in (('pfr', 'pfr'), ('ct', 'ct_mean'), ('mu', 'mu_mean')):
            mean, half = confidence_interval(_float(member[column]) for member in members)
            entry[metric] = {'mean': round(mean, 6), 'ci95': round(half, 6)}
        entries.append(entry)

    means = _means(aggregated)
    comparisons = []
    for (name, density, length, mobility), values in means.items():
        if name != REFERENCE:
            continue
        for baseline in BASELINES:
            other = means.get((baseline, density, length, mobility))
            if other is None:
                continue
            comparisons.append({
                'cell': f"{density}/{length}/{mobility}",
                'baseline': baseline,
                'faster_pct': round(relative_gain(values['ct'], other['ct']), 3),
                'less_memory_pct': round(relative_gain(values['mu'], other['mu']), 3),
                'fewer_failures_pct': round((other['pfr'] - values['pfr']) * 100.0, 3),
            })

    return {
        'rows': entries,
        'comparisons': comparisons,
        'trends': trend_checks(aggregated),
    }


class ExperimentReporter:
    """Classe pour la génération des rapports d'expérience."""

    def __init__(self, output_dir: str = "reports", log_to_file: bool = True):
        """
        Initialise le reporter.

        Args:
            output_dir: Répertoire de sortie pour les rapports
            log_to_file: Ajouter un journal fichier dans le répertoire de sortie
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._handler: Optional[logging.Handler] = None
        if log_to_file:
            self._setup_logging()

    def _setup_logging(self) -> None:
        """Configure le journal fichier de l'expérience."""
        log_file = self.output_dir / f"experiment_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        logging.getLogger('src').addHandler(file_handler)
        self._handler = file_handler

    def close(self) -> None:
        if self._handler is not None:
            logging.getLogger('src').removeHandler(self._handler)
            self._handler.close()
            self._handler = None

    def write_results(self, rows: Sequence[Mapping[str, Any]], filename: str = RESULTS_FILE) -> str:
        path = self.output_dir / filename
        write_csv(str(path), CSV_COLUMNS, rows)
        logger.info(f"Rapport CSV généré: {path} ({len(rows)} lignes)")
        return str(path)

    def write_replications(self, rows: Sequence[Mapping[str, Any]]) -> str:
        return self.write_results(rows, REPLICATIONS_FILE)

    def write_summary(
        self,
        replication_rows: Sequence[Mapping[str, Any]],
        regimes: Optional[Mapping[str, Any]] = None,
    ) -> str:
        """
        Écrit le résumé YAML.

        Returns:
            str: Chemin du fichier généré
        """
        summary = build_summary(replication_rows)
        if regimes:
            summary['regimes'] = dict(regimes)
        path = self.output_dir / SUMMARY_FILE
        write_yaml(str(path), summary)
        logger.info(f"Résumé généré: {path}")
        return str(path)

    def write_trace(self, records: Iterable[Mapping[str, Any]], filename: str) -> str:
        path = self.output_dir / filename
        count = write_jsonl(str(path), records)
        logger.info(f"Trace écrite: {path} ({count} enregistrements)")
        return str(path)

    def reaggregate(self, csv_files: Sequence[str]) -> List[Dict[str, Any]]:
        """
        Relit des CSV de lignes ou de réplications et réécrit les rapports agrégés.

        Returns:
            Lignes agrégées
        """
        rows: List[Mapping[str, Any]] = []
        for path in csv_files:
            rows.extend(read_csv(path))
        if not rows:
            raise MetricsError("no requests issued")
        aggregated = aggregate_rows(rows)
        self.write_results(aggregated)
        self.write_summary(rows)
        return aggregated

    @staticmethod
    def generate_summary(rows: Sequence[Mapping[str, Any]]) -> str:
        """
        Génère un résumé texte des lignes agrégées.

        Returns:
            str: Résumé formaté
        """
        lines = ["=== Résumé de l'expérience ==="]
        by_composer: Dict[str, List[Mapping[str, Any]]] = defaultdict(list)
        for row in rows:
            by_composer[str(row['composer'])].append(row)
        for composer in sorted(by_composer):
            members = by_composer[composer]
            issued = sum(int(row['issued']) for row in members)
            failed = sum(int(row['failed']) for row in members)
            ct = [_float(row['ct_mean']) for row in members]
            ct = [v for v in ct if not math.isnan(v)]
            mu = [_float(row['mu_mean']) for row in members]
            lines.append(
                f"{composer}: {issued} requêtes, PFR {failed / issued if issued else 0.0:.3f}, "
                f"CT {np.mean(ct) if ct else math.nan:.3f}s, MU {np.mean(mu):.3f} Ko"
            )
        return "\n".join(lines)
