"""
Interface en ligne de commande du simulateur de composition.

Sous-commandes:
    run     grille complète
    cell    une cellule (densité, longueur, mobilité)
    trace   une réplication avec traces de décision et journal d'événements
    report  réagrégation de fichiers CSV
"""

from typing import Any, Dict, List, Optional, Sequence
import argparse
import logging
import os
import sys

from ..config.settings import OUTPUT_DIR_ENV, load_settings
from ..exceptions.composition_exceptions import CompositionSimError
from ..harness.experiment import ExperimentConfig, run_experiment, run_single
from ..reporting.experiment_reporter import ExperimentReporter
from ..utils.file_handlers import get_files_to_process

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = 'reports'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Configure le logger racine."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


class CLI:
    """Point d'entrée de la ligne de commande `copernic`."""

    def __init__(self):
        self.parser = self._build_parser()

    @staticmethod
    def _add_grid_flags(parser: argparse.ArgumentParser, single: bool) -> None:
        if single:
            parser.add_argument('--density', help="Densité de services (SD-S, SD-M, SD-D)")
            parser.add_argument('--length', help="Longueur de composition (CL-5, CL-10)")
            parser.add_argument('--mobility', help="Bande de mobilité (M-S, M-M, M-F, static)")
        else:
            parser.add_argument('--densities', nargs='+', help="Densités de services")
            parser.add_argument('--lengths', nargs='+', help="Longueurs de composition")
            parser.add_argument('--mobilities', nargs='+', help="Bandes de mobilité")
        parser.add_argument('--composers', nargs='+', help="Compositeurs (copernic, gocomo, coopc)")
        parser.add_argument('--replications', type=int, help="Réplications par cellule")
        parser.add_argument('--seed', type=int, help="Graine de base")
        parser.add_argument('--deadline', type=float, help="Échéance des requêtes (s)")
        parser.add_argument('--horizon', type=float, help="Horizon simulé d'une réplication (s)")
        parser.add_argument('--requests', type=int, dest='requests_per_run', help="Requêtes par réplication")
        parser.add_argument('--workers', type=int, help="Processus parallèles")

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog='copernic',
            description="Simulation de composition de services en MANET: COPERNIC vs GoCoMo-like vs CoopC-like",
        )
        parser.add_argument('-v', '--verbose', action='store_true', help="Journalisation détaillée")
        parser.add_argument('-l', '--log-file', help="Fichier de journalisation")
        parser.add_argument('--config', help="Fichier YAML de configuration (prioritaire sur les options)")
        parser.add_argument('--output-dir', help=f"Répertoire de sortie (défaut: ${OUTPUT_DIR_ENV} ou {DEFAULT_OUTPUT_DIR})")
        commands = parser.add_subparsers(dest='command', required=True)

        run = commands.add_parser('run', help="Exécuter la grille complète")
        self._add_grid_flags(run, single=False)

        cell = commands.add_parser('cell', help="Exécuter une cellule de la grille")
        self._add_grid_flags(cell, single=True)

        trace = commands.add_parser('trace', help="Exécuter une réplication avec traces")
        trace.add_argument('--composer', default='copernic', help="Compositeur tracé")
        trace.add_argument('--density', help="Densité de services")
        trace.add_argument('--length', help="Longueur de composition")
        trace.add_argument('--mobility', help="Bande de mobilité")
        trace.add_argument('--seed', type=int, help="Graine de la réplication")

        report = commands.add_parser('report', help="Réagréger des fichiers CSV")
        report.add_argument('inputs', nargs='+', help="Fichiers CSV ou répertoires")
        return parser

    @staticmethod
    def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
        """Surcharges de la section `experiment` issues des options."""
        section: Dict[str, Any] = {}
        for key in ('composers', 'densities', 'lengths', 'mobilities', 'replications', 'seed',
                    'deadline', 'horizon', 'requests_per_run', 'workers'):
            value = getattr(args, key, None)
            if value is not None:
                section[key] = value
        for single, plural in (('density', 'densities'), ('length', 'lengths'), ('mobility', 'mobilities')):
            value = getattr(args, single, None)
            if value is not None:
                section[plural] = [value]
        composer = getattr(args, 'composer', None)
        if composer is not None:
            section['composers'] = [composer]
        return {'experiment': section} if section else {}

    @staticmethod
    def output_dir(args: argparse.Namespace) -> str:
        return args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        setup_logging(args.verbose, args.log_file)
        try:
            settings = load_settings(args.config, self.overrides_from(args))
            if args.command == 'cell':
                # une cellule: la première valeur de chaque axe
                section = settings['experiment']
                for axis in ('densities', 'lengths', 'mobilities'):
                    section[axis] = section[axis][:1]
            config = ExperimentConfig.from_settings(settings)
            reporter = ExperimentReporter(self.output_dir(args))
            try:
                handler = {
                    'run': self._run_grid,
                    'cell': self._run_grid,
                    'trace': self._run_trace,
                    'report': self._run_report,
                }[args.command]
                handler(args, config, reporter)
            finally:
                reporter.close()
        except CompositionSimError as e:
            logger.error(f"Erreur: {e}")
            return 1
        return 0

    @staticmethod
    def _run_grid(args: argparse.Namespace, config: ExperimentConfig, reporter: ExperimentReporter) -> None:
        result = run_experiment(config)
        reporter.write_results([row.as_row() for row in result.rows])
        replication_rows = [run.as_row() for run in result.replications]
        reporter.write_replications(replication_rows)
        reporter.write_summary(replication_rows, result.regimes)
        print(reporter.generate_summary([row.as_row() for row in result.rows]))

    @staticmethod
    def _run_trace(args: argparse.Namespace, config: ExperimentConfig, reporter: ExperimentReporter) -> None:
        cell = (config.densities[0], config.lengths[0], config.mobilities[0])
        composer = config.composers[0]
        result = run_single(composer, cell, config.seed, config, trace=True)
        stem = f"trace_{composer}_{'_'.join(cell)}_{config.seed}"
        reporter.write_trace(result.trace, f"{stem}_decisions.jsonl")
        reporter.write_trace(result.event_log, f"{stem}_events.jsonl")
        reporter.write_trace((outcome.as_dict() for outcome in result.outcomes), f"{stem}_outcomes.jsonl")
        reporter.write_results([result.metrics.as_row()], f"{stem}.csv")
        logger.info(f"Diagnostics du simulateur: {result.diagnostics}")

    @staticmethod
    def _run_report(args: argparse.Namespace, config: ExperimentConfig, reporter: ExperimentReporter) -> None:
        files = get_files_to_process(args.inputs, '.csv')
        rows = reporter.reaggregate(files)
        print(reporter.generate_summary(rows))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Point d'entrée du script `copernic`."""
    return CLI().run(argv)


if __name__ == '__main__':
    sys.exit(main())
