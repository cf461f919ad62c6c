"""
Exécution des expériences: grille de scénarios, réplications et métriques.

Chaque réplication d'une cellule (densité, longueur, mobilité) est un
scénario autonome dérivé de la graine `seed + index`. Le catalogue, le
placement, la mobilité et les issues d'invocation dépendent uniquement de
cette graine, si bien que les compositeurs sont comparés sur des scénarios
appariés.
"""

from typing import Any, Dict, List, Mapping, Sequence, Tuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ..agent.copernic_agent import CopernicAgent
from ..agent.copernic_composer import CopernicComposer
from ..baselines.backward_chaining import BaselineConfig, CoopCComposer, GoCoMoComposer
from ..exceptions.composition_exceptions import ConfigurationError, MetricsError
from ..perception.perception import encode_request
from ..services.catalog import QOS_DIMENSIONS, ServiceCatalog, generate_catalog
from ..services.service_model import Premise
from ..simulation.composer import Composer, RequestOutcome
from ..simulation.mobility import MOBILITY_BANDS, create_nodes, speed_band
from ..simulation.simulator import ManetSimulator, SimulationConfig, deploy_services

logger = logging.getLogger(__name__)

COMPOSERS = ('copernic', 'gocomo', 'coopc')
DENSITY_LEVELS: Dict[str, int] = {'SD-S': 20, 'SD-M': 40, 'SD-D': 60}
LENGTH_LEVELS: Dict[str, int] = {'CL-5': 5, 'CL-10': 10}

# Flux aléatoires dérivés de la graine d'une réplication
STREAMS = ('catalog', 'deployment', 'mobility', 'service', 'agents')


def compute_pfr(failed: int, issued: int) -> float:
    """
    Taux d'échec de planification.

    Raises:
        MetricsError: Si aucune requête n'a été émise ou si failed > issued
    """
    if issued <= 0:
        raise MetricsError("no requests issued")
    if not 0 <= failed <= issued:
        raise MetricsError(f"Nombre d'échecs invalide: {failed}/{issued}")
    return failed / issued


def density_value(label: str) -> int:
    if label in DENSITY_LEVELS:
        return DENSITY_LEVELS[label]
    try:
        value = int(label)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Densité inconnue: {label}", key='experiment.densities')
    if value <= 0:
        raise ConfigurationError(f"Densité invalide: {label}", key='experiment.densities')
    return value


def length_value(label: str) -> int:
    if label in LENGTH_LEVELS:
        return LENGTH_LEVELS[label]
    text = str(label)
    try:
        value = int(text[3:] if text.startswith('CL-') else text)
    except ValueError:
        raise ConfigurationError(f"Longueur inconnue: {label}", key='experiment.lengths')
    if value <= 0:
        raise ConfigurationError(f"Longueur invalide: {label}", key='experiment.lengths')
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Configuration d'une expérience.

    Args:
        composers: Compositeurs comparés
        densities: Niveaux de densité (étiquettes SD-* ou entiers)
        lengths: Longueurs de composition (CL-*)
        mobilities: Bandes de mobilité (M-S, M-M, M-F, static)
        replications: Nombre de réplications par cellule
        seed: Graine de base (réplication i: seed + i)
        settings: Configuration fusionnée complète
    """
    composers: Tuple[str, ...]
    densities: Tuple[str, ...]
    lengths: Tuple[str, ...]
    mobilities: Tuple[str, ...]
    replications: int
    seed: int
    deadline: float
    horizon: float
    requests_per_run: int
    request_start: float
    request_interval: float
    distractors: int
    reliability_range: Tuple[float, float]
    workers: int
    settings: Mapping[str, Any] = field(default_factory=dict, hash=False, compare=False)

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any]) -> 'ExperimentConfig':
        section = settings['experiment']
        config = cls(
            composers=tuple(section['composers']),
            densities=tuple(str(d) for d in section['densities']),
            lengths=tuple(str(l) for l in section['lengths']),
            mobilities=tuple(section['mobilities']),
            replications=int(section['replications']),
            seed=int(section['seed']),
            deadline=float(section['deadline']),
            horizon=float(section['horizon']),
            requests_per_run=int(section['requests_per_run']),
            request_start=float(section['request_start']),
            request_interval=float(section['request_interval']),
            distractors=int(section['distractors']),
            reliability_range=tuple(float(v) for v in section['reliability_range']),
            workers=int(section['workers']),
            settings=settings,
        )
        config.validate()
        return config

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: Avec la clé fautive
        """
        if self.replications < 1:
            raise ConfigurationError(f"Réplications invalides: {self.replications}", key='experiment.replications')
        for name in self.composers:
            if name not in COMPOSERS:
                raise ConfigurationError(f"Compositeur inconnu: {name}", key='experiment.composers')
        for band in self.mobilities:
            if band not in MOBILITY_BANDS:
                raise ConfigurationError(f"Mobilité inconnue: {band}", key='experiment.mobilities')
        for label in self.densities:
            density_value(label)
        for label in self.lengths:
            length_value(label)
        if not (self.composers and self.densities and self.lengths and self.mobilities):
            raise ConfigurationError("Grille d'expérience vide", key='experiment')
        for key in ('deadline', 'horizon', 'request_interval'):
            if getattr(self, key) <= 0:
                raise ConfigurationError(f"Valeur non positive: {getattr(self, key)}", key=f"experiment.{key}")
        if not 0.0 <= self.request_start <= self.horizon:
            raise ConfigurationError(f"Première requête hors de l'horizon: {self.request_start}", key='experiment.request_start')
        if self.requests_per_run < 1:
            raise ConfigurationError("Au moins une requête par exécution", key='experiment.requests_per_run')
        if self.workers < 1:
            raise ConfigurationError(f"Nombre de processus invalide: {self.workers}", key='experiment.workers')
        low, high = self.reliability_range
        if not 0.0 <= low <= high <= 1.0:
            raise ConfigurationError(f"Intervalle de fiabilité invalide: {self.reliability_range}", key='experiment.reliability_range')

    def cells(self) -> List[Tuple[str, str, str]]:
        """Cellules de la grille, dans l'ordre (densité, longueur, mobilité)."""
        return [
            (density, length, mobility)
            for density in self.densities
            for length in self.lengths
            for mobility in self.mobilities
        ]


@dataclass
class RunMetrics:
    """Métriques d'une réplication ou d'une ligne agrégée."""
    composer: str
    density: str
    length: str
    mobility: str
    seed: int
    issued: int
    failed: int
    ct_samples: List[float] = field(default_factory=list)
    mu_samples: List[float] = field(default_factory=list)

    @property
    def pfr(self) -> float:
        return compute_pfr(self.failed, self.issued)

    @property
    def ct_mean(self) -> float:
        """Temps moyen des compositions réussies (nan si aucune)."""
        return float(np.mean(self.ct_samples)) if self.ct_samples else math.nan

    @property
    def mu_mean(self) -> float:
        return float(np.mean(self.mu_samples)) if self.mu_samples else 0.0

    @property
    def mu_peak(self) -> float:
        return float(max(self.mu_samples)) if self.mu_samples else 0.0

    @property
    def cell(self) -> Tuple[str, str, str]:
        return (self.density, self.length, self.mobility)

    def as_row(self) -> Dict[str, Any]:
        return {
            'composer': self.composer,
            'density': self.density,
            'length': self.length,
            'mobility': self.mobility,
            'seed': self.seed,
            'issued': self.issued,
            'failed': self.failed,
            'pfr': f"{self.pfr:.6f}",
            'ct_mean': f"{self.ct_mean:.6f}",
            'mu_mean': f"{self.mu_mean:.6f}",
            'mu_peak': f"{self.mu_peak:.6f}",
        }

    @classmethod
    def from_outcomes(
        cls,
        outcomes: Sequence[RequestOutcome],
        composer: str,
        cell: Tuple[str, str, str],
        seed: int,
    ) -> 'RunMetrics':
        density, length, mobility = cell
        return cls(
            composer=composer,
            density=density,
            length=length,
            mobility=mobility,
            seed=seed,
            issued=len(outcomes),
            failed=sum(1 for outcome in outcomes if not outcome.success),
            ct_samples=[outcome.composition_time for outcome in outcomes if outcome.success],
            mu_samples=[outcome.mu_peak for outcome in outcomes],
        )


def merge_metrics(runs: Sequence[RunMetrics], seed: int) -> RunMetrics:
    """Agrège les réplications d'une même ligne (échantillons mis en commun)."""
    first = runs[0]
    merged = RunMetrics(first.composer, first.density, first.length, first.mobility, seed, 0, 0)
    for run in runs:
        merged.issued += run.issued
        merged.failed += run.failed
        merged.ct_samples.extend(run.ct_samples)
        merged.mu_samples.extend(run.mu_samples)
    return merged


@dataclass
class RunResult:
    """Issue complète d'une réplication."""
    metrics: RunMetrics
    outcomes: List[RequestOutcome]
    regimes: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    trace: List[Dict[str, Any]] = field(default_factory=list)
    event_log: List[Dict[str, Any]] = field(default_factory=list)
    diagnostics: Dict[str, int] = field(default_factory=dict)


def build_composer(
    name: str,
    catalog: ServiceCatalog,
    settings: Mapping[str, Any],
    rng: np.random.Generator,
    node_id: str,
) -> Composer:
    """Instancie un compositeur pour un nœud demandeur."""
    if name == 'copernic':
        return CopernicComposer(CopernicAgent.from_settings(catalog, settings, rng, agent_id=node_id))
    baseline = BaselineConfig.from_settings(settings['baselines'])
    if name == 'gocomo':
        return GoCoMoComposer(baseline)
    if name == 'coopc':
        return CoopCComposer(baseline)
    raise ConfigurationError(f"Compositeur inconnu: {name}", key='experiment.composers')


def run_single(
    composer: str,
    cell: Tuple[str, str, str],
    seed: int,
    config: ExperimentConfig,
    trace: bool = False,
) -> RunResult:
    """
    Exécute une réplication d'une cellule pour un compositeur.

    Args:
        composer: Nom du compositeur
        cell: (densité, longueur, mobilité)
        seed: Graine de la réplication
        config: Configuration de l'expérience
        trace: Conserver les traces de décision et le journal d'événements

    Returns:
        RunResult: Métriques, issues des requêtes, tables de régimes et traces
    """
    settings = config.settings
    density_label, length_label, mobility = cell
    density = density_value(density_label)
    length = length_value(length_label)
    band = speed_band(mobility)

    streams = dict(zip(STREAMS, np.random.SeedSequence(seed).spawn(len(STREAMS))))
    catalog_rng = np.random.default_rng(streams['catalog'])
    deployment_rng = np.random.default_rng(streams['deployment'])
    mobility_rng = np.random.default_rng(streams['mobility'])
    service_rng = np.random.default_rng(streams['service'])

    sim_section = dict(settings['simulation'])
    if trace:
        sim_section['event_log'] = True
    sim_config = SimulationConfig.from_settings(sim_section, cycle_period=settings['agent']['cycle_period'])

    catalog = generate_catalog(
        length,
        density,
        catalog_rng,
        distractors=config.distractors,
        reliability_range=config.reliability_range,
    )
    nodes = create_nodes(
        sim_config.nodes, sim_config.requesters, sim_config.arena, band, sim_config.radio_range, mobility_rng,
    )
    requesters = nodes[:sim_config.requesters]
    providers = nodes[sim_config.requesters:]
    deployed = catalog.deployed(deploy_services(catalog, providers, density, deployment_rng))

    sim = ManetSimulator(nodes, deployed, band, sim_config, mobility_rng, service_rng)
    agent_seeds = streams['agents'].spawn(len(requesters))
    for node, agent_seed in zip(requesters, agent_seeds):
        sim.add_composer(node.id, build_composer(composer, deployed, settings, np.random.default_rng(agent_seed), node.id))

    for index in range(config.requests_per_run):
        issue_time = config.request_start + index * config.request_interval
        if issue_time > config.horizon:
            break
        preference = Premise('preference', (QOS_DIMENSIONS[index % len(QOS_DIMENSIONS)],))
        request = encode_request(
            deployed.goals,
            config.deadline,
            issue_time=issue_time,
            request_id=f"req-{index:03d}",
            context=set(deployed.context) | {preference},
            requester=requesters[index % len(requesters)].id,
        )
        sim.schedule_request(request)

    logger.debug(f"Réplication {composer} {cell} graine {seed}: {len(deployed.concretes)} services déployés")
    sim.run(config.horizon)
    for node_id in sorted(sim.composers):
        sim.composers[node_id].expire_all(sim.now)

    outcomes = sim.outcomes()
    result = RunResult(
        metrics=RunMetrics.from_outcomes(outcomes, composer, cell, seed),
        outcomes=outcomes,
        event_log=list(sim.event_log),
        diagnostics=dict(sim.diagnostics),
    )
    for node_id in sorted(sim.composers):
        instance = sim.composers[node_id]
        if isinstance(instance, CopernicComposer):
            result.regimes[node_id] = instance.agent.pm.regime_table()
            if trace:
                result.trace.extend({'node': node_id, **record} for record in instance.agent.trace)
    return result


def _run_job(job: Tuple[str, Tuple[str, str, str], int, ExperimentConfig]) -> RunResult:
    composer, cell, seed, config = job
    return run_single(composer, cell, seed, config)


@dataclass
class ExperimentResult:
    """Lignes agrégées (cellule × compositeur) et réplications."""
    rows: List[RunMetrics]
    replications: List[RunMetrics]
    regimes: Dict[str, Dict[str, List[Dict[str, Any]]]] = field(default_factory=dict)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Exécute toute la grille de l'expérience.

    Les réplications sont indépendantes et peuvent s'exécuter en parallèle;
    l'assemblage se fait dans l'ordre cellule, compositeur puis graine.

    Returns:
        ExperimentResult: Une ligne par cellule et par compositeur
    """
    config.validate()
    jobs = [
        (composer, cell, config.seed + index, config)
        for cell in config.cells()
        for composer in config.composers
        for index in range(config.replications)
    ]
    logger.info(f"Expérience: {len(config.cells())} cellules, {len(config.composers)} compositeurs, {config.replications} réplications")

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]

    rows: List[RunMetrics] = []
    replications: List[RunMetrics] = []
    regimes: Dict[str, Dict[str, List[Dict[str, Any]]]] = {}
    for start in range(0, len(results), config.replications):
        batch = results[start:start + config.replications]
        runs = [result.metrics for result in batch]
        replications.extend(runs)
        rows.append(merge_metrics(runs, config.seed))
        for result in batch:
            if result.regimes:
                key = f"{result.metrics.composer}/{'/'.join(result.metrics.cell)}/{result.metrics.seed}"
                regimes[key] = result.regimes
    logger.info(f"Expérience terminée: {len(rows)} lignes")
    return ExperimentResult(rows, replications, regimes)
