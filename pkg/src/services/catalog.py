"""
Catalogue de services d'un scénario: chargement YAML, univers de prémisses
et générateur de chaînes de composition.
"""

from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple
from dataclasses import dataclass, field
from collections import OrderedDict
import logging
import math
from pathlib import Path

import numpy as np
import yaml

from ..exceptions.composition_exceptions import CatalogError, ServiceModelError
from ..utils.validators import validate_and_correct_service
from .service_model import (
    AbstractService,
    ConcreteService,
    Premise,
    PremiseSet,
    QoSVector,
    abstract_from_concretes,
    premises,
)

logger = logging.getLogger(__name__)

# Familles de prémisses dérivées émises par la perception et les mémoires
AVAILABLE = 'available'
DEPARTED = 'departed'
FAILED = 'failed'
CAPABILITY = 'capability'
QOS_OBSERVED = 'qos-observed'
PERFORMED_WELL = 'performed-well'
GOAL = 'goal'
DESCRIBED = 'described'
CATEGORY = 'category'
PREFERS = 'prefers'

QOS_DIMENSIONS = ('latency', 'reliability', 'cost', 'energy')
DEFAULT_CONTEXT_KEYS = ('zone', 'preference')
SERVICE_CATEGORIES = ('compute', 'storage', 'sensing')


def goal_premise(premise: Premise) -> Premise:
    """Encapsule un but: `g(a)` devient `goal(g,a)`."""
    return Premise(GOAL, premise.mentions())


def unwrap_goal(premise: Premise) -> Premise:
    """Inverse de `goal_premise`."""
    if premise.predicate != GOAL or not premise.args:
        raise ServiceModelError(f"Pas une prémisse de but: {premise}")
    return Premise(premise.args[0], premise.args[1:])


@dataclass(frozen=True)
class PremiseUniverse:
    """Univers PR des prémisses d'un scénario."""
    base: PremiseSet
    service_ids: FrozenSet[str]
    abstract_ids: FrozenSet[str]
    categories: FrozenSet[str]
    context_keys: FrozenSet[str]

    def __contains__(self, premise: object) -> bool:
        if not isinstance(premise, Premise):
            return False
        if premise in self.base:
            return True
        predicate, args = premise.predicate, premise.args
        if predicate in (AVAILABLE, DEPARTED, FAILED, QOS_OBSERVED):
            return len(args) == 1 and args[0] in self.service_ids
        if predicate == PERFORMED_WELL:
            return len(args) == 2 and args[0] in self.service_ids
        if predicate in (CAPABILITY, DESCRIBED):
            return len(args) == 1 and args[0] in self.abstract_ids
        if predicate == CATEGORY:
            return len(args) == 1 and args[0] in self.categories
        if predicate == PREFERS:
            return len(args) == 1 and args[0] in QOS_DIMENSIONS
        if predicate == GOAL:
            return bool(args) and unwrap_goal(premise) in self.base
        if predicate in self.context_keys:
            return len(args) == 1
        return False


@dataclass
class ServiceCatalog:
    """Catalogue des services concrets et abstraits d'un scénario."""
    concretes: Dict[str, ConcreteService]
    abstracts: Dict[str, AbstractService]
    goals: PremiseSet = frozenset()
    context: PremiseSet = frozenset()
    context_keys: Tuple[str, ...] = DEFAULT_CONTEXT_KEYS
    concepts: List[Dict[str, Any]] = field(default_factory=list)
    links: List[Dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        self._abstract_of = {
            member: abstract.id
            for abstract in self.abstracts.values()
            for member in abstract.members
        }
        self._universe: Optional[PremiseUniverse] = None

    def concrete(self, service_id: str) -> Optional[ConcreteService]:
        return self.concretes.get(service_id)

    def abstract_of(self, service_id: str) -> Optional[str]:
        return self._abstract_of.get(service_id)

    def categories(self) -> FrozenSet[str]:
        return frozenset(
            service.ctx['category'] for service in self.concretes.values() if 'category' in service.ctx
        )

    @property
    def universe(self) -> PremiseUniverse:
        """Univers PR: prémisses de base et familles dérivées."""
        if self._universe is None:
            base: Set[Premise] = set(self.goals) | set(self.context)
            for service in self.concretes.values():
                base |= service.prec | service.postc | service.negative
            for record in self.concepts:
                base |= premises(record.get('premises', []))
            self._universe = PremiseUniverse(
                base=frozenset(base),
                service_ids=frozenset(self.concretes),
                abstract_ids=frozenset(self.abstracts),
                categories=self.categories(),
                context_keys=frozenset(self.context_keys),
            )
        return self._universe

    def goal_chain(
        self,
        goals: Optional[Iterable[Premise]] = None,
        achieved: Iterable[Premise] = (),
    ) -> List[str]:
        """
        Services abstraits nécessaires pour atteindre les buts par chaînage arrière.

        Args:
            goals: Buts visés (défaut: buts du catalogue)
            achieved: Prémisses déjà atteintes, où le chaînage s'arrête en plus du contexte

        Returns:
            Liste triée des identifiants abstraits de la chaîne
        """
        known = set(self.context) | set(achieved)
        needed = set(goals if goals is not None else self.goals) - known
        chain: Set[str] = set()
        changed = True
        while changed:
            changed = False
            for abstract in self.abstracts.values():
                if abstract.id in chain or not (abstract.post & needed):
                    continue
                chain.add(abstract.id)
                needed |= set(abstract.pre) - known
                changed = True
        return sorted(chain)

    def deployed(self, assignment: Mapping[str, str]) -> 'ServiceCatalog':
        """
        Catalogue restreint aux services déployés, hôtes renseignés.

        Args:
            assignment: Identifiant de service concret -> identifiant de nœud
        """
        concretes = OrderedDict(
            (service_id, service.hosted_on(assignment[service_id]))
            for service_id, service in self.concretes.items()
            if service_id in assignment
        )
        abstracts = OrderedDict()
        for abstract in self.abstracts.values():
            members = [concretes[m] for m in abstract.members if m in concretes]
            if members:
                abstracts[abstract.id] = abstract_from_concretes(members, abstract.id)
        return ServiceCatalog(
            concretes=concretes,
            abstracts=abstracts,
            goals=self.goals,
            context=self.context,
            context_keys=self.context_keys,
            concepts=list(self.concepts),
            links=list(self.links),
        )


def forward_closure(services: Iterable[ConcreteService], context: Iterable[Premise]) -> PremiseSet:
    """
    Point fixe de l'application des services exécutables depuis `context`.

    Sert d'oracle d'atteignabilité: un but est réalisable si et seulement si
    il appartient à la fermeture.
    """
    state = set(context)
    pending = list(services)
    changed = True
    while changed:
        changed = False
        for service in list(pending):
            if service.prec <= state:
                state |= service.postc
                pending.remove(service)
                changed = True
    return frozenset(state)


def build_catalog(
    records: Sequence[Mapping[str, Any]],
    goals: Iterable[str] = (),
    context: Iterable[str] = (),
    context_keys: Iterable[str] = DEFAULT_CONTEXT_KEYS,
    concepts: Optional[List[Dict[str, Any]]] = None,
    links: Optional[List[Dict[str, Any]]] = None,
) -> ServiceCatalog:
    """
    Construit un catalogue depuis des enregistrements de services.

    Raises:
        CatalogError: Enregistrement invalide, identifiant dupliqué ou groupe incohérent
    """
    concretes: 'OrderedDict[str, ConcreteService]' = OrderedDict()
    groups: 'OrderedDict[str, List[str]]' = OrderedDict()

    for index, record in enumerate(records):
        result = validate_and_correct_service(record)
        label = record.get('id', f"#{index}")
        if not result.is_valid:
            raise CatalogError(f"Service {label}: {'; '.join(result.errors)}")
        for warning in result.warnings:
            logger.debug(f"Service {label}: {warning}")
        data = result.corrected_data
        service_id = str(data['id'])
        if service_id in concretes:
            raise CatalogError(f"Identifiant de service dupliqué: {service_id}")
        try:
            postc = premises(data['postc'])
            negative = premises(data['negative'])
            service = ConcreteService(
                id=service_id,
                host=None if data['host'] is None else str(data['host']),
                inputs=premises(data['inputs']),
                outputs=premises(data['outputs']),
                prec=premises(data['prec']),
                postc=postc,
                qos=QoSVector(**{key: float(value) for key, value in data['qos'].items()}),
                ctx=data['ctx'],
                negative=negative,
            )
        except (ServiceModelError, TypeError, ValueError) as e:
            raise CatalogError(f"Service {service_id}: {e}")
        if postc & negative:
            raise CatalogError(
                f"Service {service_id}: postconditions à la fois positives et négatives "
                f"{sorted(str(p) for p in postc & negative)}"
            )
        concretes[service_id] = service
        groups.setdefault(str(data['abstract']), []).append(service_id)

    abstracts: 'OrderedDict[str, AbstractService]' = OrderedDict()
    for abstract_id, member_ids in groups.items():
        try:
            abstracts[abstract_id] = abstract_from_concretes(
                [concretes[m] for m in member_ids], abstract_id
            )
        except ServiceModelError as e:
            raise CatalogError(f"Service abstrait {abstract_id}: {e}")

    try:
        goal_set = premises(goals)
        context_set = premises(context)
    except ServiceModelError as e:
        raise CatalogError(f"Buts ou contexte invalides: {e}")

    return ServiceCatalog(
        concretes=concretes,
        abstracts=abstracts,
        goals=goal_set,
        context=context_set,
        context_keys=tuple(context_keys),
        concepts=list(concepts or []),
        links=list(links or []),
    )


def load_catalog(path: str) -> ServiceCatalog:
    """
    Charge un catalogue de services depuis un fichier YAML.

    Args:
        path: Chemin du fichier catalogue

    Returns:
        ServiceCatalog: Le catalogue chargé

    Raises:
        CatalogError: Si le fichier est illisible ou invalide
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise CatalogError(f"Impossible de lire le catalogue {path}: {e}")
    if not isinstance(data, dict) or 'services' not in data:
        raise CatalogError(f"Catalogue sans section 'services': {path}")
    catalog = build_catalog(
        data['services'],
        goals=data.get('goals', []),
        context=data.get('context', []),
        context_keys=data.get('context_keys', DEFAULT_CONTEXT_KEYS),
        concepts=data.get('concepts'),
        links=data.get('links'),
    )
    logger.info(
        f"Catalogue chargé: {path} ({len(catalog.concretes)} services concrets, "
        f"{len(catalog.abstracts)} abstraits)"
    )
    return catalog


def catalog_to_dict(catalog: ServiceCatalog) -> Dict[str, Any]:
    """Représentation sérialisable du catalogue (format de `load_catalog`)."""
    def texts(items: Iterable[Premise]) -> List[str]:
        return sorted(str(p) for p in items)

    services = []
    for service in catalog.concretes.values():
        record: Dict[str, Any] = {
            'id': service.id,
            'abstract': catalog.abstract_of(service.id),
            'host': service.host,
            'inputs': texts(service.inputs),
            'outputs': texts(service.outputs),
            'prec': texts(service.prec),
            'postc': texts(service.postc),
            'qos': service.qos.as_dict(),
            'ctx': dict(service.ctx),
        }
        if service.negative:
            record['negative'] = texts(service.negative)
        services.append(record)
    data: Dict[str, Any] = {
        'context_keys': list(catalog.context_keys),
        'goals': texts(catalog.goals),
        'context': texts(catalog.context),
        'services': services,
    }
    if catalog.concepts:
        data['concepts'] = catalog.concepts
    if catalog.links:
        data['links'] = catalog.links
    return data


def dump_catalog(catalog: ServiceCatalog, path: str) -> None:
    """Écrit le catalogue au format YAML."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(catalog_to_dict(catalog), f, allow_unicode=True, sort_keys=False)
    logger.info(f"Catalogue écrit: {path}")


def stage(k: int) -> Premise:
    return Premise('ready', (f"stage-{k:02d}",))


def generate_catalog(
    length: int,
    density: int,
    rng: np.random.Generator,
    distractors: int = 3,
    reliability_range: Tuple[float, float] = (0.9, 1.0),
    latency_range: Tuple[float, float] = (20.0, 400.0),
) -> ServiceCatalog:
    """
    Génère un catalogue de composition en chaîne.

    La chaîne `as-01..as-L` transforme `ready(stage-00)` en `ready(stage-L)`;
    des services abstraits parasites bifurquent depuis la chaîne et effacent
    l'étape qu'ils consomment. Le catalogue contient au moins `density`
    services concrets.

    Args:
        length: Longueur de composition (nombre de services de la chaîne)
        density: Nombre de services à pouvoir déployer
        rng: Générateur aléatoire du scénario
        distractors: Nombre de services abstraits hors chaîne
        reliability_range: Intervalle de tirage de la fiabilité
        latency_range: Intervalle de tirage de la latence (ms)

    Raises:
        CatalogError: Si la longueur ou la densité est invalide
    """
    if length < 1:
        raise CatalogError(f"Longueur de composition invalide: {length}")
    if density < 1:
        raise CatalogError(f"Densité invalide: {density}")

    per_abstract = math.ceil(density / (length + distractors)) + 1
    records: List[Dict[str, Any]] = []

    def draw_qos() -> Dict[str, float]:
        return {
            'latency': round(float(rng.uniform(*latency_range)), 3),
            'reliability': round(float(rng.uniform(*reliability_range)), 4),
            'cost': round(float(rng.uniform(1.0, 50.0)), 3),
            'energy': round(float(rng.uniform(1.0, 50.0)), 3),
        }

    for k in range(1, length + 1):
        for m in range(1, per_abstract + 1):
            records.append({
                'id': f"cs-{k:02d}-{m:02d}",
                'abstract': f"as-{k:02d}",
                'inputs': [f"data(stage-{k - 1:02d})"],
                'outputs': [f"data(stage-{k:02d})"],
                'prec': [str(stage(k - 1))],
                'postc': [str(stage(k))],
                'qos': draw_qos(),
                'ctx': {'category': SERVICE_CATEGORIES[(k - 1) % len(SERVICE_CATEGORIES)]},
            })

    for j in range(1, distractors + 1):
        branch = min(length - 1, max(0, round(j * length / (distractors + 1))))
        for m in range(1, per_abstract + 1):
            records.append({
                'id': f"cs-d{j:02d}-{m:02d}",
                'abstract': f"as-d{j:02d}",
                'inputs': [f"data(stage-{branch:02d})"],
                'outputs': [f"data(aux-{j:02d})"],
                'prec': [str(stage(branch))],
                'postc': [f"ready(aux-{j:02d})"],
                'negative': [str(stage(branch))],
                'qos': draw_qos(),
                'ctx': {'category': SERVICE_CATEGORIES[(j - 1) % len(SERVICE_CATEGORIES)]},
            })

    return build_catalog(
        records,
        goals=[str(stage(length))],
        context=[str(stage(0))],
    )
