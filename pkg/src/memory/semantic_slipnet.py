"""
Mémoire sémantique: réseau sémantique à propagation d'activation (slipnet).

Les nœuds représentent des concepts du domaine (services abstraits,
catégories, préférences QoS); chaque nœud porte une profondeur conceptuelle
et un ensemble de prémisses émises lorsqu'il dépasse le seuil.
"""

from typing import Any, Dict, Iterable, List, Mapping, Optional, Set
from dataclasses import dataclass, field
from collections import defaultdict
import logging

from ..exceptions.composition_exceptions import SlipnetError
from ..services.catalog import CATEGORY, DESCRIBED, PREFERS, QOS_DIMENSIONS, ServiceCatalog
from ..services.service_model import Premise, PremiseSet, premises

logger = logging.getLogger(__name__)

MAX_ACTIVATION = 100.0
MAX_OUT_LINKS = 2

SERVICE_DEPTH = 10.0
CATEGORY_DEPTH = 30.0
PREFERENCE_DEPTH = 40.0
CATEGORY_LINK_LENGTH = 90.0


def _clamp(value: float) -> float:
    return min(max(value, 0.0), MAX_ACTIVATION)


@dataclass
class SlipnetNode:
    """Concept du réseau sémantique."""
    concept: str
    depth: float = 0.0
    emitted_premises: PremiseSet = frozenset()
    activation: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.depth <= 100.0:
            raise SlipnetError(f"Profondeur hors de [0,100] pour {self.concept}: {self.depth}")
        self.activation = _clamp(self.activation)


@dataclass(frozen=True)
class SlipnetLink:
    """Lien orienté; plus il est court, plus les concepts sont proches."""
    source: str
    target: str
    length: float

    def __post_init__(self):
        if self.source == self.target:
            raise SlipnetError(f"Lien réflexif interdit: {self.source}")
        if not 0.0 <= self.length <= 100.0:
            raise SlipnetError(f"Longueur de lien hors de [0,100]: {self.length}")

    @property
    def conductance(self) -> float:
        return (100.0 - self.length) / 100.0


@dataclass
class Slipnet:
    """
    Réseau sémantique.

    Args:
        spread_rate: Fraction ρ propagée le long des liens
        decay_rate: Taux de déclin λ (les concepts profonds déclinent moins)
        injection: Activation injectée par concept indicé
        threshold: Seuil θ_sn d'émission des prémisses
        steps: Nombre de pas de propagation par indiçage
    """
    nodes: Dict[str, SlipnetNode] = field(default_factory=dict)
    links: List[SlipnetLink] = field(default_factory=list)
    spread_rate: float = 0.2
    decay_rate: float = 0.1
    injection: float = 50.0
    threshold: float = 50.0
    steps: int = 3

    def __post_init__(self):
        for link in self.links:
            if link.source not in self.nodes or link.target not in self.nodes:
                raise SlipnetError(f"Lien vers un concept inconnu: {link.source} -> {link.target}")

    def decay_factor(self, node: SlipnetNode) -> float:
        return 1.0 - (100.0 - node.depth) / 100.0 * self.decay_rate

    def activate(self, concept: str, amount: float) -> None:
        """
        Ajoute `amount` à l'activation d'un concept (plafonnée à 100).

        Raises:
            SlipnetError: Si le concept est inconnu ou si `amount` est négatif
        """
        node = self.nodes.get(concept)
        if node is None:
            raise SlipnetError(f"unmapped concept: {concept}")
        if amount < 0:
            raise SlipnetError(f"Quantité d'activation négative: {amount}")
        node.activation = _clamp(node.activation + amount)

    def spread_step(self) -> None:
        """Un pas synchrone de propagation puis de déclin."""
        snapshot = {concept: node.activation for concept, node in self.nodes.items()}
        incoming: Dict[str, float] = defaultdict(float)
        for link in self.links:
            incoming[link.target] += snapshot[link.source] * self.spread_rate * link.conductance
        for concept, node in self.nodes.items():
            node.activation = _clamp((snapshot[concept] + incoming[concept]) * self.decay_factor(node))

    def active_premises(self) -> Set[Premise]:
        result: Set[Premise] = set()
        for node in self.nodes.values():
            if node.activation >= self.threshold:
                result |= node.emitted_premises
        return result

    def cue(self, wm_contents: Iterable[Premise], steps: Optional[int] = None) -> Set[Premise]:
        """
        Indiçage sémantique par le contenu de la mémoire de travail.

        Active les concepts mentionnés, propage `steps` fois et retourne les
        prémisses des concepts au-dessus du seuil.
        """
        count = self.steps if steps is None else steps
        if count < 0:
            raise SlipnetError(f"Nombre de pas négatif: {count}")
        mentioned = sorted({
            token for premise in wm_contents for token in premise.mentions() if token in self.nodes
        })
        for concept in mentioned:
            self.activate(concept, self.injection)
        for _ in range(count):
            self.spread_step()
        return self.active_premises()

    def total_activation(self) -> float:
        return sum(node.activation for node in self.nodes.values())

    def active_node_count(self) -> int:
        return sum(1 for node in self.nodes.values() if node.activation > 0.0)

    def is_stable(self) -> bool:
        """
        Vrai si l'activation totale ne peut croître sans indiçage.

        Condition suffisante: max_f · (1 + ρ · S_max), où S_max est la plus
        grande conductance sortante cumulée, ne dépasse pas 1.
        """
        if not self.nodes:
            return True
        out_conductance: Dict[str, float] = defaultdict(float)
        for link in self.links:
            out_conductance[link.source] += link.conductance
        max_factor = max(self.decay_factor(node) for node in self.nodes.values())
        max_out = max(out_conductance.values(), default=0.0)
        return max_factor * (1.0 + self.spread_rate * max_out) <= 1.0 + 1e-12

    def reset(self) -> None:
        for node in self.nodes.values():
            node.activation = 0.0


def cue_semantic(net: Slipnet, wm_contents: Iterable[Premise], steps: Optional[int] = None) -> Set[Premise]:
    """Prémisses sémantiques D_sm rappelées par le contenu de la mémoire de travail."""
    return net.cue(wm_contents, steps)


def slipnet_from_records(
    concepts: Iterable[Mapping[str, Any]],
    links: Iterable[Mapping[str, Any]],
    **params: Any,
) -> Slipnet:
    """
    Construit un réseau depuis des enregistrements de graphe conceptuel.

    Nœuds: `concept`, `depth`, `premises`; liens: `from`, `to`, `length`.

    Raises:
        SlipnetError: Si un enregistrement est invalide
    """
    nodes: Dict[str, SlipnetNode] = {}
    try:
        for record in concepts:
            concept = str(record['concept'])
            if concept in nodes:
                raise SlipnetError(f"Concept dupliqué: {concept}")
            nodes[concept] = SlipnetNode(
                concept=concept,
                depth=float(record.get('depth', 0.0)),
                emitted_premises=premises(record.get('premises', [])),
            )
        edges = [
            SlipnetLink(str(record['from']), str(record['to']), float(record['length']))
            for record in links
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise SlipnetError(f"Graphe conceptuel invalide: {e}")
    net = Slipnet(nodes=nodes, links=edges, **params)
    if not net.is_stable():
        logger.warning("Topologie de slipnet instable: l'activation totale peut croître sans indiçage")
    return net


def generate_concept_graph(catalog: ServiceCatalog) -> Dict[str, List[Dict[str, Any]]]:
    """
    Graphe conceptuel par défaut d'un catalogue.

    Un concept par service abstrait (émet `described(as)`), un concept par
    catégorie (émet `category(c)`) et un concept par dimension QoS (émet
    `prefers(q)`); chaque service abstrait est relié à sa catégorie.
    """
    concepts: List[Dict[str, Any]] = []
    links: List[Dict[str, Any]] = []
    for abstract in catalog.abstracts.values():
        concepts.append({
            'concept': abstract.id,
            'depth': SERVICE_DEPTH,
            'premises': [str(Premise(DESCRIBED, (abstract.id,)))],
        })
        members = [catalog.concrete(member) for member in abstract.members]
        categories = sorted({m.ctx['category'] for m in members if m is not None and 'category' in m.ctx})
        for category in categories[:MAX_OUT_LINKS]:
            links.append({'from': abstract.id, 'to': category, 'length': CATEGORY_LINK_LENGTH})
    for category in sorted(catalog.categories()):
        concepts.append({
            'concept': category,
            'depth': CATEGORY_DEPTH,
            'premises': [str(Premise(CATEGORY, (category,)))],
        })
    for dimension in QOS_DIMENSIONS:
        concepts.append({
            'concept': dimension,
            'depth': PREFERENCE_DEPTH,
            'premises': [str(Premise(PREFERS, (dimension,)))],
        })
    return {'concepts': concepts, 'links': links}


def slipnet_from_catalog(catalog: ServiceCatalog, **params: Any) -> Slipnet:
    """Réseau du catalogue: graphe fourni par le scénario, sinon généré."""
    if catalog.concepts:
        return slipnet_from_records(catalog.concepts, catalog.links, **params)
    graph = generate_concept_graph(catalog)
    return slipnet_from_records(graph['concepts'], graph['links'], **params)
