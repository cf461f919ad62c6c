"""
Mémoire épisodique: mémoire distribuée creuse (SDM) auto-associative.

Chaque épisode d'invocation (service, contexte, issue, QoS observée, instant)
est encodé en vecteur binaire de n bits par combinaison XOR de masques
pseudo-aléatoires stables, puis écrit à sa propre adresse. Un dictionnaire de
prototypes relie les vecteurs écrits aux épisodes symboliques pour décoder
une lecture en prémisses `performed-well(cs, bande)`.

La géométrie par défaut (n=256, M=1000, fraction 0.001) est très creuse:
environ un tiers des adresses n'activent aucun emplacement. L'écriture
d'un tel épisode est sans effet et compte `empty_write`; sa lecture rend le
mot nul, si bien qu'aucun rappel n'en sort.

Format binaire d'instantané (petit-boutiste):
    octet    version (1)
    uint32   n (dimension)
    uint32   M (nombre d'emplacements physiques)
    M*n/8    adresses, bits compactés ligne par ligne (numpy.packbits)
    M*n      compteurs, int8
"""

from typing import Counter as CounterType, Iterable, Mapping, Optional, Set, Tuple
from dataclasses import dataclass, field
from collections import Counter, OrderedDict
from functools import lru_cache
import hashlib
import logging
import struct

import numpy as np
from scipy.stats import binom

from ..exceptions.composition_exceptions import AgentError, ConfigurationError, FileError
from ..services.catalog import AVAILABLE, PERFORMED_WELL
from ..services.service_model import Premise, QoSVector

logger = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1
_HEADER = struct.Struct('<BII')

OUTCOMES = ('success', 'failure', 'timeout')
TIME_BANDS = 4


@dataclass(frozen=True)
class EpisodicRecord:
    """Épisode d'invocation d'un service concret."""
    service: str
    context: Mapping[str, str] = field(default_factory=dict, hash=False)
    outcome: str = 'success'
    observed_qos: QoSVector = field(default_factory=QoSVector)
    time: float = 0.0

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise AgentError(f"Issue d'épisode invalide: {self.outcome}")


@lru_cache(maxsize=4096)
def feature_mask(name: str, value: str, dimension: int) -> np.ndarray:
    """Masque binaire stable de `dimension` bits pour une paire (champ, valeur)."""
    chunks = []
    produced = 0
    block = 0
    while produced < dimension:
        digest = hashlib.blake2b(f"{name}={value}#{block}".encode('utf-8'), digest_size=64).digest()
        chunks.append(digest)
        produced += len(digest) * 8
        block += 1
    bits = np.unpackbits(np.frombuffer(b''.join(chunks), dtype=np.uint8))[:dimension]
    bits.setflags(write=False)
    return bits


def time_band(time: float, band_seconds: float) -> int:
    return int(time // band_seconds) % TIME_BANDS


def encode_episode(record: EpisodicRecord, dimension: int = 256, band_seconds: float = 75.0) -> np.ndarray:
    """
    Encode un épisode en vecteur binaire de `dimension` bits.

    Le vecteur est le XOR des masques du service, de l'issue, de la bande
    temporelle et de chaque attribut de contexte.
    """
    vector = feature_mask('service', record.service, dimension) ^ feature_mask('outcome', record.outcome, dimension)
    vector = vector ^ feature_mask('time-band', str(time_band(record.time, band_seconds)), dimension)
    for key in sorted(record.context):
        vector = vector ^ feature_mask(f"ctx:{key}", str(record.context[key]), dimension)
    return vector


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(a != b))


def radius_for_fraction(dimension: int, fraction: float) -> int:
    """
    Rayon de Hamming activant en moyenne la fraction `fraction` des emplacements.

    Plus petit r tel que P(distance ≤ r) ≥ fraction pour des adresses uniformes.
    """
    if not 0.0 < fraction < 1.0:
        raise ConfigurationError(f"Fraction d'activation invalide: {fraction}", key='episodic_memory.activation_fraction')
    radius = int(binom.ppf(fraction, dimension, 0.5))
    while binom.cdf(radius, dimension, 0.5) < fraction:
        radius += 1
    return radius


def empty_ball_probability(dimension: int, locations: int, radius: int) -> float:
    """Probabilité qu'une adresse uniforme n'active aucun des `locations` emplacements."""
    return float((1.0 - binom.cdf(radius, dimension, 0.5)) ** locations)


def context_band(context: Mapping[str, str], time: float, band_seconds: float) -> str:
    """Étiquette de bande de contexte, par exemple `q1-t2`."""
    parts = [str(context[key]) for key in sorted(context)]
    parts.append(f"t{time_band(time, band_seconds)}")
    return '-'.join(parts)


class SparseDistributedMemory:
    """
    Mémoire distribuée creuse de Kanerva.

    Args:
        dimension: Longueur n des adresses et des mots
        locations: Nombre M d'emplacements physiques
        radius: Rayon de Hamming (calculé depuis `activation_fraction` si None)
        activation_fraction: Fraction visée d'emplacements activés
        counter_max: Saturation des compteurs ±C_max
        seed: Graine des adresses aléatoires
        codebook_size: Nombre maximal de prototypes retenus
        match_fraction: Distance maximale de décodage, en fraction de n
        time_band_seconds: Largeur d'une bande temporelle
        reliability_floor: Fiabilité minimale pour émettre `performed-well`
    """

    def __init__(
        self,
        dimension: int = 256,
        locations: int = 1000,
        radius: Optional[int] = None,
        activation_fraction: float = 0.001,
        counter_max: int = 127,
        seed: int = 7,
        codebook_size: int = 256,
        match_fraction: float = 0.35,
        time_band_seconds: float = 75.0,
        reliability_floor: float = 0.5,
        addresses: Optional[np.ndarray] = None,
    ):
        if dimension < 8 or dimension % 8:
            raise ConfigurationError(f"Dimension invalide (multiple de 8 attendu): {dimension}", key='episodic_memory.dimension')
        if locations < 1:
            raise ConfigurationError(f"Nombre d'emplacements invalide: {locations}", key='episodic_memory.locations')
        if not 0 < counter_max <= 127:
            raise ConfigurationError(f"Saturation invalide: {counter_max}", key='episodic_memory.counter_max')
        self.dimension = dimension
        self.locations = locations
        self.radius = radius if radius is not None else radius_for_fraction(dimension, activation_fraction)
        self.counter_max = counter_max
        self.codebook_size = codebook_size
        self.match_fraction = match_fraction
        self.time_band_seconds = time_band_seconds
        self.reliability_floor = reliability_floor

        if addresses is None:
            rng = np.random.default_rng(seed)
            addresses = rng.integers(0, 2, size=(locations, dimension), dtype=np.uint8)
        self.addresses = addresses
        self.counters = np.zeros((locations, dimension), dtype=np.int16)
        self.codebook: 'OrderedDict[bytes, EpisodicRecord]' = OrderedDict()
        self.touched: Set[int] = set()
        self.diagnostics: CounterType[str] = Counter()
        logger.debug(
            f"SDM n={dimension} M={locations} r={self.radius}: "
            f"{empty_ball_probability(dimension, locations, self.radius):.1%} des adresses sans emplacement actif"
        )

    @classmethod
    def from_settings(cls, section: Mapping[str, object]) -> 'SparseDistributedMemory':
        return cls(**section)  # type: ignore[arg-type]

    def _active(self, address: np.ndarray) -> np.ndarray:
        distances = np.count_nonzero(self.addresses != address, axis=1)
        return np.flatnonzero(distances <= self.radius)

    def write(self, address: np.ndarray, word: np.ndarray) -> int:
        """
        Écrit `word` dans les emplacements à distance ≤ r de `address`.

        Returns:
            Nombre d'emplacements mis à jour
        """
        active = self._active(address)
        if active.size == 0:
            self.diagnostics['empty_write'] += 1
            return 0
        delta = np.where(word.astype(bool), 1, -1).astype(np.int16)
        updated = self.counters[active] + delta
        self.counters[active] = np.clip(updated, -self.counter_max, self.counter_max)
        self.touched.update(int(index) for index in active)
        return int(active.size)

    def read(self, address: np.ndarray) -> np.ndarray:
        """Lit le mot stocké autour de `address` (bit à 0 en cas d'égalité)."""
        active = self._active(address)
        if active.size == 0:
            return np.zeros(self.dimension, dtype=np.uint8)
        self.touched.update(int(index) for index in active)
        sums = self.counters[active].sum(axis=0, dtype=np.int64)
        return (sums > 0).astype(np.uint8)

    def encode(self, record: EpisodicRecord) -> np.ndarray:
        return encode_episode(record, self.dimension, self.time_band_seconds)

    def record(self, episode: EpisodicRecord) -> np.ndarray:
        """Écrit un épisode en auto-association et met à jour les prototypes."""
        vector = self.encode(episode)
        self.write(vector, vector)
        key = np.packbits(vector).tobytes()
        self.codebook[key] = episode
        self.codebook.move_to_end(key)
        while len(self.codebook) > self.codebook_size:
            self.codebook.popitem(last=False)
        return vector

    def nearest_prototype(self, word: np.ndarray) -> Tuple[Optional[EpisodicRecord], int]:
        """Prototype le plus proche de `word` et sa distance de Hamming."""
        best: Optional[EpisodicRecord] = None
        best_distance = self.dimension + 1
        for key, episode in self.codebook.items():
            prototype = np.unpackbits(np.frombuffer(key, dtype=np.uint8))[:self.dimension]
            distance = hamming(prototype, word)
            if distance < best_distance:
                best, best_distance = episode, distance
        return best, best_distance

    def cue(self, wm_context: Iterable[Premise], t_now: float, context_keys: Iterable[str] = ('zone',)) -> Set[Premise]:
        """
        Indiçage épisodique par le contenu de la mémoire de travail.

        Pour chaque service `available(cs)` présent, sonde l'épisode de succès
        attendu dans le contexte courant et émet `performed-well(cs, bande)`
        si le prototype décodé est un succès fiable assez proche.
        """
        items = list(wm_context)
        keys = set(context_keys)
        context = {p.predicate: p.args[0] for p in items if p.predicate in keys and len(p.args) == 1}
        services = sorted(p.args[0] for p in items if p.predicate == AVAILABLE and p.args)
        result: Set[Premise] = set()
        if not self.codebook:
            return result
        limit = self.match_fraction * self.dimension
        for service_id in services:
            probe = EpisodicRecord(service=service_id, context=context, outcome='success', time=t_now)
            word = self.read(self.encode(probe))
            prototype, distance = self.nearest_prototype(word)
            if prototype is None or distance > limit:
                continue
            if (
                prototype.service == service_id
                and prototype.outcome == 'success'
                and prototype.observed_qos.reliability >= self.reliability_floor
            ):
                band = context_band(prototype.context, prototype.time, self.time_band_seconds)
                result.add(Premise(PERFORMED_WELL, (service_id, band)))
        return result

    def reset_touched(self) -> None:
        self.touched.clear()

    def snapshot(self) -> bytes:
        """Instantané binaire (voir le format dans l'en-tête du module)."""
        header = _HEADER.pack(SNAPSHOT_VERSION, self.dimension, self.locations)
        addresses = np.packbits(self.addresses, axis=1).tobytes()
        counters = self.counters.astype(np.int8).tobytes()
        return header + addresses + counters

    @classmethod
    def restore(cls, data: bytes, **kwargs) -> 'SparseDistributedMemory':
        """
        Reconstruit une mémoire depuis un instantané.

        Raises:
            FileError: Si l'instantané est tronqué ou de version inconnue
        """
        if len(data) < _HEADER.size:
            raise FileError("Instantané SDM tronqué")
        version, dimension, locations = _HEADER.unpack_from(data)
        if version != SNAPSHOT_VERSION:
            raise FileError(f"Version d'instantané SDM inconnue: {version}")
        address_bytes = locations * dimension // 8
        expected = _HEADER.size + address_bytes + locations * dimension
        if len(data) != expected:
            raise FileError(f"Taille d'instantané SDM invalide: {len(data)} (attendu {expected})")
        offset = _HEADER.size
        packed = np.frombuffer(data, dtype=np.uint8, count=address_bytes, offset=offset)
        addresses = np.unpackbits(packed.reshape(locations, dimension // 8), axis=1)
        memory = cls(dimension=dimension, locations=locations, addresses=addresses.copy(), **kwargs)
        counters = np.frombuffer(data, dtype=np.int8, count=locations * dimension, offset=offset + address_bytes)
        memory.counters = counters.reshape(locations, dimension).astype(np.int16)
        return memory


def cue_episodic(memory: SparseDistributedMemory, wm_context: Iterable[Premise], t_now: float, context_keys: Iterable[str] = ('zone',)) -> Set[Premise]:
    """Prémisses épisodiques D_em rappelées par le contexte de la mémoire de travail."""
    return memory.cue(wm_context, t_now, context_keys)
