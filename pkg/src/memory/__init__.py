"""
Mémoires de l'agent: mémoire de travail, mémoire épisodique (SDM) et
mémoire sémantique (slipnet).
"""

from .working_memory import (
    DECLARATIVE_SOURCE,
    OUTCOME_SOURCE,
    PERCEPT_SOURCE,
    WMItem,
    WorkingMemory,
    base_level_activation,
)
from .episodic_sdm import (
    EpisodicRecord,
    SparseDistributedMemory,
    context_band,
    cue_episodic,
    encode_episode,
    hamming,
    radius_for_fraction,
)
from .semantic_slipnet import (
    Slipnet,
    SlipnetLink,
    SlipnetNode,
    cue_semantic,
    generate_concept_graph,
    slipnet_from_catalog,
    slipnet_from_records,
)

__all__ = [
    'DECLARATIVE_SOURCE',
    'OUTCOME_SOURCE',
    'PERCEPT_SOURCE',
    'WMItem',
    'WorkingMemory',
    'base_level_activation',
    'EpisodicRecord',
    'SparseDistributedMemory',
    'context_band',
    'cue_episodic',
    'encode_episode',
    'hamming',
    'radius_for_fraction',
    'Slipnet',
    'SlipnetLink',
    'SlipnetNode',
    'cue_semantic',
    'generate_concept_graph',
    'slipnet_from_catalog',
    'slipnet_from_records',
]
