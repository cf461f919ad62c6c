"""
Perception: événements sensoriels, percepts et requêtes de composition.
"""

from .perception import (
    CONTEXT_READING,
    EVENT_KINDS,
    QOS_READING,
    SERVICE_ADVERT,
    SERVICE_DEPARTURE,
    USER_REQUEST,
    CompositionRequest,
    Percept,
    SensoryEvent,
    encode_request,
    goal_set_of,
    perceive,
)

__all__ = [
    'CONTEXT_READING',
    'EVENT_KINDS',
    'QOS_READING',
    'SERVICE_ADVERT',
    'SERVICE_DEPARTURE',
    'USER_REQUEST',
    'CompositionRequest',
    'Percept',
    'SensoryEvent',
    'encode_request',
    'goal_set_of',
    'perceive',
]
