"""
Agent cognitif COPERNIC et son adaptateur de simulation.
"""

from .actions import FAILURE, NO_OP, SUCCESS, TIMEOUT, Action, ActionKind, InvocationResult
from .copernic_agent import AgentConfig, CopernicAgent, RequestState
from .copernic_composer import CopernicComposer

__all__ = [
    'FAILURE',
    'NO_OP',
    'SUCCESS',
    'TIMEOUT',
    'Action',
    'ActionKind',
    'InvocationResult',
    'AgentConfig',
    'CopernicAgent',
    'RequestState',
    'CopernicComposer',
]
