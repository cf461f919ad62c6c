"""
Actions émises par le cycle cognitif et résultats d'invocation.
"""

from typing import Any, Dict, FrozenSet, Optional
from dataclasses import dataclass
from enum import Enum

from ..services.service_model import Premise, QoSVector


class ActionKind(str, Enum):
    SET_GOAL = 'set-goal'
    INVOKE_CONCRETE = 'invoke-concrete'
    NO_OP = 'no-op'


@dataclass(frozen=True)
class Action:
    """Action interne (`set-goal`) ou externe (`invoke-concrete`) d'un cycle."""
    kind: ActionKind
    request_id: Optional[str] = None
    goals: FrozenSet[Premise] = frozenset()
    service_id: Optional[str] = None
    host: Optional[str] = None
    invocation_id: Optional[str] = None
    reason: str = ''

    def as_dict(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {'kind': self.kind.value}
        if self.request_id is not None:
            record['request_id'] = self.request_id
        if self.goals:
            record['goals'] = sorted(str(goal) for goal in self.goals)
        if self.service_id is not None:
            record['service_id'] = self.service_id
            record['host'] = self.host
            record['invocation_id'] = self.invocation_id
        if self.reason:
            record['reason'] = self.reason
        return record


NO_OP = Action(ActionKind.NO_OP)

SUCCESS = 'success'
FAILURE = 'failure'
TIMEOUT = 'timeout'


@dataclass(frozen=True)
class InvocationResult:
    """Résultat d'une invocation de service concret."""
    invocation_id: str
    outcome: str
    time: float
    observed_qos: Optional[QoSVector] = None

    @property
    def success(self) -> bool:
        return self.outcome == SUCCESS
