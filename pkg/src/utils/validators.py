"""
Module de validation et correction des données d'entrée.
"""

from typing import Any, Dict, List, Mapping
from dataclasses import dataclass, field
import logging

logger = logging.getLogger(__name__)

REQUIRED_SERVICE_FIELDS = ('id', 'abstract', 'prec', 'postc')
OPTIONAL_SERVICE_LISTS = ('inputs', 'outputs', 'negative')
QOS_DEFAULTS = {'latency': 0.0, 'reliability': 1.0, 'cost': 0.0, 'energy': 0.0}


@dataclass
class ValidationResult:
    """Résultat d'une validation avec les données éventuellement corrigées."""
    is_valid: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    corrected_data: Dict[str, Any] = field(default_factory=dict)


def validate_and_correct_service(record: Mapping[str, Any]) -> ValidationResult:
    """
    Valide et corrige un enregistrement de service concret.

    Les champs requis manquants sont des erreurs; les champs optionnels
    manquants reçoivent une valeur par défaut et produisent un avertissement.
    """
    errors = []
    warnings = []
    corrected = dict(record)

    for name in REQUIRED_SERVICE_FIELDS:
        if name not in corrected or corrected[name] is None:
            errors.append(f"Champ requis manquant: {name}")

    for name in ('prec', 'postc') + OPTIONAL_SERVICE_LISTS:
        value = corrected.get(name)
        if value is None:
            if name in OPTIONAL_SERVICE_LISTS:
                corrected[name] = []
            continue
        if isinstance(value, str) or not isinstance(value, (list, tuple, set, frozenset)):
            errors.append(f"Le champ {name} doit être une liste de prémisses")

    qos = corrected.get('qos')
    if qos is None:
        warnings.append("QoS manquante, utilisation des valeurs par défaut")
        corrected['qos'] = dict(QOS_DEFAULTS)
    elif not isinstance(qos, Mapping):
        errors.append("Le champ qos doit être un dictionnaire")
    else:
        unknown = set(qos) - set(QOS_DEFAULTS)
        if unknown:
            errors.append(f"Composantes QoS inconnues: {sorted(unknown)}")
        merged = dict(QOS_DEFAULTS)
        merged.update(qos)
        corrected['qos'] = merged

    ctx = corrected.get('ctx')
    if ctx is None:
        corrected['ctx'] = {}
    elif not isinstance(ctx, Mapping):
        errors.append("Le champ ctx doit être un dictionnaire")
    else:
        corrected['ctx'] = {str(key): str(value) for key, value in ctx.items()}

    if 'host' not in corrected:
        corrected['host'] = None

    return ValidationResult(not errors, errors, warnings, corrected)

