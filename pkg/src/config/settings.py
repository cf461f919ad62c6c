"""
Chargement de la configuration: valeurs par défaut YAML, fichier utilisateur
et surcharges de la ligne de commande.
"""

from typing import Any, Dict, Mapping, Optional
import copy
import logging
from pathlib import Path

import yaml

from ..exceptions.composition_exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).with_name('defaults.yaml')
OUTPUT_DIR_ENV = 'COPERNIC_OUTPUT_DIR'


def _load_yaml(path: Path) -> Dict[str, Any]:
    """
    Charge un fichier YAML de configuration.

    Raises:
        ConfigurationError: Si le fichier est illisible ou n'est pas un dictionnaire
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Impossible de charger la configuration {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration invalide (dictionnaire attendu): {path}")
    return data


def deep_merge(base: Dict[str, Any], override: Mapping[str, Any], prefix: str = '') -> Dict[str, Any]:
    """
    Fusionne récursivement `override` dans une copie de `base`.

    Raises:
        ConfigurationError: Si `override` contient une clé inconnue de `base`
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        dotted = f"{prefix}{key}"
        if key not in merged:
            raise ConfigurationError("Clé de configuration inconnue", key=dotted)
        if isinstance(merged[key], dict):
            if not isinstance(value, Mapping):
                raise ConfigurationError("Section de configuration attendue", key=dotted)
            merged[key] = deep_merge(merged[key], value, prefix=f"{dotted}.")
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_defaults() -> Dict[str, Any]:
    return _load_yaml(DEFAULTS_PATH)


def load_settings(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Construit la configuration effective.

    L'ordre de priorité est: valeurs par défaut < surcharges CLI < fichier.

    Args:
        config_path: Fichier YAML utilisateur (optionnel)
        overrides: Surcharges issues des options CLI (optionnel)

    Returns:
        Dict[str, Any]: Configuration fusionnée
    """
    settings = load_defaults()
    if overrides:
        settings = deep_merge(settings, overrides)
    if config_path:
        settings = deep_merge(settings, _load_yaml(Path(config_path)))
        logger.info(f"Configuration chargée: {config_path}")
    return settings


def get_setting(settings: Mapping[str, Any], dotted_key: str) -> Any:
    """Lit une valeur par clé pointée, par exemple `working_memory.capacity`."""
    node: Any = settings
    for part in dotted_key.split('.'):
        if not isinstance(node, Mapping) or part not in node:
            raise ConfigurationError("Clé de configuration absente", key=dotted_key)
        node = node[part]
    return node
