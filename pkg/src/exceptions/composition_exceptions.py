"""
Exceptions personnalisées pour le simulateur de composition de services.
"""

from typing import Optional


class CompositionSimError(Exception):
    """Exception de base pour le simulateur."""
    pass


class FileError(CompositionSimError):
    """Erreur liée aux fichiers."""
    pass


class ServiceModelError(CompositionSimError):
    """Erreur du modèle de services (groupes abstraits, poids QoS)."""
    pass


class CatalogError(CompositionSimError):
    """Erreur de chargement ou de validation d'un catalogue de services."""
    pass


class PerceptionError(CompositionSimError):
    """Erreur liée aux événements sensoriels ou aux requêtes."""
    pass


class SlipnetError(CompositionSimError):
    """Erreur du réseau sémantique (concept inconnu, topologie instable)."""
    pass


class BehaviorNetworkError(CompositionSimError):
    """Erreur du réseau de comportements (identifiants dupliqués, paramètres)."""
    pass


class AgentError(CompositionSimError):
    """Erreur du cycle cognitif de l'agent."""
    pass


class SimulationError(CompositionSimError):
    """Erreur du simulateur d'événements discrets."""
    pass


class SimulationComplete(SimulationError):
    """Signal levé lorsque la file d'événements est vide."""
    pass


class PlanningError(CompositionSimError):
    """Échec de planification d'un compositeur de référence."""
    pass


class MetricsError(CompositionSimError):
    """Erreur de calcul des métriques."""
    pass


class ConfigurationError(CompositionSimError):
    """Exception liée à la configuration."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key:
            message = f"{message} (clé: {key})"
        super().__init__(message)
