"""
Modèle de services et catalogues de scénarios.
"""

from .service_model import (
    AbstractService,
    ConcreteService,
    Premise,
    QoSCaps,
    QoSVector,
    QoSWeights,
    abstract_from_concretes,
    preconditions_satisfied,
    premises,
    qos_score,
)
from .catalog import (
    PremiseUniverse,
    ServiceCatalog,
    build_catalog,
    dump_catalog,
    forward_closure,
    generate_catalog,
    load_catalog,
)

__all__ = [
    'AbstractService',
    'ConcreteService',
    'Premise',
    'PremiseUniverse',
    'QoSCaps',
    'QoSVector',
    'QoSWeights',
    'ServiceCatalog',
    'abstract_from_concretes',
    'build_catalog',
    'dump_catalog',
    'forward_closure',
    'generate_catalog',
    'load_catalog',
    'preconditions_satisfied',
    'premises',
    'qos_score',
]
