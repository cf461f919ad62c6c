"""
Fixtures partagées par les tests.
"""
import numpy as np
import pytest

from src.config.settings import load_defaults
from src.services.catalog import build_catalog
from src.simulation.mobility import create_nodes
from src.simulation.simulator import ManetSimulator, SimulationConfig

CHAIN_RECORDS = [
    {
        'id': 'cs-01-01',
        'abstract': 'as-01',
        'prec': ['ready(stage-00)'],
        'postc': ['ready(stage-01)'],
        'qos': {'latency': 100.0, 'reliability': 0.95, 'cost': 10.0, 'energy': 10.0},
        'ctx': {'category': 'compute'},
    },
    {
        'id': 'cs-01-02',
        'abstract': 'as-01',
        'prec': ['ready(stage-00)'],
        'postc': ['ready(stage-01)'],
        'qos': {'latency': 300.0, 'reliability': 0.5, 'cost': 40.0, 'energy': 40.0},
        'ctx': {'category': 'compute'},
    },
    {
        'id': 'cs-02-01',
        'abstract': 'as-02',
        'prec': ['ready(stage-01)'],
        'postc': ['ready(stage-02)'],
        'qos': {'latency': 50.0, 'reliability': 0.99, 'cost': 5.0, 'energy': 5.0},
        'ctx': {'category': 'storage'},
    },
]


@pytest.fixture
def chain_records():
    return [dict(record) for record in CHAIN_RECORDS]


@pytest.fixture
def chain_catalog(chain_records):
    """Chaîne de deux services abstraits: stage-00 -> stage-01 -> stage-02."""
    return build_catalog(chain_records, goals=['ready(stage-02)'], context=['ready(stage-00)'])


@pytest.fixture
def settings():
    return load_defaults()


@pytest.fixture
def rng():
    return np.random.default_rng(42)


ARENA = (1000.0, 1000.0)


def _chain_catalog(length, members=1, latency=100.0, reliability=1.0):
    records = []
    for k in range(1, length + 1):
        for m in range(1, members + 1):
            records.append({
                'id': f"cs-{k:02d}-{m:02d}",
                'abstract': f"as-{k:02d}",
                'prec': [f"ready(stage-{k - 1:02d})"],
                'postc': [f"ready(stage-{k:02d})"],
                'qos': {'latency': latency, 'reliability': reliability, 'cost': 10.0, 'energy': 10.0},
                'ctx': {'category': 'compute'},
            })
    return build_catalog(records, goals=[f"ready(stage-{length:02d})"], context=['ready(stage-00)'])


@pytest.fixture
def make_chain():
    """Fabrique de catalogues en chaîne fiables: make_chain(longueur, membres)."""
    return _chain_catalog


def _static_simulation(catalog, placements, positions, move_period=0.5, seed=1):
    nodes = create_nodes(len(positions), 1, ARENA, (0.0, 0.0), 100.0, np.random.default_rng(seed), positions=positions)
    assignment = {service_id: nodes[index].id for service_id, index in placements.items()}
    config = SimulationConfig(nodes=len(nodes), requesters=1, move_period=move_period)
    return ManetSimulator(
        nodes,
        catalog.deployed(assignment),
        (0.0, 0.0),
        config,
        np.random.default_rng(seed + 1),
        np.random.default_rng(seed + 2),
    )


@pytest.fixture
def static_simulation():
    """
    Fabrique de simulateurs sans mobilité.

    Le nœud d'indice 0 est le demandeur `n000`; `placements` associe chaque
    service à l'indice de son nœud hôte.
    """
    return _static_simulation
