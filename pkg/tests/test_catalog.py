"""
Tests du catalogue de services et de son générateur.
"""
import numpy as np
import pytest

from src.exceptions.composition_exceptions import CatalogError
from src.services.catalog import (
    Premise,
    build_catalog,
    dump_catalog,
    forward_closure,
    generate_catalog,
    goal_premise,
    load_catalog,
    stage,
    unwrap_goal,
)


def test_build_groups_members(chain_catalog):
    assert list(chain_catalog.abstracts) == ['as-01', 'as-02']
    assert chain_catalog.abstracts['as-01'].members == ('cs-01-01', 'cs-01-02')
    assert chain_catalog.abstract_of('cs-02-01') == 'as-02'
    assert chain_catalog.concrete('inconnu') is None
    assert chain_catalog.categories() == frozenset({'compute', 'storage'})


def test_goal_chain(chain_catalog):
    assert chain_catalog.goal_chain() == ['as-01', 'as-02']
    assert chain_catalog.goal_chain([stage(1)]) == ['as-01']


def test_goal_chain_stops_at_achieved_premises(chain_catalog):
    assert chain_catalog.goal_chain(achieved=[stage(1)]) == ['as-02']
    assert chain_catalog.goal_chain(achieved=[stage(2)]) == []
    # le but reste visé même si seul son prédécesseur est atteint
    assert chain_catalog.goal_chain([stage(2)], achieved=[stage(0), stage(1)]) == ['as-02']


def test_universe_membership(chain_catalog):
    universe = chain_catalog.universe
    assert stage(1) in universe
    assert Premise('available', ('cs-01-02',)) in universe
    assert Premise('available', ('cs-99',)) not in universe
    assert Premise('capability', ('as-02',)) in universe
    assert goal_premise(stage(2)) in universe
    assert Premise('zone', ('z-1-1',)) in universe
    assert Premise('unknown') not in universe


def test_goal_wrapping_roundtrip():
    assert unwrap_goal(goal_premise(stage(3))) == stage(3)


def test_build_rejects_invalid_records(chain_records):
    with pytest.raises(CatalogError):
        build_catalog(chain_records + [dict(chain_records[0])])
    with pytest.raises(CatalogError):
        build_catalog([{'id': 'x', 'abstract': 'as', 'prec': ['a']}])
    with pytest.raises(CatalogError):
        build_catalog([{'id': 'x', 'abstract': 'as', 'prec': ['a'], 'postc': ['b'], 'negative': ['b']}])


def test_deployed_sets_hosts(chain_catalog):
    deployed = chain_catalog.deployed({'cs-01-02': 'n005', 'cs-02-01': 'n007'})
    assert set(deployed.concretes) == {'cs-01-02', 'cs-02-01'}
    assert deployed.concrete('cs-01-02').host == 'n005'
    assert deployed.abstracts['as-01'].members == ('cs-01-02',)


def test_forward_closure_reaches_goal(chain_catalog):
    closure = forward_closure(chain_catalog.concretes.values(), chain_catalog.context)
    assert chain_catalog.goals <= closure


def test_dump_and_load(tmp_path, chain_catalog):
    path = tmp_path / 'catalog.yaml'
    dump_catalog(chain_catalog, str(path))
    loaded = load_catalog(str(path))
    assert set(loaded.concretes) == set(chain_catalog.concretes)
    assert loaded.goals == chain_catalog.goals
    assert loaded.concrete('cs-01-01').qos == chain_catalog.concrete('cs-01-01').qos


def test_load_missing_file(tmp_path):
    with pytest.raises(CatalogError):
        load_catalog(str(tmp_path / 'absent.yaml'))


class TestGenerateCatalog:
    """Tests du générateur de scénarios en chaîne."""

    def test_chain_is_reachable(self):
        catalog = generate_catalog(5, 20, np.random.default_rng(1))
        assert catalog.goals == frozenset({stage(5)})
        assert catalog.context == frozenset({stage(0)})
        assert forward_closure(catalog.concretes.values(), catalog.context) >= catalog.goals
        assert catalog.goal_chain() == [f"as-{k:02d}" for k in range(1, 6)]

    def test_density_lower_bound(self):
        catalog = generate_catalog(10, 60, np.random.default_rng(2))
        assert len(catalog.concretes) >= 60
        assert 'as-d01' in catalog.abstracts
        assert catalog.abstracts['as-d01'].delete

    def test_deterministic_for_seed(self):
        first = generate_catalog(5, 40, np.random.default_rng(3))
        second = generate_catalog(5, 40, np.random.default_rng(3))
        assert [s.qos for s in first.concretes.values()] == [s.qos for s in second.concretes.values()]

    @pytest.mark.parametrize('length, density', [(0, 20), (5, 0)])
    def test_invalid_parameters(self, length, density):
        with pytest.raises(CatalogError):
            generate_catalog(length, density, np.random.default_rng(0))
