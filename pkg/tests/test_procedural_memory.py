"""
Tests de la mémoire procédurale: régimes et découverte des services concrets.
"""
import numpy as np
import pytest

from src.attention.behavior_network import BNParams
from src.exceptions.composition_exceptions import ConfigurationError
from src.procedural.procedural_memory import (
    GOAL_ORIENTED,
    PLAN_BIASED,
    REACTIVE_DELIBERATIVE,
    ProceduralMemory,
    Regime,
    default_regimes,
    discover_concrete,
    preferred_dimensions,
    select_regime,
    update_utility,
)
from src.services.service_model import AbstractService, ConcreteService, Premise, QoSVector, premises


def concrete(service_id, reliability=0.9, latency=100.0):
    return ConcreteService(
        id=service_id,
        host='n001',
        prec=premises(['a']),
        postc=premises(['b']),
        qos=QoSVector(latency=latency, reliability=reliability, cost=10.0, energy=10.0),
    )


ABSTRACT = AbstractService('as-1', premises(['a']), premises(['b']), ('cs-1', 'cs-2'))


def regimes_with(*utilities):
    regimes = default_regimes()
    for regime, utility in zip(regimes, utilities):
        regime.utility = utility
    return regimes


def test_greedy_selection():
    rng = np.random.default_rng(0)
    assert select_regime(regimes_with(0.9, 0.2, 0.2), 0.0, rng).name == GOAL_ORIENTED
    assert select_regime(regimes_with(0.2, 0.2, 0.9), 0.0, rng).name == PLAN_BIASED
    assert select_regime(regimes_with(0.5, 0.5, 0.5), 0.0, rng).name == GOAL_ORIENTED


def test_exploration_is_reproducible():
    first = [select_regime(regimes_with(0.9, 0.2, 0.2), 1.0, np.random.default_rng(7)).name for _ in range(3)]
    second = [select_regime(regimes_with(0.9, 0.2, 0.2), 1.0, np.random.default_rng(7)).name for _ in range(3)]
    assert first == second
    assert GOAL_ORIENTED not in first


def test_selection_errors():
    with pytest.raises(ConfigurationError):
        select_regime([], 0.1, np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        select_regime(default_regimes(), 1.5, np.random.default_rng(0))


def test_update_utility():
    regime = default_regimes()[0]
    assert update_utility(regime, 1.0, 0.1).utility == pytest.approx(0.1)
    assert regime.plays == 1
    regime.utility = 0.4
    assert update_utility(regime, 0.4, 0.1).utility == pytest.approx(0.4)


def test_repeated_rewards_converge():
    regime = default_regimes()[0]
    values = [update_utility(regime, 1.0, 0.1).utility for _ in range(100)]
    assert values == sorted(values)
    assert 0.99 < values[-1] <= 1.0


def test_regime_constraints():
    with pytest.raises(ConfigurationError):
        Regime(GOAL_ORIENTED, BNParams(phi=80.0, gamma=20.0))
    with pytest.raises(ConfigurationError):
        Regime('unknown', BNParams())
    regime = Regime(REACTIVE_DELIBERATIVE, BNParams(theta=30.0, phi=60.0, gamma=35.0))
    with pytest.raises(ConfigurationError):
        regime.params = BNParams(phi=20.0, gamma=70.0)


class TestDiscovery:
    """Classement des membres joignables."""

    def test_single_member(self):
        assert [s.id for s in discover_concrete(ABSTRACT, [concrete('cs-1')])] == ['cs-1']

    def test_reliability_orders_members(self):
        live = [concrete('cs-1', reliability=0.5), concrete('cs-2', reliability=0.9)]
        assert [s.id for s in discover_concrete(ABSTRACT, live)] == ['cs-2', 'cs-1']

    def test_no_member_reachable(self):
        assert discover_concrete(ABSTRACT, [concrete('cs-9')]) == []

    def test_episodic_bonus(self):
        live = [concrete('cs-1', reliability=0.8), concrete('cs-2', reliability=0.9)]
        well = [Premise('performed-well', ('cs-1', 'z-0-0-t0'))]
        assert [s.id for s in discover_concrete(ABSTRACT, live, wm_premises=well)] == ['cs-1', 'cs-2']

    def test_observed_qos_overrides_advertised(self):
        live = [concrete('cs-1', reliability=0.5), concrete('cs-2', reliability=0.9)]
        observed = {'cs-2': QoSVector(latency=100.0, reliability=0.1, cost=10.0, energy=10.0)}
        assert discover_concrete(ABSTRACT, live, observed=observed)[0].id == 'cs-1'

    def test_preference_shifts_weights(self):
        pm = ProceduralMemory()
        live = [concrete('cs-1', reliability=0.9, latency=1500.0), concrete('cs-2', reliability=0.6, latency=100.0)]
        assert pm.discover(ABSTRACT, live, [])[0].id == 'cs-2'
        pm.preference_shift = 0.6
        assert pm.discover(ABSTRACT, live, [Premise('prefers', ('reliability',))])[0].id == 'cs-1'


def test_preferred_dimensions():
    wm = [Premise('prefers', ('latency',)), Premise('prefers', ('speed',)), Premise('zone', ('z',))]
    assert preferred_dimensions(wm) == ['latency']


def test_from_settings(settings):
    pm = ProceduralMemory.from_settings(settings['procedural_memory'], np.random.default_rng(1))
    assert [r.name for r in pm.regimes] == [GOAL_ORIENTED, REACTIVE_DELIBERATIVE, PLAN_BIASED]
    pm.reward(PLAN_BIASED, 1.0)
    table = pm.regime_table()
    assert table[2]['utility'] == pytest.approx(0.1)
    assert table[2]['plays'] == 1
    with pytest.raises(ConfigurationError):
        pm.regime('missing')
