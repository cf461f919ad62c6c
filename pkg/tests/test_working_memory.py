"""
Tests de la mémoire de travail.
"""
import math

import pytest

from src.exceptions.composition_exceptions import ConfigurationError
from src.memory.working_memory import (
    DECLARATIVE_SOURCE,
    PERCEPT_SOURCE,
    WMItem,
    WorkingMemory,
    base_level_activation,
)
from src.services.service_model import Premise

A, B, C = Premise('a'), Premise('b'), Premise('c')


def test_base_level_activation_closed_forms():
    assert base_level_activation(WMItem(A, [1.0]), 2.0) == pytest.approx(0.0)
    assert base_level_activation(WMItem(A, [0.0, 3.0]), 4.0) == pytest.approx(math.log(1.5))


def test_activation_decays():
    item = WMItem(A, [0.0])
    values = [base_level_activation(item, t) for t in (1.0, 10.0, 1e3, 1e6)]
    assert values == sorted(values, reverse=True)
    assert values[-1] < -6


def test_zero_age_is_finite():
    assert math.isfinite(base_level_activation(WMItem(A, [5.0]), 5.0))


def test_inject():
    wm = WorkingMemory()
    wm.inject(A, 1.0)
    assert len(wm) == 1
    wm.inject(A, 2.0)
    assert len(wm) == 1
    assert wm.items[A].access_times == [1.0, 2.0]


def test_eviction_of_least_active():
    wm = WorkingMemory(capacity=2)
    assert wm.inject(A, 1.0) is None
    assert wm.inject(B, 2.0) is None
    assert wm.inject(C, 3.0) == A
    assert A not in wm and B in wm and C in wm


def test_contents_threshold():
    wm = WorkingMemory(threshold=-1.0)
    assert wm.contents(0.0) == []
    wm.inject(A, 0.0)
    assert wm.contents(1.0) == [A]
    # ln(Δt^-0.5) < -1 pour Δt > e²
    assert wm.contents(10.0) == []
    assert wm.prune(10.0) == 1
    assert len(wm) == 0


def test_contents_ordered_by_activation():
    wm = WorkingMemory()
    wm.inject(A, 0.0)
    wm.inject(B, 4.0)
    assert wm.contents(5.0) == [B, A]


def test_history_cap_and_discard():
    wm = WorkingMemory(history=3)
    for t in range(6):
        wm.inject(A, float(t))
    assert wm.items[A].access_times == [3.0, 4.0, 5.0]
    assert wm.discard(A)
    assert not wm.discard(A)
    assert wm.activation(A, 6.0) == -math.inf


@pytest.mark.parametrize('kwargs', [{'capacity': 0}, {'decay': 1.0}, {'decay': 0.0}])
def test_invalid_parameters(kwargs):
    with pytest.raises(ConfigurationError):
        WorkingMemory(**kwargs)


class TestEvictionPolicy:
    """Priorité des percepts sur les rappels déclaratifs."""

    def test_recall_never_displaces_percepts(self):
        wm = WorkingMemory(capacity=2)
        wm.inject(A, 1.0)
        wm.inject(B, 1.0)
        assert wm.inject(C, 1.0, source=DECLARATIVE_SOURCE) == C
        assert set(wm.items) == {A, B}

    def test_percept_evicts_recalls_first(self):
        wm = WorkingMemory(capacity=2)
        wm.inject(A, 0.0, source=DECLARATIVE_SOURCE)
        wm.inject(B, 5.0)
        # A est plus actif que C au moment de l'injection mais reste un rappel
        wm.inject(A, 5.0, source=DECLARATIVE_SOURCE)
        assert wm.inject(C, 5.0) == A
        assert set(wm.items) == {B, C}

    def test_refresh_by_percept_upgrades_source(self):
        wm = WorkingMemory(capacity=2)
        wm.inject(A, 1.0, source=DECLARATIVE_SOURCE)
        wm.inject(A, 2.0)
        assert wm.items[A].source == PERCEPT_SOURCE
        wm.inject(A, 3.0, source=DECLARATIVE_SOURCE)
        assert wm.items[A].source == PERCEPT_SOURCE

    def test_tie_evicts_greatest_premise(self):
        wm = WorkingMemory(capacity=2)
        available = Premise('available', ('cs-01-01',))
        capability = Premise('capability', ('cs-01-01',))
        ready = Premise('ready', ('stage-00',))
        wm.inject(available, 1.0)
        wm.inject(ready, 1.0)
        assert wm.inject(capability, 1.0) == ready
        assert available in wm and capability in wm


class TestProperties:
    """Propriétés sur des séquences d'injection aléatoires."""

    PREMISES = [Premise('p', (f"{k:02d}",)) for k in range(40)]

    def test_capacity_never_exceeded(self, rng):
        for _ in range(200):
            wm = WorkingMemory(capacity=int(rng.integers(1, 13)), history=8)
            t = 0.0
            for _ in range(500):
                t += float(rng.exponential(0.5))
                premise = self.PREMISES[int(rng.integers(len(self.PREMISES)))]
                source = DECLARATIVE_SOURCE if rng.random() < 0.3 else PERCEPT_SOURCE
                wm.inject(premise, t, source=source)
                assert len(wm) <= wm.capacity

    def test_activation_strictly_decreases_between_accesses(self, rng):
        for _ in range(500):
            times = sorted(float(x) for x in rng.uniform(0.0, 50.0, size=int(rng.integers(1, 6))))
            item = WMItem(A, times)
            t1 = times[-1] + float(rng.uniform(1e-3, 10.0))
            t2 = t1 + float(rng.uniform(1e-3, 10.0))
            assert base_level_activation(item, t2) < base_level_activation(item, t1)

    def test_refresh_never_decreases_activation(self, rng):
        wm = WorkingMemory(capacity=40)
        t = 0.0
        for _ in range(2000):
            t += float(rng.exponential(1.0))
            premise = self.PREMISES[int(rng.integers(len(self.PREMISES)))]
            before = wm.activation(premise, t)
            wm.inject(premise, t)
            assert wm.activation(premise, t) >= before
