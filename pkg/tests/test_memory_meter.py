"""
Tests de la mesure structurelle de la mémoire vive des compositeurs.
"""
import pytest

from src.reporting.memory_meter import LiveState, MemorySampler, measure_memory, premise_bytes, state_bytes
from src.services.service_model import Premise


def test_empty_state_baseline():
    assert measure_memory(LiveState()) == pytest.approx(0.375)
    assert set(state_bytes(LiveState())) == {'wm', 'sdm', 'bn', 'slipnet', 'fragments', 'plan'}


def test_wm_item_footprint():
    premise = Premise('ready', ('stage-01',))
    assert premise_bytes(premise) == 16 + 5 + 8 + 8
    empty = sum(state_bytes(LiveState()).values())
    one = sum(state_bytes(LiveState(wm_items=[(premise, 1)])).values())
    assert one - empty == premise_bytes(premise) + 16


def test_measurement_is_deterministic():
    state = LiveState(
        wm_items=[(Premise('a'), 3)],
        sdm_touched=2,
        sdm_dimension=256,
        bn_behaviors=5,
        fragments=[[Premise('b')]],
        plan=[('cs-01-01', [Premise('c')])],
    )
    assert measure_memory(state) == measure_memory(state)
    assert state_bytes(state)['sdm'] == 64 + 2 * (256 + 32)


def test_sampler():
    sampler = MemorySampler()
    assert sampler.peak == 0.0 and sampler.mean == 0.0
    sampler.add(1.0)
    sampler.extend([3.0, 2.0])
    assert sampler.peak == 3.0
    assert sampler.mean == pytest.approx(2.0)
