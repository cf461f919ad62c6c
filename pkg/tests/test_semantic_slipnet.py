"""
Tests de la mémoire sémantique (slipnet).
"""
import pytest

from src.exceptions.composition_exceptions import SlipnetError
from src.memory.semantic_slipnet import (
    Slipnet,
    SlipnetLink,
    SlipnetNode,
    cue_semantic,
    generate_concept_graph,
    slipnet_from_catalog,
    slipnet_from_records,
)
from src.services.service_model import Premise, premises


def two_nodes(length, target_depth=0.0):
    nodes = {
        'c1': SlipnetNode('c1', depth=100.0, emitted_premises=premises(['p1'])),
        'c2': SlipnetNode('c2', depth=target_depth, emitted_premises=premises(['p2'])),
    }
    return Slipnet(nodes=nodes, links=[SlipnetLink('c1', 'c2', length)])


@pytest.mark.parametrize('start, amount, expected', [(0.0, 100.0, 100.0), (90.0, 50.0, 100.0), (30.0, 0.0, 30.0)])
def test_activate(start, amount, expected):
    net = Slipnet(nodes={'c': SlipnetNode('c', activation=start)})
    net.activate('c', amount)
    assert net.nodes['c'].activation == expected


def test_activate_errors():
    net = Slipnet(nodes={'c': SlipnetNode('c')})
    with pytest.raises(SlipnetError, match='unmapped concept'):
        net.activate('x', 10.0)
    with pytest.raises(SlipnetError):
        net.activate('c', -1.0)


def test_isolated_node_decays():
    net = Slipnet(nodes={'c': SlipnetNode('c', depth=0.0, activation=100.0)})
    net.spread_step()
    assert net.nodes['c'].activation == pytest.approx(90.0)


def test_spread_along_short_link():
    net = two_nodes(0.0, target_depth=100.0)
    net.activate('c1', 100.0)
    net.spread_step()
    # la cible ne décline pas (profondeur 100): gain brut de 100·0.2·1.0
    assert net.nodes['c2'].activation == pytest.approx(20.0)
    assert net.nodes['c1'].activation == pytest.approx(100.0)


def test_link_of_length_100_carries_nothing():
    net = two_nodes(100.0, target_depth=100.0)
    net.activate('c1', 100.0)
    net.spread_step()
    assert net.nodes['c2'].activation == 0.0


def test_cue_empty_wm():
    assert cue_semantic(two_nodes(0.0), [], 3) == set()


def test_cue_direct_mention():
    assert cue_semantic(two_nodes(0.0), [Premise('uses', ('c1',))], 0) == {Premise('p1')}


def test_cue_chain_stays_below_threshold():
    net = two_nodes(0.0)
    assert cue_semantic(net, [Premise('c1')], 1) == {Premise('p1')}
    assert net.nodes['c2'].activation < net.threshold


def test_invalid_structures():
    with pytest.raises(SlipnetError):
        SlipnetNode('c', depth=120.0)
    with pytest.raises(SlipnetError):
        SlipnetLink('c', 'c', 10.0)
    with pytest.raises(SlipnetError):
        Slipnet(nodes={'c': SlipnetNode('c')}, links=[SlipnetLink('c', 'x', 10.0)])
    with pytest.raises(SlipnetError):
        slipnet_from_records([{'concept': 'c'}, {'concept': 'c'}], [])
    with pytest.raises(SlipnetError):
        slipnet_from_records([{'concept': 'c'}], [{'from': 'c'}])


def test_generated_graph_from_catalog(chain_catalog):
    graph = generate_concept_graph(chain_catalog)
    concepts = {record['concept'] for record in graph['concepts']}
    assert {'as-01', 'as-02', 'compute', 'storage', 'latency'} <= concepts
    assert {'from': 'as-01', 'to': 'compute', 'length': 90.0} in [
        {**link, 'length': float(link['length'])} for link in graph['links']
    ]
    net = slipnet_from_catalog(chain_catalog)
    assert net.is_stable()
    recalled = net.cue([Premise('capability', ('as-02',))], 0)
    assert Premise('described', ('as-02',)) in recalled


def test_total_activation_never_grows_without_cue(chain_catalog):
    net = slipnet_from_catalog(chain_catalog)
    net.cue([Premise('capability', ('as-01',)), Premise('prefers', ('latency',))], 0)
    previous = net.total_activation()
    for _ in range(20):
        net.spread_step()
        assert net.total_activation() <= previous + 1e-9
        previous = net.total_activation()
    net.reset()
    assert net.active_node_count() == 0


def test_unstable_topology_detected():
    nodes = {name: SlipnetNode(name, depth=100.0) for name in ('a', 'b')}
    net = Slipnet(nodes=nodes, links=[SlipnetLink('a', 'b', 0.0)])
    assert not net.is_stable()
