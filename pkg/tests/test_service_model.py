"""
Tests unitaires du modèle de services.
"""
import pytest

from src.exceptions.composition_exceptions import ServiceModelError
from src.services.service_model import (
    ConcreteService,
    Premise,
    QoSVector,
    QoSWeights,
    abstract_from_concretes,
    preconditions_satisfied,
    premises,
    qos_score,
    validate_weights,
)


def cs(service_id, prec, postc, **kwargs):
    return ConcreteService(id=service_id, host=None, prec=premises(prec), postc=premises(postc), **kwargs)


def test_premise_parse_and_str():
    """Test de la forme textuelle des prémisses."""
    p = Premise.parse('ready(stage-01, x)')
    assert p == Premise('ready', ('stage-01', 'x'))
    assert str(p) == 'ready(stage-01,x)'
    assert Premise.parse('flag') == Premise('flag')
    assert p.mentions() == ('ready', 'stage-01', 'x')


@pytest.mark.parametrize('text', ['', 'p(a,,b)', 'bad predicate(x)'])
def test_premise_parse_rejects_malformed(text):
    with pytest.raises(ServiceModelError):
        Premise.parse(text)


def test_abstract_identity_case():
    """Un seul membre: conditions recopiées."""
    abstract = abstract_from_concretes([cs('cs1', ['a', 'b'], ['x'])], 'as1')
    assert abstract.pre == premises(['a', 'b'])
    assert abstract.post == premises(['x'])
    assert abstract.members == ('cs1',)


def test_abstract_intersection_of_members():
    members = [cs('cs1', ['a', 'b'], ['x', 'y']), cs('cs2', ['b', 'c'], ['y'])]
    abstract = abstract_from_concretes(members, 'as1')
    assert abstract.pre == premises(['b'])
    assert abstract.post == premises(['y'])
    for member in members:
        assert abstract.pre <= member.prec
        assert abstract.post <= member.postc


def test_abstract_errors():
    with pytest.raises(ServiceModelError, match='no concretes'):
        abstract_from_concretes([])
    with pytest.raises(ServiceModelError, match='functionally incoherent group'):
        abstract_from_concretes([cs('cs1', ['a'], ['x']), cs('cs2', ['b'], ['y'])])


def test_abstract_delete_list_excludes_postconditions():
    members = [
        cs('cs1', ['a'], ['x'], negative=premises(['a'])),
        cs('cs2', ['a'], ['x'], negative=premises(['a', 'z'])),
    ]
    assert abstract_from_concretes(members).delete == premises(['a'])


@pytest.mark.parametrize('state, prec, expected', [
    (['a', 'b', 'c'], ['a', 'b'], True),
    ([], [], True),
    (['a'], ['a', 'b'], False),
])
def test_preconditions_satisfied(state, prec, expected):
    assert preconditions_satisfied(premises(state), cs('cs1', prec, ['x'])) is expected


def test_preconditions_monotone():
    service = cs('cs1', ['a'], ['x'])
    state = premises(['a'])
    assert preconditions_satisfied(state, service)
    assert preconditions_satisfied(state | premises(['b', 'c']), service)


def test_qos_score_bounds():
    """Meilleur et pire cas."""
    assert qos_score(QoSVector(0, 1, 0, 0), (0.1, 0.2, 0.3, 0.4)) == pytest.approx(1.0)
    assert qos_score(QoSVector(5000, 0, 500, 500), QoSWeights()) == pytest.approx(0.0)


def test_qos_score_half_caps():
    q = QoSVector(latency=1000.0, reliability=0.8, cost=50.0, energy=50.0)
    assert qos_score(q, QoSWeights()) == pytest.approx(0.575)


def test_qos_score_monotone():
    weights = QoSWeights()
    base = qos_score(QoSVector(100, 0.5, 10, 10), weights)
    assert qos_score(QoSVector(100, 0.9, 10, 10), weights) >= base
    assert qos_score(QoSVector(900, 0.5, 10, 10), weights) <= base
    assert qos_score(QoSVector(100, 0.5, 90, 10), weights) <= base


def test_validate_weights():
    validate_weights((0.25, 0.25, 0.25, 0.25))
    for bad in [(0.5, 0.5, 0.5, -0.5), (0.2, 0.2, 0.2), (0.3, 0.3, 0.3, 0.3)]:
        with pytest.raises(ServiceModelError):
            validate_weights(bad)


def test_qos_vector_rejects_out_of_range():
    with pytest.raises(ServiceModelError):
        QoSVector(reliability=1.5)
    with pytest.raises(ServiceModelError):
        QoSVector(latency=-1.0)


def test_weights_shift_keeps_sum():
    shifted = QoSWeights().shifted_toward(['latency'], 0.1)
    assert shifted.latency == pytest.approx(0.35)
    assert sum(shifted.as_tuple()) == pytest.approx(1.0)
    assert shifted.reliability == pytest.approx(0.65 / 3)
