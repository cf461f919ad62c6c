"""
Tests du cycle cognitif de l'agent et de son adaptateur au simulateur.
"""
import numpy as np
import pytest

from src.agent.actions import FAILURE, SUCCESS, ActionKind, InvocationResult
from src.agent.copernic_agent import CopernicAgent
from src.agent.copernic_composer import CopernicComposer
from src.exceptions.composition_exceptions import AgentError
from src.perception.perception import SERVICE_ADVERT, SERVICE_DEPARTURE, USER_REQUEST, SensoryEvent, encode_request
from src.services.catalog import AVAILABLE, FAILED, QOS_OBSERVED
from src.services.service_model import Premise


def _agent(catalog, settings, seed=0):
    return CopernicAgent.from_settings(catalog, settings, np.random.default_rng(seed), agent_id='n000')


def _request(length, request_id='r1', deadline=10.0):
    return encode_request(
        [f"ready(stage-{length:02d})"],
        deadline=deadline,
        request_id=request_id,
        context=['ready(stage-00)'],
        requester='n000',
    )


def _advert(service_id, t, host='n001'):
    return SensoryEvent(SERVICE_ADVERT, {'service_id': service_id, 'host': host}, t)


@pytest.fixture
def single(make_chain):
    return make_chain(1).deployed({'cs-01-01': 'n001'})


@pytest.fixture
def pair(make_chain):
    return make_chain(2).deployed({'cs-01-01': 'n001', 'cs-02-01': 'n002'})


def _first_invocation(agent, request, advert_ids):
    events = [SensoryEvent(USER_REQUEST, {'request': request}, 0.0)]
    events += [_advert(service_id, 0.0) for service_id in advert_ids]
    return agent.run_cycle(events, 0.1)


def test_idle_cycle_is_no_op(pair, settings):
    agent = _agent(pair, settings)
    actions = agent.run_cycle([], 0.1)
    assert [a.kind for a in actions] == [ActionKind.NO_OP]
    assert agent.bn.mean_activation() == pytest.approx(agent.bn.params.pi)
    assert agent.trace[-1]['selected'] is None


def test_request_and_advert_invoke_in_first_cycle(single, settings):
    agent = _agent(single, settings)
    actions = _first_invocation(agent, _request(1), ['cs-01-01'])
    assert [a.kind for a in actions] == [ActionKind.SET_GOAL, ActionKind.INVOKE_CONCRETE]
    invoke = actions[1]
    assert invoke.service_id == 'cs-01-01'
    assert invoke.host == 'n001'
    assert invoke.request_id == 'r1'
    assert agent.action_log[1]['invocation_id'] == invoke.invocation_id


def test_success_closes_request_and_rewards_regime(single, settings):
    agent = _agent(single, settings)
    invoke = _first_invocation(agent, _request(1), ['cs-01-01'])[1]
    regime = agent.requests['r1'].regime
    completed = agent.apply_outcome(InvocationResult(invoke.invocation_id, SUCCESS, 0.25))
    assert completed == [('r1', True)]
    assert agent.requests == {}
    assert agent.pm.regime(regime).utility == pytest.approx(0.1)
    assert Premise.parse('ready(stage-01)') in agent.wm.contents(0.25)


def test_failure_is_remembered(single, settings):
    agent = _agent(single, settings)
    invoke = _first_invocation(agent, _request(1), ['cs-01-01'])[1]
    completed = agent.apply_outcome(InvocationResult(invoke.invocation_id, FAILURE, 0.25))
    assert completed == []
    assert Premise(FAILED, ('cs-01-01',)) in agent.wm.contents(0.25)
    episodes = list(agent.em.codebook.values())
    assert [e.outcome for e in episodes] == ['failure']
    assert agent.requests['r1'].blacklist['cs-01-01'] == 1 + settings['agent']['blacklist_cycles']
    assert agent.diagnostics['invocation_failure'] == 1
    # le service en liste noire n'est pas réinvoqué au cycle suivant
    actions = agent.run_cycle([], 0.3)
    assert ActionKind.INVOKE_CONCRETE not in [a.kind for a in actions]


def test_chain_progresses_across_cycles(pair, settings):
    agent = _agent(pair, settings)
    first = _first_invocation(agent, _request(2), ['cs-01-01', 'cs-02-01'])[1]
    assert first.service_id == 'cs-01-01'
    assert agent.apply_outcome(InvocationResult(first.invocation_id, SUCCESS, 0.25)) == []
    actions = agent.run_cycle([], 0.3)
    assert Premise.parse('ready(stage-01)') in agent.wm.contents(0.3)
    invokes = [a for a in actions if a.kind == ActionKind.INVOKE_CONCRETE]
    assert [a.service_id for a in invokes] == ['cs-02-01']


def test_departure_then_readvert(single, settings):
    agent = _agent(single, settings)
    request = _request(1)
    actions = agent.run_cycle([
        SensoryEvent(USER_REQUEST, {'request': request}, 0.0),
        _advert('cs-01-01', 0.0),
        SensoryEvent(SERVICE_DEPARTURE, {'service_id': 'cs-01-01'}, 0.05),
    ], 0.1)
    assert actions[-1].kind == ActionKind.NO_OP
    assert actions[-1].reason == 'replan'
    assert agent.diagnostics['replan'] == 1

    actions = agent.run_cycle([_advert('cs-01-01', 0.15)], 0.2)
    assert [a.service_id for a in actions if a.kind == ActionKind.INVOKE_CONCRETE] == ['cs-01-01']


def test_expiry_penalizes_regime(single, settings):
    agent = _agent(single, settings)
    _first_invocation(agent, _request(1), [])
    regime = agent.requests['r1'].regime
    agent.expire('r1', 10.0)
    assert agent.requests == {}
    assert agent.diagnostics['expired'] == 1
    assert agent.pm.regime(regime).utility == pytest.approx(0.0)
    assert agent.pm.regime(regime).plays == 1


def test_agent_errors(single, settings):
    agent = _agent(single, settings)
    agent.run_cycle([], 0.5)
    with pytest.raises(AgentError):
        agent.run_cycle([], 0.4)
    with pytest.raises(AgentError):
        agent.apply_outcome(InvocationResult('inconnue', SUCCESS, 0.6))


def test_live_state_reports_structures(single, settings):
    agent = _agent(single, settings)
    _first_invocation(agent, _request(1), ['cs-01-01'])
    state = agent.live_state()
    assert state.wm_items
    assert state.bn_behaviors == 1
    assert state.sdm_dimension == settings['episodic_memory']['dimension']


@pytest.mark.parametrize('length', [1, 3, 5, 10])
def test_composer_completes_static_chain(make_chain, static_simulation, settings, length):
    catalog = make_chain(length)
    placements = {f"cs-{k:02d}-01": 1 for k in range(1, length + 1)}
    sim = static_simulation(catalog, placements, [(0.0, 0.0), (50.0, 0.0)])
    agent = _agent(sim.catalog, settings)
    composer = CopernicComposer(agent)
    sim.add_composer('n000', composer)
    sim.start()
    sim.schedule_request(_request(length, deadline=30.0))
    sim.run(31.0)
    outcome, = sim.outcomes()
    assert outcome.success
    assert outcome.composer == 'copernic'
    assert outcome.invocations >= length
    assert outcome.mu_peak >= outcome.mu_mean > 0
    assert agent.requests == {}
    # la QoS observée alimente le classement sans occuper la mémoire de travail
    assert not any(premise.predicate == QOS_OBSERVED for premise in agent.wm.items)


def test_long_chain_adverts_fit_working_memory(make_chain, settings):
    catalog = make_chain(10).deployed({f"cs-{k:02d}-01": 'n001' for k in range(1, 11)})
    agent = _agent(catalog, settings)
    ids = [f"cs-{k:02d}-01" for k in range(1, 11)]
    _first_invocation(agent, _request(10, deadline=30.0), ids)
    contents = agent.wm.contents(0.1)
    assert {Premise(AVAILABLE, (service_id,)) for service_id in ids} <= set(contents)
    assert len(agent.wm) <= agent.wm.capacity

    agent.run_cycle([], 0.2)
    contents = agent.wm.contents(0.2)
    assert Premise.parse('ready(stage-00)') in contents
    assert Premise(AVAILABLE, ('cs-01-01',)) in contents


def test_adverts_outlast_declarative_recalls(make_chain, settings):
    catalog = make_chain(5).deployed({f"cs-{k:02d}-01": 'n001' for k in range(1, 6)})
    agent = _agent(catalog, settings)
    for step in range(1, 6):
        events = [_advert(f"cs-{k:02d}-01", 0.1 * step) for k in range(1, 6)]
        if step == 1:
            events.insert(0, SensoryEvent(USER_REQUEST, {'request': _request(5, deadline=30.0)}, 0.0))
        agent.run_cycle(events, 0.1 * step + 0.05)
    available = [p for p in agent.wm.items if p.predicate == AVAILABLE]
    assert len(available) == 5
    assert agent.diagnostics['replan'] == 0


def test_protected_goals_stay_within_achieved_goals(pair, settings):
    agent = _agent(pair, settings)
    first = _first_invocation(agent, _request(2), ['cs-01-01', 'cs-02-01'])[1]
    agent.apply_outcome(InvocationResult(first.invocation_id, SUCCESS, 0.25))
    record = agent.requests['r1']
    assert record.protected_goals <= record.request.goals & record.state
    assert record.protected_goals == set()
    # la précondition atteinte de l'étape suivante reste une entrée δ
    assert Premise.parse('ready(stage-01)') in agent.protected()
    # le contexte initial n'est plus utile une fois la première étape franchie
    assert Premise.parse('ready(stage-00)') not in agent.protected()
