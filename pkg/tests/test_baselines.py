"""
Tests des compositeurs de référence par chaînage arrière (GoCoMo-like et CoopC-like).
"""
import pytest

from src.baselines.backward_chaining import (
    BackwardPlanFragment,
    BaselineConfig,
    Candidate,
    CoopCComposer,
    GoCoMoComposer,
    candidate_key,
    coopc_compose,
    gocomo_compose,
    order_plan,
)
from src.exceptions.composition_exceptions import PlanningError
from src.perception.perception import encode_request
from src.services.service_model import Premise, premises

ONE_HOP = 0.010 + 256 * 8 / 1e6

# Nœud 2 (hôte de cs-02-01) quitte la portée au premier tick de mobilité (1 s);
# le nœud 4 héberge le substitut cs-02-02.
CHURN_POSITIONS = [(500.0, 500.0), (520.0, 500.0), (540.0, 500.0), (560.0, 500.0), (500.0, 520.0)]


def _request(length, issue_time=0.0, deadline=10.0, request_id='r1'):
    return encode_request(
        [f"ready(stage-{length:02d})"],
        deadline=deadline,
        issue_time=issue_time,
        request_id=request_id,
        context=['ready(stage-00)'],
        requester='n000',
    )


def _churn_simulation(make_chain, static_simulation, with_substitute=True):
    catalog = make_chain(2, members=2, latency=300.0)
    placements = {'cs-01-01': 1, 'cs-02-01': 2}
    if with_substitute:
        placements['cs-02-02'] = 4
    sim = static_simulation(catalog, placements, CHURN_POSITIONS, move_period=1.0)
    sim.nodes['n002'].speed = 1000.0
    sim.nodes['n002'].waypoint = (1000.0, 500.0)
    return sim


def test_single_service_success(make_chain, static_simulation):
    sim = static_simulation(make_chain(1), {'cs-01-01': 1}, [(0.0, 0.0), (50.0, 0.0)])
    outcome = gocomo_compose(_request(1), sim)
    assert outcome.success
    assert outcome.invocations == 1
    assert outcome.composer == 'gocomo'
    # fenêtre de découverte + aller-retour + 100 ms de service
    assert outcome.composition_time == pytest.approx(0.1 + 2 * ONE_HOP + 0.1)


def test_commit_round_adds_a_round_trip(make_chain, static_simulation):
    sim = static_simulation(make_chain(1), {'cs-01-01': 1}, [(0.0, 0.0), (50.0, 0.0)])
    outcome = coopc_compose(_request(1), sim)
    assert outcome.success
    assert outcome.composition_time == pytest.approx(0.1 + 4 * ONE_HOP + 0.1)


@pytest.mark.parametrize('compose', [gocomo_compose, coopc_compose])
def test_static_chain_of_five(make_chain, static_simulation, compose):
    placements = {f"cs-{k:02d}-01": 1 + (k % 2) for k in range(1, 6)}
    sim = static_simulation(make_chain(5), placements, [(0.0, 0.0), (50.0, 0.0), (0.0, 60.0)])
    outcome = compose(_request(5), sim)
    assert outcome.success
    assert outcome.invocations == 5


def test_goal_already_in_context(make_chain, static_simulation):
    sim = static_simulation(make_chain(1), {'cs-01-01': 1}, [(0.0, 0.0), (50.0, 0.0)])
    request = encode_request(['ready(stage-00)'], deadline=5.0, request_id='r0', context=['ready(stage-00)'], requester='n000')
    outcome = gocomo_compose(request, sim)
    assert outcome.success
    assert outcome.invocations == 0
    assert outcome.composition_time == 0.0


@pytest.mark.parametrize('compose', [gocomo_compose, coopc_compose])
def test_no_provider_fails_planning(make_chain, static_simulation, compose):
    sim = static_simulation(make_chain(1), {}, [(0.0, 0.0), (50.0, 0.0)])
    outcome = compose(_request(1), sim)
    assert not outcome.success
    assert outcome.reason == 'planning'
    assert 2.0 <= outcome.composition_time <= 2.2


def test_deadline_cuts_execution(make_chain, static_simulation):
    sim = static_simulation(make_chain(1), {'cs-01-01': 1}, [(0.0, 0.0), (50.0, 0.0)])
    outcome = gocomo_compose(_request(1, deadline=0.15), sim)
    assert not outcome.success
    assert outcome.reason == 'deadline'
    assert outcome.end_time == pytest.approx(0.15)


class TestChurn:
    """Départ d'un fournisseur entre deux invocations d'un plan de longueur 2."""

    def test_gocomo_repairs_with_spare_candidate(self, make_chain, static_simulation):
        sim = _churn_simulation(make_chain, static_simulation)
        outcome = gocomo_compose(_request(2, issue_time=0.5), sim)
        assert outcome.success
        assert outcome.end_time > 1.0
        assert sim.diagnostics['departure_notifications'] == 1

    def test_coopc_frozen_plan_fails(self, make_chain, static_simulation):
        sim = _churn_simulation(make_chain, static_simulation)
        outcome = coopc_compose(_request(2, issue_time=0.5), sim)
        assert not outcome.success
        assert outcome.reason == 'execution'
        assert outcome.end_time == pytest.approx(1.0)

    def test_gocomo_rediscovery_times_out(self, make_chain, static_simulation):
        sim = _churn_simulation(make_chain, static_simulation, with_substitute=False)
        outcome = gocomo_compose(_request(2, issue_time=0.5), sim)
        assert not outcome.success
        assert outcome.reason == 'planning'
        # la redécouverte commence à la réponse de cs-01-01 (≈ 1.024 s)
        assert 3.0 <= outcome.end_time <= 3.2


def _fragment(goal, service_id, prec, postc, hops=1):
    candidate = Candidate(service_id, 'n001', hops, premises(prec), premises(postc))
    return BackwardPlanFragment(Premise.parse(goal), candidate, candidate.prec, hops)


def test_order_plan_runs_forward():
    fragments = {
        Premise.parse('ready(stage-02)'): _fragment('ready(stage-02)', 'cs-02-01', ['ready(stage-01)'], ['ready(stage-02)']),
        Premise.parse('ready(stage-01)'): _fragment('ready(stage-01)', 'cs-01-01', ['ready(stage-00)'], ['ready(stage-01)']),
    }
    ordered = order_plan(fragments, set(premises(['ready(stage-00)'])))
    assert [f.resolver.service_id for f in ordered] == ['cs-01-01', 'cs-02-01']


def test_order_plan_rejects_unsatisfiable_fragment():
    fragments = {
        Premise.parse('ready(stage-02)'): _fragment('ready(stage-02)', 'cs-02-01', ['ready(stage-09)'], ['ready(stage-02)']),
    }
    with pytest.raises(PlanningError):
        order_plan(fragments, set(premises(['ready(stage-00)'])))


def test_candidate_key_prefers_fewer_remaining_then_fewer_hops():
    known = set(premises(['ready(stage-00)']))
    near = Candidate('cs-b', 'n001', 1, premises(['ready(stage-00)']), premises(['x']))
    far = Candidate('cs-a', 'n002', 3, premises(['ready(stage-00)']), premises(['x']))
    needy = Candidate('cs-c', 'n003', 1, premises(['ready(stage-05)']), premises(['x']))
    ranked = sorted([needy, far, near], key=lambda c: candidate_key(c, known))
    assert [c.service_id for c in ranked] == ['cs-b', 'cs-a', 'cs-c']


def test_coopc_keeps_every_candidate():
    composer = CoopCComposer(BaselineConfig(candidates_kept=3, discovery_window=0.2))
    assert composer.config.candidates_kept is None
    assert composer.config.discovery_window == 0.2
    assert not composer.adaptive and composer.commits
    assert GoCoMoComposer().config.candidates_kept == 3


def test_config_from_settings(settings):
    config = BaselineConfig.from_settings(settings['baselines'])
    assert config.discovery_window == pytest.approx(0.1)
    assert config.fragment_timeout == pytest.approx(2.0)
    assert config.invoke_timeout == pytest.approx(2.0)
