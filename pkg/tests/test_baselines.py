import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SMALL, make_scenario
from mecoffload.baselines import (
    SchemeId,
    SearchTooLarge,
    cell_subscenario,
    count_feasible,
    dora_schedule,
    exhaustive_schedule,
    gojra_schedule,
    iojra_schedule,
    run_scheme,
)
from mecoffload.model import Assignment
from mecoffload.scenario import ScenarioConfig, generate
from mecoffload.search import JStarEvaluator, heuristic_schedule, j_star
from oracles import independent_sets


@pytest.mark.parametrize("U,S,N", [(2, 2, 1), (3, 2, 1), (2, 2, 2), (3, 1, 2), (3, 2, 2)])
def test_feasible_count_matches_brute_force(U, S, N):
    assert count_feasible(U, S * N) == len(independent_sets(U, S, N))


def test_feasible_count_small_example():
    # empty set, 4 singletons, 2 pairs
    assert count_feasible(2, 2) == 7


def test_exhaustive_matches_brute_force_enumeration():
    rng = np.random.default_rng(4)
    for _ in range(10):
        g = 10 ** rng.uniform(-12, -9, size=(3, 2))
        scen = make_scenario(g, num_subbands=2)
        best = max(j_star(Assignment.of(x), scen) for x in independent_sets(3, 2, 2))
        assert exhaustive_schedule(scen).value == pytest.approx(max(best, 0.0), rel=1e-12)


def test_exhaustive_single_element_and_guard():
    scen = make_scenario([[1e-10]], num_subbands=1)
    res = exhaustive_schedule(scen)
    assert res.value == pytest.approx(max(0.0, j_star(Assignment.of([(0, 0, 0)]), scen)))
    weak = make_scenario([[1e-17]], num_subbands=1)
    assert exhaustive_schedule(weak).assignment == Assignment()
    big = generate(ScenarioConfig(num_cells=7, users_per_cell=4), 0)
    with pytest.raises(SearchTooLarge, match="feasible assignments"):
        exhaustive_schedule(big)


def test_exhaustive_dominates_heuristic(small_drops):
    for scen in small_drops:
        ev = JStarEvaluator(scen)
        assert exhaustive_schedule(scen, evaluator=ev).value >= \
            heuristic_schedule(scen, evaluator=ev).value - 1e-12


def test_gojra_one_user_per_cell_offloads_everyone():
    g = np.array([[1e-10, 1e-12], [1e-12, 1e-10]])
    scen = make_scenario(g, num_subbands=1)
    res = gojra_schedule(scen)
    assert res.assignment == Assignment.of([(0, 0, 0), (1, 1, 0)])
    assert res.value == pytest.approx(j_star(res.assignment, scen))


def test_gojra_excess_users_stay_local_and_best_gains_win():
    g = np.array([[1e-10, 1e-13], [3e-10, 1e-13], [2e-10, 1e-13]])
    scen = make_scenario(g, num_subbands=2)
    res = gojra_schedule(scen)
    assert res.assignment == Assignment.of([(1, 0, 0), (2, 0, 1)])


def test_iojra_single_user_offloads_iff_beneficial():
    good = make_scenario([[1e-10]], num_subbands=1)
    assert iojra_schedule(good, 0).assignment == Assignment.of([(0, 0, 0)])
    bad = make_scenario([[1e-17]], num_subbands=1)
    assert iojra_schedule(bad, 0).assignment == Assignment()


def test_iojra_deterministic_per_seed():
    scen = generate(SMALL, 3)
    a = iojra_schedule(scen, 42)
    assert a.assignment == iojra_schedule(scen, 42).assignment
    seen = {iojra_schedule(scen, s).assignment for s in range(30)}
    assert len(seen) > 1


def test_iojra_users_only_use_home_bs():
    for seed in range(20):
        scen = generate(SMALL, seed)
        for e in iojra_schedule(scen, seed).assignment:
            assert e.server == scen.home[e.user]


def test_dora_single_server_equals_heuristic():
    scen = generate(ScenarioConfig(num_cells=1, users_per_cell=3), 8)
    assert dora_schedule(scen).assignment == heuristic_schedule(scen).assignment


def test_dora_users_in_one_cell_equals_heuristic():
    # second BS is far away for everyone, so no scheme would use it
    g = np.array([[1e-10, 1e-19], [5e-11, 1e-19], [2e-11, 1e-19]])
    scen = make_scenario(g, num_subbands=2)
    assert dora_schedule(scen).value == pytest.approx(heuristic_schedule(scen).value)


def test_cell_subscenario():
    scen = generate(SMALL, 5)
    for s in range(scen.n_servers):
        sub, members = cell_subscenario(scen, s)
        assert sub.n_servers == 1 and sub.n_users == len(members)
        assert all(scen.home[u] == s for u in members)


def test_scheme_ids():
    assert SchemeId.parse("hjtora") is SchemeId.HJTORA
    assert SchemeId.parse(" Exhaustive ") is SchemeId.EXHAUSTIVE
    with pytest.raises(ValueError):
        SchemeId.parse("nope")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(list(SchemeId)))
def test_every_scheme_is_feasible(seed, scheme):
    scen = generate(SMALL, seed)
    res = run_scheme(scheme, scen, seed)
    assert res.assignment.is_feasible()
    assert set(res.power) == res.assignment.users()
    assert all(0 < res.power[u] <= scen.max_power[u] for u in res.power)
    for s in range(scen.n_servers):
        total = sum(f for (u, w), f in res.compute.items() if w == s)
        assert total <= scen.server_rate[s] * (1 + 1e-12)
    assert res.value == pytest.approx(j_star(res.assignment, scen), rel=1e-9, abs=1e-12)
