import itertools
import math
import time
from collections import Counter
from functools import lru_cache

import numpy as np
import pytest

from influence_toolbox.graph.core import DirectedGraph
from influence_toolbox.model.voterank import select_spreaders
from influence_toolbox.simulation.sir import (INFECTED, RECOVERED, SUSCEPTIBLE, SirParams, SirSummary,
                                              make_generator, run_many, run_sir)


def exact_final_recovered(graph, seeds, mu, beta):
    """
    expected number of recovered nodes at the end, by enumerating every outcome of every turn.
    A susceptible node under c infected in-neighbours escapes with probability (1 - mu) ** c.
    """
    successors = [graph.successors(node).tolist() for node in range(graph.n)]

    @lru_cache(maxsize=None)
    def expected(state):
        infected = [node for node, status in enumerate(state) if status == INFECTED]
        if not infected:
            return float(state.count(RECOVERED))
        pressure = Counter(target for node in infected for target in successors[node]
                           if state[target] == SUSCEPTIBLE)
        targets = sorted(pressure)
        staying, moving = 0.0, 0.0
        for hits in itertools.product([False, True], repeat=len(targets)):
            p_hits = math.prod((1 - (1 - mu) ** pressure[target]) if hit else (1 - mu) ** pressure[target]
                               for target, hit in zip(targets, hits))
            for recoveries in itertools.product([False, True], repeat=len(infected)):
                probability = p_hits * math.prod(beta if recovered else 1 - beta for recovered in recoveries)
                if probability == 0:
                    continue
                following = list(state)
                for target, hit in zip(targets, hits):
                    if hit:
                        following[target] = INFECTED
                for node, recovered in zip(infected, recoveries):
                    if recovered:
                        following[node] = RECOVERED
                following = tuple(following)
                if following == state:
                    staying += probability
                else:
                    moving += probability * expected(following)
        return moving / (1 - staying)

    initial = tuple(INFECTED if node in seeds else SUSCEPTIBLE for node in range(graph.n))
    return expected(initial)


def check_outcome(graph, seeds, outcome):
    counts = outcome.state_counts
    assert np.all(counts.sum(axis=1) == graph.n)
    assert np.all(np.diff(counts[:, RECOVERED]) >= 0)
    assert np.all(np.diff(counts[:, SUSCEPTIBLE]) <= 0)
    assert np.all(np.diff(outcome.trajectory) >= 0)
    np.testing.assert_array_equal(outcome.trajectory, counts[1:, RECOVERED] / graph.n)

    infected_at, recovered_at = outcome.infection_turn, outcome.recovery_turn
    assert set(np.flatnonzero(infected_at == 0).tolist()) == set(seeds)
    assert np.all((recovered_at == -1) | (recovered_at > infected_at))
    assert np.all(recovered_at[infected_at == -1] == -1)
    assert outcome.recovered == int(np.sum(recovered_at >= 0))
    if not outcome.truncated:
        assert counts[-1, INFECTED] == 0

    # every infection has an infectious in-neighbour in that turn
    for node in np.flatnonzero(infected_at > 0).tolist():
        turn = infected_at[node]
        sources = graph.predecessors(node)
        assert np.any((infected_at[sources] >= 0) & (infected_at[sources] < turn)
                      & ((recovered_at[sources] == -1) | (recovered_at[sources] >= turn)))


@pytest.mark.parametrize('mu, beta, error', [(-0.1, 0.5, ValueError), (1.1, 0.5, ValueError),
                                             (0.5, 0.0, ValueError), (0.5, 1.5, ValueError)])
def test_invalid_params(mu, beta, error):
    with pytest.raises(error):
        SirParams(mu=mu, beta=beta)


def test_invalid_params_turns_and_seed():
    with pytest.raises(ValueError):
        SirParams(mu=0.1, beta=0.1, max_turns=0)
    with pytest.raises(ValueError):
        SirParams(mu=0.1, beta=0.1, seed=-1)


def test_lam():
    assert SirParams(mu=0.3, beta=0.2).lam == pytest.approx(1.5)


@pytest.mark.parametrize('spreaders', [[], [7], [-1]])
def test_invalid_spreaders(path_graph, spreaders):
    with pytest.raises(ValueError):
        run_sir(path_graph, spreaders, SirParams(mu=0.5, beta=0.5))


def test_no_transmission(star_graph):
    outcome = run_sir(star_graph, [0, 2], SirParams(mu=0.0, beta=1.0))
    assert outcome.final_spread == 2 / 5
    assert outcome.turns == 1


def test_certain_spread_along_path(long_path_graph):
    outcome = run_sir(long_path_graph, [0], SirParams(mu=1.0, beta=1.0))
    assert outcome.final_spread == 1.0
    assert outcome.turns == 4
    assert outcome.trajectory.tolist() == [0.25, 0.5, 0.75, 1.0]
    assert outcome.infection_turn.tolist() == [0, 1, 2, 3]
    assert outcome.recovery_turn.tolist() == [1, 2, 3, 4]


def test_direction_matters(path_graph):
    params = SirParams(mu=1.0, beta=1.0)
    assert run_sir(path_graph, [2], params).final_spread == pytest.approx(1 / 3)
    assert run_sir(path_graph, [2], SirParams(mu=1.0, beta=1.0, directed=False)).final_spread == 1.0


def test_duplicate_spreaders_count_once(star_graph):
    outcome = run_sir(star_graph, [1, 1, 2], SirParams(mu=0.0, beta=1.0))
    assert outcome.recovered == 2


def test_turn_cap(caplog):
    graph = DirectedGraph.from_arcs([('a', 'b'), ('b', 'a')])
    outcome = run_sir(graph, [0], SirParams(mu=0.0, beta=1e-9, max_turns=3))
    assert outcome.truncated
    assert outcome.turns == 3
    assert 'turn cap' in caplog.text


def test_same_stream_same_outcome(citation_network):
    params = SirParams(mu=0.3, beta=0.2, seed=5)
    first = run_sir(citation_network, [0, 1, 2], params, rng=make_generator(5, 3))
    second = run_sir(citation_network, [0, 1, 2], params, rng=make_generator(5, 3))
    np.testing.assert_array_equal(first.state_counts, second.state_counts)
    np.testing.assert_array_equal(first.infection_turn, second.infection_turn)


def test_no_transmission_summary(star_graph):
    summary = run_many(star_graph, [0], SirParams(mu=0.0, beta=0.3), runs=50)
    assert summary.mean_final_spread == 0.2
    assert summary.stddev_final_spread == 0.0
    assert summary.runs == 50


def test_single_run_summary(citation_network):
    params = SirParams(mu=0.3, beta=0.2, seed=9)
    outcome = run_sir(citation_network, [0, 5], params, rng=make_generator(9, 0))
    summary = run_many(citation_network, [0, 5], params, runs=1)
    assert summary.mean_final_spread == outcome.final_spread
    assert summary.stddev_final_spread == 0.0
    assert summary.mean_turns == outcome.turns
    np.testing.assert_array_equal(summary.mean_trajectory, outcome.trajectory)


def test_mean_trajectory_pads_with_final_value(long_path_graph):
    outcomes = [run_sir(long_path_graph, [0], SirParams(mu=1.0, beta=1.0)),
                run_sir(long_path_graph, [3], SirParams(mu=1.0, beta=1.0))]
    summary = SirSummary.from_outcomes(outcomes)
    assert summary.mean_trajectory.tolist() == [0.25, 0.375, 0.5, 0.625]
    assert summary.mean_final_spread == 0.625


def test_summary_needs_runs(path_graph):
    with pytest.raises(ValueError):
        SirSummary.from_outcomes([])
    with pytest.raises(ValueError):
        run_many(path_graph, [0], SirParams(mu=0.1, beta=0.1), runs=0)


def test_run_many_is_reproducible(citation_network):
    params = SirParams(mu=0.3, beta=0.2, seed=1234)
    first = run_many(citation_network, range(13), params, runs=40)
    second = run_many(citation_network, range(13), params, runs=40)
    assert first.as_dict() == second.as_dict()
    np.testing.assert_array_equal(first.final_spreads, second.final_spreads)


def test_run_many_does_not_depend_on_workers(citation_network):
    params = SirParams(mu=0.3, beta=0.2, seed=77)
    serial = run_many(citation_network, range(13), params, runs=30, workers=1)
    parallel = run_many(citation_network, range(13), params, runs=30, workers=3)
    assert serial.as_dict() == parallel.as_dict()
    np.testing.assert_array_equal(serial.mean_trajectory, parallel.mean_trajectory)


def test_single_arc_expectation(single_arc_graph):
    runs = 10 ** 4
    summary = run_many(single_arc_graph, [0], SirParams(mu=0.3, beta=1.0, seed=3), runs=runs)
    assert summary.mean_final_spread * 2 == pytest.approx(1.3, abs=4 * math.sqrt(0.3 * 0.7 / runs))


@pytest.mark.slow
def test_single_arc_expectation_large_sample(single_arc_graph):
    runs = 10 ** 5
    summary = run_many(single_arc_graph, [0], SirParams(mu=0.3, beta=1.0, seed=4), runs=runs)
    assert abs(summary.mean_final_spread - 0.65) <= 3 * math.sqrt(0.3 * 0.7 / runs) / 2


def test_exact_oracle_on_certain_spread(long_path_graph):
    assert exact_final_recovered(long_path_graph, {0}, 1.0, 1.0) == 4.0
    assert exact_final_recovered(long_path_graph, {0}, 0.0, 0.5) == 1.0
    assert exact_final_recovered(DirectedGraph.from_arcs([('a', 'b')]), {0}, 0.3, 1.0) == pytest.approx(1.3)


ORACLE_GRAPHS = {'path': [('a', 'b'), ('b', 'c'), ('c', 'd')],
                 'diamond': [('a', 'b'), ('a', 'c'), ('b', 'd'), ('c', 'd')],
                 'fork': [('a', 'b'), ('a', 'c'), ('b', 'c')]}
ORACLE_SETTINGS = [('path', 0.3, 1.0), ('diamond', 0.5, 0.5), ('diamond', 0.2, 0.3),
                   ('fork', 0.8, 0.6), ('path', 0.6, 0.2), ('fork', 0.4, 0.9)]


def compare_with_oracle(name, mu, beta, runs, sigmas, seed):
    graph = DirectedGraph.from_arcs(ORACLE_GRAPHS[name])
    expected = exact_final_recovered(graph, {0}, mu, beta)
    summary = run_many(graph, [0], SirParams(mu=mu, beta=beta, seed=seed), runs=runs)
    error = sigmas * summary.stddev_final_spread * graph.n / math.sqrt(runs)
    assert abs(summary.mean_final_spread * graph.n - expected) <= error + 1e-12


@pytest.mark.parametrize('name, mu, beta', ORACLE_SETTINGS)
def test_matches_exact_enumeration(name, mu, beta):
    compare_with_oracle(name, mu, beta, runs=10 ** 4, sigmas=4, seed=21)


@pytest.mark.slow
@pytest.mark.parametrize('name, mu, beta', ORACLE_SETTINGS)
def test_matches_exact_enumeration_large_sample(name, mu, beta):
    compare_with_oracle(name, mu, beta, runs=10 ** 5, sigmas=3, seed=22)


def test_lower_recovery_spreads_further():
    graph = DirectedGraph.from_arcs(ORACLE_GRAPHS['diamond'])
    assert exact_final_recovered(graph, {0}, 0.5, 0.1) > exact_final_recovered(graph, {0}, 0.5, 1.0)


MU_LADDER = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


@pytest.mark.parametrize('name, beta', [('path', 0.5), ('diamond', 0.3), ('fork', 0.9)])
def test_higher_transmission_spreads_further(name, beta):
    graph = DirectedGraph.from_arcs(ORACLE_GRAPHS[name])
    expected = [exact_final_recovered(graph, {0}, mu, beta) for mu in MU_LADDER]
    assert all(later >= earlier - 1e-12 for earlier, later in zip(expected, expected[1:]))
    assert expected[-1] > expected[0]
    for mu in MU_LADDER:
        compare_with_oracle(name, mu, beta, runs=10 ** 4, sigmas=4, seed=31)


@pytest.mark.slow
@pytest.mark.parametrize('name, beta', [('path', 0.5), ('diamond', 0.3), ('fork', 0.9)])
def test_higher_transmission_spreads_further_large_sample(name, beta):
    for mu in MU_LADDER:
        compare_with_oracle(name, mu, beta, runs=10 ** 5, sigmas=3, seed=32)


def fuzz(digraph_factory, graphs, runs_per_graph):
    rng = np.random.default_rng(99)
    for index, graph in enumerate(digraph_factory(graphs, 30, seed=61)):
        seeds = sorted(rng.choice(graph.n, size=int(rng.integers(1, 4)), replace=False).tolist()) \
            if graph.n >= 3 else [0]
        params = SirParams(mu=float(rng.uniform(0, 1)), beta=float(rng.uniform(0.05, 1)), seed=index,
                           directed=bool(rng.integers(2)))
        for run_index in range(runs_per_graph):
            outcome = run_sir(graph, seeds, params, rng=make_generator(index, run_index))
            if params.directed:
                check_outcome(graph, seeds, outcome)
            else:
                assert np.all(outcome.state_counts.sum(axis=1) == graph.n)
                assert np.all(np.diff(outcome.trajectory) >= 0)


def test_conservation_and_provenance(digraph_factory):
    fuzz(digraph_factory, graphs=10, runs_per_graph=50)


@pytest.mark.slow
def test_conservation_and_provenance_fuzz(digraph_factory):
    fuzz(digraph_factory, graphs=40, runs_per_graph=250)


@pytest.mark.slow
def test_performance_envelope(citation_network):
    spreaders = select_spreaders(citation_network, 'lred', 13)
    start = time.perf_counter()
    summary = run_many(citation_network, spreaders, SirParams(mu=0.3, beta=0.2, seed=0), runs=1000)
    assert time.perf_counter() - start < 5
    assert summary.runs == 1000
