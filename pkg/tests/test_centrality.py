from collections import deque

import numpy as np
import pytest

from influence_toolbox.graph.centrality import (CentralityScores, betweenness_centrality, closeness_centrality,
                                                degree_centrality, full_ranking, rank_to_frame, top_k)
from influence_toolbox.graph.core import DirectedGraph


def shortest_paths_from(adjacency, source):
    """hop distance and number of shortest paths from source to every reachable node"""
    distance = {source: 0}
    paths = {source: 1}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for neighbor in adjacency[node]:
            if neighbor not in distance:
                distance[neighbor] = distance[node] + 1
                paths[neighbor] = 0
                queue.append(neighbor)
            if distance[neighbor] == distance[node] + 1:
                paths[neighbor] += paths[node]
    return distance, paths


def adjacency_lists(graph, direction='out'):
    return [graph.neighbors(node, direction).tolist() for node in range(graph.n)]


def brute_force_closeness(graph, direction='out'):
    adjacency = adjacency_lists(graph, direction)
    scores = []
    for node in range(graph.n):
        distance, _ = shortest_paths_from(adjacency, node)
        reached = len(distance) - 1
        total = sum(distance.values())
        scores.append((reached / (graph.n - 1)) * (reached / total) if reached else 0.0)
    return np.array(scores)


def brute_force_betweenness(graph):
    adjacency = adjacency_lists(graph)
    table = [shortest_paths_from(adjacency, node) for node in range(graph.n)]
    scores = np.zeros(graph.n)
    for x in range(graph.n):
        distance_x, paths_x = table[x]
        for y, d_xy in distance_x.items():
            if y == x:
                continue
            for v in range(graph.n):
                if v in (x, y) or v not in distance_x:
                    continue
                distance_v, paths_v = table[v]
                if y in distance_v and distance_x[v] + distance_v[y] == d_xy:
                    scores[v] += paths_x[v] * paths_v[y] / paths_x[y]
    return scores


def test_degree_cycle(cycle_graph):
    assert degree_centrality(cycle_graph, mode='out').values.tolist() == [1, 1, 1]


def test_degree_star(star_graph):
    assert degree_centrality(star_graph).values.tolist() == [4, 0, 0, 0, 0]
    assert degree_centrality(star_graph, mode='in').values.tolist() == [0, 1, 1, 1, 1]


def test_degree_path_total(path_graph):
    assert degree_centrality(path_graph, mode='total').values.tolist() == [1, 2, 1]


def test_degree_unknown_mode(path_graph):
    with pytest.raises(ValueError):
        degree_centrality(path_graph, mode='sideways')


def test_closeness_undirected_path(path_graph):
    scores = closeness_centrality(path_graph, direction='undirected')
    assert scores[1] == pytest.approx(1.0)
    assert scores[0] == pytest.approx(2 / 3)


def test_closeness_two_disconnected_arcs():
    graph = DirectedGraph.from_arcs([('a', 'b'), ('c', 'd')])
    scores = closeness_centrality(graph, direction='out')
    assert scores[0] == pytest.approx(1 / 3)
    assert scores[2] == pytest.approx(1 / 3)
    assert scores[1] == 0.0
    assert scores[3] == 0.0


def test_closeness_follows_influence(path_graph):
    scores = closeness_centrality(path_graph)
    # a reaches two nodes, c reaches none
    assert scores[0] > scores[1] > scores[2] == 0.0


def test_closeness_unknown_direction(path_graph):
    with pytest.raises(ValueError):
        closeness_centrality(path_graph, direction='in')


def test_closeness_single_node():
    assert closeness_centrality(DirectedGraph(['a'], [], [])).values.tolist() == [0.0]


def test_betweenness_examples(path_graph, cycle_graph, star_graph):
    assert betweenness_centrality(path_graph).values.tolist() == [0.0, 1.0, 0.0]
    assert betweenness_centrality(cycle_graph).values.tolist() == [1.0, 1.0, 1.0]
    assert betweenness_centrality(star_graph).values.tolist() == [0.0] * 5


@pytest.mark.parametrize('direction', ['out', 'undirected'])
def test_closeness_matches_brute_force(digraph_factory, direction):
    for graph in digraph_factory(50, 50, seed=17):
        np.testing.assert_allclose(closeness_centrality(graph, direction=direction).values,
                                   brute_force_closeness(graph, direction), rtol=0, atol=1e-9)


def test_betweenness_matches_brute_force(digraph_factory):
    for graph in digraph_factory(50, 50, seed=23):
        np.testing.assert_allclose(betweenness_centrality(graph).values,
                                   brute_force_betweenness(graph), rtol=0, atol=1e-9)


def test_top_k_tie_break():
    scores = CentralityScores('toy', np.array([2.0, 2.0, 1.0]))
    assert top_k(scores, 1) == [0]
    assert top_k(scores, 3) == [0, 1, 2]


def test_top_k_star(star_graph):
    assert top_k(degree_centrality(star_graph), 1) == [0]


def test_full_ranking_is_permutation(digraph_factory):
    for graph in digraph_factory(10, 30, seed=2):
        scores = degree_centrality(graph, mode='total')
        ranking = full_ranking(scores)
        assert sorted(ranking) == list(range(graph.n))
        ordered = scores.values[ranking]
        assert np.all(ordered[:-1] >= ordered[1:])


@pytest.mark.parametrize('k, error', [(0, ValueError), (4, ValueError), (1.5, TypeError), (True, TypeError)])
def test_top_k_invalid(k, error):
    with pytest.raises(error):
        top_k(CentralityScores('toy', np.array([2.0, 2.0, 1.0])), k)


@pytest.mark.parametrize('values', [[-1.0, 2.0], [np.nan, 1.0], [[1.0], [2.0]], [np.inf]])
def test_invalid_scores(values):
    with pytest.raises(ValueError):
        CentralityScores('toy', np.array(values))


def test_rank_to_frame(star_graph):
    frame = rank_to_frame(degree_centrality(star_graph), star_graph.labels, k=2)
    assert frame.columns.tolist() == ['node_label', 'score', 'rank']
    assert frame['node_label'].tolist() == ['c', 'l1']
    assert frame['rank'].tolist() == [1, 2]
    assert len(rank_to_frame(degree_centrality(star_graph), star_graph.labels)) == 5


MEASURES = {'degree': lambda graph: degree_centrality(graph, mode='total'),
            'closeness': closeness_centrality,
            'betweenness': betweenness_centrality}


@pytest.mark.parametrize('measure', sorted(MEASURES))
@pytest.mark.parametrize('factor', [0.25, 2.0, 1024.0])
def test_top_k_ignores_positive_scaling(digraph_factory, measure, factor):
    # powers of two scale exactly, so ties stay ties
    for graph in digraph_factory(10, 40, seed=5):
        scores = MEASURES[measure](graph)
        scaled = CentralityScores(scores.measure, scores.values * factor)
        k = max(1, graph.n // 3)
        assert top_k(scaled, k) == top_k(scores, k)
        assert full_ranking(scaled) == full_ranking(scores)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_total_degree_sums_to_twice_the_arcs(digraph_factory, seed):
    for graph in digraph_factory(10, 60, seed=seed):
        assert degree_centrality(graph, mode='total').values.sum() == 2 * graph.m
        assert degree_centrality(graph, mode='out').values.sum() == graph.m
        assert degree_centrality(graph, mode='in').values.sum() == graph.m
