import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import networkx as nx
import numpy as np
from pandas import DataFrame

from .core import DirectedGraph

logger = logging.getLogger(__name__)

DEGREE_MODES = ['total', 'in', 'out']
CLOSENESS_DIRECTIONS = ['out', 'undirected']

# ordered node ids, best first
Ranking = List[int]


@dataclass(frozen=True)
class CentralityScores:
    measure: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError('centrality scores must be a one-dimensional vector')
        if not np.all(np.isfinite(values)):
            raise ValueError(f'{self.measure} scores must be finite')
        if np.any(values < 0):
            raise ValueError(f'{self.measure} scores cannot be negative')
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, node):
        return float(self.values[node])


def degree_centrality(graph: DirectedGraph, mode: str = 'out') -> CentralityScores:
    """
    number of arcs touching each node. out-degree is the default since it counts the nodes a spreader reaches.
    """
    if mode not in DEGREE_MODES:
        raise ValueError(f'mode {mode} is not supported; only support {DEGREE_MODES}')
    if mode == 'out':
        values = graph.out_degree
    elif mode == 'in':
        values = graph.in_degree
    else:
        values = graph.out_degree + graph.in_degree
    return CentralityScores(measure=f'degree_{mode}', values=values.astype(float))


def closeness_centrality(graph: DirectedGraph, direction: str = 'out') -> CentralityScores:
    """
    Reachability-corrected closeness: a node reaching r other nodes with distance sum S scores
    (r / (n - 1)) * (r / S), and 0 when it reaches nothing. Unlike the raw inverse mean distance,
    this stays defined on disconnected networks.

    direction='out' measures distances along the arcs leaving each node (how far its influence
    travels); direction='undirected' ignores arc direction.
    """
    if direction not in CLOSENESS_DIRECTIONS:
        raise ValueError(f'direction {direction} is not supported; only support {CLOSENESS_DIRECTIONS}')

    nx_graph = graph.to_networkx()
    if direction == 'out':
        # networkx measures incoming distances on digraphs, so hand it the reversed arcs
        nx_graph = nx_graph.reverse(copy=False)
    else:
        nx_graph = nx_graph.to_undirected(as_view=True)

    closeness = nx.closeness_centrality(nx_graph, wf_improved=True)
    values = np.array([closeness[node] for node in range(graph.n)], dtype=float)
    return CentralityScores(measure=f'closeness_{direction}', values=values)


def betweenness_centrality(graph: DirectedGraph) -> CentralityScores:
    """
    Directed betweenness summed over ordered pairs (x, y) with x != v != y: the share of shortest
    x -> y paths running through v. Pairs without a path add nothing; no normalisation is applied.
    """
    logger.info(f'computing betweenness on {graph.n} nodes and {graph.m} arcs')
    betweenness = nx.betweenness_centrality(graph.to_networkx(), normalized=False, endpoints=False)
    values = np.array([betweenness[node] for node in range(graph.n)], dtype=float)
    return CentralityScores(measure='betweenness', values=values)


def full_ranking(scores: CentralityScores) -> Ranking:
    """every node by descending score; ties go to the smaller node id"""
    ids = np.arange(len(scores))
    return np.lexsort((ids, -scores.values)).tolist()


def top_k(scores: CentralityScores, k: int) -> Ranking:
    """
    >>> top_k(CentralityScores('toy', np.array([2.0, 2.0, 1.0])), 1)
    [0]
    """
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError('k must be an integer')
    if k < 1:
        raise ValueError('k must be a positive integer')
    if k > len(scores):
        raise ValueError(f'cannot pick {k} nodes out of {len(scores)}')
    return full_ranking(scores)[:k]


def rank_to_frame(scores: CentralityScores,
                  labels: Sequence[str],
                  k: Optional[int] = None) -> DataFrame:
    """the ranked nodes as a table with node_label, score and rank (1 is best)"""
    ranking = top_k(scores, len(scores) if k is None else k)
    return DataFrame({'node_label': [labels[node] for node in ranking],
                      'score': [scores[node] for node in ranking],
                      'rank': list(range(1, len(ranking) + 1))})
