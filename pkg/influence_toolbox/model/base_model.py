from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np

from ..graph.centrality import (CentralityScores, betweenness_centrality, closeness_centrality,
                                degree_centrality, top_k)
from ..graph.core import DirectedGraph


# note: same convention as estimators elsewhere: the constructor only takes method-related
# parameters, the graph is handed over in fit(), and select() returns the spreaders.


class SpreaderSelector(ABC):
    name: Optional[str] = None

    def __init__(self, **kwargs):
        self.graph = None

    @abstractmethod
    def fit(self, graph, **kwargs):
        """the graph is the bare minimum"""
        if not isinstance(graph, DirectedGraph):
            raise TypeError('currently, we only support DirectedGraph as the input network.')
        self.graph = graph
        return self

    @abstractmethod
    def select(self, count, **kwargs) -> List[int]:
        """these checks are the bare minimum for any sub class"""
        if self.graph is None:
            raise ValueError('call fit() with a graph before selecting spreaders')
        if not isinstance(count, (int, np.integer)) or isinstance(count, bool):
            raise TypeError('the number of spreaders must be an integer')
        if count < 1:
            raise ValueError('the number of spreaders must be a positive integer')
        if count > self.graph.n:
            raise ValueError(f'cannot select {count} spreaders from a graph with {self.graph.n} nodes')

    def __repr__(self):
        return f'{type(self).__name__}(name={self.name!r})'


class CentralitySelector(SpreaderSelector):
    """
    Pick the top-k nodes of a classic centrality measure.
    measure is one of degree, closeness or betweenness; degree_mode and closeness_direction
    are forwarded to the corresponding measure.
    """
    measures = {'degree': degree_centrality,
                'closeness': closeness_centrality,
                'betweenness': betweenness_centrality}

    def __init__(self, measure: str = 'degree', degree_mode: str = 'out', closeness_direction: str = 'out'):
        super().__init__()
        if measure not in self.measures:
            raise KeyError(f'measure {measure} is not supported; only support {list(self.measures)}')
        self.name = measure
        self.degree_mode = degree_mode
        self.closeness_direction = closeness_direction
        self.scores: Optional[CentralityScores] = None

    def fit(self, graph, **kwargs):
        super().fit(graph)
        if self.name == 'degree':
            self.scores = degree_centrality(graph, mode=self.degree_mode)
        elif self.name == 'closeness':
            self.scores = closeness_centrality(graph, direction=self.closeness_direction)
        else:
            self.scores = betweenness_centrality(graph)
        return self

    def select(self, count, **kwargs) -> List[int]:
        super().select(count)
        return top_k(self.scores, count)

    def score_of(self, node: int) -> float:
        return self.scores[node]
