import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

logger = logging.getLogger(__name__)

DIRECTIONS = ['out', 'in', 'undirected']


class DirectedGraph:
    """
    A simple directed graph over dense node ids 0..n-1, with a side table of string labels.

    An arc u -> v means u influences v (knowledge flows from the cited, older node to the
    citing, newer one). Self-loops and duplicate arcs are dropped on construction, so the
    stored graph is always simple. Successors and predecessors are both kept in compressed
    sparse row form, which makes traversal cheap in either direction.

    The object is not meant to be mutated after construction; worker processes can share it.
    """

    def __init__(self,
                 labels: Sequence[str],
                 sources: Iterable[int],
                 targets: Iterable[int]):
        self.labels = [str(label) for label in labels]
        self.n = len(self.labels)
        if self.n == 0:
            raise ValueError('the graph has no nodes')

        self._ids = {label: idx for idx, label in enumerate(self.labels)}
        if len(self._ids) != self.n:
            raise ValueError('node labels must be unique')

        sources = np.array(list(sources), dtype=np.int64)
        targets = np.array(list(targets), dtype=np.int64)
        if sources.shape != targets.shape:
            raise ValueError('sources and targets must have the same length')
        if sources.size and (min(sources.min(), targets.min()) < 0 or max(sources.max(), targets.max()) >= self.n):
            raise ValueError(f'arc endpoints must be node ids between 0 and {self.n - 1}')

        keep = sources != targets
        codes = np.unique(sources[keep] * self.n + targets[keep])  # sorted by (source, target), deduplicated
        self._sources = codes // self.n
        self._targets = codes % self.n
        self.m = int(codes.size)

        self.adjacency = self._compress(self._sources, self._targets, self.n)
        self.out_indptr, self.out_indices = self.adjacency.indptr, self.adjacency.indices
        reverse = self._compress(self._targets, self._sources, self.n)
        self.in_indptr, self.in_indices = reverse.indptr, reverse.indices

    @staticmethod
    def _compress(rows, cols, n) -> csr_matrix:
        matrix = csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
        matrix.sort_indices()
        return matrix

    @classmethod
    def from_arcs(cls, arcs: Iterable[Tuple[str, str]]) -> 'DirectedGraph':
        """
        build a graph from (source_label, target_label) pairs; ids follow first-seen order.
        >>> g = DirectedGraph.from_arcs([('a', 'b'), ('b', 'c')])
        >>> g.n, g.m
        (3, 2)
        """
        ids: Dict[str, int] = {}
        sources, targets = [], []
        for source, target in arcs:
            for label in (source, target):
                if label not in ids:
                    ids[label] = len(ids)
            sources.append(ids[source])
            targets.append(ids[target])
        return cls(list(ids), sources, targets)

    @classmethod
    def from_networkx(cls, graph: nx.DiGraph) -> 'DirectedGraph':
        nodes = list(graph.nodes)
        index = {node: idx for idx, node in enumerate(nodes)}
        arcs = [(index[u], index[v]) for u, v in graph.edges]
        sources = [u for u, _ in arcs]
        targets = [v for _, v in arcs]
        return cls([str(node) for node in nodes], sources, targets)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(zip(self._sources.tolist(), self._targets.tolist()))
        return graph

    def reversed(self) -> 'DirectedGraph':
        """flip every arc; raw citation dumps (citing -> cited) become influence arcs"""
        return DirectedGraph(self.labels, self._targets, self._sources)

    def arcs(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._sources.copy(), self._targets.copy()

    def id_of(self, label: str) -> int:
        if label not in self._ids:
            raise KeyError(f'node {label} is not in the graph')
        return self._ids[label]

    def label_of(self, node: int) -> str:
        return self.labels[node]

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    @cached_property
    def _undirected(self) -> csr_matrix:
        # arcs in both directions collapse to a single neighbour
        symmetric = (self.adjacency + self.adjacency.T).tocsr()
        symmetric.sort_indices()
        return symmetric

    def csr(self, direction: str = 'out') -> Tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the adjacency followed in the given direction"""
        if direction == 'out':
            return self.out_indptr, self.out_indices
        if direction == 'in':
            return self.in_indptr, self.in_indices
        if direction == 'undirected':
            return self._undirected.indptr, self._undirected.indices
        raise ValueError(f'direction {direction} is not supported; only support {DIRECTIONS}')

    def successors(self, node: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[node]:self.out_indptr[node + 1]]

    def predecessors(self, node: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[node]:self.in_indptr[node + 1]]

    def neighbors(self, node: int, direction: str = 'out') -> np.ndarray:
        indptr, indices = self.csr(direction)
        return indices[indptr[node]:indptr[node + 1]]

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (self.labels == other.labels
                and np.array_equal(self._sources, other._sources)
                and np.array_equal(self._targets, other._targets))

    __hash__ = None

    def __repr__(self):
        return f'DirectedGraph(n={self.n}, m={self.m})'


@dataclass(frozen=True)
class TopologyStats:
    nodes: int
    arcs: int
    density: float
    avg_degree: float
    avg_out_degree: float
    giant_component_nodes: int
    giant_component_fraction: float

    def as_dict(self, precision: Optional[int] = None) -> dict:
        """the keys match the stats json emitted by the command line"""
        output = {'nodes': self.nodes,
                  'arcs': self.arcs,
                  'density': self.density,
                  'avg_degree': self.avg_degree,
                  'avg_out_degree': self.avg_out_degree,
                  'giant_component_nodes': self.giant_component_nodes,
                  'giant_component_fraction': self.giant_component_fraction}
        if precision is not None:
            output = {key: round(value, precision) if isinstance(value, float) else value
                      for key, value in output.items()}
        return output


def bfs_distances(graph: DirectedGraph,
                  source: int,
                  direction: str = 'out',
                  max_depth: Optional[int] = None) -> Dict[int, int]:
    """
    hop distances from source, following arcs in the requested direction.
    Nodes that are unreachable or farther than max_depth are left out.
    >>> path = DirectedGraph.from_arcs([('a', 'b'), ('b', 'c')])
    >>> bfs_distances(path, 0)
    {0: 0, 1: 1, 2: 2}
    >>> bfs_distances(path, 0, direction='in')
    {0: 0}
    """
    if not 0 <= source < graph.n:
        raise ValueError(f'source {source} is not a node of the graph')
    if max_depth is not None and max_depth < 0:
        raise ValueError('max_depth cannot be negative')

    indptr, indices = graph.csr(direction)
    seen = {source: 0}
    frontier = [source]
    level = 0
    while frontier:
        if max_depth is not None and level >= max_depth:
            break
        level += 1
        next_frontier = []
        for node in frontier:
            for neighbor in indices[indptr[node]:indptr[node + 1]].tolist():
                if neighbor not in seen:
                    seen[neighbor] = level
                    next_frontier.append(neighbor)
        frontier = next_frontier
    return seen


def weak_components(graph: DirectedGraph) -> List[Set[int]]:
    """
    all weakly connected components, largest first; equal sizes are ordered by their smallest node id
    """
    _, membership = connected_components(graph.adjacency, directed=True, connection='weak')
    groups: Dict[int, Set[int]] = {}
    for node, component in enumerate(membership.tolist()):
        groups.setdefault(component, set()).add(node)
    return sorted(groups.values(), key=lambda members: (-len(members), min(members)))


def giant_component(graph: DirectedGraph) -> Set[int]:
    largest, *_ = weak_components(graph)
    return largest


def topology_stats(graph: DirectedGraph) -> TopologyStats:
    n, m = graph.n, graph.m
    density = m / (n * (n - 1)) if n > 1 else 0.0
    giant = giant_component(graph)
    return TopologyStats(nodes=n,
                         arcs=m,
                         density=density,
                         avg_degree=2 * m / n,
                         avg_out_degree=m / n,
                         giant_component_nodes=len(giant),
                         giant_component_fraction=len(giant) / n)
