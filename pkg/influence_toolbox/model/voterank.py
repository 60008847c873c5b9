import logging
import math
from typing import List, Optional

import numpy as np

from ..graph.core import DirectedGraph, bfs_distances
from .base_model import SpreaderSelector

logger = logging.getLogger(__name__)

VARIANTS = ['original', 'lred', 'xred']


class ReductionKernel:
    """
    How much voting ability a node loses when a spreader is elected at distance d from it.

    With f = 1 / <k> (the mean out-degree on directed networks, mean degree otherwise):
        original: delta(1) = f, nothing beyond the direct neighbours (horizon 1)
        lred:     delta(d) = 1 / (<k> * d), linear decay with distance
        xred:     delta(d) = 1 / <k> ** d, exponential decay with distance
    lred and xred reach out to ceil(<k>) hops unless a horizon is given explicitly.
    All three share delta(1) = f.
    """

    def __init__(self, variant: str, mean_degree: float, horizon: Optional[int] = None):
        if variant not in VARIANTS:
            raise KeyError(f'variant {variant} is not supported; only support {VARIANTS}')
        if not mean_degree > 0:
            raise ValueError(f'the mean degree must be positive, got {mean_degree}')
        if horizon is not None:
            if not isinstance(horizon, (int, np.integer)) or isinstance(horizon, bool):
                raise TypeError('the horizon must be an integer number of hops')
            if horizon < 1:
                raise ValueError('the horizon must be at least one hop')

        self.variant = variant
        self.mean_degree = float(mean_degree)
        self.base = 1.0 / self.mean_degree

        if variant == 'original':
            if horizon not in (None, 1):
                logger.debug(f'kernel "original" only reaches direct neighbours; ignoring horizon {horizon}')
            self.horizon = 1
        elif horizon is None:
            self.horizon = max(1, math.ceil(self.mean_degree))
        else:
            self.horizon = int(horizon)

    def delta(self, distance: int) -> float:
        """suppression applied at the given hop distance; 0 outside 1..horizon"""
        if distance < 1 or distance > self.horizon:
            return 0.0
        if self.variant == 'lred':
            return 1.0 / (self.mean_degree * distance)
        if self.variant == 'xred':
            return 1.0 / self.mean_degree ** distance
        return self.base if distance == 1 else 0.0

    def __repr__(self):
        return (f'ReductionKernel(variant={self.variant!r}, mean_degree={self.mean_degree:.6f}, '
                f'horizon={self.horizon})')


def make_kernel(variant: str,
                graph: DirectedGraph,
                directed: bool = True,
                horizon: Optional[int] = None) -> ReductionKernel:
    """
    <k> is the mean out-degree m / n when the graph is read as directed, the mean total degree 2m / n otherwise
    """
    if graph.m < 1:
        raise ValueError('the graph needs at least one arc to derive its mean degree')
    mean_degree = graph.m / graph.n if directed else 2 * graph.m / graph.n
    return ReductionKernel(variant, mean_degree, horizon=horizon)


class VoteState:
    """
    Voting ability (va) and voting score of every node, plus the spreaders elected so far.
    The score of a node is the sum of va over its out-neighbours (all neighbours in undirected mode).
    """

    def __init__(self, graph: DirectedGraph, directed: bool = True):
        self.direction = 'out' if directed else 'undirected'
        self.va = np.ones(graph.n)
        indptr, _ = graph.csr(self.direction)
        # with every ability at 1 the score is just the neighbour count
        self.score = np.diff(indptr).astype(float)
        self.is_elected = np.zeros(graph.n, dtype=bool)
        self.elected: List[int] = []
        self.round_scores: List[float] = []

    @property
    def directed(self) -> bool:
        return self.direction == 'out'

    def __len__(self):
        return len(self.elected)


def voting_score(graph: DirectedGraph, state: VoteState, node: int) -> float:
    """sum of the voting abilities the node collects from its neighbours; elected nodes score 0"""
    if state.is_elected[node]:
        return 0.0
    return float(state.va[graph.neighbors(node, state.direction)].sum())


def elect_one(graph: DirectedGraph, state: VoteState, kernel: ReductionKernel) -> int:
    """
    elect the unelected node with the highest voting score (ties go to the smaller id),
    then weaken the voting ability of everything within the kernel horizon of it
    """
    if state.is_elected.all():
        raise ValueError('every node has already been elected')

    winner = int(np.argmax(np.where(state.is_elected, -np.inf, state.score)))
    state.round_scores.append(float(state.score[winner]))
    state.elected.append(winner)
    state.is_elected[winner] = True
    state.va[winner] = 0.0
    state.score[winner] = 0.0

    changed = [winner]
    # a node on several paths is suppressed once, at its shortest distance
    distances = bfs_distances(graph, winner, direction=state.direction, max_depth=kernel.horizon)
    for node, distance in distances.items():
        reduction = kernel.delta(distance)
        if reduction <= 0.0:
            continue
        before = state.va[node]
        state.va[node] = max(0.0, before - reduction)
        if state.va[node] != before:
            changed.append(node)

    # only nodes that count a changed node among their neighbours need a new score
    voters_of = 'in' if state.directed else 'undirected'
    affected = set()
    for node in changed:
        affected.update(graph.neighbors(node, voters_of).tolist())
    for node in sorted(affected):
        if not state.is_elected[node]:
            state.score[node] = voting_score(graph, state, node)
    return winner


def select_spreaders(graph: DirectedGraph,
                     variant: str,
                     count: int,
                     directed: bool = True,
                     horizon: Optional[int] = None) -> List[int]:
    """
    run `count` elections from a fresh state and return the spreaders in election order
    """
    return VoteRankSelector(variant=variant, directed=directed, horizon=horizon).fit(graph).select(count)


def spreader_count_from_fraction(n: int, p: float) -> int:
    """
    number of spreaders for a fraction p of n nodes, rounded half up and never below one
    >>> spreader_count_from_fraction(653, 0.02)
    13
    >>> spreader_count_from_fraction(653, 0.0001)
    1
    """
    if n < 1:
        raise ValueError('the network must have at least one node')
    if not 0 < p <= 1:
        raise ValueError(f'the spreader fraction must lie in (0, 1], got {p}')
    return min(n, max(1, math.floor(p * n + 0.5)))


class VoteRankSelector(SpreaderSelector):
    """
    VoteRank and its distance-decay variants as a spreader selector.
    variant: original, lred or xred
    directed: score over out-neighbours and suppress along out-arcs; False ignores direction
    horizon: hop limit of the suppression; ceil(<k>) by default for lred and xred

    Elections are greedy and deterministic, so the selection for k spreaders is a prefix of the
    selection for k + 1. The state is kept between calls and only extended when more are asked for.
    """

    def __init__(self, variant: str = 'original', directed: bool = True, horizon: Optional[int] = None):
        super().__init__()
        if variant not in VARIANTS:
            raise KeyError(f'variant {variant} is not supported; only support {VARIANTS}')
        self.variant = variant
        self.name = 'voterank' if variant == 'original' else f'voterank-{variant}'
        self.directed = directed
        self.horizon = horizon
        self.kernel: Optional[ReductionKernel] = None
        self.state: Optional[VoteState] = None

    def fit(self, graph, **kwargs):
        super().fit(graph)
        self.kernel = make_kernel(self.variant, graph, directed=self.directed, horizon=self.horizon)
        self.state = VoteState(graph, directed=self.directed)
        logger.info(f'{self.name}: {self.kernel}')
        return self

    def select(self, count, **kwargs) -> List[int]:
        super().select(count)
        while len(self.state) < count:
            elect_one(self.graph, self.state, self.kernel)
        return self.state.elected[:count]

    @property
    def election_scores(self) -> List[float]:
        """the winning voting score of each round so far"""
        return list(self.state.round_scores) if self.state is not None else []
