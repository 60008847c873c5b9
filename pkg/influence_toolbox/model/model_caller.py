import logging
from typing import Dict, Iterable, List

from ..graph.core import DirectedGraph
from .base_model import CentralitySelector, SpreaderSelector
from .voterank import VoteRankSelector, spreader_count_from_fraction

logger = logging.getLogger(__name__)

METHODS = ['closeness', 'degree', 'betweenness', 'voterank', 'voterank-lred', 'voterank-xred']
VOTERANK_VARIANTS = {'voterank': 'original', 'voterank-lred': 'lred', 'voterank-xred': 'xred'}


def get_selector(method: str,
                 degree_mode: str = 'out',
                 closeness_direction: str = 'out',
                 directed: bool = True,
                 horizon: int = None) -> SpreaderSelector:
    """
    translate a method name into an unfitted selector.
    options that do not apply to the method are ignored.
    """
    if method in VOTERANK_VARIANTS:
        return VoteRankSelector(variant=VOTERANK_VARIANTS[method], directed=directed, horizon=horizon)
    if method in ('degree', 'closeness', 'betweenness'):
        return CentralitySelector(measure=method, degree_mode=degree_mode, closeness_direction=closeness_direction)
    raise KeyError(f'method {method} is not supported; only support {METHODS}')


def select_for_fractions(graph: DirectedGraph,
                         method: str,
                         p_values: Iterable[float],
                         **options) -> Dict[float, List[int]]:
    """
    spreader sets for several fractions p, all cut from one selection run.
    every method here ranks greedily, so the smaller sets are prefixes of the larger ones.
    """
    counts = {p: spreader_count_from_fraction(graph.n, p) for p in p_values}
    if not counts:
        return {}
    ranking = get_selector(method, **options).fit(graph).select(max(counts.values()))
    return {p: ranking[:count] for p, count in counts.items()}


def select_spreaders_by_method(graph: DirectedGraph, method: str, count: int, **options) -> List[int]:
    return get_selector(method, **options).fit(graph).select(count)
