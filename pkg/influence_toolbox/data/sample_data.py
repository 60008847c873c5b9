import logging

import numpy as np

from ..graph.core import DirectedGraph

logger = logging.getLogger(__name__)

# size of the 3D printing patent network the defaults are modelled on
PATENT_NETWORK_NODES = 653
PATENT_NETWORK_ARCS = 1416


def load_synthetic_citation_network(n: int = PATENT_NETWORK_NODES,
                                    m: int = PATENT_NETWORK_ARCS,
                                    seed: int = 2014,
                                    description: bool = False) -> DirectedGraph:
    """
    A growing citation network with exactly n nodes and m arcs.

    Nodes arrive one at a time; each newcomer cites some earlier nodes, picked with probability
    proportional to (citations received + 1), so a few early nodes become hubs. Arcs point in the
    direction of influence, from the cited (older) node to the citing (newer) one, which makes the
    graph acyclic. Node i has id i and a zero-padded label (P00000, P00001, ...).
    Set description=True to print a short description.
    """
    description_of_network = """
    * This is a synthetic stand-in for a patent citation network: a directed acyclic graph grown by
    preferential attachment, with arcs running from the cited patent to the citing one.
    * The default size mirrors a 653-node, 1416-arc patent network, so average out-degree is 2.168453.
    """
    if description:
        print(description_of_network)

    if n < 2:
        raise ValueError('a citation network needs at least two nodes')
    if not 0 <= m <= n * (n - 1) // 2:
        raise ValueError(f'a {n}-node citation network holds between 0 and {n * (n - 1) // 2} arcs')

    rng = np.random.default_rng(seed)

    # how many earlier nodes each newcomer cites; newcomer t can cite at most t of them
    capacity = np.arange(n)
    citations = np.minimum(capacity, m // (n - 1))
    while citations.sum() < m:
        open_slots = np.flatnonzero(citations < capacity)
        citations[rng.choice(open_slots)] += 1

    attention = np.zeros(n)
    sources, targets = [], []
    for newcomer in range(1, n):
        if citations[newcomer] == 0:
            continue
        weights = attention[:newcomer] + 1.0
        cited = rng.choice(newcomer, size=citations[newcomer], replace=False, p=weights / weights.sum())
        for node in sorted(cited.tolist()):
            sources.append(node)
            targets.append(newcomer)
            attention[node] += 1

    graph = DirectedGraph([f'P{node:05d}' for node in range(n)], sources, targets)
    logger.info(f'generated a synthetic citation network with {graph.n} nodes and {graph.m} arcs')
    return graph
