import networkx as nx
import numpy as np
import pytest

from influence_toolbox.data.sample_data import load_synthetic_citation_network
from influence_toolbox.graph.core import DirectedGraph


def random_digraphs(count, max_nodes, seed=0, min_nodes=2):
    """random simple digraphs of varied size and density, reproducible from the seed"""
    rng = np.random.default_rng(seed)
    graphs = []
    for index in range(count):
        n = int(rng.integers(min_nodes, max_nodes + 1))
        density = rng.choice([0.02, 0.05, 0.1, 0.2, 0.4])
        m = int(min(n * (n - 1), max(1, round(density * n * (n - 1)))))
        nx_graph = nx.gnm_random_graph(n, m, seed=int(rng.integers(2 ** 31)), directed=True)
        graphs.append(DirectedGraph.from_networkx(nx_graph))
    return graphs


@pytest.fixture
def digraph_factory():
    return random_digraphs


@pytest.fixture
def path_graph():
    """a -> b -> c"""
    return DirectedGraph.from_arcs([('a', 'b'), ('b', 'c')])


@pytest.fixture
def long_path_graph():
    """a -> b -> c -> d"""
    return DirectedGraph.from_arcs([('a', 'b'), ('b', 'c'), ('c', 'd')])


@pytest.fixture
def star_graph():
    """c -> l1 .. l4, the center has id 0"""
    return DirectedGraph.from_arcs([('c', f'l{leaf}') for leaf in range(1, 5)])


@pytest.fixture
def cycle_graph():
    return DirectedGraph.from_arcs([('a', 'b'), ('b', 'c'), ('c', 'a')])


@pytest.fixture
def single_arc_graph():
    return DirectedGraph.from_arcs([('a', 'b')])


@pytest.fixture(scope='session')
def citation_network():
    """653 nodes and 1416 arcs, the size of the patent network"""
    return load_synthetic_citation_network()


@pytest.fixture(scope='session')
def small_citation_network():
    return load_synthetic_citation_network(n=60, m=130, seed=11)
