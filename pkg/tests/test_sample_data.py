import networkx as nx
import pytest

from influence_toolbox.data import sample_data
from influence_toolbox.graph.core import DirectedGraph


def test_load_synthetic_citation_network(citation_network):
    assert isinstance(citation_network, DirectedGraph)
    assert citation_network.n == sample_data.PATENT_NETWORK_NODES
    assert citation_network.m == sample_data.PATENT_NETWORK_ARCS
    assert citation_network.labels[:2] == ['P00000', 'P00001']


def test_arcs_run_from_older_to_newer(citation_network):
    sources, targets = citation_network.arcs()
    assert (sources < targets).all()
    assert nx.is_directed_acyclic_graph(citation_network.to_networkx())


def test_network_has_hubs(citation_network):
    # preferential attachment makes a few early nodes collect most citations
    assert citation_network.out_degree.max() >= 5 * citation_network.m / citation_network.n


def test_same_seed_same_network():
    first = sample_data.load_synthetic_citation_network(n=50, m=90, seed=1)
    assert first == sample_data.load_synthetic_citation_network(n=50, m=90, seed=1)
    assert first != sample_data.load_synthetic_citation_network(n=50, m=90, seed=2)


@pytest.mark.parametrize('n, m', [(1, 0), (5, 11), (5, -1)])
def test_invalid_sizes(n, m):
    with pytest.raises(ValueError):
        sample_data.load_synthetic_citation_network(n=n, m=m)


def test_complete_dag():
    graph = sample_data.load_synthetic_citation_network(n=6, m=15)
    assert graph.m == 15


def test_description(capsys):
    sample_data.load_synthetic_citation_network(n=10, m=12, description=True)
    assert 'patent' in capsys.readouterr().out
