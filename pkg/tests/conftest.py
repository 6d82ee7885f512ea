import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def minimal_cut_sizes(lat, partition):
    """Cut sizes of every vertex set S with A in S, C outside, S and its complement connected.

    Each such S is bounded by exactly one self-avoiding domain wall, so this
    is an enumeration of separating walls that never touches the dual graph.
    """
    g = nx.Graph()
    g.add_nodes_from(range(lat.n_vertices))
    g.add_edges_from(lat.edges)
    free = sorted(partition.B)
    sizes = []
    for mask in itertools.product((0, 1), repeat=len(free)):
        S = set(partition.A) | {v for v, m in zip(free, mask) if m}
        T = set(range(lat.n_vertices)) - S
        if not S or not T:
            continue
        if not nx.is_connected(g.subgraph(S)) or not nx.is_connected(g.subgraph(T)):
            continue
        sizes.append(sum(1 for i, j in lat.edges if (i in S) != (j in S)))
    return sorted(sizes)
