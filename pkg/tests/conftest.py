import numpy as np
import pytest

from rsl import rng
from rsl.graphs import build_graph


def random_tree(n: int, seed: int):
    """Uniform-ish random tree: each node attaches to a random earlier node."""
    stream = rng.Stream(rng.mix(seed, 0xABCD))
    edges = [(stream.below(i), i) for i in range(1, n)]
    return build_graph(edges, n=n)


@pytest.fixture(scope="session")
def fig_tree():
    """5-node example tree: hub 0 with children 1, 2; node 1 has leaves 3, 4."""
    return build_graph([(0, 1), (0, 2), (1, 3), (1, 4)])
