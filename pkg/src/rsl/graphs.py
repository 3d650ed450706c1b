"""Undirected graphs over dense integer node ids, plus rooted-tree views.

Graphs are immutable once built and stored in CSR form (``indptr``/``adj``
int64 arrays with per-node sorted neighbor lists), which is what the
compiled kernels consume directly.  Node ids are dense in ``[0, n)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import DisconnectedError, GraphError, NotATreeError

Edge = tuple[int, int]


class Graph:
    """Simple undirected graph: no self-loops, no parallel edges."""

    __slots__ = ("n", "indptr", "adj")

    def __init__(self, n: int, indptr: np.ndarray, adj: np.ndarray):
        self.n = n
        self.indptr = indptr
        self.adj = adj

    @property
    def num_edges(self) -> int:
        return len(self.adj) // 2

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj[self.indptr[v] : self.indptr[v + 1]]

    def edges(self) -> Iterator[Edge]:
        """Each undirected edge once, as (u, v) with u < v, sorted."""
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield (u, int(v))

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = int(np.searchsorted(nbrs, v))
        return i < len(nbrs) and nbrs[i] == v

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def build_graph(edges: Iterable[Edge], n: Optional[int] = None) -> Graph:
    """Build a normalized Graph from an edge list.

    Node count is ``max id + 1`` unless ``n`` forces isolated trailing nodes.
    Rejects self-loops, duplicate edges and negative ids, naming the
    offending edge.
    """
    pairs = np.asarray(list(edges), dtype=np.int64)
    if pairs.size == 0:
        count = 0 if n is None else n
        return Graph(count, np.zeros(count + 1, dtype=np.int64),
                     np.zeros(0, dtype=np.int64))
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise GraphError("edges must be (u, v) pairs")
    us, vs = pairs[:, 0].copy(), pairs[:, 1].copy()
    bad = np.nonzero(us == vs)[0]
    if len(bad):
        i = int(bad[0])
        raise GraphError(f"self-loop ({us[i]},{vs[i]})")
    if int(pairs.min()) < 0:
        i = int(np.nonzero((us < 0) | (vs < 0))[0][0])
        raise GraphError(f"negative node id in edge ({us[i]},{vs[i]})")
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    order = np.lexsort((hi, lo))
    dup = np.nonzero((np.diff(lo[order]) == 0) & (np.diff(hi[order]) == 0))[0]
    if len(dup):
        i = int(order[dup[0]])
        raise GraphError(f"duplicate edge ({lo[i]},{hi[i]})")
    count = int(hi.max()) + 1
    if n is not None:
        if n < count:
            raise GraphError(f"n={n} smaller than max node id {count - 1}")
        count = n
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    perm = np.lexsort((dst, src))
    adj = dst[perm]
    indptr = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=count), out=indptr[1:])
    return Graph(count, indptr, adj)


def from_parents(parents: Sequence[int]) -> Graph:
    """Tree from a parent array (parents[root] < 0). Node ids are positions."""
    edges = [(p, i) for i, p in enumerate(parents) if p >= 0]
    return build_graph(edges, n=len(parents))


def connected_component(g: Graph, start: int) -> np.ndarray:
    """Sorted node ids of the component containing ``start``."""
    seen = np.zeros(g.n, dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return np.flatnonzero(seen)


def components(g: Graph) -> list[np.ndarray]:
    """All connected components, each a sorted id array."""
    seen = np.zeros(g.n, dtype=bool)
    out = []
    for s in range(g.n):
        if not seen[s]:
            comp = connected_component(g, s)
            seen[comp] = True
            out.append(comp)
    return out


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(connected_component(g, 0)) == g.n


def is_tree(g: Graph) -> bool:
    """Connected with exactly n-1 edges."""
    return g.n >= 1 and g.num_edges == g.n - 1 and is_connected(g)


@dataclass(frozen=True)
class RootedView:
    """A tree rooted at ``root``: parents, BFS order, and subtree sizes.

    ``order`` lists nodes root-first so that any reverse sweep visits
    children before parents; ``subtree_size[root] == n``.
    """

    root: int
    parent: np.ndarray
    order: np.ndarray
    subtree_size: np.ndarray

    @property
    def n(self) -> int:
        return len(self.parent)

    def children(self, v: int) -> list[int]:
        return [int(u) for u in np.flatnonzero(self.parent == v)]


def root_at(g: Graph, root: int) -> RootedView:
    """Root a tree and compute subtree sizes in one down/up sweep."""
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range [0,{g.n})")
    if not is_tree(g):
        raise NotATreeError("root_at requires a tree")
    parent = np.full(g.n, -1, dtype=np.int64)
    order = np.zeros(g.n, dtype=np.int64)
    order[0] = root
    parent[root] = root  # sentinel against revisiting; reset below
    head = 0
    tail = 1
    while head < tail:
        u = int(order[head])
        head += 1
        for v in g.neighbors(u):
            if parent[v] < 0:
                parent[v] = u
                order[tail] = v
                tail += 1
    parent[root] = -1
    size = np.ones(g.n, dtype=np.int64)
    for i in range(g.n - 1, 0, -1):
        size[parent[order[i]]] += size[order[i]]
    return RootedView(root=root, parent=parent, order=order, subtree_size=size)


def bfs_tree(g: Graph, root: int) -> Graph:
    """Breadth-first spanning tree of a connected graph.

    Deterministic: every node's parent is its smallest-id neighbor in the
    previous BFS layer, so repeated runs (and both backends) agree.
    """
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range [0,{g.n})")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    if (dist < 0).any():
        raise DisconnectedError("bfs_tree requires a connected graph")
    edges = []
    for v in range(g.n):
        if v == root:
            continue
        nbrs = g.neighbors(v)
        up = nbrs[dist[nbrs] == dist[v] - 1]
        edges.append((int(up.min()), v))
    return build_graph(edges, n=g.n)


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    """Subgraph on ``nodes`` keeping every host edge between them.

    Returned ids are positions in ``nodes`` (so callers control labeling).
    """
    nodes = [int(v) for v in nodes]
    pos = {v: i for i, v in enumerate(nodes)}
    if len(pos) != len(nodes):
        raise GraphError("induced_subgraph: repeated node id")
    edges = []
    for v in nodes:
        for u in g.neighbors(v):
            iu = pos.get(int(u))
            if iu is not None and pos[v] < iu:
                edges.append((pos[v], iu))
    return build_graph(edges, n=len(nodes))


def read_edgelist(path) -> Graph:
    """Read 'u v' pairs, one per line; '#' starts a comment."""
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError(f"{path}:{lineno}: non-integer node id in {text!r}")
            edges.append((u, v))
    return build_graph(edges)


def write_edgelist(g: Graph, fh) -> None:
    for u, v in g.edges():
        fh.write(f"{u} {v}\n")
