"""Rumor centrality: scoring, center characterization, source estimation.

For a tree G, R(u, G) = n! / prod_w T_w(u) counts the infection orders
that start at u and respect the tree's causality, and the node(s)
maximizing it are the natural source estimate.  Scores are evaluated in
log space via linear-time message passing; near-equal scores (relative
log gap below 1e-9) are re-compared exactly in integer arithmetic so that
argmax sets and rankings are never corrupted by float rounding.

For a general connected graph each candidate u is scored on its own
deterministic breadth-first search tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels, rng
from .errors import DisconnectedError, NotATreeError
from .graphs import Graph, is_connected, is_tree

_TIE_REL_GAP = 1e-9


@dataclass(frozen=True)
class CentralityReport:
    """Scores and ranking for one graph.

    ``ranking`` is every node sorted by descending centrality; exact ties
    are broken by a seed-controlled uniform shuffle, and ``chosen`` is
    ``ranking[0]``.  ``centers`` is the exact argmax set in ascending id
    order (at most two nodes on a tree).
    """

    log_centrality: np.ndarray
    ranking: np.ndarray
    centers: tuple[int, ...]
    chosen: int
    unique: bool

    @property
    def n(self) -> int:
        return len(self.log_centrality)

    def rank_of(self, v: int) -> int:
        """1-based rank of node v (tied nodes hold shuffled positions)."""
        if not 0 <= v < self.n:
            raise KeyError(f"node {v} not in report")
        return int(np.nonzero(self.ranking == v)[0][0]) + 1


def rank_of_node(report: CentralityReport, v: int) -> int:
    return report.rank_of(v)


def _tree_sizes_rooted_at(g: Graph, root: int) -> np.ndarray:
    """Subtree sizes of a tree rooted at ``root`` (iterative BFS + reverse sweep)."""
    n = g.n
    parent = np.full(n, -1, dtype=np.int64)
    order = np.zeros(n, dtype=np.int64)
    parent[root] = root
    order[0] = root
    head, tail = 0, 1
    while head < tail:
        u = int(order[head])
        head += 1
        for v in g.neighbors(u):
            if parent[v] < 0:
                parent[v] = u
                order[tail] = v
                tail += 1
    parent[root] = -1
    size = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        size[parent[order[i]]] += size[order[i]]
    return size


def _tree_exact_key(parent: np.ndarray, size: np.ndarray, n: int, u: int) -> Fraction:
    """prod_w T_w(u) relative to the node-0 rooting, as an exact rational.

    Re-rooting multiplies the size product by (n - s_v)/s_v across each
    edge of the path 0 -> u, so the key is a short exact product; smaller
    key = larger centrality.
    """
    num = 1
    den = 1
    v = u
    while parent[v] >= 0:
        s = int(size[v])
        num *= n - s
        den *= s
        v = int(parent[v])
    return Fraction(num, den)


def _bfs_exact_key(g: Graph, u: int) -> Fraction:
    """Exact size product of u's BFS tree (general-graph candidates)."""
    sizes, _ = kernels.bfs_sizes(g.indptr, g.adj, u)
    prod = 1
    for s in sizes:
        prod *= int(s)
    return Fraction(prod)


def _resolve_order(logR: np.ndarray, stream: rng.Stream,
                   exact_key) -> tuple[np.ndarray, tuple[int, ...], bool]:
    """Descending ranking; near-equal float scores are re-compared with
    ``exact_key`` and true ties shuffled.  Returns (ranking, centers, unique)."""
    n = len(logR)
    idx = sorted(range(n), key=lambda v: (-logR[v], v))
    ranking: list[int] = []
    centers: tuple[int, ...] = ()
    unique = True
    i = 0
    while i < n:
        # near-tie cluster by chained relative gap
        j = i + 1
        while j < n:
            gap = abs(logR[idx[j]] - logR[idx[j - 1]])
            if gap > _TIE_REL_GAP * max(1.0, abs(logR[idx[j]])):
                break
            j += 1
        cluster = idx[i:j]
        if len(cluster) == 1:
            groups = [cluster]
        else:
            keys = {v: exact_key(v) for v in cluster}
            cluster.sort(key=lambda v: (keys[v], v))
            groups = []
            for v in cluster:
                if groups and keys[groups[-1][0]] == keys[v]:
                    groups[-1].append(v)
                else:
                    groups.append([v])
        for group in groups:
            if not centers:
                centers = tuple(sorted(group))
                unique = len(group) == 1
            if len(group) > 1:
                stream.shuffle(group)
            ranking.extend(group)
        i = j
    return np.array(ranking, dtype=np.int64), centers, unique


def rumor_centrality_tree(g: Graph, rng_seed: int = 0) -> CentralityReport:
    """Score every node of a tree by log rumor centrality."""
    if g.n >= 1 and g.num_edges != g.n - 1:
        raise NotATreeError("rumor_centrality_tree requires a tree")
    logR, parent, order, size = kernels.tree_logcent(g.indptr, g.adj)
    if g.n > 1 and int(np.count_nonzero(parent < 0)) != 1:
        raise NotATreeError("rumor_centrality_tree requires a connected tree")
    stream = rng.Stream(rng.mix(rng_seed, rng.DOMAIN_ESTIMATE))
    n = g.n
    ranking, centers, unique = _resolve_order(
        logR, stream, lambda u: _tree_exact_key(parent, size, n, u))
    return CentralityReport(log_centrality=logR, ranking=ranking, centers=centers,
                            chosen=int(ranking[0]), unique=unique)


def rumor_center(g: Graph) -> tuple[list[int], bool]:
    """Center(s) by the balance rule: every adjacent subtree has at most
    n/2 nodes; unique when all inequalities are strict.

    Agrees with the argmax of the centrality score (cross-checked in the
    test suite); a tree has one or two centers.
    """
    if not is_tree(g):
        raise NotATreeError("rumor_center requires a tree")
    n = g.n
    if n == 1:
        return [0], True
    size = _tree_sizes_rooted_at(g, 0)
    parent = _parents_rooted_at(g, 0)
    centers = []
    all_strict = True
    for v in range(n):
        worst = 0
        for u in g.neighbors(v):
            u = int(u)
            t = n - size[v] if u == parent[v] else size[u]
            if t > worst:
                worst = t
        if 2 * worst <= n:
            centers.append(v)
            if 2 * worst == n:
                all_strict = False
    return centers, all_strict and len(centers) == 1


def _parents_rooted_at(g: Graph, root: int) -> np.ndarray:
    parent = np.full(g.n, -1, dtype=np.int64)
    parent[root] = root
    stack = [root]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if parent[v] < 0:
                parent[v] = u
                stack.append(int(v))
    parent[root] = -1
    return parent


def estimate_source(g: Graph, rng_seed: int = 0) -> tuple[int, CentralityReport]:
    """Estimate the source of an observed rumor graph.

    Trees are scored directly; cyclic graphs score each candidate on its
    own BFS tree.  The chosen node is uniform over the exact argmax set,
    controlled by ``rng_seed``.
    """
    if g.n == 0:
        raise DisconnectedError("empty graph")
    if g.num_edges == g.n - 1:
        # tree path; rumor_centrality_tree rejects a disconnected forest
        report = rumor_centrality_tree(g, rng_seed)
        return report.chosen, report
    if not is_connected(g):
        raise DisconnectedError("estimate_source requires a connected graph")
    logR = kernels.bfs_logcent_all(g.indptr, g.adj)
    stream = rng.Stream(rng.mix(rng_seed, rng.DOMAIN_ESTIMATE))
    ranking, centers, unique = _resolve_order(logR, stream,
                                              lambda u: _bfs_exact_key(g, u))
    report = CentralityReport(log_centrality=logR, ranking=ranking, centers=centers,
                              chosen=int(ranking[0]), unique=unique)
    return report.chosen, report


def brute_force_order_counts(g: Graph) -> list[int]:
    """Number of causality-respecting infection orders from every start node,
    by exhaustive subset dynamic programming (independent of the product
    formula; exponential, for n <= ~16)."""
    if not is_tree(g):
        raise NotATreeError("brute_force_order_counts requires a tree")
    n = g.n
    if n > 20:
        raise ValueError("brute force is exponential; n too large")
    full = (1 << n) - 1
    neighbor_mask = [0] * n
    for v in range(n):
        for u in g.neighbors(v):
            neighbor_mask[v] |= 1 << int(u)
    counts = []
    for start in range(n):
        memo = {full: 1}

        def expand(mask: int) -> int:
            hit = memo.get(mask)
            if hit is not None:
                return hit
            total = 0
            # boundary: uninfected nodes adjacent to the infected set
            cand = 0
            m = mask
            v = 0
            mm = mask
            while mm:
                if mm & 1:
                    cand |= neighbor_mask[v]
                mm >>= 1
                v += 1
            cand &= ~mask & full
            while cand:
                bit = cand & (-cand)
                total += expand(mask | bit)
                cand ^= bit
            memo[mask] = total
            return total

        counts.append(expand(1 << start))
    return counts
