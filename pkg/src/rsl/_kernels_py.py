"""Pure-Python reference implementations of the hot kernels.

The compiled module (``rsl._ckern``) mirrors every function here with the
same draw sequence, the same (time, node, parent) heap ordering and the
same floating-point expression order, so results are identical bit for bit
across backends.  Keep the two files in lockstep: any semantic change here
must land in ``_ckern.pyx`` too (``tests/test_kernel_parity.py`` enforces
agreement).
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import SimulationCapError
from .rng import Stream, mix

BACKEND = "python"

# delay kinds (mirror of rsl.spreading constants; kernels avoid that import)
_EXP = 0
_DET = 1
_UNIF = 2
_GAMMA = 3

_STOP_COUNT = 0
_STOP_TIME = 1

# offspring kinds (mirror of rsl.generators constants)
_OFF_DET = 0
_OFF_POISSON = 1
_OFF_CAT = 2


def _sample_delay(kind: int, p0: float, p1: float, stream: Stream) -> float:
    while True:
        if kind == _EXP:
            v = stream.exponential(p0)
        elif kind == _DET:
            return p0
        elif kind == _UNIF:
            v = p0 + (p1 - p0) * stream.random()
        else:
            v = stream.gamma(p0, p1)
        if v > 0.0:
            return v


def _sample_offspring(kind: int, params: np.ndarray, stream: Stream) -> int:
    if kind == _OFF_DET:
        return int(params[0])
    if kind == _OFF_POISSON:
        return stream.poisson(float(params[0]))
    # categorical over {0..K}: params holds the cumulative probabilities
    u = stream.random()
    for k in range(len(params)):
        if u < params[k]:
            return k
    return len(params) - 1


def _log_factorial(n: int) -> float:
    """log(n!) as an explicit compensated sum.

    Not math.lgamma: that is CPython's own implementation and disagrees
    with libm's lgamma by an ulp on some inputs, which would break
    bit-parity with the compiled backend.  Kahan compensation keeps the
    result within an ulp or two even at n ~ 1e5.
    """
    total = 0.0
    comp = 0.0
    for k in range(2, n + 1):
        y = math.log(k) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _pack_history(nodes, times, parents):
    return (np.array(nodes, dtype=np.int64),
            np.array(times, dtype=np.float64),
            np.array(parents, dtype=np.int64))


def si_regular(d, dist_kind, p0, p1, stop_kind, stop_value, seed, event_cap):
    """SI spreading from the root of the (lazily materialized) d-regular tree.

    Node ids are assigned in materialization order: the root is 0 and a
    node's children receive consecutive ids when it gets infected.
    """
    stream = Stream(seed)
    nodes = [0]
    times = [0.0]
    parents = [-1]
    if stop_kind == _STOP_COUNT and int(stop_value) == 1:
        return _pack_history(nodes, times, parents)
    heap = []
    next_id = 1
    for _ in range(d):
        delay = _sample_delay(dist_kind, p0, p1, stream)
        heapq.heappush(heap, (delay, next_id, 0))
        next_id += 1
    pops = 0
    while heap:
        t, v, parent = heapq.heappop(heap)
        pops += 1
        if pops > event_cap:
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == _STOP_TIME and t > stop_value:
            break
        nodes.append(v)
        times.append(t)
        parents.append(parent)
        if stop_kind == _STOP_COUNT and len(nodes) >= int(stop_value):
            break
        for _ in range(d - 1):
            delay = _sample_delay(dist_kind, p0, p1, stream)
            heapq.heappush(heap, (t + delay, next_id, v))
            next_id += 1
    return _pack_history(nodes, times, parents)


def si_gw(root_kind, root_params, child_kind, child_params, offspring_key,
          dist_kind, p0, p1, stop_kind, stop_value, seed, event_cap):
    """SI spreading from the root of a Galton-Watson tree.

    Offspring counts are drawn from per-node streams keyed by
    ``mix(offspring_key, node_id)`` so the tree is a deterministic function
    of the generator seed regardless of traversal order.
    """
    stream = Stream(seed)
    nodes = [0]
    times = [0.0]
    parents = [-1]
    eta0 = _sample_offspring(root_kind, root_params, Stream(mix(offspring_key, 0)))
    offspring = [eta0]
    if stop_kind == _STOP_COUNT and int(stop_value) == 1:
        packed = _pack_history(nodes, times, parents)
        return packed + (np.array(offspring, dtype=np.int64),)
    heap = []
    next_id = 1
    for _ in range(eta0):
        delay = _sample_delay(dist_kind, p0, p1, stream)
        heapq.heappush(heap, (delay, next_id, 0))
        next_id += 1
    pops = 0
    while heap:
        t, v, parent = heapq.heappop(heap)
        pops += 1
        if pops > event_cap:
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == _STOP_TIME and t > stop_value:
            break
        eta = _sample_offspring(child_kind, child_params, Stream(mix(offspring_key, v)))
        nodes.append(v)
        times.append(t)
        parents.append(parent)
        offspring.append(eta)
        if stop_kind == _STOP_COUNT and len(nodes) >= int(stop_value):
            break
        for _ in range(eta):
            delay = _sample_delay(dist_kind, p0, p1, stream)
            heapq.heappush(heap, (t + delay, next_id, v))
            next_id += 1
    packed = _pack_history(nodes, times, parents)
    return packed + (np.array(offspring, dtype=np.int64),)


def si_graph(indptr, adj, source, dist_kind, p0, p1, stop_kind, stop_value,
             seed, event_cap):
    """SI spreading on an explicit graph in CSR form."""
    n = len(indptr) - 1
    stream = Stream(seed)
    infected = np.zeros(n, dtype=bool)
    infected[source] = True
    nodes = [source]
    times = [0.0]
    parents = [-1]
    if stop_kind == _STOP_COUNT and int(stop_value) == 1:
        return _pack_history(nodes, times, parents)
    heap = []

    def push_neighbors(v, t):
        for j in range(indptr[v], indptr[v + 1]):
            u = int(adj[j])
            if not infected[u]:
                delay = _sample_delay(dist_kind, p0, p1, stream)
                heapq.heappush(heap, (t + delay, u, v))

    push_neighbors(source, 0.0)
    pops = 0
    while heap:
        t, v, parent = heapq.heappop(heap)
        pops += 1
        if pops > event_cap:
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == _STOP_TIME and t > stop_value:
            break
        if infected[v]:
            continue
        infected[v] = True
        nodes.append(v)
        times.append(t)
        parents.append(parent)
        if stop_kind == _STOP_COUNT and len(nodes) >= int(stop_value):
            break
        push_neighbors(v, t)
    return _pack_history(nodes, times, parents)


def tree_logcent(indptr, adj):
    """Log rumor centrality of every node of a tree.

    Two passes: root the tree at node 0 and apply
    log R(0) = log n! - sum_w log T_w, then re-root across each edge with
    log R(child) = log R(parent) + log(s_child) - log(n - s_child).
    Returns (logR, parent, order, subtree_size) with the latter three taken
    from the rooting at node 0, which the caller uses for exact tie checks.
    """
    n = len(indptr) - 1
    parent = np.full(n, -1, dtype=np.int64)
    order = np.zeros(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    logR = np.zeros(n, dtype=np.float64)
    if n == 1:
        return logR, parent, order, size
    parent[0] = 0
    head, tail = 0, 1
    while head < tail:
        u = int(order[head])
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = int(adj[j])
            if parent[v] < 0:
                parent[v] = u
                order[tail] = v
                tail += 1
    parent[0] = -1
    # compensated accumulation throughout: at n ~ 1e5 the raw sums reach 1e6
    # and plain float addition would smear ~1e-6 of noise over the scores
    root_log = _log_factorial(n)
    comp0 = 0.0
    for i in range(n - 1, 0, -1):
        v = int(order[i])
        size[parent[v]] += size[v]
        y = -math.log(size[v]) - comp0
        t = root_log + y
        comp0 = (t - root_log) - y
        root_log = t
    y = -math.log(n) - comp0  # subtree at the root itself
    t = root_log + y
    comp0 = (t - root_log) - y
    logR[0] = t
    comp = np.zeros(n, dtype=np.float64)
    comp[0] = comp0
    for i in range(1, n):
        v = int(order[i])
        p = int(parent[v])
        s = size[v]
        y = (math.log(s) - math.log(n - s)) - comp[p]
        t = logR[p] + y
        comp[v] = (t - logR[p]) - y
        logR[v] = t
    return logR, parent, order, size


def bfs_logcent_all(indptr, adj):
    """Log rumor centrality of every candidate root of a connected graph,
    each evaluated on its own deterministic BFS tree (quadratic path)."""
    n = len(indptr) - 1
    logR = np.zeros(n, dtype=np.float64)
    if n == 1:
        return logR
    lognfact = _log_factorial(n)
    dist = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    size = np.empty(n, dtype=np.int64)
    bparent = np.empty(n, dtype=np.int64)
    for root in range(n):
        dist.fill(-1)
        dist[root] = 0
        order[0] = root
        bparent[root] = -1
        head, tail = 0, 1
        while head < tail:
            u = int(order[head])
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                v = int(adj[j])
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    bparent[v] = u
                    order[tail] = v
                    tail += 1
        # smallest-id parent in the previous layer (BFS discovery order
        # already yields it because neighbor lists are sorted, but double
        # layers reached via unequal ids need the explicit minimum)
        for i in range(1, n):
            v = int(order[i])
            best = bparent[v]
            for j in range(indptr[v], indptr[v + 1]):
                u = int(adj[j])
                if dist[u] == dist[v] - 1 and u < best:
                    best = u
            bparent[v] = best
        size.fill(1)
        total = lognfact - math.log(n)
        for i in range(n - 1, 0, -1):
            v = int(order[i])
            size[bparent[v]] += size[v]
            total -= math.log(size[v])
        logR[root] = total
    return logR


def bfs_sizes(indptr, adj, root):
    """Subtree sizes of the deterministic BFS tree rooted at ``root``
    (exact-arithmetic companion to :func:`bfs_logcent_all`)."""
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    bparent = np.full(n, -1, dtype=np.int64)
    dist[root] = 0
    order[0] = root
    head, tail = 0, 1
    while head < tail:
        u = int(order[head])
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = int(adj[j])
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                bparent[v] = u
                order[tail] = v
                tail += 1
    for i in range(1, n):
        v = int(order[i])
        best = bparent[v]
        for j in range(indptr[v], indptr[v + 1]):
            u = int(adj[j])
            if dist[u] == dist[v] - 1 and u < best:
                best = u
        bparent[v] = best
    size = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        size[bparent[order[i]]] += size[order[i]]
    return size, bparent


def polya_fractions(type1, type2, add, steps, runs, master_seed):
    """Final type-1 fractions of ``runs`` independent draw-and-reinforce urns."""
    out = np.empty(runs, dtype=np.float64)
    for r in range(runs):
        stream = Stream(mix(master_seed, r))
        a = float(type1)
        b = float(type2)
        for _ in range(steps):
            if stream.random() * (a + b) < a:
                a += add
            else:
                b += add
        out[r] = a / (a + b)
    return out


def branching_counts(off_kind, off_params, dist_kind, p0, p1, sample_times,
                     seed, event_cap):
    """Population of a continuous-time branching process at given times.

    Every individual lives for one delay draw and is replaced by an
    offspring-draw of children at death.  Returns (counts, truncated);
    counts are right-continuous (deaths at exactly a sample time included).
    """
    stream = Stream(seed)
    heap = []
    birth_seq = 0
    first = _sample_delay(dist_kind, p0, p1, stream)
    heapq.heappush(heap, (first, birth_seq))
    birth_seq += 1
    alive = 1
    counts = np.zeros(len(sample_times), dtype=np.int64)
    si = 0
    nt = len(sample_times)
    pops = 0
    truncated = False
    while heap:
        t, _ = heap[0]
        while si < nt and sample_times[si] < t:
            counts[si] = alive
            si += 1
        if si >= nt:
            break
        heapq.heappop(heap)
        pops += 1
        if pops > event_cap:
            truncated = True
            break
        eta = _sample_offspring(off_kind, off_params, stream)
        alive += eta - 1
        for _ in range(eta):
            delay = _sample_delay(dist_kind, p0, p1, stream)
            heapq.heappush(heap, (t + delay, birth_seq))
            birth_seq += 1
    if not truncated:
        while si < nt:
            counts[si] = alive
            si += 1
    return counts, truncated


def renewal_count(dist_kind, p0, p1, t, seed):
    """Number of renewals by time ``t`` with i.i.d. holding times."""
    stream = Stream(seed)
    acc = 0.0
    count = 0
    while True:
        acc += _sample_delay(dist_kind, p0, p1, stream)
        if acc > t:
            return count
        count += 1
