# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of rsl._kernels_py.

Same draw sequences, same (time, node, parent) heap ordering, same
floating-point expression order: a simulation must be byte-identical to
the pure-Python reference (tests/test_kernel_parity.py holds both to it).
Do not enable -ffast-math; IEEE semantics are part of the contract.
"""

import numpy as np

from libc.math cimport exp, log, log1p, pow, sqrt
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc, realloc

from .errors import SimulationCapError

BACKEND = "compiled"

DEF GOLDEN = 0x9E3779B97F4A7C15
DEF MIX1 = 0xBF58476D1CE4B85B
DEF MIX2 = 0x94D049BB133111EB
DEF INV53 = 1.1102230246251565e-16

cdef int EXP_K = 0
cdef int DET_K = 1
cdef int UNIF_K = 2
cdef int GAMMA_K = 3

cdef int OFF_DET = 0
cdef int OFF_POISSON = 1
cdef int OFF_CAT = 2

cdef int STOP_COUNT = 0
cdef int STOP_TIME = 1


# ---------------------------------------------------------------------------
# SplitMix64 stream

cdef struct Rng:
    uint64_t state


cdef inline uint64_t _mix64(uint64_t seed, uint64_t index) nogil:
    cdef uint64_t z = seed + (index + 1) * <uint64_t>GOLDEN
    z = (z ^ (z >> 30)) * <uint64_t>MIX1
    z = (z ^ (z >> 27)) * <uint64_t>MIX2
    return z ^ (z >> 31)


cdef inline double _rand(Rng* r) nogil:
    r.state += <uint64_t>GOLDEN
    cdef uint64_t z = r.state
    z = (z ^ (z >> 30)) * <uint64_t>MIX1
    z = (z ^ (z >> 27)) * <uint64_t>MIX2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV53


cdef inline double _normal(Rng* r) nogil:
    cdef double v1, v2, s
    while True:
        v1 = 2.0 * _rand(r) - 1.0
        v2 = 2.0 * _rand(r) - 1.0
        s = v1 * v1 + v2 * v2
        if 0.0 < s < 1.0:
            return v1 * sqrt(-2.0 * log(s) / s)


cdef double _gamma_var(Rng* r, double shape, double rate) nogil:
    cdef double d, c, x, t, v, u, g
    if shape < 1.0:
        g = _gamma_var(r, shape + 1.0, rate)
        u = _rand(r)
        return g * pow(u, 1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        x = _normal(r)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = _rand(r)
        if u < 1.0 - 0.0331 * (x * x) * (x * x):
            return d * v / rate
        if u > 0.0 and log(u) < 0.5 * x * x + d * (1.0 - v + log(v)):
            return d * v / rate


cdef inline int64_t _poisson(Rng* r, double mean) nogil:
    cdef double limit = exp(-mean)
    cdef int64_t k = 0
    cdef double p = 1.0
    while True:
        p *= _rand(r)
        if p <= limit:
            return k
        k += 1


cdef inline double _sample_delay(int kind, double p0, double p1, Rng* r) nogil:
    cdef double v
    while True:
        if kind == 0:      # exponential
            v = -log1p(-_rand(r)) / p0
        elif kind == 1:    # deterministic
            return p0
        elif kind == 2:    # uniform
            v = p0 + (p1 - p0) * _rand(r)
        else:              # gamma
            v = _gamma_var(r, p0, p1)
        if v > 0.0:
            return v


cdef int64_t _sample_offspring(int kind, double[::1] params, Rng* r) nogil:
    cdef double u, acc
    cdef Py_ssize_t k, m
    if kind == 0:
        return <int64_t>params[0]
    if kind == 1:
        return _poisson(r, params[0])
    u = _rand(r)
    m = params.shape[0]
    for k in range(m):
        if u < params[k]:
            return k
    return m - 1


# ---------------------------------------------------------------------------
# event heap: lexicographic (time, node, parent)

cdef struct Event:
    double t
    int64_t node
    int64_t parent


cdef struct Heap:
    Event* data
    Py_ssize_t size
    Py_ssize_t cap


cdef inline bint _ev_less(Event* a, Event* b) nogil:
    if a.t != b.t:
        return a.t < b.t
    if a.node != b.node:
        return a.node < b.node
    return a.parent < b.parent


cdef inline int _heap_push(Heap* h, double t, int64_t node, int64_t parent) except -1 nogil:
    cdef Event* grown
    cdef Event ev
    cdef Py_ssize_t i, p
    if h.size == h.cap:
        h.cap = h.cap * 2 if h.cap else 1024
        grown = <Event*>realloc(h.data, h.cap * sizeof(Event))
        if grown == NULL:
            with gil:
                raise MemoryError()
        h.data = grown
    ev.t = t
    ev.node = node
    ev.parent = parent
    i = h.size
    h.size += 1
    while i > 0:
        p = (i - 1) >> 1
        if _ev_less(&ev, &h.data[p]):
            h.data[i] = h.data[p]
            i = p
        else:
            break
    h.data[i] = ev
    return 0


cdef inline Event _heap_pop(Heap* h) noexcept nogil:
    cdef Event top = h.data[0]
    cdef Event last = h.data[h.size - 1]
    cdef Py_ssize_t i = 0, child
    h.size -= 1
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and _ev_less(&h.data[child + 1], &h.data[child]):
            child += 1
        if _ev_less(&h.data[child], &last):
            h.data[i] = h.data[child]
            i = child
        else:
            break
    h.data[i] = last
    return top


# ---------------------------------------------------------------------------
# growing int64/float64 record buffers

cdef struct Rec:
    int64_t* nodes
    double* times
    int64_t* parents
    int64_t* extra
    Py_ssize_t size
    Py_ssize_t cap
    bint with_extra


cdef inline int _rec_push(Rec* rec, int64_t node, double t, int64_t parent,
                          int64_t extra) except -1 nogil:
    cdef Py_ssize_t newcap
    if rec.size == rec.cap:
        newcap = rec.cap * 2 if rec.cap else 1024
        with gil:
            rec.nodes = <int64_t*>realloc(rec.nodes, newcap * sizeof(int64_t))
            rec.times = <double*>realloc(rec.times, newcap * sizeof(double))
            rec.parents = <int64_t*>realloc(rec.parents, newcap * sizeof(int64_t))
            if rec.with_extra:
                rec.extra = <int64_t*>realloc(rec.extra, newcap * sizeof(int64_t))
            if (rec.nodes == NULL or rec.times == NULL or rec.parents == NULL
                    or (rec.with_extra and rec.extra == NULL)):
                raise MemoryError()
        rec.cap = newcap
    rec.nodes[rec.size] = node
    rec.times[rec.size] = t
    rec.parents[rec.size] = parent
    if rec.with_extra:
        rec.extra[rec.size] = extra
    rec.size += 1
    return 0


cdef _rec_finish(Rec* rec, Heap* heap):
    """Copy records into numpy arrays and release the C buffers."""
    cdef Py_ssize_t n = rec.size
    nodes = np.empty(n, dtype=np.int64)
    times = np.empty(n, dtype=np.float64)
    parents = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] nv = nodes
    cdef double[::1] tv = times
    cdef int64_t[::1] pv = parents
    cdef Py_ssize_t i
    for i in range(n):
        nv[i] = rec.nodes[i]
        tv[i] = rec.times[i]
        pv[i] = rec.parents[i]
    extra = None
    cdef int64_t[::1] ev
    if rec.with_extra:
        extra = np.empty(n, dtype=np.int64)
        ev = extra
        for i in range(n):
            ev[i] = rec.extra[i]
    free(rec.nodes)
    free(rec.times)
    free(rec.parents)
    if rec.with_extra:
        free(rec.extra)
    if heap != NULL and heap.data != NULL:
        free(heap.data)
    if rec.with_extra:
        return nodes, times, parents, extra
    return nodes, times, parents


# ---------------------------------------------------------------------------
# SI engines


def si_regular(int64_t d, int dist_kind, double p0, double p1, int stop_kind,
               double stop_value, uint64_t seed, int64_t event_cap):
    cdef Rng stream
    stream.state = seed
    cdef Rec rec
    rec.nodes = NULL; rec.times = NULL; rec.parents = NULL; rec.extra = NULL
    rec.size = 0; rec.cap = 0; rec.with_extra = False
    cdef Heap heap
    heap.data = NULL; heap.size = 0; heap.cap = 0
    _rec_push(&rec, 0, 0.0, -1, 0)
    if stop_kind == STOP_COUNT and <int64_t>stop_value == 1:
        return _rec_finish(&rec, &heap)
    cdef int64_t next_id = 1
    cdef int64_t j, pops = 0
    cdef double delay
    cdef Event ev
    for j in range(d):
        delay = _sample_delay(dist_kind, p0, p1, &stream)
        _heap_push(&heap, delay, next_id, 0)
        next_id += 1
    while heap.size > 0:
        ev = _heap_pop(&heap)
        pops += 1
        if pops > event_cap:
            _rec_finish(&rec, &heap)
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == STOP_TIME and ev.t > stop_value:
            break
        _rec_push(&rec, ev.node, ev.t, ev.parent, 0)
        if stop_kind == STOP_COUNT and rec.size >= <int64_t>stop_value:
            break
        for j in range(d - 1):
            delay = _sample_delay(dist_kind, p0, p1, &stream)
            _heap_push(&heap, ev.t + delay, next_id, ev.node)
            next_id += 1
    return _rec_finish(&rec, &heap)


def si_gw(int root_kind, double[::1] root_params, int child_kind,
          double[::1] child_params, uint64_t offspring_key, int dist_kind,
          double p0, double p1, int stop_kind, double stop_value,
          uint64_t seed, int64_t event_cap):
    cdef Rng stream, node_stream
    stream.state = seed
    cdef Rec rec
    rec.nodes = NULL; rec.times = NULL; rec.parents = NULL; rec.extra = NULL
    rec.size = 0; rec.cap = 0; rec.with_extra = True
    cdef Heap heap
    heap.data = NULL; heap.size = 0; heap.cap = 0
    node_stream.state = _mix64(offspring_key, 0)
    cdef int64_t eta = _sample_offspring(root_kind, root_params, &node_stream)
    _rec_push(&rec, 0, 0.0, -1, eta)
    if stop_kind == STOP_COUNT and <int64_t>stop_value == 1:
        return _rec_finish(&rec, &heap)
    cdef int64_t next_id = 1
    cdef int64_t j, pops = 0
    cdef double delay
    cdef Event ev
    for j in range(eta):
        delay = _sample_delay(dist_kind, p0, p1, &stream)
        _heap_push(&heap, delay, next_id, 0)
        next_id += 1
    while heap.size > 0:
        ev = _heap_pop(&heap)
        pops += 1
        if pops > event_cap:
            _rec_finish(&rec, &heap)
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == STOP_TIME and ev.t > stop_value:
            break
        node_stream.state = _mix64(offspring_key, <uint64_t>ev.node)
        eta = _sample_offspring(child_kind, child_params, &node_stream)
        _rec_push(&rec, ev.node, ev.t, ev.parent, eta)
        if stop_kind == STOP_COUNT and rec.size >= <int64_t>stop_value:
            break
        for j in range(eta):
            delay = _sample_delay(dist_kind, p0, p1, &stream)
            _heap_push(&heap, ev.t + delay, next_id, ev.node)
            next_id += 1
    return _rec_finish(&rec, &heap)


def si_graph(int64_t[::1] indptr, int64_t[::1] adj, int64_t source,
             int dist_kind, double p0, double p1, int stop_kind,
             double stop_value, uint64_t seed, int64_t event_cap):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Rng stream
    stream.state = seed
    infected_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] infected = infected_arr
    infected[source] = 1
    cdef Rec rec
    rec.nodes = NULL; rec.times = NULL; rec.parents = NULL; rec.extra = NULL
    rec.size = 0; rec.cap = 0; rec.with_extra = False
    cdef Heap heap
    heap.data = NULL; heap.size = 0; heap.cap = 0
    _rec_push(&rec, source, 0.0, -1, 0)
    if stop_kind == STOP_COUNT and <int64_t>stop_value == 1:
        return _rec_finish(&rec, &heap)
    cdef int64_t j, u, pops = 0
    cdef double delay
    cdef Event ev
    for j in range(indptr[source], indptr[source + 1]):
        u = adj[j]
        if not infected[u]:
            delay = _sample_delay(dist_kind, p0, p1, &stream)
            _heap_push(&heap, delay, u, source)
    while heap.size > 0:
        ev = _heap_pop(&heap)
        pops += 1
        if pops > event_cap:
            _rec_finish(&rec, &heap)
            raise SimulationCapError(f"event cap {event_cap} exceeded")
        if stop_kind == STOP_TIME and ev.t > stop_value:
            break
        if infected[ev.node]:
            continue
        infected[ev.node] = 1
        _rec_push(&rec, ev.node, ev.t, ev.parent, 0)
        if stop_kind == STOP_COUNT and rec.size >= <int64_t>stop_value:
            break
        for j in range(indptr[ev.node], indptr[ev.node + 1]):
            u = adj[j]
            if not infected[u]:
                delay = _sample_delay(dist_kind, p0, p1, &stream)
                _heap_push(&heap, ev.t + delay, u, ev.node)
    return _rec_finish(&rec, &heap)


# ---------------------------------------------------------------------------
# centrality kernels


cdef double _log_factorial(Py_ssize_t n) noexcept nogil:
    # explicit Kahan-compensated sum, mirroring the pure backend (libm
    # lgamma and CPython's math.lgamma disagree by an ulp on some inputs)
    cdef double total = 0.0, comp = 0.0, y, t
    cdef Py_ssize_t k
    for k in range(2, n + 1):
        y = log(<double>k) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def tree_logcent(int64_t[::1] indptr, int64_t[::1] adj):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    parent = np.full(n, -1, dtype=np.int64)
    order = np.zeros(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    logR = np.zeros(n, dtype=np.float64)
    cdef int64_t[::1] par = parent
    cdef int64_t[::1] orderv = order
    cdef int64_t[::1] sz = size
    cdef double[::1] lr = logR
    if n == 1:
        return logR, parent, order, size
    cdef Py_ssize_t head = 0, tail = 1
    cdef int64_t u, v
    cdef Py_ssize_t i, j
    par[0] = 0
    while head < tail:
        u = orderv[head]
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = adj[j]
            if par[v] < 0:
                par[v] = u
                orderv[tail] = v
                tail += 1
    par[0] = -1
    # compensated accumulation, in lockstep with the pure backend
    cdef double root_log = _log_factorial(n)
    cdef double comp0 = 0.0, y, t
    for i in range(n - 1, 0, -1):
        v = orderv[i]
        sz[par[v]] += sz[v]
        y = -log(<double>sz[v]) - comp0
        t = root_log + y
        comp0 = (t - root_log) - y
        root_log = t
    y = -log(<double>n) - comp0
    t = root_log + y
    comp0 = (t - root_log) - y
    lr[0] = t
    comp_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] comp = comp_arr
    comp[0] = comp0
    cdef int64_t s, p
    for i in range(1, n):
        v = orderv[i]
        p = par[v]
        s = sz[v]
        y = (log(<double>s) - log(<double>(n - s))) - comp[p]
        t = lr[p] + y
        comp[v] = (t - lr[p]) - y
        lr[v] = t
    return logR, parent, order, size


def bfs_logcent_all(int64_t[::1] indptr, int64_t[::1] adj):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    logR = np.zeros(n, dtype=np.float64)
    cdef double[::1] lr = logR
    if n == 1:
        return logR
    cdef double lognfact = _log_factorial(n)
    dist_arr = np.empty(n, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    size_arr = np.empty(n, dtype=np.int64)
    bparent_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] order = order_arr
    cdef int64_t[::1] size = size_arr
    cdef int64_t[::1] bparent = bparent_arr
    cdef Py_ssize_t root, head, tail, i, j
    cdef int64_t u, v, best
    cdef double total
    for root in range(n):
        for i in range(n):
            dist[i] = -1
        dist[root] = 0
        order[0] = root
        bparent[root] = -1
        head = 0
        tail = 1
        while head < tail:
            u = order[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                v = adj[j]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    bparent[v] = u
                    order[tail] = v
                    tail += 1
        for i in range(1, n):
            v = order[i]
            best = bparent[v]
            for j in range(indptr[v], indptr[v + 1]):
                u = adj[j]
                if dist[u] == dist[v] - 1 and u < best:
                    best = u
            bparent[v] = best
        for i in range(n):
            size[i] = 1
        total = lognfact - log(<double>n)
        for i in range(n - 1, 0, -1):
            v = order[i]
            size[bparent[v]] += size[v]
            total -= log(<double>size[v])
        lr[root] = total
    return logR


def bfs_sizes(int64_t[::1] indptr, int64_t[::1] adj, int64_t root):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    bparent_arr = np.full(n, -1, dtype=np.int64)
    size_arr = np.ones(n, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] order = order_arr
    cdef int64_t[::1] bparent = bparent_arr
    cdef int64_t[::1] size = size_arr
    cdef Py_ssize_t head = 0, tail = 1, i, j
    cdef int64_t u, v, best
    dist[root] = 0
    order[0] = root
    while head < tail:
        u = order[head]
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = adj[j]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                bparent[v] = u
                order[tail] = v
                tail += 1
    for i in range(1, n):
        v = order[i]
        best = bparent[v]
        for j in range(indptr[v], indptr[v + 1]):
            u = adj[j]
            if dist[u] == dist[v] - 1 and u < best:
                best = u
        bparent[v] = best
    for i in range(n - 1, 0, -1):
        v = order[i]
        size[bparent[v]] += size[v]
    return size_arr, bparent_arr


# ---------------------------------------------------------------------------
# oracle kernels


def polya_fractions(int64_t type1, int64_t type2, int64_t add, int64_t steps,
                    int64_t runs, uint64_t master_seed):
    out = np.empty(runs, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Rng stream
    cdef int64_t r, s
    cdef double a, b
    for r in range(runs):
        stream.state = _mix64(master_seed, <uint64_t>r)
        a = <double>type1
        b = <double>type2
        for s in range(steps):
            if _rand(&stream) * (a + b) < a:
                a += add
            else:
                b += add
        ov[r] = a / (a + b)
    return out


def branching_counts(int off_kind, double[::1] off_params, int dist_kind,
                     double p0, double p1, double[::1] sample_times,
                     uint64_t seed, int64_t event_cap):
    cdef Rng stream
    stream.state = seed
    cdef Heap heap
    heap.data = NULL; heap.size = 0; heap.cap = 0
    cdef int64_t birth_seq = 0
    cdef double first = _sample_delay(dist_kind, p0, p1, &stream)
    _heap_push(&heap, first, birth_seq, 0)
    birth_seq += 1
    cdef int64_t alive = 1
    cdef Py_ssize_t nt = sample_times.shape[0]
    counts = np.zeros(nt, dtype=np.int64)
    cdef int64_t[::1] cv = counts
    cdef Py_ssize_t si = 0
    cdef int64_t pops = 0, eta, j
    cdef bint truncated = False
    cdef Event ev
    cdef double t, delay
    while heap.size > 0:
        t = heap.data[0].t
        while si < nt and sample_times[si] < t:
            cv[si] = alive
            si += 1
        if si >= nt:
            break
        ev = _heap_pop(&heap)
        pops += 1
        if pops > event_cap:
            truncated = True
            break
        eta = _sample_offspring(off_kind, off_params, &stream)
        alive += eta - 1
        for j in range(eta):
            delay = _sample_delay(dist_kind, p0, p1, &stream)
            _heap_push(&heap, ev.t + delay, birth_seq, 0)
            birth_seq += 1
    if not truncated:
        while si < nt:
            cv[si] = alive
            si += 1
    if heap.data != NULL:
        free(heap.data)
    return counts, truncated


def renewal_count(int dist_kind, double p0, double p1, double t, uint64_t seed):
    cdef Rng stream
    stream.state = seed
    cdef double acc = 0.0
    cdef int64_t count = 0
    while True:
        acc += _sample_delay(dist_kind, p0, p1, &stream)
        if acc > t:
            return count
        count += 1
