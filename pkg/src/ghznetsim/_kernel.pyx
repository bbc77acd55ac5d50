# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled trial engine.

Mirrors the pure-Python engine trajectory for trajectory: identical
uniform-stream consumption (one draw per edge per slot, edge-index order),
identical tie-breaking in every routing step. Any observable divergence
from ``_engine_py`` is a bug; the parity suite enforces this.

Uniform draws are fetched from the numpy Generator in fixed-size chunks,
which leaves the consumed stream identical to per-slot draws.
"""

import numpy as np

from .errors import ProtocolLogicError

NAME = "compiled"

SP, SP_TREE, MP_GPLUS, MP_C, MP_P = range(5)

cdef int _CHUNK = 128

cdef signed char ABSENT = 0
cdef signed char PRESENT = 1
cdef signed char CONSUMED = 2
cdef signed char MEMORY = 3

cdef long long INFL = <long long> 1 << 60
cdef double INFD = float("inf")


# ---------------------------------------------------------------------------
# link-state advance
# ---------------------------------------------------------------------------

cdef inline void _advance(signed char[::1] status, int[::1] age, int qc,
                          const double[:] draws, const double[::1] pe, int m) noexcept:
    cdef int e
    cdef signed char st
    for e in range(m):
        st = status[e]
        if st == PRESENT:
            age[e] += 1
            if qc > 0 and age[e] >= qc:
                st = ABSENT
        elif st == CONSUMED:
            st = ABSENT
        if st == ABSENT and draws[e] < pe[e]:
            st = PRESENT
            age[e] = 0
        status[e] = st


# ---------------------------------------------------------------------------
# union-find connectivity
# ---------------------------------------------------------------------------

cdef inline int _find(int[::1] parent, int x) noexcept:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef bint _terminals_connected(const signed char[::1] status, const int[::1] eu,
                               const int[::1] ev, int[::1] parent, int n, int m,
                               const int[::1] users, int k) noexcept:
    cdef int v, e, ru, rv, root
    for v in range(n):
        parent[v] = v
    for e in range(m):
        if status[e] == PRESENT:
            ru = _find(parent, eu[e])
            rv = _find(parent, ev[e])
            if ru != rv:
                parent[ru] = rv
    root = _find(parent, users[0])
    for v in range(1, k):
        if _find(parent, users[v]) != root:
            return False
    return True


# ---------------------------------------------------------------------------
# (key, node) binary heap
# ---------------------------------------------------------------------------

cdef inline void _heap_push(long long[::1] hk, int[::1] hn, int* size,
                            long long key, int node) noexcept:
    cdef int i = size[0]
    cdef int p
    cdef long long tk
    cdef int tn
    hk[i] = key
    hn[i] = node
    size[0] = i + 1
    while i > 0:
        p = (i - 1) >> 1
        if hk[p] > hk[i] or (hk[p] == hk[i] and hn[p] > hn[i]):
            tk = hk[p]; hk[p] = hk[i]; hk[i] = tk
            tn = hn[p]; hn[p] = hn[i]; hn[i] = tn
            i = p
        else:
            break


cdef inline void _heap_pop(long long[::1] hk, int[::1] hn, int* size,
                           long long* key, int* node) noexcept:
    cdef int i = 0, c
    cdef long long tk
    cdef int tn
    key[0] = hk[0]
    node[0] = hn[0]
    size[0] -= 1
    cdef int last = size[0]
    hk[0] = hk[last]
    hn[0] = hn[last]
    while True:
        c = 2 * i + 1
        if c >= last:
            break
        if c + 1 < last and (hk[c + 1] < hk[c] or (hk[c + 1] == hk[c] and hn[c + 1] < hn[c])):
            c += 1
        if hk[c] < hk[i] or (hk[c] == hk[i] and hn[c] < hn[i]):
            tk = hk[c]; hk[c] = hk[i]; hk[i] = tk
            tn = hn[c]; hn[c] = hn[i]; hn[i] = tn
            i = c
        else:
            break


# ---------------------------------------------------------------------------
# Steiner trees (exact subset DP for <= 5 terminals, metric heuristic above)
# ---------------------------------------------------------------------------

cdef int _steiner_exact(const signed char[::1] status, const int[::1] eu, const int[::1] ev,
                        const int[::1] indptr, const int[::1] nbr, const int[::1] eidv,
                        int n, int m, const int[::1] terms, int k,
                        const signed char[::1] isterm,
                        long long[::1] dp, signed char[::1] chtype, int[::1] cha,
                        int[::1] che, long long[::1] hk, int[::1] hn,
                        int[::1] smask, int[::1] snode, signed char[::1] tmask,
                        int[::1] out):
    """Optimal (edges, terminal-degree) tree; edge ids into out. -1 if none."""
    cdef long long big = 2 * n + 5
    cdef int nmask = 1 << (k - 1)
    cdef int mask, v, u, sub, rest, i, idx, eid, root, heapsize, count
    cdef long long cand, d, nd, w
    cdef long long* dprow
    for mask in range(nmask):
        for v in range(n):
            dp[mask * n + v] = INFL
            chtype[mask * n + v] = 0
    for mask in range(1, nmask):
        if mask & (mask - 1) == 0:
            i = 0
            while (1 << i) != mask:
                i += 1
            dp[mask * n + terms[i + 1]] = 0
        else:
            sub = (mask - 1) & mask
            while sub:
                rest = mask ^ sub
                if sub < rest:
                    for v in range(n):
                        if dp[sub * n + v] < INFL and dp[rest * n + v] < INFL:
                            cand = dp[sub * n + v] + dp[rest * n + v]
                            if cand < dp[mask * n + v]:
                                dp[mask * n + v] = cand
                                chtype[mask * n + v] = 2
                                cha[mask * n + v] = sub
                sub = (sub - 1) & mask
        heapsize = 0
        for v in range(n):
            if dp[mask * n + v] < INFL:
                _heap_push(hk, hn, &heapsize, dp[mask * n + v], v)
        while heapsize > 0:
            _heap_pop(hk, hn, &heapsize, &d, &u)
            if d > dp[mask * n + u]:
                continue
            for idx in range(indptr[u], indptr[u + 1]):
                eid = eidv[idx]
                if status[eid] != PRESENT:
                    continue
                v = nbr[idx]
                w = big + isterm[eu[eid]] + isterm[ev[eid]]
                nd = d + w
                if nd < dp[mask * n + v]:
                    dp[mask * n + v] = nd
                    chtype[mask * n + v] = 1
                    cha[mask * n + v] = u
                    che[mask * n + v] = eid
                    _heap_push(hk, hn, &heapsize, nd, v)
    root = terms[0]
    if dp[(nmask - 1) * n + root] >= INFL:
        return -1
    # reconstruct
    cdef int sp = 0
    smask[0] = nmask - 1
    snode[0] = root
    sp = 1
    count = 0
    for i in range(m):
        tmask[i] = 0
    while sp > 0:
        sp -= 1
        mask = smask[sp]
        v = snode[sp]
        if chtype[mask * n + v] == 0:
            continue
        if chtype[mask * n + v] == 1:
            eid = che[mask * n + v]
            if not tmask[eid]:
                tmask[eid] = 1
                out[count] = eid
                count += 1
            smask[sp] = mask
            snode[sp] = cha[mask * n + v]
            sp += 1
        else:
            sub = cha[mask * n + v]
            smask[sp] = sub
            snode[sp] = v
            sp += 1
            smask[sp] = mask ^ sub
            snode[sp] = v
            sp += 1
    return count


cdef int _steiner_kmb(const signed char[::1] status, const int[::1] eu, const int[::1] ev,
                      const int[::1] indptr, const int[::1] nbr, const int[::1] eidv,
                      int n, int m, const int[::1] terms, int k,
                      const signed char[::1] isterm,
                      long long[::1] kdist, int[::1] kpe, int[::1] kpn,
                      long long[::1] hk, int[::1] hn, int[::1] parent,
                      signed char[::1] tmask, signed char[::1] nodemask,
                      int[::1] degree, int[::1] out):
    """Metric-closure heuristic over encoded weights; mirrors the Python one."""
    cdef long long big = 2 * n + 5
    cdef int ti, tj, v, u, idx, eid, heapsize, node, a, b, ru, rv, taken, inc
    cdef long long d, nd, w
    cdef int npairs = k * (k - 1) // 2
    # per-terminal Dijkstra
    for ti in range(k):
        for v in range(n):
            kdist[ti * n + v] = INFL
        kdist[ti * n + terms[ti]] = 0
        heapsize = 0
        _heap_push(hk, hn, &heapsize, 0, terms[ti])
        while heapsize > 0:
            _heap_pop(hk, hn, &heapsize, &d, &u)
            if d > kdist[ti * n + u]:
                continue
            for idx in range(indptr[u], indptr[u + 1]):
                eid = eidv[idx]
                if status[eid] != PRESENT:
                    continue
                v = nbr[idx]
                w = big + isterm[eu[eid]] + isterm[ev[eid]]
                nd = d + w
                if nd < kdist[ti * n + v]:
                    kdist[ti * n + v] = nd
                    kpe[ti * n + v] = eid
                    kpn[ti * n + v] = u
                    _heap_push(hk, hn, &heapsize, nd, v)
    # pair list sorted by (distance, terminal a, terminal b)
    pair_d = np.empty(npairs, dtype=np.int64)
    pair_a = np.empty(npairs, dtype=np.int32)
    pair_b = np.empty(npairs, dtype=np.int32)
    cdef long long[::1] pd = pair_d
    cdef int[::1] pa = pair_a
    cdef int[::1] pb = pair_b
    idx = 0
    for ti in range(k):
        for tj in range(ti + 1, k):
            d = kdist[ti * n + terms[tj]]
            if d >= INFL:
                return -1
            pd[idx] = d
            pa[idx] = ti
            pb[idx] = tj
            idx += 1
    order_obj = np.lexsort((pair_b, pair_a, pair_d))
    cdef long[:] order = order_obj
    # Kruskal over terminal pairs; expand chosen pairs through parent chains
    for v in range(n):
        parent[v] = v
        nodemask[v] = 0
        degree[v] = 0
    for eid in range(m):
        tmask[eid] = 0
    for ti in range(k):
        nodemask[terms[ti]] = 1
    taken = 0
    for idx in range(npairs):
        ti = pa[order[idx]]
        tj = pb[order[idx]]
        a = terms[ti]
        b = terms[tj]
        ru = _find(parent, a)
        rv = _find(parent, b)
        if ru == rv:
            continue
        parent[ru] = rv
        taken += 1
        node = b
        while node != a:
            tmask[kpe[ti * n + node]] = 1
            nodemask[node] = 1
            node = kpn[ti * n + node]
        if taken == k - 1:
            break
    # re-span the induced subgraph, cheapest encoded weight first
    for v in range(n):
        parent[v] = v
    cdef int count = 0
    for inc in range(3):
        for eid in range(m):
            if status[eid] != PRESENT:
                continue
            if not (nodemask[eu[eid]] and nodemask[ev[eid]]):
                continue
            if isterm[eu[eid]] + isterm[ev[eid]] != inc:
                continue
            ru = _find(parent, eu[eid])
            rv = _find(parent, ev[eid])
            if ru != rv:
                parent[ru] = rv
                out[count] = eid
                count += 1
    # prune non-terminal leaves (out holds the spanning tree so far)
    for eid in range(m):
        tmask[eid] = 0
    for idx in range(count):
        tmask[out[idx]] = 1
        degree[eu[out[idx]]] += 1
        degree[ev[out[idx]]] += 1
    cdef bint changed = True
    cdef int x
    while changed:
        changed = False
        for x in range(n):
            if degree[x] == 1 and not isterm[x]:
                for idx in range(indptr[x], indptr[x + 1]):
                    eid = eidv[idx]
                    if tmask[eid]:
                        tmask[eid] = 0
                        degree[eu[eid]] -= 1
                        degree[ev[eid]] -= 1
                        changed = True
                        break
    count = 0
    for eid in range(m):
        if tmask[eid]:
            out[count] = eid
            count += 1
    return count


# ---------------------------------------------------------------------------
# successive-shortest-path flow for the greedy multipath protocol
# ---------------------------------------------------------------------------

cdef int _flow_slot(signed char[::1] status, const int[::1] eu, const int[::1] ev,
                    int n, int m, int centre, const int[::1] unserved, int nu,
                    int[::1] asrc, int[::1] adst, signed char[::1] acap,
                    double[::1] acost, short[::1] aflow,
                    double[::1] dist, int[::1] pred, int[::1] pbuf,
                    int[::1] served_out, int[::1] cq_edge, int[::1] cq_user,
                    int* cq_count) except -1:
    """One slot of centre-to-users routing: max served users, then fewest
    edges. Consumes the served paths in place. Returns served count."""
    cdef int aphys = 4 * m
    cdef int e, a, j, it, cur, amin, plen, t, total
    cdef bint usable, improved
    cdef double nd
    for e in range(m):
        usable = status[e] == PRESENT
        a = 4 * e
        asrc[a] = eu[e]; adst[a] = ev[e]; acap[a] = 1 if usable else 0; acost[a] = 1.0
        asrc[a + 1] = ev[e]; adst[a + 1] = eu[e]; acap[a + 1] = 0; acost[a + 1] = -1.0
        asrc[a + 2] = ev[e]; adst[a + 2] = eu[e]; acap[a + 2] = 1 if usable else 0
        acost[a + 2] = 1.0
        asrc[a + 3] = eu[e]; adst[a + 3] = ev[e]; acap[a + 3] = 0; acost[a + 3] = -1.0
    cdef int na = aphys
    for j in range(nu):
        asrc[na] = unserved[j]; adst[na] = n; acap[na] = 1; acost[na] = 0.0
        na += 1
        asrc[na] = n; adst[na] = unserved[j]; acap[na] = 0; acost[na] = 0.0
        na += 1
    for a in range(na):
        aflow[a] = 0
    # successive shortest augmenting paths (Bellman-Ford, arcs in order)
    while True:
        for t in range(n + 1):
            dist[t] = INFD
            pred[t] = -1
        dist[centre] = 0.0
        for it in range(n + 2):
            improved = False
            for a in range(na):
                if acap[a] - aflow[a] <= 0:
                    continue
                if dist[asrc[a]] == INFD:
                    continue
                nd = dist[asrc[a]] + acost[a]
                if nd < dist[adst[a]]:
                    dist[adst[a]] = nd
                    pred[adst[a]] = a
                    improved = True
            if not improved:
                break
        if dist[n] == INFD:
            break
        cur = n
        while cur != centre:
            a = pred[cur]
            aflow[a] += 1
            aflow[a ^ 1] -= 1
            cur = asrc[a]
    # decompose and consume
    total = 0
    for j in range(nu):
        if aflow[aphys + 2 * j] <= 0:
            continue
        cur = unserved[j]
        plen = 0
        while cur != centre:
            amin = -1
            for a in range(0, aphys, 2):
                if adst[a] == cur and aflow[a] > 0:
                    amin = a
                    break
            if amin < 0:
                raise ProtocolLogicError("flow decomposition lost conservation")
            aflow[amin] -= 1
            pbuf[plen] = amin // 4
            plen += 1
            cur = asrc[amin]
        for t in range(plen):
            if status[pbuf[t]] != PRESENT:
                raise ProtocolLogicError("routing selected a non-present link")
            status[pbuf[t]] = CONSUMED
        status[pbuf[plen - 1]] = MEMORY  # centre-side terminal
        status[pbuf[0]] = MEMORY         # user-side terminal
        cq_edge[cq_count[0]] = pbuf[plen - 1]
        cq_user[cq_count[0]] = pbuf[0]
        cq_count[0] += 1
        served_out[total] = j
        total += 1
    return total


cdef inline void _fuse_centre(signed char[::1] status, int[::1] cq_edge,
                              int[::1] cq_user, int* cq_count) noexcept:
    """Fuse held centre-side qubits: one anchors the grown state, the rest
    free their edge memories. The anchor prefers an edge already held by a
    served user's share (then it blocks nothing extra), falling back to
    the earliest arrival."""
    cdef int i, anchor
    if cq_count[0] < 2:
        return
    anchor = 0
    for i in range(cq_count[0]):
        if cq_edge[i] == cq_user[i]:
            anchor = i
            break
    for i in range(cq_count[0]):
        if i != anchor and cq_edge[i] != cq_user[i]:
            status[cq_edge[i]] = ABSENT
    cq_edge[0] = cq_edge[anchor]
    cq_user[0] = cq_user[anchor]
    cq_count[0] = 1


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def run_trial(topology, int proto, users_in, int q_c, int max_slots, rng,
              int centre=-1, paths=None, tree=None, p_e=None):
    """One protocol trial; returns (succeeded, timeslots_used, ghz_count)."""
    eu_a, ev_a, pe_a, indptr_a, nbr_a, eidv_a = topology.arrays()
    if p_e is not None:
        pe_a = np.ascontiguousarray(p_e, dtype=np.float64)
    cdef const int[::1] eu = eu_a
    cdef const int[::1] ev = ev_a
    cdef const double[::1] pe = pe_a
    cdef const int[::1] indptr = indptr_a
    cdef const int[::1] nbr = nbr_a
    cdef const int[::1] eidv = eidv_a
    cdef int n = topology.n_nodes
    cdef int m = len(eu_a)
    cdef int k = len(users_in)
    users_a = np.asarray(sorted(users_in), dtype=np.int32)
    cdef const int[::1] users = users_a

    status_a = np.zeros(m, dtype=np.int8)
    age_a = np.zeros(m, dtype=np.int32)
    cdef signed char[::1] status = status_a
    cdef int[::1] age = age_a
    cdef int[::1] parent = np.empty(n, dtype=np.int32)
    isterm_a = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] isterm = isterm_a
    cdef int i
    for i in range(k):
        isterm[users[i]] = 1

    # steiner scratch
    cdef long long[::1] dp = None
    cdef signed char[::1] chtype = None
    cdef int[::1] cha = None
    cdef int[::1] che = None
    cdef long long[::1] kdist = None
    cdef int[::1] kpe = None
    cdef int[::1] kpn = None
    cdef signed char[::1] nodemask = None
    cdef int[::1] degree = None
    cdef int nmask
    if proto in (MP_C, MP_P):
        if k <= 5:
            nmask = 1 << (k - 1)
            dp = np.empty(nmask * n, dtype=np.int64)
            chtype = np.empty(nmask * n, dtype=np.int8)
            cha = np.empty(nmask * n, dtype=np.int32)
            che = np.empty(nmask * n, dtype=np.int32)
        else:
            kdist = np.empty(k * n, dtype=np.int64)
            kpe = np.empty(k * n, dtype=np.int32)
            kpn = np.empty(k * n, dtype=np.int32)
            nodemask = np.empty(n, dtype=np.int8)
            degree = np.empty(n, dtype=np.int32)
    cdef long long[::1] hk = np.empty(8 * m + 2 * n + 64, dtype=np.int64)
    cdef int[::1] hn = np.empty(8 * m + 2 * n + 64, dtype=np.int32)
    cdef int[::1] smask = np.empty(8 * n + 64, dtype=np.int32)
    cdef int[::1] snode = np.empty(8 * n + 64, dtype=np.int32)
    cdef signed char[::1] tmask = np.empty(m, dtype=np.int8)
    cdef int[::1] tout = np.empty(m, dtype=np.int32)

    # flow scratch
    cdef int[::1] asrc = None
    cdef int[::1] adst = None
    cdef signed char[::1] acap = None
    cdef double[::1] acost = None
    cdef short[::1] aflow = None
    cdef double[::1] dist = None
    cdef int[::1] pred = None
    cdef int[::1] pbuf = None
    cdef int[::1] served_out = None
    cdef int[::1] unserved = None
    cdef signed char[::1] servedmask = None
    if proto == MP_GPLUS:
        asrc = np.empty(4 * m + 2 * k, dtype=np.int32)
        adst = np.empty(4 * m + 2 * k, dtype=np.int32)
        acap = np.empty(4 * m + 2 * k, dtype=np.int8)
        acost = np.empty(4 * m + 2 * k, dtype=np.float64)
        aflow = np.empty(4 * m + 2 * k, dtype=np.int16)
        dist = np.empty(n + 1, dtype=np.float64)
        pred = np.empty(n + 1, dtype=np.int32)
        pbuf = np.empty(m, dtype=np.int32)
        served_out = np.empty(k, dtype=np.int32)
        unserved = np.empty(k, dtype=np.int32)
        servedmask = np.zeros(k, dtype=np.int8)
        for i in range(k):
            if users[i] == centre:
                servedmask[i] = 1

    # centre-side qubit holds (shared by the two centre protocols)
    cdef int[::1] cq_edge = None
    cdef int[::1] cq_user = None
    cdef int cq_count = 0
    if proto in (SP, MP_GPLUS):
        cq_edge = np.empty(k, dtype=np.int32)
        cq_user = np.empty(k, dtype=np.int32)

    # precomputed single-path protocol structures
    cdef int[::1] path_data = None
    cdef int[::1] path_off = None
    cdef int[::1] path_user = None
    cdef signed char[::1] path_done = None
    cdef int npaths = 0
    if proto == SP:
        flat = []
        offs = [0]
        pusers = []
        for u in sorted(paths):
            flat.extend(paths[u])
            offs.append(len(flat))
            pusers.append(u)
        path_data = np.asarray(flat, dtype=np.int32)
        path_off = np.asarray(offs, dtype=np.int32)
        path_user = np.asarray(pusers, dtype=np.int32)
        npaths = len(pusers)
        path_done = np.zeros(npaths, dtype=np.int8)
    cdef int[::1] tree_edges = None
    cdef int ntree = 0
    if proto == SP_TREE:
        tree_edges = np.asarray(sorted(tree), dtype=np.int32)
        ntree = len(tree_edges)

    cdef double[:, ::1] draws = None
    cdef int row = _CHUNK
    cdef int slot, e, j, count, nserved, nu, t, a, b
    cdef bint ok

    nserved = 0
    if proto == SP:
        nserved = k - npaths  # centre counted served when it is a user
    elif proto == MP_GPLUS:
        for i in range(k):
            if servedmask[i]:
                nserved += 1

    for slot in range(1, max_slots + 1):
        if row == _CHUNK:
            draws = rng.random((_CHUNK, m))
            row = 0
        _advance(status, age, q_c, draws[row], pe, m)
        row += 1

        if proto == SP:
            for j in range(npaths):
                if path_done[j]:
                    continue
                ok = True
                for t in range(path_off[j], path_off[j + 1]):
                    if status[path_data[t]] != PRESENT:
                        ok = False
                        break
                if ok:
                    for t in range(path_off[j], path_off[j + 1]):
                        status[path_data[t]] = CONSUMED
                    status[path_data[path_off[j]]] = MEMORY
                    status[path_data[path_off[j + 1] - 1]] = MEMORY
                    cq_edge[cq_count] = path_data[path_off[j]]
                    cq_user[cq_count] = path_data[path_off[j + 1] - 1]
                    cq_count += 1
                    path_done[j] = 1
                    nserved += 1
            if nserved == k:
                return True, slot, 1
            _fuse_centre(status, cq_edge, cq_user, &cq_count)

        elif proto == SP_TREE:
            ok = True
            for t in range(ntree):
                if status[tree_edges[t]] != PRESENT:
                    ok = False
                    break
            if ok:
                for t in range(ntree):
                    status[tree_edges[t]] = CONSUMED
                return True, slot, 1

        elif proto == MP_GPLUS:
            nu = 0
            for i in range(k):
                if not servedmask[i]:
                    unserved[nu] = users[i]
                    nu += 1
            count = _flow_slot(status, eu, ev, n, m, centre, unserved, nu,
                               asrc, adst, acap, acost, aflow, dist, pred,
                               pbuf, served_out, cq_edge, cq_user, &cq_count)
            if count > 0:
                t = 0
                a = 0  # index into served_out
                b = 0  # position within unserved
                for i in range(k):
                    if servedmask[i]:
                        continue
                    if a < count and served_out[a] == b:
                        servedmask[i] = 1
                        nserved += 1
                        a += 1
                    b += 1
            if nserved == k:
                return True, slot, 1
            _fuse_centre(status, cq_edge, cq_user, &cq_count)

        elif proto == MP_C:
            if _terminals_connected(status, eu, ev, parent, n, m, users, k):
                if k <= 5:
                    count = _steiner_exact(status, eu, ev, indptr, nbr, eidv, n, m,
                                           users, k, isterm, dp, chtype, cha, che,
                                           hk, hn, smask, snode, tmask, tout)
                else:
                    count = _steiner_kmb(status, eu, ev, indptr, nbr, eidv, n, m,
                                         users, k, isterm, kdist, kpe, kpn, hk, hn,
                                         parent, tmask, nodemask, degree, tout)
                for t in range(count):
                    status[tout[t]] = CONSUMED
                return True, slot, 1

        else:  # MP_P
            count = 0
            while _terminals_connected(status, eu, ev, parent, n, m, users, k):
                if k <= 5:
                    j = _steiner_exact(status, eu, ev, indptr, nbr, eidv, n, m,
                                       users, k, isterm, dp, chtype, cha, che,
                                       hk, hn, smask, snode, tmask, tout)
                else:
                    j = _steiner_kmb(status, eu, ev, indptr, nbr, eidv, n, m,
                                     users, k, isterm, kdist, kpe, kpn, hk, hn,
                                     parent, tmask, nodemask, degree, tout)
                for t in range(j):
                    status[tout[t]] = CONSUMED
                count += 1
            if count > 0:
                return True, slot, count

    return False, max_slots, 0


def sample_largest_components(topology, p_e, int q_c, int warmup, int samples, rng):
    """Largest-component sizes of warmed-up link subgraphs (one per sample)."""
    eu_a, ev_a, pe_a, _, _, _ = topology.arrays()
    if p_e is not None:
        pe_a = np.ascontiguousarray(p_e, dtype=np.float64)
    cdef const int[::1] eu = eu_a
    cdef const int[::1] ev = ev_a
    cdef const double[::1] pe = pe_a
    cdef int n = topology.n_nodes
    cdef int m = len(eu_a)
    status_a = np.zeros(m, dtype=np.int8)
    cdef signed char[::1] status = status_a
    cdef int[::1] age = np.zeros(m, dtype=np.int32)
    cdef int[::1] parent = np.empty(n, dtype=np.int32)
    cdef int[::1] csize = np.empty(n, dtype=np.int32)
    sizes_a = np.empty(samples, dtype=np.int32)
    cdef int[::1] sizes = sizes_a
    cdef double[:, ::1] draws = None
    cdef int row = _CHUNK
    cdef int s, a, e, v, ru, rv, best
    for s in range(samples):
        for e in range(m):
            status[e] = ABSENT
            age[e] = 0
        for a in range(warmup + 1):
            if row == _CHUNK:
                draws = rng.random((_CHUNK, m))
                row = 0
            _advance(status, age, q_c, draws[row], pe, m)
            row += 1
        for v in range(n):
            parent[v] = v
            csize[v] = 1
        for e in range(m):
            if status[e] == PRESENT:
                ru = _find(parent, eu[e])
                rv = _find(parent, ev[e])
                if ru != rv:
                    parent[ru] = rv
                    csize[rv] += csize[ru]
        best = 1
        for v in range(n):
            if parent[v] == v and csize[v] > best:
                best = csize[v]
        sizes[s] = best
    return sizes_a
