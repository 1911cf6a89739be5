# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; same contract as ``_pykernels``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def count_solutions(dommask, compat, order, long long cap, long long limit):
    cdef const cnp.uint8_t[:, :] dm = np.ascontiguousarray(dommask, dtype=np.uint8)
    cdef const cnp.uint8_t[:, :, :, :] cp = np.ascontiguousarray(compat, dtype=np.uint8)
    cdef const long[:] ordv = np.ascontiguousarray(order, dtype=np.int_)
    cdef Py_ssize_t n = ordv.shape[0]
    if n == 0:
        return 1, [], 0, False
    cdef Py_ssize_t d = dm.shape[1]
    cdef Py_ssize_t k, j, a, vk, vj
    cdef long long count = 0, nodes = 0
    cdef int[:] chosen = np.zeros(n, dtype=np.intc)
    cdef int[:] cursor = np.zeros(n, dtype=np.intc)
    first = None
    k = 0
    cursor[0] = 0
    while k >= 0:
        vk = ordv[k]
        a = cursor[k]
        while a < d:
            if dm[vk, a]:
                for j in range(k):
                    vj = ordv[j]
                    if not cp[vj, vk, chosen[j], a]:
                        break
                else:
                    break
            a += 1
        if a >= d:
            k -= 1
            continue
        cursor[k] = a + 1
        chosen[k] = a
        nodes += 1
        if 0 <= cap < nodes:
            return count, first, nodes, True
        if k + 1 == n:
            count += 1
            if first is None:
                first = [0] * n
                for j in range(n):
                    first[ordv[j]] = chosen[j]
            if 0 <= limit <= count:
                return count, first, nodes, False
            continue
        k += 1
        cursor[k] = 0
    return count, first, nodes, False


cdef struct HomState:
    Py_ssize_t S
    Py_ssize_t SV
    Py_ssize_t TV
    Py_ssize_t T
    const int* s_var
    const char* first_of_var
    const signed char* s_cpt
    const char* s_lt
    const char* s_ne
    const char* sv_lt
    int* img
    char* used
    const int* t_rank
    const int* tv_rank
    const signed char* t_cpt
    const int* tv_start
    const int* tv_pts
    int* f
    long long limit
    long long found


cdef inline bint _var_ok(HomState* st, int u, int tv) nogil:
    cdef int r = st.tv_rank[tv]
    cdef int w, iw
    for w in range(st.SV):
        iw = st.img[w]
        if iw < 0 or w == u:
            continue
        if st.sv_lt[u * st.SV + w] and not r < st.tv_rank[iw]:
            return False
        if st.sv_lt[w * st.SV + u] and not st.tv_rank[iw] < r:
            return False
    return True


cdef inline bint _point_ok(HomState* st, int k, int t) nogil:
    cdef int j, fj, S = st.S
    cdef signed char c
    cdef int rt = st.t_rank[t]
    for j in range(k):
        fj = st.f[j]
        c = st.s_cpt[j * S + k]
        if c >= 0 and st.t_cpt[fj * st.T + t] != c:
            return False
        if st.s_lt[j * S + k] and not st.t_rank[fj] < rt:
            return False
        if st.s_lt[k * S + j] and not rt < st.t_rank[fj]:
            return False
        if st.s_ne[j * S + k] and fj == t:
            return False
    return True


cdef bint _extend(HomState* st, int k, list results):
    cdef int u, tv, idx, t
    if k == st.S:
        results.append([st.f[idx] for idx in range(st.S)])
        st.found += 1
        return 0 <= st.limit <= st.found
    u = st.s_var[k]
    if st.first_of_var[k] and st.img[u] < 0:
        for tv in range(st.TV):
            if st.used[tv] or not _var_ok(st, u, tv):
                continue
            st.img[u] = tv
            st.used[tv] = 1
            for idx in range(st.tv_start[tv], st.tv_start[tv + 1]):
                t = st.tv_pts[idx]
                if _point_ok(st, k, t):
                    st.f[k] = t
                    if _extend(st, k + 1, results):
                        return True
            st.img[u] = -1
            st.used[tv] = 0
        return False
    tv = st.img[u]
    for idx in range(st.tv_start[tv], st.tv_start[tv + 1]):
        t = st.tv_pts[idx]
        if _point_ok(st, k, t):
            st.f[k] = t
            if _extend(st, k + 1, results):
                return True
    return False


def find_homomorphisms(
    s_var, s_cpt, s_lt, s_ne, sv_lt, var_image,
    t_var, t_rank, tv_rank, t_cpt, tv_start, tv_pts, long long limit,
):
    cdef const int[:] a_s_var = np.ascontiguousarray(s_var, dtype=np.intc)
    cdef const signed char[:, :] a_s_cpt = np.ascontiguousarray(s_cpt, dtype=np.int8)
    cdef const char[:, :] a_s_lt = np.ascontiguousarray(s_lt, dtype=np.int8)
    cdef const char[:, :] a_s_ne = np.ascontiguousarray(s_ne, dtype=np.int8)
    cdef const char[:, :] a_sv_lt = np.ascontiguousarray(sv_lt, dtype=np.int8)
    cdef int[:] a_img = np.array(var_image, dtype=np.intc)
    cdef const int[:] a_t_rank = np.ascontiguousarray(t_rank, dtype=np.intc)
    cdef const int[:] a_tv_rank = np.ascontiguousarray(tv_rank, dtype=np.intc)
    cdef const signed char[:, :] a_t_cpt = np.ascontiguousarray(t_cpt, dtype=np.int8)
    cdef const int[:] a_tv_start = np.ascontiguousarray(tv_start, dtype=np.intc)
    cdef const int[:] a_tv_pts = np.ascontiguousarray(tv_pts, dtype=np.intc)
    cdef Py_ssize_t S = a_s_var.shape[0]
    if S == 0:
        return [[]]
    cdef Py_ssize_t TV = a_tv_start.shape[0] - 1
    cdef char[:] first = np.zeros(S, dtype=np.int8)
    cdef char[:] used = np.zeros(max(TV, 1), dtype=np.int8)
    cdef int[:] f = np.zeros(S, dtype=np.intc)
    cdef Py_ssize_t k
    for k in range(S):
        first[k] = k == 0 or a_s_var[k] != a_s_var[k - 1]
    for k in range(a_img.shape[0]):
        if a_img[k] >= 0:
            used[a_img[k]] = 1
    cdef HomState st
    st.S = S
    st.SV = a_img.shape[0]
    st.TV = TV
    st.T = a_t_cpt.shape[0]
    st.s_var = &a_s_var[0]
    st.first_of_var = &first[0]
    st.s_cpt = &a_s_cpt[0, 0]
    st.s_lt = &a_s_lt[0, 0]
    st.s_ne = &a_s_ne[0, 0]
    st.sv_lt = &a_sv_lt[0, 0]
    st.img = &a_img[0]
    st.used = &used[0]
    st.t_rank = &a_t_rank[0] if a_t_rank.shape[0] else NULL
    st.tv_rank = &a_tv_rank[0] if a_tv_rank.shape[0] else NULL
    st.t_cpt = &a_t_cpt[0, 0] if st.T else NULL
    st.tv_start = &a_tv_start[0]
    st.tv_pts = &a_tv_pts[0] if a_tv_pts.shape[0] else NULL
    st.f = &f[0]
    st.limit = limit
    st.found = 0
    results = []
    _extend(&st, 0, results)
    return results
