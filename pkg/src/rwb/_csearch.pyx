# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled backtracking kernel; same contract as ``rwb._search.search``."""
from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF
from libc.stdlib cimport malloc, free


def search(list domains, list checks, list tables, int n_out, int limit=0):
    cdef int n = len(domains)
    if n == 0:
        return [()]
    cdef list out = []
    cdef int i, j, k, total_dom = 0, total_chk = 0, total_vars = 0
    for i in range(n):
        total_dom += len(domains[i])
        total_chk += len(checks[i])
        for _, vs in checks[i]:
            total_vars += len(vs)

    cdef int *dom_start = <int *> malloc((n + 1) * sizeof(int))
    cdef int *chk_start = <int *> malloc((n + 1) * sizeof(int))
    cdef int *chk_table = <int *> malloc((total_chk + 1) * sizeof(int))
    cdef int *chk_var_start = <int *> malloc((total_chk + 1) * sizeof(int))
    cdef int *chk_vars = <int *> malloc((total_vars + 1) * sizeof(int))
    cdef int *pos = <int *> malloc(n * sizeof(int))
    cdef int *assign = <int *> malloc(n * sizeof(int))
    # assignments are stored as indices into ``values`` so tuple items are shared objects
    cdef list values = []
    cdef int d = 0, c = 0, v = 0
    try:
        for i in range(n):
            dom_start[i] = d
            for x in domains[i]:
                values.append(x)
                d += 1
            chk_start[i] = c
            for t, vs in checks[i]:
                chk_table[c] = t
                chk_var_start[c] = v
                for k in vs:
                    chk_vars[v] = k
                    v += 1
                c += 1
        dom_start[n] = d
        chk_start[n] = c
        chk_var_start[c] = v
        return _run(n, n_out, limit, dom_start, chk_start, chk_table, chk_var_start,
                    chk_vars, pos, assign, values, tables, out)
    finally:
        free(dom_start); free(chk_start); free(chk_table); free(chk_var_start)
        free(chk_vars); free(pos); free(assign)


cdef list _run(int n, int n_out, int limit, int *dom_start, int *chk_start,
               int *chk_table, int *chk_var_start, int *chk_vars, int *pos,
               int *assign, list values, list tables, list out):
    cdef int level = 0, p, c, k, arity, count = 0
    cdef bint ok
    cdef tuple key
    cdef object item
    pos[0] = 0
    while level >= 0:
        p = pos[level]
        if p >= dom_start[level + 1] - dom_start[level]:
            level -= 1
            if level >= 0:
                pos[level] += 1
            continue
        assign[level] = dom_start[level] + p
        ok = True
        for c in range(chk_start[level], chk_start[level + 1]):
            arity = chk_var_start[c + 1] - chk_var_start[c]
            key = PyTuple_New(arity)
            for k in range(arity):
                item = values[assign[chk_vars[chk_var_start[c] + k]]]
                Py_INCREF(item)
                PyTuple_SET_ITEM(key, k, item)
            if key not in tables[chk_table[c]]:
                ok = False
                break
        if not ok:
            pos[level] = p + 1
            continue
        if level == n - 1:
            key = PyTuple_New(n_out)
            for k in range(n_out):
                item = values[assign[k]]
                Py_INCREF(item)
                PyTuple_SET_ITEM(key, k, item)
            out.append(key)
            count += 1
            if limit and count >= limit:
                return out
            if n_out < n:
                if n_out == 0:
                    return out
                level = n_out - 1
            pos[level] += 1
            continue
        level += 1
        pos[level] = 0
    return out
