"""Pure-Python backtracking kernel (fallback for the compiled ``_csearch``).

``search`` enumerates assignments of integer values to variables
``0..n-1`` in order. ``domains[i]`` lists the candidates for variable ``i``;
``checks[i]`` lists ``(table index, variable positions)`` pairs whose atoms
become ground once variable ``i`` is assigned, and each such atom must be a
member of ``tables[table index]`` (a set of int tuples).

Only the first ``n_out`` values of each solution are reported, and once a
solution is found for a prefix the search backtracks straight to the prefix,
so outputs are distinct projections. ``limit`` (0 = unbounded) caps the
number of results.
"""


def search(domains, checks, tables, n_out, limit=0):
    n = len(domains)
    if n == 0:
        return [()]
    out = []
    assign = [0] * n
    pos = [0] * n
    level = 0
    while level >= 0:
        dom = domains[level]
        p = pos[level]
        if p >= len(dom):
            level -= 1
            if level >= 0:
                pos[level] += 1
            continue
        assign[level] = dom[p]
        ok = True
        for t, vs in checks[level]:
            if tuple([assign[v] for v in vs]) not in tables[t]:
                ok = False
                break
        if not ok:
            pos[level] = p + 1
            continue
        if level == n - 1:
            out.append(tuple(assign[:n_out]))
            if limit and len(out) >= limit:
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
