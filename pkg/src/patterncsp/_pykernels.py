"""Pure-Python search kernels.

These are the reference implementations of the two hot loops: chronological
backtracking over an instance and homomorphism search between point graphs.
The Cython module ``_ckernels`` exposes the same functions with the same
results; :mod:`patterncsp.kernels` picks one at import time.

All arguments are numpy arrays (or anything indexable the same way):

* ``dommask[i, a]`` is nonzero when universe value ``a`` is in the domain of
  variable ``i``.
* ``compat[i, j, a, b]`` is nonzero when ``(a, b)`` is allowed on ``(i, j)``.
* Point graphs use ``cpt[p, q]`` in ``{-1, 0, 1}`` for undefined, FALSE, TRUE.
"""

from __future__ import annotations

import sys


def count_solutions(dommask, compat, order, cap, limit):
    """Count solutions by backtracking over variables in ``order``.

    A node is a consistent partial assignment extended by one variable.
    Search stops once ``limit`` solutions are found (``limit < 0`` means no
    limit) or the node count exceeds ``cap`` (``cap < 0`` means no cap).

    Returns ``(count, first, nodes, exceeded)`` where ``first`` lists the
    universe index chosen for each variable in the first solution found.
    """
    n = len(order)
    order = [int(v) for v in order]
    if n == 0:
        return 1, [], 0, False
    d = dommask.shape[1]
    values = [[a for a in range(d) if dommask[v, a]] for v in order]
    # support[k][j][b]: bitmask of values of order[k] allowed with value b of order[j]
    support = []
    for k in range(n):
        vk = order[k]
        rows = []
        for j in range(k):
            vj = order[j]
            block = compat[vj, vk]
            rows.append([sum(1 << a for a in values[k] if block[b, a]) for b in range(d)])
        support.append(rows)
    full = [sum(1 << a for a in values[k]) for k in range(n)]

    count = 0
    nodes = 0
    first = None
    chosen = [0] * n
    pending = [0] * n
    pending[0] = full[0]
    k = 0
    while k >= 0:
        mask = pending[k]
        if not mask:
            k -= 1
            continue
        low = mask & -mask
        pending[k] = mask ^ low
        a = low.bit_length() - 1
        chosen[k] = a
        nodes += 1
        if 0 <= cap < nodes:
            return count, first, nodes, True
        if k + 1 == n:
            count += 1
            if first is None:
                first = [0] * n
                for idx in range(n):
                    first[order[idx]] = chosen[idx]
            if 0 <= limit <= count:
                return count, first, nodes, False
            continue
        nxt = full[k + 1]
        rows = support[k + 1]
        for j in range(k + 1):
            nxt &= rows[j][chosen[j]]
            if not nxt:
                break
        k += 1
        pending[k] = nxt
    return count, first, nodes, False


def find_homomorphisms(
    s_var, s_cpt, s_lt, s_ne, sv_lt, var_image,
    t_var, t_rank, tv_rank, t_cpt, tv_start, tv_pts, limit,
):
    """Enumerate homomorphisms from a source point graph into a target one.

    Source points must be grouped by variable. ``s_lt[i, j]`` asks for the
    image of ``i`` to have a strictly smaller rank than the image of ``j``;
    ``s_ne[i, j]`` asks for distinct images; ``sv_lt[u, w]`` asks for the
    image of source variable ``u`` to have a smaller variable rank than the
    image of ``w``. ``var_image`` pre-binds source variables (``-1`` = free).
    Target points of variable ``v`` are ``tv_pts[tv_start[v]:tv_start[v+1]]``.

    Returns a list of at most ``limit`` maps (``limit < 0``: all), each a list
    giving the target point of every source point.
    """
    S = len(s_var)
    SV = len(var_image)
    TV = len(tv_start) - 1
    s_var = [int(v) for v in s_var]
    img = [int(v) for v in var_image]
    used = [False] * TV
    for v in img:
        if v >= 0:
            used[v] = True
    first_of_var = [k == 0 or s_var[k] != s_var[k - 1] for k in range(S)]
    checks = []
    for k in range(S):
        row = []
        for j in range(k):
            c = int(s_cpt[j, k])
            lt = 1 if s_lt[j, k] else (-1 if s_lt[k, j] else 0)
            ne = bool(s_ne[j, k])
            if c >= 0 or lt or ne:
                row.append((j, c, lt, ne))
        checks.append(row)
    var_lt = [[bool(sv_lt[u, w]) for w in range(SV)] for u in range(SV)]
    t_cpt_rows = [list(map(int, t_cpt[p])) for p in range(len(t_var))]
    t_rank = [int(r) for r in t_rank]
    tv_rank = [int(r) for r in tv_rank]
    pts_of = [[int(p) for p in tv_pts[tv_start[v]:tv_start[v + 1]]] for v in range(TV)]

    results = []
    f = [0] * S

    def var_ok(u, tv):
        r = tv_rank[tv]
        for w in range(SV):
            iw = img[w]
            if iw < 0 or w == u:
                continue
            if var_lt[u][w] and not r < tv_rank[iw]:
                return False
            if var_lt[w][u] and not tv_rank[iw] < r:
                return False
        return True

    def point_ok(k, t):
        row = t_cpt_rows[t]
        rt = t_rank[t]
        for j, c, lt, ne in checks[k]:
            fj = f[j]
            if c >= 0 and row[fj] != c:
                return False
            if lt == 1 and not t_rank[fj] < rt:
                return False
            if lt == -1 and not rt < t_rank[fj]:
                return False
            if ne and fj == t:
                return False
        return True

    def extend(k):
        if k == S:
            results.append(list(f))
            return 0 <= limit <= len(results)
        u = s_var[k]
        if first_of_var[k] and img[u] < 0:
            for tv in range(TV):
                if used[tv] or not var_ok(u, tv):
                    continue
                img[u] = tv
                used[tv] = True
                for t in pts_of[tv]:
                    if point_ok(k, t):
                        f[k] = t
                        if extend(k + 1):
                            return True
                img[u] = -1
                used[tv] = False
            return False
        for t in pts_of[img[u]]:
            if point_ok(k, t):
                f[k] = t
                if extend(k + 1):
                    return True
        return False

    if S == 0:
        return [[]]
    limit_recursion = max(sys.getrecursionlimit(), S + 100)
    sys.setrecursionlimit(limit_recursion)
    extend(0)
    return results
