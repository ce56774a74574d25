"""Compiled best-improvement descent over inter-route moves.

Routes are rows of ``seq``: position 0 and ``size[r] + 1`` hold the depot,
customers sit at 1..size[r]. Move kinds:

    SHIFT    move the customer at (a, i) between (b, j) and (b, j + 1)
    SWAP     exchange the customers at (a, i) and (b, j)
    CROSS    a[0..i] + b[j+1..]  /  b[0..j] + a[i+1..]
    CROSS_R  a[0..i] + rev(b[1..j])  /  rev(a[i+1..]) + b[j+1..]

The two CROSS kinds are the two reconnections of 2-opt* after cutting route
a behind position i and route b behind position j.
"""

import numpy as np
from numba import njit

# Helpers that never allocate are compiled without the refcounting runtime;
# with it, passing a dozen arrays per call dominates the scan time.

SHIFT = 0
SWAP = 1
CROSS = 2
CROSS_R = 3

MODE_SEARCH = 0
MODE_REPAIR = 1

EPS = 1e-7
LOAD_EPS = 1e-9


@njit(cache=True, _nrt=False)
def rebuild_route(r, seq, size, demand, dist, load, length, cum_len, cum_load,
                  route_of, pos_of):
    s = size[r]
    seq[r, 0] = 0
    seq[r, s + 1] = 0
    cum_len[r, 0] = 0.0
    cum_load[r, 0] = 0.0
    for k in range(1, s + 2):
        v = seq[r, k]
        cum_len[r, k] = cum_len[r, k - 1] + dist[seq[r, k - 1], v]
        cum_load[r, k] = cum_load[r, k - 1] + demand[v]
        if k <= s:
            route_of[v] = r
            pos_of[v] = k
    load[r] = cum_load[r, s]
    length[r] = cum_len[r, s + 1] if s > 0 else 0.0


@njit(cache=True, _nrt=False)
def _route_cost(s, ln, t, unit, fixed):
    if s == 0:
        return 0.0
    return fixed[t] + unit[t] * ln


@njit(cache=True, _nrt=False)
def _excess(count, lim):
    return count - lim if count > lim else 0


@njit(cache=True, _nrt=False, inline="always")
def evaluate(kind, a, i, b, j, seq, size, rtype, cap, unit, fixed, limit,
             demand, dist, load, length, cum_len, cum_load, type_count, big_b):
    """Return (delta cost, delta violation, max load overflow after the move)."""
    sa = size[a]
    sb = size[b]
    if kind == SHIFT:
        v = seq[a, i]
        p = seq[a, i - 1]
        n_ = seq[a, i + 1]
        x = seq[b, j]
        y = seq[b, j + 1]
        new_sa = sa - 1
        new_la = length[a] - dist[p, v] - dist[v, n_] + dist[p, n_] if new_sa > 0 else 0.0
        new_qa = load[a] - demand[v]
        new_sb = sb + 1
        new_lb = length[b] + dist[x, v] + dist[v, y] - dist[x, y]
        new_qb = load[b] + demand[v]
    elif kind == SWAP:
        v = seq[a, i]
        u = seq[b, j]
        pa = seq[a, i - 1]
        na = seq[a, i + 1]
        pb = seq[b, j - 1]
        nb = seq[b, j + 1]
        new_sa = sa
        new_sb = sb
        new_la = length[a] - dist[pa, v] - dist[v, na] + dist[pa, u] + dist[u, na]
        new_lb = length[b] - dist[pb, u] - dist[u, nb] + dist[pb, v] + dist[v, nb]
        new_qa = load[a] - demand[v] + demand[u]
        new_qb = load[b] - demand[u] + demand[v]
    elif kind == CROSS:
        tot_a = cum_len[a, sa + 1]
        tot_b = cum_len[b, sb + 1]
        new_sa = i + (sb - j)
        new_sb = j + (sa - i)
        new_la = cum_len[a, i] + dist[seq[a, i], seq[b, j + 1]] + (tot_b - cum_len[b, j + 1])
        new_lb = cum_len[b, j] + dist[seq[b, j], seq[a, i + 1]] + (tot_a - cum_len[a, i + 1])
        new_qa = cum_load[a, i] + (load[b] - cum_load[b, j])
        new_qb = cum_load[b, j] + (load[a] - cum_load[a, i])
    else:
        tot_a = cum_len[a, sa + 1]
        tot_b = cum_len[b, sb + 1]
        new_sa = i + j
        new_sb = (sa - i) + (sb - j)
        new_la = cum_len[a, i] + dist[seq[a, i], seq[b, j]] + cum_len[b, j]
        new_lb = (tot_a - cum_len[a, i + 1]) + dist[seq[a, i + 1], seq[b, j + 1]] \
            + (tot_b - cum_len[b, j + 1])
        new_qa = cum_load[a, i] + cum_load[b, j]
        new_qb = (load[a] - cum_load[a, i]) + (load[b] - cum_load[b, j])
    if new_sa == 0:
        new_la = 0.0
        new_qa = 0.0
    if new_sb == 0:
        new_lb = 0.0
        new_qb = 0.0

    ta = rtype[a]
    tb = rtype[b]
    d_cost = (_route_cost(new_sa, new_la, ta, unit, fixed)
              + _route_cost(new_sb, new_lb, tb, unit, fixed)
              - _route_cost(sa, length[a], ta, unit, fixed)
              - _route_cost(sb, length[b], tb, unit, fixed))

    over_a = new_qa - cap[ta]
    over_b = new_qb - cap[tb]
    d_viol = (max(0.0, over_a) + max(0.0, over_b)
              - max(0.0, load[a] - cap[ta]) - max(0.0, load[b] - cap[tb]))

    # vehicles in use only change when a route is emptied or opened
    da = (1 if new_sa > 0 else 0) - (1 if sa > 0 else 0)
    db = (1 if new_sb > 0 else 0) - (1 if sb > 0 else 0)
    if da != 0 or db != 0:
        if ta == tb:
            c = type_count[ta]
            d_ex = _excess(c + da + db, limit[ta]) - _excess(c, limit[ta])
        else:
            d_ex = (_excess(type_count[ta] + da, limit[ta]) - _excess(type_count[ta], limit[ta])
                    + _excess(type_count[tb] + db, limit[tb]) - _excess(type_count[tb], limit[tb]))
        d_viol += big_b * d_ex
    return d_cost, d_viol, max(over_a, over_b)


@njit(cache=True, _nrt=False)
def apply_move(kind, a, i, b, j, seq, size, buf_a, buf_b):
    """Rewrite rows a and b in place; caches must be rebuilt afterwards."""
    sa = size[a]
    sb = size[b]
    if kind == SHIFT:
        v = seq[a, i]
        for k in range(i, sa):
            seq[a, k] = seq[a, k + 1]
        seq[a, sa] = 0
        size[a] = sa - 1
        for k in range(sb, j, -1):
            seq[b, k + 1] = seq[b, k]
        seq[b, j + 1] = v
        size[b] = sb + 1
    elif kind == SWAP:
        v = seq[a, i]
        seq[a, i] = seq[b, j]
        seq[b, j] = v
    elif kind == CROSS:
        na = 0
        for k in range(1, i + 1):
            na += 1
            buf_a[na] = seq[a, k]
        for k in range(j + 1, sb + 1):
            na += 1
            buf_a[na] = seq[b, k]
        nb = 0
        for k in range(1, j + 1):
            nb += 1
            buf_b[nb] = seq[b, k]
        for k in range(i + 1, sa + 1):
            nb += 1
            buf_b[nb] = seq[a, k]
        _commit(a, b, na, nb, seq, size, buf_a, buf_b)
    else:
        na = 0
        for k in range(1, i + 1):
            na += 1
            buf_a[na] = seq[a, k]
        for k in range(j, 0, -1):
            na += 1
            buf_a[na] = seq[b, k]
        nb = 0
        for k in range(sa, i, -1):
            nb += 1
            buf_b[nb] = seq[a, k]
        for k in range(j + 1, sb + 1):
            nb += 1
            buf_b[nb] = seq[b, k]
        _commit(a, b, na, nb, seq, size, buf_a, buf_b)


@njit(cache=True, _nrt=False)
def _commit(a, b, na, nb, seq, size, buf_a, buf_b):
    old_a = size[a]
    old_b = size[b]
    for k in range(1, na + 1):
        seq[a, k] = buf_a[k]
    for k in range(na + 1, old_a + 2):
        seq[a, k] = 0
    for k in range(1, nb + 1):
        seq[b, k] = buf_b[k]
    for k in range(nb + 1, old_b + 2):
        seq[b, k] = 0
    size[a] = na
    size[b] = nb


def workspace(n_routes, width, n_vertices, n_types):
    """Scratch arrays for :func:`descend`, allocated outside compiled code."""
    pair = (n_routes, n_routes)
    return (np.zeros(n_routes), np.zeros(n_routes), np.zeros((n_routes, width)),
            np.zeros((n_routes, width)), np.full(n_vertices, -1, dtype=np.int64),
            np.zeros(n_vertices, dtype=np.int64), np.zeros(n_types, dtype=np.int64),
            np.zeros(width, dtype=np.int64), np.zeros(width, dtype=np.int64),
            np.zeros(n_routes, dtype=np.int64), np.zeros((4,) + pair, dtype=np.int64),
            np.zeros((2,) + pair))


@njit(cache=True, _nrt=False)
def prepare(seq, size, rtype, demand, dist, load, length, cum_len, cum_load,
            route_of, pos_of, type_count):
    for t in range(type_count.shape[0]):
        type_count[t] = 0
    for r in range(seq.shape[0]):
        rebuild_route(r, seq, size, demand, dist, load, length, cum_len, cum_load,
                      route_of, pos_of)
        if size[r] > 0:
            type_count[rtype[r]] += 1


@njit(cache=True, _nrt=False)
def _better(mode, dc, dv, best_dc, best_dv):
    if mode == MODE_SEARCH:
        return dc < best_dc
    if dv < best_dv - LOAD_EPS:
        return True
    if dv <= best_dv + LOAD_EPS and dc < best_dc:
        return True
    return False


@njit(cache=True, _nrt=False)
def _admissible(mode, dc, dv, overflow):
    # repair only runs while the solution is infeasible, so a cost decrease
    # at unchanged violation is always admissible there
    if mode == MODE_SEARCH:
        return overflow <= LOAD_EPS and dv <= LOAD_EPS and dc < -EPS
    if dv < -LOAD_EPS:
        return True
    return dv <= LOAD_EPS and dc < -EPS


@njit(cache=True, _nrt=False, inline="always")
def _offer(mode, kind, a, i, b, j, dc, dv, ov, pm, pd):
    """Keep the candidate if it beats the cached best move of pair (a, b)."""
    if _admissible(mode, dc, dv, ov) and _better(mode, dc, dv, pd[0, a, b], pd[1, a, b]):
        pm[0, a, b] = kind
        pm[1, a, b] = i
        pm[2, a, b] = j
        pm[3, a, b] = 1
        pd[0, a, b] = dc
        pd[1, a, b] = dv


@njit(cache=True, _nrt=False)
def _violation(R, n_types, load, cap, rtype, type_count, limit, big_b):
    v = 0.0
    for r in range(R):
        v += max(0.0, load[r] - cap[rtype[r]])
    for t in range(n_types):
        v += big_b * _excess(type_count[t], limit[t])
    return v


@njit(cache=True, _nrt=False)
def descend(seq, size, rtype, cap, unit, fixed, limit, demand, dist, nbr, mode,
            big_b, max_moves, load, length, cum_len, cum_load, route_of, pos_of,
            type_count, buf_a, buf_b, dirty, pm, pd):
    """Apply best-improvement moves until none qualifies; returns moves applied.

    MODE_SEARCH only considers capacity-feasible moves that lower the cost.
    MODE_REPAIR ranks moves by (violation change, cost change) and accepts
    those lowering violation, or keeping it while lowering cost. The trailing
    arguments are scratch space from :func:`workspace`.

    Every candidate move touches exactly two routes, so the best move of each
    ordered route pair is cached and only pairs involving a changed route are
    rescanned. A change in which routes are in use alters fleet excess for
    every pair and invalidates the whole cache.
    """
    R = seq.shape[0]
    n1 = demand.shape[0]
    phi = nbr.shape[1]
    n_types = cap.shape[0]
    prepare(seq, size, rtype, demand, dist, load, length, cum_len, cum_load,
            route_of, pos_of, type_count)
    cur_viol = _violation(R, n_types, load, cap, rtype, type_count, limit, big_b)
    for r in range(R):
        dirty[r] = 1

    moves = 0
    while moves < max_moves:
        if mode == MODE_REPAIR and cur_viol <= LOAD_EPS:
            break
        for a in range(R):
            for b in range(R):
                if dirty[a] or dirty[b]:
                    pm[3, a, b] = 0
                    pd[0, a, b] = np.inf
                    pd[1, a, b] = np.inf
        for v in range(1, n1):
            a = route_of[v]
            i = pos_of[v]
            da = dirty[a]
            for k in range(phi):
                u = nbr[v, k]
                if u > 0:
                    b = route_of[u]
                    if b == a or not (da or dirty[b]):
                        continue
                    j = pos_of[u]
                    for c in range(7):
                        if c == 0:
                            kind, ii, jj = SHIFT, i, j
                        elif c == 1:
                            kind, ii, jj = SHIFT, i, j - 1
                        elif c == 2:
                            kind, ii, jj = SWAP, i, j
                        elif c == 3:
                            kind, ii, jj = CROSS_R, i, j
                        elif c == 4:
                            kind, ii, jj = CROSS, i, j - 1
                        elif c == 5:
                            kind, ii, jj = CROSS, i - 1, j
                        else:
                            # both cuts in front of v and u
                            kind, ii, jj = CROSS_R, i - 1, j - 1
                        dc, dv, ov = evaluate(kind, a, ii, b, jj, seq, size, rtype, cap,
                                              unit, fixed, limit, demand, dist, load,
                                              length, cum_len, cum_load, type_count, big_b)
                        _offer(mode, kind, a, ii, b, jj, dc, dv, ov, pm, pd)
            # the depot as neighbor gives the route ends of every other route;
            # empty routes are eligible targets whether or not it is a neighbor
            depot_near = False
            for k in range(phi):
                if nbr[v, k] == 0:
                    depot_near = True
            for b in range(R):
                if b == a or not (da or dirty[b]):
                    continue
                sb = size[b]
                if sb > 0 and not depot_near:
                    continue
                for c in range(6):
                    if c == 0:
                        kind, ii, jj = SHIFT, i, 0
                    elif c == 1:
                        if sb == 0:
                            continue
                        kind, ii, jj = SHIFT, i, sb
                    elif c == 2:
                        kind, ii, jj = CROSS, i, 0
                    elif c == 3:
                        kind, ii, jj = CROSS, i - 1, sb
                    elif c == 4:
                        kind, ii, jj = CROSS_R, i, 0
                    else:
                        kind, ii, jj = CROSS_R, i - 1, sb
                    dc, dv, ov = evaluate(kind, a, ii, b, jj, seq, size, rtype, cap,
                                          unit, fixed, limit, demand, dist, load,
                                          length, cum_len, cum_load, type_count, big_b)
                    _offer(mode, kind, a, ii, b, jj, dc, dv, ov, pm, pd)

        best_a = -1
        best_b = -1
        best_dc = np.inf
        best_dv = np.inf
        for a in range(R):
            dirty[a] = 0
            for b in range(R):
                if pm[3, a, b] and _better(mode, pd[0, a, b], pd[1, a, b], best_dc, best_dv):
                    best_a = a
                    best_b = b
                    best_dc = pd[0, a, b]
                    best_dv = pd[1, a, b]
        if best_a < 0:
            break
        a = best_a
        b = best_b
        was_used = (size[a] > 0, size[b] > 0)
        if size[a] > 0:
            type_count[rtype[a]] -= 1
        if size[b] > 0:
            type_count[rtype[b]] -= 1
        apply_move(pm[0, a, b], a, pm[1, a, b], b, pm[2, a, b], seq, size, buf_a, buf_b)
        rebuild_route(a, seq, size, demand, dist, load, length, cum_len, cum_load,
                      route_of, pos_of)
        rebuild_route(b, seq, size, demand, dist, load, length, cum_len, cum_load,
                      route_of, pos_of)
        if size[a] > 0:
            type_count[rtype[a]] += 1
        if size[b] > 0:
            type_count[rtype[b]] += 1
        dirty[a] = 1
        dirty[b] = 1
        if was_used[0] != (size[a] > 0) or was_used[1] != (size[b] > 0):
            for r in range(R):
                dirty[r] = 1
        cur_viol += best_dv
        if cur_viol < LOAD_EPS:
            # recount exactly, the running sum accumulates rounding
            cur_viol = _violation(R, n_types, load, cap, rtype, type_count, limit, big_b)
        moves += 1
    return moves
