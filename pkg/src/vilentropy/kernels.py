"""Hot loops, each with a numba version and a pure-numpy twin.

Public wrappers dispatch on :func:`vilentropy._accel.backend`.  The twins are
written independently (different algorithms where that is natural) so the
cross-backend tests in ``tests/test_kernels.py`` are a real check.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import backend, njit

# ---------------------------------------------------------------------------
# integer points in a ball: #{z in Z^d : |z|^2 <= bound}


@njit(cache=True)
def _ball_count_nb(d, bound):
    if bound < 0:
        return 0
    if d == 1:
        return 2 * _isqrt_nb(bound) + 1
    m = _isqrt_nb(bound)
    # odometer over the first d-1 coordinates, closed form for the last one
    coords = np.full(d - 1, -m, dtype=np.int64)
    total = 0
    while True:
        s = 0
        for j in range(d - 1):
            s += coords[j] * coords[j]
        rest = bound - s
        if rest >= 0:
            total += 2 * _isqrt_nb(rest) + 1
        j = d - 2
        while j >= 0:
            coords[j] += 1
            if coords[j] <= m:
                break
            coords[j] = -m
            j -= 1
        if j < 0:
            break
    return total


@njit(cache=True)
def _isqrt_nb(v):
    if v <= 0:
        return 0
    r = np.int64(math.sqrt(float(v)))
    while r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


def _ball_count_np(d: int, bound: int) -> int:
    if bound < 0:
        return 0
    m = math.isqrt(bound)
    z2 = np.arange(-m, m + 1, dtype=np.int64) ** 2
    # squared norms of the first d-1 coordinates, pruned to the ball
    sums = np.zeros(1, dtype=np.int64)
    for _ in range(d - 1):
        sums = np.add.outer(sums, z2).ravel()
        sums = sums[sums <= bound]
    return int((2 * _isqrt_np(bound - sums) + 1).sum())


def ball_count_int(d: int, bound: int) -> int:
    """Number of z in Z^d with sum z_j^2 <= bound (bound an integer)."""
    if backend() == "numba":
        return int(_ball_count_nb(np.int64(d), np.int64(bound)))
    return _ball_count_np(d, bound)


# ---------------------------------------------------------------------------
# orthant counts #A_l = #{k in N_0^d : |k| <= l} for l = 0..L


@njit(cache=True)
def _orthant_plane_nb(L):
    out = np.empty(L + 1, dtype=np.int64)
    for l in range(L + 1):
        l2 = l * l
        tot = 0
        for k1 in range(l + 1):
            tot += _isqrt_nb(l2 - k1 * k1) + 1
        out[l] = tot
    return out


@njit(cache=True)
def _orthant_theta_nb(d, L):
    top = L * L
    acc = np.zeros(top + 1, dtype=np.int64)
    for j in range(L + 1):
        acc[j * j] += 1
    for _ in range(d - 1):
        nxt = np.zeros(top + 1, dtype=np.int64)
        for m in range(top + 1):
            a = acc[m]
            if a == 0:
                continue
            j = 0
            while m + j * j <= top:
                nxt[m + j * j] += a
                j += 1
        acc = nxt
    out = np.empty(L + 1, dtype=np.int64)
    run = 0
    pos = 0
    for l in range(L + 1):
        while pos <= l * l:
            run += acc[pos]
            pos += 1
        out[l] = run
    return out


def _orthant_np(d: int, L: int) -> np.ndarray:
    top = L * L
    squares = np.arange(L + 1, dtype=np.int64) ** 2
    acc = np.zeros(top + 1, dtype=np.int64)
    acc[squares] = 1
    for _ in range(d - 1):
        nxt = np.zeros_like(acc)
        for sq in squares:
            nxt[sq:] += acc[: top + 1 - sq]
        acc = nxt
    cum = np.cumsum(acc)
    return cum[squares]


def orthant_counts(d: int, L: int) -> np.ndarray:
    """#A_l for l = 0..L as int64 (Euclidean norm)."""
    if d == 1:
        return np.arange(1, L + 2, dtype=np.int64)
    if backend() == "numba":
        if d == 2:
            return _orthant_plane_nb(np.int64(L))
        return _orthant_theta_nb(np.int64(d), np.int64(L))
    if d == 2:
        out = np.empty(L + 1, dtype=np.int64)
        for l in range(L + 1):
            k1 = np.arange(l + 1, dtype=np.int64)
            out[l] = int((_isqrt_np(l * l - k1 * k1) + 1).sum())
        return out
    return _orthant_np(d, L)


def _isqrt_np(v: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    r -= r * r > v
    r += (r + 1) * (r + 1) <= v
    return r


# ---------------------------------------------------------------------------
# farthest-point traversal and greedy covering in a weighted l_q metric


@njit(cache=True, inline="always")  # a plain call costs ~20x in the hot loops
def _dist_row(Y, i, c, w, q):
    # weighted l_q distance from row i of Y to c; unweighted max for q = inf
    m = Y.shape[1]
    s = 0.0
    if q == np.inf:
        for j in range(m):
            v = abs(Y[i, j] - c[j])
            if v > s:
                s = v
        return s
    if q == 2.0:
        for j in range(m):
            v = Y[i, j] - c[j]
            s += w[j] * v * v
        return np.sqrt(s)
    if q == 1.0:
        for j in range(m):
            s += w[j] * abs(Y[i, j] - c[j])
        return s
    for j in range(m):
        s += w[j] * abs(Y[i, j] - c[j]) ** q
    return s ** (1.0 / q)


@njit(cache=True)
def _dists(Z, left, c, w, q, out):
    # _dist_row over rows 0..left-1, with the branch on q taken once
    m = Z.shape[1]
    if q == np.inf:
        for t in range(left):
            s = 0.0
            for j in range(m):
                v = abs(Z[t, j] - c[j])
                if v > s:
                    s = v
            out[t] = s
    elif q == 2.0:
        for t in range(left):
            s = 0.0
            for j in range(m):
                v = Z[t, j] - c[j]
                s += w[j] * v * v
            out[t] = np.sqrt(s)
    elif q == 1.0:
        for t in range(left):
            s = 0.0
            for j in range(m):
                s += w[j] * abs(Z[t, j] - c[j])
            out[t] = s
    else:
        for t in range(left):
            out[t] = _dist_row(Z, t, c, w, q)


@njit(cache=True)
def _fps_nb(Y, w, q, start, max_picks, stop):
    n = Y.shape[0]
    dmin = np.full(n, np.inf)
    order = np.empty(max_picks, dtype=np.int64)
    radii = np.empty(max_picks)
    row = np.empty(Y.shape[1])
    dbuf = np.empty(n)
    cur = start
    count = 0
    r = np.inf
    while count < max_picks:
        order[count] = cur
        radii[count] = r
        count += 1
        best = -1.0
        nxt = 0
        for j in range(Y.shape[1]):
            row[j] = Y[cur, j]
        _dists(Y, n, row, w, q, dbuf)
        for i in range(n):
            if dbuf[i] < dmin[i]:
                dmin[i] = dbuf[i]
            if dmin[i] > best:
                best = dmin[i]
                nxt = i
        r = best
        if r <= stop:
            break
        cur = nxt
    return order[:count], radii[:count], r


def _pairwise_np(Y, c, w, q):
    # column-sequential sums, the same operation order as _dist_row
    diff = np.abs(Y - c)
    if np.isinf(q):
        return diff.max(axis=1)
    s = np.zeros(Y.shape[0])
    for j in range(Y.shape[1]):
        if q == 2.0:
            s += w[j] * diff[:, j] * diff[:, j]
        elif q == 1.0:
            s += w[j] * diff[:, j]
        else:
            s += w[j] * diff[:, j] ** q
    if q == 2.0:
        return np.sqrt(s)
    return s if q == 1.0 else s ** (1.0 / q)


def _fps_np(Y, w, q, start, max_picks, stop):
    n = Y.shape[0]
    dmin = np.full(n, np.inf)
    order, radii = [], []
    cur, r = start, np.inf
    while len(order) < max_picks:
        order.append(cur)
        radii.append(r)
        np.minimum(dmin, _pairwise_np(Y, Y[cur], w, q), out=dmin)
        nxt = int(np.argmax(dmin))
        r = float(dmin[nxt])
        if r <= stop:
            break
        cur = nxt
    return np.array(order, dtype=np.int64), np.array(radii), r


def farthest_point_order(Y, w, q, start=0, max_picks=None, stop=0.0):
    """Greedy traversal of the rows of ``Y``.

    Returns ``(order, radii, final)``: ``radii[i]`` is the distance of pick
    ``i`` to the earlier picks (``inf`` for the first) and ``final`` the
    covering radius reached by all picks.  Ties go to the lowest row index.
    """
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    max_picks = Y.shape[0] if max_picks is None else min(int(max_picks), Y.shape[0])
    q = float(q)
    if backend() == "numba":
        order, radii, final = _fps_nb(Y, w, q, np.int64(start), np.int64(max_picks), float(stop))
        return order, radii, float(final)
    return _fps_np(Y, w, q, int(start), max_picks, float(stop))


@njit(cache=True)
def _greedy_cover_nb(Y, w, q, eps, limit, reach_rule):
    # Z holds the uncovered rows, compacted in order after every ball
    Z = Y.copy()
    left, m = Z.shape
    dbuf = np.empty(left)
    centers = 0
    cen = np.empty(m)
    c = np.empty(m)
    while left > 0:
        if centers >= limit:
            return centers + 1
        for j in range(m):
            acc = 0.0
            for t in range(left):
                acc += Z[t, j]
            cen[j] = acc / left
        _dists(Z, left, cen, w, q, dbuf)
        far = -1.0
        k = 0
        for t in range(left):
            if dbuf[t] > far:
                far = dbuf[t]
                k = t
        # mean of the uncovered points within 2 eps of Z[k]
        for j in range(m):
            c[j] = Z[k, j]
        cnt = 0
        reach = 0.0
        _dists(Z, left, c, w, q, dbuf)
        for t in range(left):
            dd = dbuf[t]
            if dd <= 2.0 * eps:
                cnt += 1
                if dd > reach:
                    reach = dd
        for j in range(m):
            acc = 0.0
            for t in range(left):
                if dbuf[t] <= 2.0 * eps:
                    acc += Z[t, j]
            cen[j] = acc / cnt
        shift = _dist_row(Z, k, cen, w, q)
        step = eps if (reach_rule and reach > eps) or shift > eps else shift
        if shift > 0.0:
            for j in range(m):
                c[j] = Z[k, j] + step * (cen[j] - Z[k, j]) / shift
        _dists(Z, left, c, w, q, dbuf)
        dbuf[k] = 0.0
        kept = 0
        for t in range(left):
            if dbuf[t] > eps:
                for j in range(m):
                    Z[kept, j] = Z[t, j]
                kept += 1
        left = kept
        centers += 1
    return centers


def _greedy_cover_np(Y, w, q, eps, limit, reach_rule):
    alive = np.ones(Y.shape[0], dtype=bool)
    centers = 0
    while alive.any():
        if centers >= limit:
            return centers + 1
        idx = np.flatnonzero(alive)
        pts = Y[idx]
        cen = np.cumsum(pts, axis=0)[-1] / len(idx)  # sequential, like the compiled loop
        k = int(np.argmax(_pairwise_np(pts, cen, w, q)))
        p = pts[k]
        dp = _pairwise_np(pts, p, w, q)
        near = pts[dp <= 2.0 * eps]
        reach = float(dp[dp <= 2.0 * eps].max())
        mean = np.cumsum(near, axis=0)[-1] / len(near)
        shift = float(_pairwise_np(mean[None, :], p, w, q)[0])
        step = eps if (reach_rule and reach > eps) or shift > eps else shift
        c = p + step * (mean - p) / shift if shift > 0 else p
        hit = _pairwise_np(pts, c, w, q) <= eps
        hit[k] = True
        alive[idx[hit]] = False
        centers += 1
    return centers


def greedy_cover(Y, w, q, eps, limit=None):
    """Number of eps-balls used by a greedy cover of the rows of ``Y``.

    Each step takes the uncovered point p farthest from the centroid of the
    uncovered points and centres a ball on the segment from p towards the
    mean of the uncovered points within 2 eps of p, at most eps from p.
    Two step rules are tried (stop at the mean, or go the full eps whenever
    that neighbourhood reaches beyond eps) and the smaller count wins; both
    produce genuine covers.  Stops early and returns ``limit + 1`` once
    ``limit`` balls did not suffice.
    """
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    limit = Y.shape[0] if limit is None else int(limit)
    if backend() == "numba":
        runs = [int(_greedy_cover_nb(Y, w, float(q), float(eps), np.int64(limit), r)) for r in (False, True)]
    else:
        runs = [_greedy_cover_np(Y, w, float(q), float(eps), limit, r) for r in (False, True)]
    return min(runs)
