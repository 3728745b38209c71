"""Hot combinatorial kernels with a numba path and a pure-numpy fallback.

Set ``CATALYTIC_LAB_NUMBA=0`` in the environment to force the numpy path
(also used automatically when numba is not importable).  Both paths are
exposed under ``*_numba`` / ``*_numpy`` names so they can be benchmarked and
cross-checked against each other; the unsuffixed names dispatch.

Bit convention shared by the whole package: a length-m string ``w`` maps to
the integer ``int(w, 2)``, so position 0 is the most significant bit.
"""

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("CATALYTIC_LAB_NUMBA", "1") != "0"


def _njit(fn):
    if not _HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- popcount


def popcount_numpy(values):
    return np.bitwise_count(np.asarray(values, dtype=np.uint64)).astype(np.int64)


@_njit
def popcount_numba(values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        v = values[i]
        c = 0
        while v:
            v &= v - 1
            c += 1
        out[i] = c
    return out


def popcount(values):
    values = np.ascontiguousarray(values, dtype=np.int64)
    if USE_NUMBA:
        return popcount_numba(values)
    return popcount_numpy(values)


# ------------------------------------------------- Walsh-Hadamard transform


def fwht_numpy(values):
    a = np.array(values, dtype=np.int64)
    n = a.shape[0]
    h = 1
    while h < n:
        a = a.reshape(n // (2 * h), 2, h)
        u = a[:, 0, :].copy()
        v = a[:, 1, :]
        a[:, 0, :] += v
        a[:, 1, :] = u - v
        a = a.reshape(n)
        h *= 2
    return a


@_njit
def fwht_numba(values):
    a = values.copy()
    n = a.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for j in range(start, start + h):
                u = a[j]
                v = a[j + h]
                a[j] = u + v
                a[j + h] = u - v
        h *= 2
    return a


def fwht(values):
    """Unnormalised integer transform: out[s] = sum_x values[x] * (-1)^{|s&x|}."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    n = values.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    if USE_NUMBA:
        return fwht_numba(values)
    return fwht_numpy(values)


# -------------------------------------------------------- distance transform


def distance_transform_numpy(mask, m):
    size = 1 << m
    mask = np.asarray(mask, dtype=bool)
    dist = np.full(size, -1, dtype=np.int16)
    dist[mask] = 0
    reached = mask.copy()
    frontier = mask.copy()
    idx = np.arange(size, dtype=np.int64)
    d = 0
    while frontier.any() and not reached.all():
        d += 1
        nxt = np.zeros(size, dtype=bool)
        for i in range(m):
            nxt |= frontier[idx ^ (1 << i)]
        nxt &= ~reached
        dist[nxt] = d
        reached |= nxt
        frontier = nxt
    return dist


@_njit
def distance_transform_numba(mask, m):
    size = 1 << m
    dist = np.full(size, -1, dtype=np.int16)
    queue = np.empty(size, dtype=np.int64)
    head = 0
    tail = 0
    for x in range(size):
        if mask[x]:
            dist[x] = 0
            queue[tail] = x
            tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        nd = dist[x] + 1
        for i in range(m):
            y = x ^ (1 << i)
            if dist[y] < 0:
                dist[y] = nd
                queue[tail] = y
                tail += 1
    return dist


def distance_transform(mask, m):
    """Hamming distance from every point of {0,1}^m to the nearest set point (-1 if mask is empty)."""
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if USE_NUMBA:
        return distance_transform_numba(mask, m)
    return distance_transform_numpy(mask, m)


# ----------------------------------------------------------- code spanning


def span_ints_numpy(rows):
    out = np.zeros(1, dtype=np.int64)
    for r in rows:
        out = np.concatenate([out, out ^ np.int64(r)])
    return out


@_njit
def span_ints_numba(rows):
    k = rows.shape[0]
    out = np.zeros(1 << k, dtype=np.int64)
    size = 1
    for r in range(k):
        row = rows[r]
        for i in range(size):
            out[size + i] = out[i] ^ row
        size *= 2
    return out


def span_ints(rows):
    """All 2^k XOR-combinations of the integer rows; index bit r selects rows[r] (n <= 62)."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    if USE_NUMBA:
        return span_ints_numba(rows)
    return span_ints_numpy(rows)


# ------------------------------------------------ subcube counting / DT DP


def _pow3(m):
    return np.array([3 ** (m - 1 - i) for i in range(m)], dtype=np.int64)


def subcube_tables_numpy(mask, m):
    shape = (3,) * m
    counts = np.zeros(shape, dtype=np.int32)
    counts[(slice(0, 2),) * m] = np.asarray(mask, dtype=np.int32).reshape((2,) * m)
    stars = np.zeros(shape, dtype=np.int32)
    for axis in range(m):
        sel0 = [slice(None)] * m
        sel1 = [slice(None)] * m
        sel2 = [slice(None)] * m
        sel0[axis], sel1[axis], sel2[axis] = 0, 1, 2
        counts[tuple(sel2)] = counts[tuple(sel0)] + counts[tuple(sel1)]
        stars[tuple(sel2)] += 1
    big = np.int64(1 << 40)  # stays far from overflow when two are added
    dt = np.where(counts == 0, 0, np.where(counts == (1 << stars), 1, big)).astype(np.int64)
    for _ in range(m):
        changed = False
        for axis in range(m):
            sel0 = [slice(None)] * m
            sel1 = [slice(None)] * m
            sel2 = [slice(None)] * m
            sel0[axis], sel1[axis], sel2[axis] = 0, 1, 2
            cand = np.minimum(dt[tuple(sel0)] + dt[tuple(sel1)], big)
            cur = dt[tuple(sel2)]
            better = cand < cur
            if better.any():
                dt[tuple(sel2)] = np.where(better, cand, cur)
                changed = True
        if not changed:
            break
    return counts.reshape(-1), dt.reshape(-1).astype(np.int32)


@_njit
def subcube_tables_numba(mask, m, pow3):
    total = 3 ** m
    counts = np.zeros(total, dtype=np.int32)
    dt = np.zeros(total, dtype=np.int32)
    for t in range(total):
        first = -1
        s = 0
        x = 0
        for i in range(m):
            digit = (t // pow3[i]) % 3
            if digit == 2:
                s += 1
                if first < 0:
                    first = i
            else:
                x = 2 * x + digit
        if first < 0:
            c = 1 if mask[x] else 0
            counts[t] = c
            dt[t] = c
            continue
        p = pow3[first]
        c = counts[t - 2 * p] + counts[t - p]
        counts[t] = c
        if c == 0:
            dt[t] = 0
        elif c == (1 << s):
            dt[t] = 1
        else:
            best = 1 << 30
            for i in range(m):
                q = pow3[i]
                if (t // q) % 3 == 2:
                    v = dt[t - 2 * q] + dt[t - q]
                    if v < best:
                        best = v
            dt[t] = best
    return counts, dt


def subcube_tables(mask, m):
    """For every ternary pattern (digit 2 = free): points of A inside it, and the
    minimum number of leaves of a coordinate-splitting tree partitioning A within it.

    Pattern index is sum_i digit_i * 3^(m-1-i).
    """
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if USE_NUMBA:
        return subcube_tables_numba(mask, m, _pow3(m))
    return subcube_tables_numpy(mask, m)


# ------------------------------------------------------------- projections


def projection_counts_numpy(points, tmasks, chunk=1 << 22):
    points = np.asarray(points, dtype=np.int64)
    tmasks = np.asarray(tmasks, dtype=np.int64)
    out = np.zeros(tmasks.shape[0], dtype=np.int64)
    if points.size == 0:
        return out
    step = max(1, chunk // points.size)
    for start in range(0, tmasks.shape[0], step):
        block = np.sort(points[None, :] & tmasks[start:start + step, None], axis=1)
        out[start:start + step] = 1 + (np.diff(block, axis=1) != 0).sum(axis=1)
    return out


@_njit
def projection_counts_numba(points, tmasks, m):
    stamp = np.full(1 << m, -1, dtype=np.int64)
    out = np.zeros(tmasks.shape[0], dtype=np.int64)
    for q in range(tmasks.shape[0]):
        tm = tmasks[q]
        cnt = 0
        for p in points:
            v = p & tm
            if stamp[v] != q:
                stamp[v] = q
                cnt += 1
        out[q] = cnt
    return out


def projection_counts(points, tmasks, m):
    """Number of distinct values of (p & t) over points p, for each coordinate mask t."""
    points = np.ascontiguousarray(points, dtype=np.int64)
    tmasks = np.ascontiguousarray(tmasks, dtype=np.int64)
    if USE_NUMBA:
        return projection_counts_numba(points, tmasks, m)
    return projection_counts_numpy(points, tmasks)


# ----------------------------------------------------------- compatibility


def compatibility_numpy(points, mask):
    points = np.asarray(points, dtype=np.int64)
    mask = np.asarray(mask, dtype=bool)
    outside = np.flatnonzero(~mask).astype(np.int64)
    n = points.size
    compat = np.ones((n, n), dtype=bool)
    if outside.size == 0:
        return compat
    for a in range(n):
        x = points[a]
        keep = ~(x ^ points)  # coordinates on which the pair agrees
        hit = (((outside[None, :] ^ x) & keep[:, None]) == 0).any(axis=1)
        compat[a] = ~hit
    return compat


@_njit
def compatibility_numba(points, mask):
    n = points.shape[0]
    compat = np.ones((n, n), dtype=np.bool_)
    for a in range(n):
        x = points[a]
        for b in range(a + 1, n):
            y = points[b]
            diff = x ^ y
            base = x & ~diff
            sub = diff
            ok = True
            while True:
                if not mask[base | sub]:
                    ok = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & diff
            compat[a, b] = ok
            compat[b, a] = ok
    return compat


def compatibility(points, mask):
    """compat[a, b] is True iff the smallest subcube containing points a and b lies inside the mask."""
    points = np.ascontiguousarray(points, dtype=np.int64)
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if USE_NUMBA:
        return compatibility_numba(points, mask)
    return compatibility_numpy(points, mask)
