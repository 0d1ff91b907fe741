"""numba-compiled kernels. Same contracts as ``_numpy``."""

import numpy as np
from numba import njit

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
S27 = np.uint64(27)
S30 = np.uint64(30)
S31 = np.uint64(31)


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@njit(cache=True)
def _stream(seed, count):
    out = np.empty(count, dtype=np.uint64)
    state = seed
    for k in range(count):
        state = state + GAMMA
        out[k] = _mix(state)
    return out


def splitmix64_stream(seed, count):
    if count <= 0:
        return np.zeros(0, dtype=np.uint64)
    return _stream(np.uint64(seed), count)


@njit(cache=True)
def _fisher_yates(n, seed):
    perm = np.arange(n)
    state = seed
    for i in range(n - 1, 0, -1):
        state = state + GAMMA
        j = np.int64(_mix(state) % np.uint64(i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return perm


def fisher_yates(n, seed):
    return _fisher_yates(n, np.uint64(seed)).astype(np.int64)


@njit(cache=True)
def _levenshtein(a, b):
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, len(a) + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


def levenshtein(a, b):
    return int(_levenshtein(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)))


@njit(cache=True)
def _closure(states, optional):
    for q in range(len(optional)):
        if states[q] and optional[q]:
            states[q + 1] = True


@njit(cache=True)
def _longest_match_ends(tags, masks, optional):
    n = len(tags)
    k = len(masks)
    ends = np.full(n, -1, dtype=np.int64)
    cur = np.zeros(k + 1, dtype=np.bool_)
    nxt = np.zeros(k + 1, dtype=np.bool_)
    for s in range(n):
        cur[:] = False
        cur[0] = True
        _closure(cur, optional)
        best = -1
        for t in range(s, n):
            nxt[:] = False
            alive = False
            tag = tags[t]
            for q in range(k):
                if cur[q] and (masks[q] >> tag) & 1:
                    nxt[q + 1] = True
                    alive = True
            if not alive:
                break
            _closure(nxt, optional)
            if nxt[k]:
                best = t
            cur, nxt = nxt, cur
        ends[s] = best
    return ends


def longest_match_ends(tags, masks, optional):
    return _longest_match_ends(
        np.asarray(tags, dtype=np.int64),
        np.asarray(masks, dtype=np.int64),
        np.asarray(optional, dtype=np.bool_),
    )


@njit(cache=True)
def _row_entropy(m):
    rows, cols = m.shape
    out = np.zeros(rows)
    for t in range(rows):
        h = 0.0
        for s in range(cols):
            p = m[t, s]
            if p > 0.0:
                h -= p * np.log2(p)
        out[t] = h + 0.0
    return out


def row_entropy(matrix):
    return _row_entropy(np.ascontiguousarray(matrix, dtype=np.float64))


@njit(cache=True)
def _sum_column_groups(m, starts):
    rows, cols = m.shape
    g = len(starts)
    out = np.zeros((rows, g))
    for k in range(g):
        stop = starts[k + 1] if k + 1 < g else cols
        for t in range(rows):
            acc = 0.0
            for s in range(starts[k], stop):
                acc += m[t, s]
            out[t, k] = acc
    return out


def sum_column_groups(matrix, starts):
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    if m.shape[1] == 0:
        return m.copy()
    return _sum_column_groups(m, np.asarray(starts, dtype=np.int64))


@njit(cache=True)
def _mean_row_groups(m, starts):
    rows, cols = m.shape
    g = len(starts)
    out = np.zeros((g, cols))
    for k in range(g):
        stop = starts[k + 1] if k + 1 < g else rows
        for s in range(cols):
            acc = 0.0
            for t in range(starts[k], stop):
                acc += m[t, s]
            out[k, s] = acc / (stop - starts[k])
    return out


def mean_row_groups(matrix, starts):
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    if m.shape[0] == 0:
        return m.copy()
    return _mean_row_groups(m, np.asarray(starts, dtype=np.int64))
