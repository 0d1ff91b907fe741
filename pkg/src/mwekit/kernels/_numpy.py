"""Pure-numpy kernels. Reference path and fallback when numba is absent."""

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64_stream(seed, count):
    """First ``count`` outputs of SplitMix64 seeded with ``seed``.

    SplitMix64 is counter based: output k mixes ``seed + k * GAMMA``, so the
    whole stream can be produced in one vectorised pass.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.uint64)
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + k * GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def fisher_yates(n, seed):
    """Permutation of ``0..n-1``: for i = n-1 .. 1 swap i with ``next() % (i + 1)``."""
    perm = np.arange(n, dtype=np.int64)
    if n < 2:
        return perm
    draws = splitmix64_stream(seed, n - 1)
    bounds = np.arange(n, 1, -1, dtype=np.uint64)
    js = (draws % bounds).astype(np.int64).tolist()
    p = perm.tolist()
    i = n - 1
    for j in js:
        p[i], p[j] = p[j], p[i]
        i -= 1
    return np.asarray(p, dtype=np.int64)


def levenshtein(a, b):
    """Edit distance between two int code-point arrays (unit costs)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 0:
        return int(len(a))
    offsets = np.arange(len(b) + 1, dtype=np.int64)
    prev = offsets.copy()
    for i, ch in enumerate(a, start=1):
        tmp = np.empty_like(prev)
        tmp[0] = i
        # deletion and substitution are row-parallel
        tmp[1:] = np.minimum(prev[1:] + 1, prev[:-1] + (b != ch))
        # insertion is a running min along the row: cur[j] = min(tmp[j], cur[j-1] + 1)
        prev = np.minimum.accumulate(tmp - offsets) + offsets
    return int(prev[-1])


def _closure(states, seg_start, idx):
    last = np.maximum.accumulate(np.where(states, idx, -1))
    return last >= seg_start


def longest_match_ends(tags, masks, optional):
    """Longest match end (inclusive) for every start position, -1 when none.

    ``masks[q]`` is the bitmask of tag ids accepted by expanded element q and
    ``optional[q]`` marks elements that may be skipped.
    """
    tags = np.asarray(tags, dtype=np.int64)
    masks = np.asarray(masks, dtype=np.int64)
    optional = np.asarray(optional, dtype=bool)
    n = len(tags)
    k = len(masks)
    ends = np.full(n, -1, dtype=np.int64)
    idx = np.arange(k + 1)
    # state q reaches q' > q by epsilon iff optional[q..q'-1] all true
    blocked = np.ones(k + 1, dtype=bool)
    blocked[1:] = ~optional
    seg_start = np.maximum.accumulate(np.where(blocked, idx, 0))
    start_states = np.zeros(k + 1, dtype=bool)
    start_states[0] = True
    start_states = _closure(start_states, seg_start, idx)
    for s in range(n):
        cur = start_states
        best = -1
        for t in range(s, n):
            hit = (masks >> tags[t]) & 1
            nxt = np.zeros(k + 1, dtype=bool)
            nxt[1:] = cur[:-1] & (hit == 1)
            if not nxt.any():
                break
            nxt = _closure(nxt, seg_start, idx)
            if nxt[k]:
                best = t
            cur = nxt
        ends[s] = best
    return ends


def row_entropy(matrix):
    """Shannon entropy in bits of each row, with 0 log 0 = 0."""
    m = np.asarray(matrix, dtype=np.float64)
    safe = np.where(m > 0.0, m, 1.0)
    return -np.sum(np.where(m > 0.0, m * np.log2(safe), 0.0), axis=1) + 0.0


def sum_column_groups(matrix, starts):
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape[1] == 0:
        return m.copy()
    return np.add.reduceat(m, np.asarray(starts, dtype=np.int64), axis=1)


def mean_row_groups(matrix, starts):
    m = np.asarray(matrix, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.int64)
    if m.shape[0] == 0:
        return m.copy()
    sizes = np.diff(np.append(starts, m.shape[0]))
    return np.add.reduceat(m, starts, axis=0) / sizes[:, None]
