"""Compiled inner loops.

Each function mirrors a pure-Python route (``seeding``, ``selection``,
``qap``) draw for draw; ``tests/test_kernels.py`` holds the parity checks.
Cells are flat row-major indices and ``nbr`` is the table built by
:func:`anisocga.grid.neighbor_table`.
"""

import numpy as np
import numba
from numba import njit, prange

# skip the TBB layer probe (warns on old TBB); omp or workqueue are both fine
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0

EMPTY = 0
LINEAGE_A = 1
LINEAGE_B = 2


@njit(cache=True, inline="always")
def mix64(z):
    z = z + _GAMMA
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


@njit(cache=True)
def generation_key(base_seed, replicate, generation):
    """Seed prefix shared by every cell of one generation."""
    h = mix64(np.uint64(base_seed))
    h = mix64(h ^ np.uint64(replicate))
    return mix64(h ^ np.uint64(generation))


@njit(cache=True, inline="always")
def start_cell(st, key, cell):
    st[0] = mix64(np.uint64(key) ^ np.uint64(cell))
    st[1] = np.uint64(0)


@njit(cache=True, inline="always")
def rand(st):
    z = st[0] + st[1] * _GAMMA
    st[1] = st[1] + _ONE
    return (mix64(z) >> _S11) * _INV_2_53


@njit(cache=True, inline="always")
def below(st, n):
    return int(rand(st) * n)


@njit(cache=True, inline="always")
def pick(weights, u):
    acc = 0.0
    last = -1
    for d in range(weights.shape[0]):
        w = weights[d]
        if w > 0.0:
            acc += w
            last = d
            if u < acc:
                return d
    return last


@njit(cache=True)
def tournament(cell, nbr, score, probs, k, with_replacement, st, dirs, wbuf):
    """Flat index of the tournament winner around ``cell`` (maximising ``score``)."""
    if with_replacement:
        for j in range(k):
            dirs[j] = pick(probs, rand(st))
    else:
        for d in range(5):
            wbuf[d] = probs[d]
        for j in range(k):
            total = 0.0
            for d in range(5):
                total += wbuf[d]
            d = pick(wbuf, rand(st) * total)
            dirs[j] = d
            wbuf[d] = 0.0
    best = -1
    best_s = 0.0
    ties = 0
    for j in range(k):
        c = nbr[cell, dirs[j]]
        s = score[c]
        if best < 0 or s > best_s:
            best = c
            best_s = s
            ties = 1
        elif s == best_s:
            ties += 1
            if rand(st) < 1.0 / ties:
                best = c
    return best


@njit(cache=True)
def label_generation(cur, nxt, score, nbr, probs, k, with_replacement, key, st, dirs, wbuf):
    """One synchronous selection-only generation on a label grid.

    Labels > 0 are best copies (fitness 1), label 0 has null fitness.
    """
    n = cur.shape[0]
    for cell in range(n):
        score[cell] = 1.0 if cur[cell] > 0 else 0.0
    for cell in range(n):
        lab = cur[cell]
        # a uniform neighbourhood cannot change the cell; per-cell streams make skipping its draws safe
        if (cur[nbr[cell, 1]] == lab and cur[nbr[cell, 2]] == lab
                and cur[nbr[cell, 3]] == lab and cur[nbr[cell, 4]] == lab):
            nxt[cell] = lab
            continue
        start_cell(st, key, cell)
        w = tournament(cell, nbr, score, probs, k, with_replacement, st, dirs, wbuf)
        sw = score[w]
        sc = score[cell]
        if sw > sc:
            nxt[cell] = cur[w]
        elif sw == sc and rand(st) < 0.5:
            nxt[cell] = cur[w]
        else:
            nxt[cell] = cur[cell]


@njit(cache=True)
def mixing_index(labels, nbr):
    occupied = 0
    mixed = 0
    for cell in range(labels.shape[0]):
        lab = labels[cell]
        if lab == EMPTY:
            continue
        occupied += 1
        for d in range(1, 5):
            other = labels[nbr[cell, d]]
            if other != EMPTY and other != lab:
                mixed += 1
                break
    if occupied == 0:
        return 0.0
    return mixed / occupied


@njit(cache=True)
def _count(labels, out):
    out[0] = 0
    out[1] = 0
    out[2] = 0
    for cell in range(labels.shape[0]):
        out[labels[cell]] += 1


@njit(cache=True)
def run_labels(init, nbr, probs, k, with_replacement, base_seed, replicate, generations,
               stop_when_full, counts, mixing, snap_times, snaps):
    """Selection-only run on a label grid; returns the last generation simulated.

    ``counts[t]`` receives (empty, A, B) after generation ``t``; ``mixing``
    is filled only when it has ``generations + 1`` entries. ``snaps[i]``
    receives the grid at generation ``snap_times[i]`` when reached.
    """
    n = init.shape[0]
    cur = init.copy()
    nxt = np.empty_like(cur)
    score = np.empty(n, dtype=np.float64)
    st = np.empty(2, dtype=np.uint64)
    dirs = np.empty(5, dtype=np.int64)
    wbuf = np.empty(5, dtype=np.float64)
    track_mixing = mixing.shape[0] == generations + 1
    nsnap = snap_times.shape[0]

    _count(cur, counts[0])
    if track_mixing:
        mixing[0] = mixing_index(cur, nbr)
    for i in range(nsnap):
        if snap_times[i] == 0:
            snaps[i, :] = cur
    if stop_when_full and counts[0, 0] == 0:
        return 0
    for t in range(1, generations + 1):
        key = generation_key(base_seed, replicate, t)
        label_generation(cur, nxt, score, nbr, probs, k, with_replacement, key, st, dirs, wbuf)
        cur, nxt = nxt, cur
        _count(cur, counts[t])
        if track_mixing:
            mixing[t] = mixing_index(cur, nbr)
        for i in range(nsnap):
            if snap_times[i] == t:
                snaps[i, :] = cur
        if stop_when_full and counts[t, 0] == 0:
            return t
    return generations


@njit(cache=True, parallel=True)
def run_labels_batch(init, nbr, probs, k, with_replacement, base_seed, replicates, generations,
                     stop_when_full, counts, mixing, last, finals):
    """Independent replicates of :func:`run_labels` (replicate index = row).

    When ``finals`` has one row per replicate it receives each grid at
    generation ``generations``.
    """
    keep_final = finals.shape[0] == replicates
    if keep_final:
        times = np.full(1, generations, dtype=np.int64)
    else:
        times = np.empty(0, dtype=np.int64)
    for r in prange(replicates):
        lo = r if keep_final else 0
        hi = r + 1 if keep_final else 0
        last[r] = run_labels(init, nbr, probs, k, with_replacement, base_seed, r, generations,
                             stop_when_full, counts[r], mixing[r], times, finals[lo:hi])
