"""Compiled cellular GA for the QAP; mirrors ``qap.cga_cell_rule`` draw for draw."""

import math

import numpy as np
from numba import njit, prange

from ._kernels import below, generation_key, rand, start_cell, tournament


@njit(cache=True)
def qap_cost(p, d, f):
    n = p.shape[0]
    s = 0.0
    for i in range(n):
        pi = p[i]
        for j in range(n):
            s += d[pi, p[j]] * f[i, j]
    return s


@njit(cache=True)
def init_population(pop, costs, d, f, base_seed, replicate):
    key = generation_key(base_seed, replicate, 0)
    st = np.empty(2, dtype=np.uint64)
    n = pop.shape[1]
    for c in range(pop.shape[0]):
        start_cell(st, key, c)
        for i in range(n):
            pop[c, i] = i
        for i in range(n - 1, 0, -1):
            j = below(st, i + 1)
            t = pop[c, i]
            pop[c, i] = pop[c, j]
            pop[c, j] = t
        costs[c] = qap_cost(pop[c], d, f)


@njit(cache=True, inline="always")
def _swap(a, inv, i, j):
    x = a[i]
    y = a[j]
    a[i] = y
    a[j] = x
    inv[y] = i
    inv[x] = j


@njit(cache=True)
def upmx(c1, c2, inv1, inv2, repeats, st):
    n = c1.shape[0]
    for i in range(n):
        inv1[c1[i]] = i
        inv2[c2[i]] = i
    for _ in range(repeats):
        i = below(st, n)
        j = inv2[c1[i]]
        k = inv1[c2[i]]
        _swap(c1, inv1, i, j)
        _swap(c2, inv2, i, k)


@njit(cache=True)
def poisson_count(mean, u):
    k = 0
    p = math.exp(-mean)
    s = p
    while u >= s and p > 0.0:
        k += 1
        p *= mean / k
        s += p
    return k


@njit(cache=True)
def cga_generations(pop, costs, d, f, nbr, probs, k, with_replacement, crossover_rate,
                    mutation_mean, fixed_mutation, repeats, base_seed, replicate,
                    first, last, trace):
    """Synchronous generations ``first..last`` in place; ``trace`` gets each generation's best cost."""
    size, n = pop.shape
    nxt = np.empty_like(pop)
    nxt_cost = np.empty(size)
    score = np.empty(size)
    st = np.empty(2, dtype=np.uint64)
    dirs = np.empty(5, dtype=np.int64)
    wbuf = np.empty(5)
    c1 = np.empty(n, dtype=np.int64)
    c2 = np.empty(n, dtype=np.int64)
    inv1 = np.empty(n, dtype=np.int64)
    inv2 = np.empty(n, dtype=np.int64)
    for t in range(first, last + 1):
        key = generation_key(base_seed, replicate, t)
        for c in range(size):
            score[c] = -costs[c]
        for cell in range(size):
            start_cell(st, key, cell)
            a = tournament(cell, nbr, score, probs, k, with_replacement, st, dirs, wbuf)
            b = tournament(cell, nbr, score, probs, k, with_replacement, st, dirs, wbuf)
            c1[:] = pop[a]
            c2[:] = pop[b]
            if rand(st) < crossover_rate:
                upmx(c1, c2, inv1, inv2, repeats, st)
                f1 = qap_cost(c1, d, f)
                f2 = qap_cost(c2, d, f)
            else:
                f1 = costs[a]
                f2 = costs[b]
            child = c1 if f1 <= f2 else c2
            fc = f1 if f1 <= f2 else f2
            if fixed_mutation:
                m = int(mutation_mean)
            else:
                m = poisson_count(mutation_mean, rand(st))
            if n >= 2:
                for _ in range(m):
                    i = below(st, n)
                    j = below(st, n - 1)
                    if j >= i:
                        j += 1
                    tmp = child[i]
                    child[i] = child[j]
                    child[j] = tmp
                if m > 0:
                    fc = qap_cost(child, d, f)
            if fc < costs[cell] or (fc == costs[cell] and rand(st) < 0.5):
                nxt[cell] = child
                nxt_cost[cell] = fc
            else:
                nxt[cell] = pop[cell]
                nxt_cost[cell] = costs[cell]
        pop[:] = nxt
        costs[:] = nxt_cost
        trace[t - first] = costs.min()


@njit(cache=True, parallel=True)
def run_batch(d, f, nbr, probs, size, k, with_replacement, crossover_rate, mutation_mean,
              fixed_mutation, repeats, base_seed, runs, generations, traces, best):
    n = d.shape[0]
    for r in prange(runs):
        pop = np.empty((size, n), dtype=np.int64)
        costs = np.empty(size)
        init_population(pop, costs, d, f, base_seed, r)
        bi = np.argmin(costs)
        best_cost = costs[bi]
        best[r] = pop[bi]
        traces[r, 0] = best_cost
        one = np.empty(1)
        for t in range(1, generations + 1):
            cga_generations(pop, costs, d, f, nbr, probs, k, with_replacement, crossover_rate,
                            mutation_mean, fixed_mutation, repeats, base_seed, r, t, t, one)
            if one[0] < best_cost:
                bi = np.argmin(costs)
                best_cost = costs[bi]
                best[r] = pop[bi]
            traces[r, t] = best_cost
