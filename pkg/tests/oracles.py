"""Independent oracles that work on individual bitstrings, never on levels."""
from fractions import Fraction
from itertools import product

import numpy as np


def mutation_outcomes(bits, mutation, p_mut=None):
    """All (child, probability) pairs for one mutation of ``bits``."""
    n = len(bits)
    if mutation == "onebit":
        for b in range(n):
            child = list(bits)
            child[b] ^= 1
            yield tuple(child), Fraction(1, n)
    else:
        for mask in product((0, 1), repeat=n):
            k = sum(mask)
            prob = p_mut ** k * (1 - p_mut) ** (n - k)
            yield tuple(x ^ m for x, m in zip(bits, mask)), prob


def level_kernel_by_enumeration(n, mutation, p_mut=None, fitness=None):
    """Kernel over zero-count levels from explicit mutation outcomes.

    For each level j the representative string has its first j bits zero.
    """
    fitness = fitness or (lambda x: sum(x))
    r = np.empty((n, n), dtype=object)
    r.fill(Fraction(0))
    for j in range(1, n + 1):
        parent = tuple([0] * j + [1] * (n - j))
        for child, prob in mutation_outcomes(parent, mutation, p_mut):
            nxt = child if fitness(child) > fitness(parent) else parent
            z = nxt.count(0)
            if z:
                r[z - 1, j - 1] += prob
    return r


def bitstring_error_series(n, fitness, horizon, mutation="onebit", p_mut=None):
    """E_t from the exact distribution over all 2**n strings, start at all zeros."""
    strings = list(product((0, 1), repeat=n))
    index = {s: k for k, s in enumerate(strings)}
    dist = np.zeros(len(strings), dtype=object)
    dist.fill(Fraction(0))
    dist[index[tuple([0] * n)]] = Fraction(1)
    f_opt = fitness(tuple([1] * n))
    moves = {}
    for s in strings:
        out = {}
        for child, prob in mutation_outcomes(s, mutation, p_mut):
            nxt = child if fitness(child) > fitness(s) else s
            out[nxt] = out.get(nxt, 0) + prob
        moves[s] = out
    errors = []
    for _ in range(horizon + 1):
        mean = sum(dist[index[s]] * fitness(s) for s in strings)
        errors.append(1 - mean / f_opt)
        new = np.zeros_like(dist)
        new.fill(Fraction(0))
        for s in strings:
            m = dist[index[s]]
            if m:
                for nxt, prob in moves[s].items():
                    new[index[nxt]] += m * prob
        dist = new
    return errors
