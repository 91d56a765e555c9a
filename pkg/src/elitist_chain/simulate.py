"""Monte-Carlo runs of the (1+1) strictly elitist EA.

Random numbers
--------------
All uniforms come from one Philox4x64 stream keyed by ``seed``.  Run ``r``
owns the contiguous slice ``[r * D, (r + 1) * D)`` of that stream, where
``D = 1 + horizon * draws_per_step``; the first draw picks the initial state.
Runs are processed in fixed blocks of :data:`RUN_BLOCK`, each block jumping
straight to its offset with ``Philox.advance``, so results depend only on
``(seed, parameters)`` and never on the worker count or backend.
Per-generation statistics are merged block by block in index order.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import simulate_levels
from ._numbers import parse_number
from .levels import FitnessFamily

RUN_BLOCK = 4096  # multiple of 4: one Philox counter step yields 4 doubles


@dataclass(frozen=True)
class EmpiricalSeries:
    """Per-generation mean fitness over ``runs`` trajectories, t = 0..horizon."""

    horizon: int
    runs: int
    seed: int
    f_opt: float
    mean: np.ndarray
    stderr: np.ndarray
    label: str = ""

    @property
    def t(self):
        return np.arange(self.horizon + 1)

    @property
    def error(self):
        return 1.0 - self.mean / self.f_opt

    @property
    def rate(self):
        """Empirical average convergence rate; NaN at t = 0 or when E_0 = 0."""
        e = self.error
        out = np.full(self.horizon + 1, np.nan)
        if e[0] > 0:
            t = self.t[1:]
            ratio = np.clip(e[1:] / e[0], 0.0, None)
            out[1:] = 1.0 - ratio ** (1.0 / t)
        return out


@dataclass(frozen=True)
class ComparisonReport:
    z: np.ndarray
    threshold: float

    @property
    def max_abs_z(self):
        return float(np.max(np.abs(self.z)))

    @property
    def passed(self):
        return self.max_abs_z <= self.threshold


def _uniform_block(seed, block, rows, width):
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(block * RUN_BLOCK * width // 4)
    return np.random.Generator(bitgen).random((rows, width))


def _initial_states(q0, u0):
    """Map first draws to states 1..L by ``q0``; leftover mass gives 0 (optimum)."""
    cum = np.cumsum(np.asarray(q0, dtype=np.float64))
    idx = np.searchsorted(cum, u0, side="right")
    return np.where(idx < len(cum), idx + 1, 0)


def _run_blocks(seed, runs, width, horizon, values, block_fn, workers):
    n_blocks = -(-runs // RUN_BLOCK)

    def one(block):
        rows = min(RUN_BLOCK, runs - block * RUN_BLOCK)
        u = _uniform_block(seed, block, rows, width)
        fitness = values[block_fn(u)]
        mean = fitness.mean(axis=0)
        m2 = ((fitness - mean) ** 2).sum(axis=0)
        return rows, mean, m2

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(n_blocks)))
    else:
        parts = [one(b) for b in range(n_blocks)]

    count, mean, m2 = 0, np.zeros(horizon + 1), np.zeros(horizon + 1)
    for rows, b_mean, b_m2 in parts:
        total = count + rows
        delta = b_mean - mean
        mean = mean + delta * (rows / total)
        m2 = m2 + b_m2 + delta ** 2 * (count * rows / total)
        count = total
    if runs > 1:
        stderr = np.sqrt(m2 / (runs - 1) / runs)
    else:
        stderr = np.zeros(horizon + 1)
    return mean, stderr


def _check_common(horizon, runs, seed):
    if int(horizon) != horizon or horizon < 0:
        raise ValueError(f"horizon must be a nonnegative integer, got {horizon!r}")
    if int(runs) != runs or runs < 1:
        raise ValueError(f"runs must be a positive integer, got {runs!r}")
    if int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(horizon), int(runs), int(seed)


def run_bitstring(family, n, mutation="onebit", p_mut=None, horizon=35, runs=100_000, seed=42,
                  q0=None, workers=1, backend=None, label=None):
    """Simulate the EA on actual bitstrings.

    Parameters
    ----------
    family : FitnessFamily or str
    n : int
        String length.
    mutation : {"onebit", "bitwise"}
    p_mut : float
        Per-bit flip probability for ``"bitwise"``.
    q0 : sequence, optional
        Distribution over levels 1..n; default starts every run at all
        zeros.  Mutation is position-symmetric, so a run starting at level
        ``z`` uses the string with its first ``z`` bits cleared.
    workers : int
        Threads used to process blocks; does not change the result.
    """
    horizon, runs, seed = _check_common(horizon, runs, seed)
    family = family if isinstance(family, FitnessFamily) else FitnessFamily(family)
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    fit = np.array([float(v) for v in family.levels(n)])
    if q0 is None:
        q0 = np.zeros(n)
        q0[-1] = 1.0
    q0 = np.asarray(q0, dtype=np.float64)
    if q0.shape != (n,):
        raise ValueError(f"q0 must have {n} entries")
    if mutation == "onebit":
        draws, kw = 1, dict(n=n, fit=fit)
    elif mutation == "bitwise":
        p = None if p_mut is None else parse_number(p_mut)
        if p is None or not 0 < p < 1:
            raise ValueError(f"bitwise mutation needs p_mut in (0, 1), got {p_mut!r}")
        draws, kw = n, dict(n=n, fit=fit, p_mut=p)
    else:
        raise ValueError(f"unknown mutation {mutation!r}")
    width = 1 + horizon * draws

    def block_fn(u):
        init = _initial_states(q0, u[:, 0])
        return simulate_levels(mutation, init, u, horizon, backend=backend, **kw)

    mean, stderr = _run_blocks(seed, runs, width, horizon, fit, block_fn, workers)
    return EmpiricalSeries(horizon, runs, seed, float(fit[0]), mean, stderr,
                           label or f"{family.name}-n{n}-{mutation}")


def transition_table(kernel):
    """Cumulative outcome table for :func:`run_chain`.

    Row ``s`` (state ``s``; 0 is the optimum) lists cumulative probabilities
    of moving to ``s, s-1, ..., 1``; the final slot absorbs the remainder
    (the jump to the optimum) and is set to +inf.
    """
    r = np.asarray(kernel.entries, dtype=np.float64)
    L = r.shape[0]
    cum = np.full((L + 1, L + 1), np.inf)
    for s in range(1, L + 1):
        probs = [r[s - 1 - o, s - 1] for o in range(s)]
        cum[s, :s] = np.cumsum(probs)
    return cum


def run_chain(problem, horizon=35, runs=100_000, seed=42, workers=1, backend=None):
    """Simulate the lumped level chain of a :class:`~elitist_chain.levels.LevelProblem`."""
    horizon, runs, seed = _check_common(horizon, runs, seed)
    cum = transition_table(problem.kernel)
    values = np.array([float(v) for v in problem.state_fitness()])
    q0 = np.array([float(v) for v in problem.q0])

    def block_fn(u):
        init = _initial_states(q0, u[:, 0])
        return simulate_levels("chain", init, u, horizon, backend=backend, cum=cum)

    mean, stderr = _run_blocks(seed, runs, 1 + horizon, horizon, values, block_fn, workers)
    return EmpiricalSeries(horizon, runs, seed, float(problem.f_opt), mean, stderr, problem.label)


def _z_scores(diff, se, atol):
    # differences within roundoff count as agreement even when the spread is
    # itself only roundoff (a column of identical values)
    z = np.zeros_like(diff)
    off = np.abs(diff) > atol
    with np.errstate(divide="ignore"):
        z[off] = np.where(se[off] > 0, diff[off] / np.where(se[off] > 0, se[off], 1.0),
                          np.copysign(np.inf, diff[off]))
    return z


def compare(analytic, empirical, threshold=4.0, atol=None):
    """Per-generation z-scores of empirical mean fitness against the analytic F_t.

    A difference within ``atol`` (default ``1e-9 * max(1, |f_opt|)``) scores
    0; a larger difference with zero standard error scores infinity.
    """
    if analytic.horizon != empirical.horizon:
        raise ValueError(f"horizon mismatch: analytic {analytic.horizon} vs empirical {empirical.horizon}")
    if atol is None:
        atol = 1e-9 * max(1.0, abs(float(empirical.f_opt)))
    diff = empirical.mean - np.asarray(analytic.fitness, dtype=np.float64)
    return ComparisonReport(_z_scores(diff, empirical.stderr, atol), float(threshold))


def compare_empirical(a, b, threshold=4.0, atol=None):
    """Two-sample z-scores between two empirical series of equal horizon."""
    if a.horizon != b.horizon:
        raise ValueError(f"horizon mismatch: {a.horizon} vs {b.horizon}")
    if atol is None:
        atol = 1e-9 * max(1.0, abs(float(a.f_opt)))
    se = np.sqrt(a.stderr ** 2 + b.stderr ** 2)
    return ComparisonReport(_z_scores(a.mean - b.mean, se, atol), float(threshold))
