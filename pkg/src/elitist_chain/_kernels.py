"""Hot loops, each with a numba kernel and a vectorised numpy twin.

The loop kernels are written so that their ``py_func`` also runs on object
arrays; the exact-rational and instrumented paths rely on that.  The
simulation kernels of both backends consume the same uniform draws and
perform the same comparisons, so they produce identical trajectories.
"""
import numpy as np

from ._accel import njit, resolve_backend

# ---------------------------------------------------------------------------
# power factors
# ---------------------------------------------------------------------------


@njit
def definition_loop(r, p):
    # literal recursion: i outer, j ascending, k ascending; O(L^4)
    L = r.shape[0]
    for i in range(L):
        p[i, i, i] = r[i, i]
        for j in range(i + 1, L):
            for k in range(i, j):
                acc = p[i, k, k] * r[k, j]
                for l in range(k + 1, j):
                    acc += p[i, l, k] * r[l, j]
                p[i, j, k] = acc / (r[k, k] - r[j, j])
            s = r[i, j]
            for l in range(i, j):
                s -= p[i, j, l]
            p[i, j, j] = s


@njit
def factored_loop(r, x, y, p):
    """Power factors through the split p[i, j, k] = x[i, k] * y[k, j].

    ``y`` must arrive as the identity and ``x``/``p`` as zeros (of the
    entry type).  ``y[k, :]`` obeys the row-``k`` recursion divided by
    r[k, k]; ``x[i, k]`` equals p[i, k, k].  O(L^3) and no division by a
    diagonal entry.
    """
    L = r.shape[0]
    for j in range(L):
        x[j, j] = r[j, j]
        for k in range(j):
            acc = y[k, k] * r[k, j]
            for l in range(k + 1, j):
                acc += y[k, l] * r[l, j]
            y[k, j] = acc / (r[k, k] - r[j, j])
        for i in range(j):
            s = r[i, j]
            for l in range(i, j):
                s -= x[i, l] * y[l, j]
            x[i, j] = s
    for i in range(L):
        for j in range(i, L):
            for k in range(i, j + 1):
                p[i, j, k] = x[i, k] * y[k, j]


def factored_numpy(r, x, y, p):
    """Vectorised twin of :func:`factored_loop` (float arrays)."""
    L = r.shape[0]
    diag = np.diagonal(r).copy()
    for j in range(L):
        x[j, j] = r[j, j]
        if j == 0:
            continue
        y[:j, j] = (y[:j, :j] @ r[:j, j]) / (diag[:j] - diag[j])
        x[:j, j] = r[:j, j] - x[:j, :j] @ y[:j, j]
    p[...] = np.einsum("ik,kj->ijk", x, y)


def power_factor_arrays(r, backend=None):
    """Return ``(x, y, p)`` for a float64 kernel using the chosen backend."""
    L = r.shape[0]
    x = np.zeros((L, L))
    y = np.eye(L)
    p = np.zeros((L, L, L))
    if resolve_backend(backend) == "numba":
        factored_loop(r, x, y, p)
    else:
        factored_numpy(r, x, y, p)
    return x, y, p


# ---------------------------------------------------------------------------
# Monte-Carlo trajectories
# ---------------------------------------------------------------------------
# u has shape (runs, 1 + T * draws_per_step); column 0 is reserved for the
# initial-state draw, which is resolved before the kernel is called.


@njit
def onebit_loop(init_level, n, u, fit, levels):
    runs, steps = levels.shape
    bits = np.empty(n, np.uint8)
    for r in range(runs):
        z = init_level[r]
        for b in range(n):
            bits[b] = 0 if b < z else 1
        levels[r, 0] = z
        for t in range(steps - 1):
            idx = int(u[r, 1 + t] * n)
            child = z + 1 if bits[idx] == 1 else z - 1
            if fit[child] > fit[z]:
                bits[idx] ^= 1
                z = child
            levels[r, t + 1] = z


@njit
def bitwise_loop(init_level, n, p_mut, u, fit, levels):
    runs, steps = levels.shape
    bits = np.empty(n, np.uint8)
    child = np.empty(n, np.uint8)
    for r in range(runs):
        z = init_level[r]
        for b in range(n):
            bits[b] = 0 if b < z else 1
        levels[r, 0] = z
        for t in range(steps - 1):
            off = 1 + t * n
            cz = 0
            for b in range(n):
                v = bits[b]
                if u[r, off + b] < p_mut:
                    v = 1 - v
                child[b] = v
                if v == 0:
                    cz += 1
            if fit[cz] > fit[z]:
                bits[:] = child
                z = cz
            levels[r, t + 1] = z


@njit
def chain_loop(init_state, u, cum, states):
    runs, steps = states.shape
    for r in range(runs):
        s = init_state[r]
        states[r, 0] = s
        for t in range(steps - 1):
            v = u[r, 1 + t]
            o = 0
            while v >= cum[s, o]:
                o += 1
            s -= o
            states[r, t + 1] = s


def _initial_bits(init_level, n):
    return (np.arange(n)[None, :] >= init_level[:, None]).astype(np.uint8)


def onebit_numpy(init_level, n, u, fit, levels):
    runs, steps = levels.shape
    rows = np.arange(runs)
    bits = _initial_bits(init_level, n)
    z = init_level.astype(np.int64)
    levels[:, 0] = z
    for t in range(steps - 1):
        idx = (u[:, 1 + t] * n).astype(np.int64)
        child = np.where(bits[rows, idx] == 1, z + 1, z - 1)
        accept = fit[child] > fit[z]
        bits[rows[accept], idx[accept]] ^= 1
        z = np.where(accept, child, z)
        levels[:, t + 1] = z


def bitwise_numpy(init_level, n, p_mut, u, fit, levels):
    runs, steps = levels.shape
    bits = _initial_bits(init_level, n)
    z = init_level.astype(np.int64)
    levels[:, 0] = z
    for t in range(steps - 1):
        off = 1 + t * n
        child = bits ^ (u[:, off:off + n] < p_mut).astype(np.uint8)
        cz = n - child.sum(axis=1, dtype=np.int64)
        accept = fit[cz] > fit[z]
        bits[accept] = child[accept]
        z = np.where(accept, cz, z)
        levels[:, t + 1] = z


def chain_numpy(init_state, u, cum, states):
    runs, steps = states.shape
    s = init_state.astype(np.int64)
    states[:, 0] = s
    for t in range(steps - 1):
        v = u[:, 1 + t]
        s = s - (v[:, None] >= cum[s]).sum(axis=1)
        states[:, t + 1] = s


def simulate_levels(kind, init, u, horizon, backend=None, **kw):
    """Dispatch one block of trajectories; returns an int64 array (runs, T+1)."""
    out = np.empty((len(init), horizon + 1), dtype=np.int64)
    init = np.ascontiguousarray(init, dtype=np.int64)
    numba_path = resolve_backend(backend) == "numba"
    if kind == "onebit":
        fn = onebit_loop if numba_path else onebit_numpy
        fn(init, kw["n"], u, kw["fit"], out)
    elif kind == "bitwise":
        fn = bitwise_loop if numba_path else bitwise_numpy
        fn(init, kw["n"], kw["p_mut"], u, kw["fit"], out)
    elif kind == "chain":
        fn = chain_loop if numba_path else chain_numpy
        fn(init, u, kw["cum"], out)
    else:
        raise ValueError(f"unknown trajectory kind {kind!r}")
    return out
