"""Level-model construction: kernel, fitness errors, optimum and start distribution.

States are numbered by distance to the optimum.  For the bitstring builders
state ``i`` (1..n) holds the strings with ``i`` zero bits and the all-ones
string is the optimum, so fitness errors grow with the state index.  In the
arrays below state ``i`` lives at position ``i - 1``.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numbers import as_array, parse_number
from .triangular import DEFAULT_EPS_DIAG, TriangularKernel, require_valid

BUILTIN_FAMILIES = ("onemax", "square", "log")


@dataclass(frozen=True)
class FitnessFamily:
    """Fitness as a function of the number of zero bits.

    ``name`` is one of ``onemax`` (n - i), ``square`` ((n - i)**2),
    ``log`` (ln(n - i + 1)) or ``custom``, in which case ``table[i]`` is the
    fitness of level ``i`` for i = 0..n and must strictly decrease.
    """

    name: str
    table: tuple = None

    def __post_init__(self):
        if self.name not in BUILTIN_FAMILIES + ("custom",):
            raise ValueError(f"unknown fitness family {self.name!r}")
        if self.name == "custom":
            if not self.table:
                raise ValueError("custom family needs a fitness table")
            object.__setattr__(self, "table", tuple(self.table))

    def levels(self, n, exact=False):
        """Fitness of levels 0..n (level 0 is the optimum)."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if self.name == "onemax":
            vals = [n - i for i in range(n + 1)]
        elif self.name == "square":
            vals = [(n - i) ** 2 for i in range(n + 1)]
        elif self.name == "log":
            return [math.log(n - i + 1) for i in range(n + 1)]
        else:
            if len(self.table) != n + 1:
                raise ValueError(f"custom table has {len(self.table)} entries, expected n + 1 = {n + 1}")
            vals = [parse_number(v, exact) for v in self.table]
            bad = [i for i in range(n) if not vals[i] > vals[i + 1]]
            if bad:
                raise ValueError(
                    f"custom fitness table must strictly decrease with the number of zero bits; "
                    f"violated between levels {bad[0]} and {bad[0] + 1}"
                )
            return vals
        return [Fraction(v) for v in vals] if exact else [float(v) for v in vals]


@dataclass(frozen=True)
class LevelProblem:
    """Kernel over the non-optimal states plus fitness data.

    Attributes
    ----------
    kernel : TriangularKernel
    errors : ndarray
        ``errors[i] = f_opt - f(state i + 1)``; positive and nondecreasing.
    f_opt : scalar
    q0 : ndarray
        Initial mass on the non-optimal states; ``1 - q0.sum()`` starts at
        the optimum.
    """

    kernel: TriangularKernel
    errors: np.ndarray
    f_opt: object
    q0: np.ndarray
    label: str = ""

    def __post_init__(self):
        for a in (self.errors, self.q0):
            a.setflags(write=False)

    @property
    def dim(self):
        return self.kernel.dim

    @property
    def exact(self):
        return self.kernel.exact

    def state_fitness(self):
        """Fitness of states 0..L, index 0 being the optimum."""
        return np.concatenate([[self.f_opt], self.f_opt - self.errors])

    def with_q0(self, q0):
        return from_explicit(self.kernel, self.errors, self.f_opt, q0, label=self.label)


def _resolve_q0(q0, L, exact):
    one = Fraction(1) if exact else 1.0
    if q0 is None or (isinstance(q0, str) and q0 == "worst"):
        out = [one * 0] * (L - 1) + [one]
    elif isinstance(q0, str) and q0 == "uniform":
        out = [one / L] * L
    elif isinstance(q0, str):
        raise ValueError(f"unknown initial distribution {q0!r}; use 'worst', 'uniform' or a vector")
    else:
        out = q0
    return as_array(list(out), exact=exact)


def from_explicit(matrix, errors, f_opt, q0=None, label="", eps_diag=DEFAULT_EPS_DIAG):
    """Assemble and check a :class:`LevelProblem`; nothing is normalised.

    ``q0`` may be a vector, ``"worst"`` (all mass on the last state, the
    default) or ``"uniform"``.

    Raises
    ------
    ValueError
        Naming the violated condition (dimensions, error ordering,
        distribution mass); :class:`~elitist_chain.triangular.InvalidKernelError`
        for kernel violations.
    """
    K = matrix if isinstance(matrix, TriangularKernel) else TriangularKernel(as_array(matrix, exact=_has_fraction(matrix)))
    exact = K.exact
    require_valid(K, eps_diag)
    L = K.dim
    e = as_array(list(errors), exact=exact)
    f_opt = parse_number(f_opt, exact)
    q = _resolve_q0(q0, L, exact)
    if e.shape != (L,):
        raise ValueError(f"errors has length {len(e)}, kernel has {L} states")
    if q.shape != (L,):
        raise ValueError(f"q0 has length {len(q)}, kernel has {L} states")
    if any(v <= 0 for v in e):
        raise ValueError("fitness errors must be positive (every modelled state is non-optimal)")
    if any(e[i] > e[i + 1] for i in range(L - 1)):
        raise ValueError("fitness errors must be nondecreasing in the state index")
    tol = 0 if exact else 1e-12
    if any(v < 0 for v in q) or q.sum() > 1 + tol:
        raise ValueError("q0 must be nonnegative with total mass <= 1")
    return LevelProblem(K, e, f_opt, q, label)


def _has_fraction(matrix):
    if isinstance(matrix, np.ndarray):
        return matrix.dtype == object and any(isinstance(v, (Fraction, str)) for v in matrix.flat)
    return any(isinstance(v, (Fraction, str)) for row in matrix for v in row)


def _family(family):
    return family if isinstance(family, FitnessFamily) else FitnessFamily(family)


def _errors_from_levels(fit):
    f_opt = fit[0]
    errors = [f_opt - f for f in fit[1:]]
    return f_opt, errors


def onebit_level_chain(family, n, q0=None, exact=False, label=None):
    """Level chain of the (1+1) EA with one-bit mutation.

    From state j (j zero bits) the flipped bit is a zero with probability
    j/n, which is the only improving move; everything else is rejected.
    """
    family = _family(family)
    fit = family.levels(n, exact)
    one = Fraction(1) if exact else 1.0
    rows = [[one * 0] * n for _ in range(n)]
    for j in range(1, n + 1):
        rows[j - 1][j - 1] = one - one * j / n
        if j >= 2:
            rows[j - 2][j - 1] = one * j / n
    K = TriangularKernel(np.array(rows, dtype=object if exact else np.float64))
    f_opt, errors = _errors_from_levels(fit)
    if exact and family.name == "log":
        K = K.to_float()
    return from_explicit(K, errors, f_opt, q0, label=label or f"{family.name}-n{n}-onebit")


def _bitwise_probability(n, j, i, p, one):
    """P(mutating a string with j zeros yields i zeros), i < j."""
    q = one - p
    total = one * 0
    for b in range(0, min(i, n - j) + 1):
        flipped_zeros = j - i + b
        total += (math.comb(j, flipped_zeros) * p ** flipped_zeros * q ** (j - flipped_zeros)
                  * math.comb(n - j, b) * p ** b * q ** (n - j - b))
    return total


def bitwise_level_chain(family, n, p_mut, q0=None, exact=False, eps_diag=DEFAULT_EPS_DIAG, label=None):
    """Level chain of the (1+1) EA with independent per-bit flips at rate ``p_mut``.

    Offspring with as many or more zero bits are rejected, so the diagonal
    collects all non-improving mass; the remainder of column ``j`` beyond
    the listed states is the probability of jumping to the optimum.
    """
    family = _family(family)
    p = parse_number(p_mut, exact)
    if not 0 < p < 1:
        raise ValueError(f"p_mut must lie in (0, 1), got {p_mut!r}")
    fit = family.levels(n, exact)
    one = Fraction(1) if exact else 1.0
    r = np.empty((n, n), dtype=object if exact else np.float64)
    r[...] = one * 0
    for j in range(1, n + 1):
        improve = one * 0
        for i in range(0, j):
            prob = _bitwise_probability(n, j, i, p, one)
            improve += prob
            if i >= 1:
                r[i - 1, j - 1] = prob
        r[j - 1, j - 1] = one - improve
    K = TriangularKernel(r)
    f_opt, errors = _errors_from_levels(fit)
    if exact and family.name == "log":
        K = K.to_float()
    return from_explicit(K, errors, f_opt, q0, label=label or f"{family.name}-n{n}-bitwise", eps_diag=eps_diag)


def bound_kernel(K):
    """Bidiagonal kernel with the same diagonal; all leaving mass moves one state down.

    ``s[i, i] = r[i, i]`` and ``s[i, i + 1] = 1 - r[i + 1, i + 1]``.
    """
    r = K.entries
    L = K.dim
    s = np.empty_like(r)
    s[...] = r[0, 0] * 0
    one = Fraction(1) if K.exact else 1.0
    for i in range(L):
        s[i, i] = r[i, i]
        if i + 1 < L:
            s[i, i + 1] = one - r[i + 1, i + 1]
    return TriangularKernel(s)
