"""Closed-form powers of upper-triangular kernels with pairwise distinct diagonals.

For an L x L upper-triangular ``R`` whose diagonal entries are pairwise
distinct, every entry of ``R**t`` (t >= 1) is a mixture of diagonal powers::

    (R**t)[i, j] = sum_{k=i..j} p[i, j, k] * R[k, k] ** (t - 1)

with the power factors ``p`` fixed by a recursion over the entries of ``R``.
Indices are 0-based throughout the Python API; column ``j`` is the source
state and row ``i`` the target state.

Only differences of diagonal entries are ever divided by, so singular
kernels (a zero diagonal entry) are fine.  ``0 ** 0`` is taken as 1.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._numbers import as_array

DEFAULT_EPS_DIAG = 1e-9
DEFAULT_EPS_NUM = 1e-12


class InvalidKernelError(ValueError):
    """Raised when a kernel fails :func:`validate_kernel`."""

    def __init__(self, report):
        self.report = report
        super().__init__("invalid kernel:\n  " + "\n  ".join(report.messages))


@dataclass(frozen=True)
class TriangularKernel:
    """Transition submatrix among the non-optimal states.

    ``entries`` is stored read-only as float64, or as an object array of
    :class:`~fractions.Fraction` for exact arithmetic.  Construction only
    checks the shape; use :func:`validate_kernel` for the probabilistic
    invariants.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = self.entries
        if not isinstance(arr, np.ndarray) or arr.dtype not in (np.float64, object):
            arr = as_array(arr, exact=False)
        else:
            arr = arr.copy()
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"kernel must be a non-empty square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, rows, exact=False):
        """Build from nested rows of numbers or strings such as ``"3/4"``."""
        return cls(as_array(rows, exact=exact))

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def exact(self):
        return self.entries.dtype == object

    @property
    def diagonal(self):
        return np.diagonal(self.entries).copy()

    def column_sums(self):
        return self.entries.sum(axis=0)

    def to_exact(self):
        """Fraction copy; floats are read by their shortest decimal repr."""
        if self.exact:
            return self
        return TriangularKernel(as_array(self.entries.tolist(), exact=True))

    def to_float(self):
        if not self.exact:
            return self
        return TriangularKernel(self.entries.astype(np.float64))

    def __eq__(self, other):
        if not isinstance(other, TriangularKernel):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str  # "triangular" | "range" | "column_sum" | "diagonal" | "finite"
    message: str
    where: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    @property
    def messages(self):
        return [v.message for v in self.violations]

    def kinds(self):
        return {v.kind for v in self.violations}

    def __bool__(self):
        return self.ok


def validate_kernel(K, eps_diag=DEFAULT_EPS_DIAG, eps_num=None):
    """List every violated kernel invariant; an empty report means valid.

    States in messages are numbered from 1, matching the usual notation.
    ``eps_num`` (column sums, entry range) defaults to 0 for exact kernels
    and 1e-12 otherwise.
    """
    if not isinstance(K, TriangularKernel):
        K = TriangularKernel(K)
    if eps_num is None:
        eps_num = 0 if K.exact else DEFAULT_EPS_NUM
    r = K.entries
    L = K.dim
    out = []
    if not K.exact and not np.all(np.isfinite(r)):
        bad = [tuple(int(v) + 1 for v in idx) for idx in np.argwhere(~np.isfinite(r))]
        out.append(Violation("finite", f"non-finite entries at {bad}", tuple(bad)))
        return ValidationReport(tuple(out))
    for i in range(L):
        for j in range(L):
            v = r[i, j]
            if i > j and v != 0:
                out.append(Violation("triangular", f"entry r[{i + 1},{j + 1}] = {v} lies below the diagonal", (i + 1, j + 1)))
            if v < -eps_num or v > 1 + eps_num:
                out.append(Violation("range", f"entry r[{i + 1},{j + 1}] = {v} is not a probability", (i + 1, j + 1)))
    for j, s in enumerate(K.column_sums()):
        if s > 1 + eps_num:
            out.append(Violation("column_sum", f"column {j + 1} sums to {s} > 1", (j + 1,)))
    d = K.diagonal
    for i in range(L):
        for j in range(i + 1, L):
            if abs(d[i] - d[j]) <= eps_diag:
                out.append(Violation(
                    "diagonal",
                    f"states {i + 1} and {j + 1} have colliding diagonal entries {d[i]} and {d[j]} "
                    f"(|difference| <= {eps_diag})",
                    (i + 1, j + 1),
                ))
    return ValidationReport(tuple(out))


def require_valid(K, eps_diag=DEFAULT_EPS_DIAG):
    report = validate_kernel(K, eps_diag)
    if not report.ok:
        raise InvalidKernelError(report)
    return K


@dataclass(frozen=True)
class PowerFactors:
    """Power-factor tensor of a kernel, ``factors[i, j, k]`` (0-based).

    Zero outside ``i <= k <= j``.  ``right[i, k]`` holds ``factors[i, k, k]``
    and ``left[k, j]`` the normalised row multipliers, so that
    ``factors[i, j, k] == right[i, k] * left[k, j]``; both are ``None`` when
    the tensor came from the literal recursion.
    """

    kernel: TriangularKernel
    factors: np.ndarray
    right: np.ndarray = field(default=None, repr=False)
    left: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for a in (self.factors, self.right, self.left):
            if a is not None:
                a.setflags(write=False)

    @property
    def dim(self):
        return self.kernel.dim

    @property
    def eigenvalues(self):
        return self.kernel.diagonal


def _zeros(shape, exact):
    if not exact:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def _identity(L, exact):
    out = _zeros((L, L), exact)
    for i in range(L):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def compute_power_factors(K, eps_diag=DEFAULT_EPS_DIAG, method="factored", backend=None):
    """Power factors of a valid kernel.

    Parameters
    ----------
    K : TriangularKernel
    eps_diag : float
        Minimum gap between diagonal entries; closer pairs are rejected.
    method : {"factored", "definition"}
        ``"factored"`` (default) evaluates the recursion through the
        rank-one split of each ``p[:, :, k]`` and costs O(L^3).
        ``"definition"`` runs the recursion literally (i outer, j ascending,
        k ascending), O(L^4); kept as a cross-check.
    backend : {"numba", "numpy"}, optional
        Only used for float kernels; exact kernels always run the generic
        loop on Fractions.

    Raises
    ------
    InvalidKernelError
        If the kernel violates any invariant, in particular the distinct
        diagonal condition.
    """
    require_valid(K, eps_diag)
    r = K.entries
    L = K.dim
    if method == "factored":
        if K.exact:
            x, y, p = _zeros((L, L), True), _identity(L, True), _zeros((L, L, L), True)
            _kernels.factored_loop.py_func(r, x, y, p)
        else:
            x, y, p = _kernels.power_factor_arrays(np.ascontiguousarray(r), backend)
        return PowerFactors(K, p, x, y)
    if method == "definition":
        p = _zeros((L, L, L), K.exact)
        if K.exact:
            _kernels.definition_loop.py_func(r, p)
        else:
            _kernels.definition_loop(np.ascontiguousarray(r), p)
        return PowerFactors(K, p)
    raise ValueError(f"unknown method {method!r}")


def _check_t(t, minimum):
    if int(t) != t or t < minimum:
        raise ValueError(f"t must be an integer >= {minimum}, got {t!r}")
    return int(t)


def power_entry(factors, i, j, t):
    """Entry ``(i, j)`` of ``R**t`` from the power factors, t >= 1."""
    t = _check_t(t, 1)
    L = factors.dim
    if not (0 <= i < L and 0 <= j < L):
        raise IndexError(f"index ({i}, {j}) out of range for a {L}x{L} kernel")
    lam = factors.eigenvalues
    p = factors.factors
    total = p[i, j, i] * 0
    for k in range(i, j + 1):
        total += p[i, j, k] * lam[k] ** (t - 1)
    return total


def kernel_power(factors, t):
    """``R**t`` assembled from the power factors, t >= 1."""
    t = _check_t(t, 1)
    lam = factors.eigenvalues
    return np.dot(factors.factors, lam ** (t - 1))


def brute_force_power(K, t):
    """``R**t`` by ``t`` successive matrix products (identity for t = 0)."""
    t = _check_t(t, 0)
    r = K.entries
    out = _identity(K.dim, K.exact)
    for _ in range(t):
        out = out @ r
    return out
