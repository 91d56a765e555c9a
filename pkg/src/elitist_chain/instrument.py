"""Operation counting for the cost properties.

:class:`Counted` wraps a scalar and bumps a shared counter on every
multiplication and division; additions are free, matching the usual
"multiplications and divisions" cost model.  The loop kernels run on object
arrays of ``Counted`` through their ``py_func``.
"""
from itertools import islice
from math import comb

import numpy as np

from . import _kernels
from .analytics import SpectralErrorModel, iter_errors


class OpCounter:
    def __init__(self):
        self.count = 0


class Counted:
    __slots__ = ("value", "counter")

    def __init__(self, value, counter):
        self.value = value
        self.counter = counter

    def _v(self, other):
        return other.value if isinstance(other, Counted) else other

    def __mul__(self, other):
        self.counter.count += 1
        return Counted(self.value * self._v(other), self.counter)

    __rmul__ = __mul__

    def __truediv__(self, other):
        self.counter.count += 1
        return Counted(self.value / self._v(other), self.counter)

    def __rtruediv__(self, other):
        self.counter.count += 1
        return Counted(self._v(other) / self.value, self.counter)

    def __add__(self, other):
        return Counted(self.value + self._v(other), self.counter)

    __radd__ = __add__

    def __sub__(self, other):
        return Counted(self.value - self._v(other), self.counter)

    def __rsub__(self, other):
        return Counted(self._v(other) - self.value, self.counter)

    def __neg__(self):
        return Counted(-self.value, self.counter)

    def __pow__(self, k):
        # only lam ** 0 appears on the counted paths
        if k != 0:
            raise NotImplementedError("powers are not counted")
        return Counted(self.value ** 0, self.counter)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"Counted({self.value!r})"


def _wrap(arr, counter):
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Counted(v, counter)
    return out


def power_factor_op_count(K, method="factored"):
    """Multiplications + divisions spent computing the power factors of ``K``."""
    counter = OpCounter()
    L = K.dim
    r = _wrap(np.asarray(K.entries, dtype=object), counter)
    if method == "factored":
        x = _wrap(np.zeros((L, L), dtype=object), counter)
        y = _wrap(np.eye(L, dtype=int).astype(object), counter)
        p = _wrap(np.zeros((L, L, L), dtype=object), counter)
        _kernels.factored_loop.py_func(r, x, y, p)
    elif method == "definition":
        p = _wrap(np.zeros((L, L, L), dtype=object), counter)
        _kernels.definition_loop.py_func(r, p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return counter.count


def reference_op_count(L):
    """Published cost of the power factors, 2 * C(L + 2, 3)."""
    return 2 * comb(L + 2, 3)


def error_step_op_counts(model, steps):
    """Cumulative operation count after each of ``steps`` evaluations of E_t."""
    counter = OpCounter()
    counted = SpectralErrorModel(
        _wrap(np.asarray(model.eigenvalues, dtype=object), counter),
        _wrap(np.asarray(model.coefficients, dtype=object), counter),
        model.f_opt, model.e0,
    )
    counts = []
    for _ in islice(iter_errors(counted), steps):
        counts.append(counter.count)
    return counts
