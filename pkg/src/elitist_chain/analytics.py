"""Relative approximation error, expected fitness and average convergence rate.

For t >= 1 the error is an exponential mixture over the kernel diagonal::

    E_t = sum_k c[k] * lam[k] ** (t - 1),   F_t = f_opt * (1 - E_t),
    R_t = 1 - (E_t / E_0) ** (1 / t)

``E_0`` comes straight from the initial distribution.  The matrix-iteration
oracle :func:`exact_error_via_matrix` never touches the power factors.
"""
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from .levels import bound_kernel
from .triangular import compute_power_factors


class UndefinedRateError(ValueError):
    """The average convergence rate needs a nonzero initial error."""


@dataclass(frozen=True)
class SpectralErrorModel:
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    f_opt: object
    e0: object
    label: str = ""

    def __post_init__(self):
        for a in (self.eigenvalues, self.coefficients):
            a.setflags(write=False)

    @property
    def dim(self):
        return len(self.eigenvalues)

    @property
    def f0(self):
        return self.f_opt * (1 - self.e0)

    def check(self):
        """Messages for violated model invariants (empty when fine)."""
        out = []
        for k, lam in enumerate(self.eigenvalues):
            if not 0 <= lam < 1:
                out.append(f"eigenvalue {k + 1} = {lam} outside [0, 1); mass can stay in state {k + 1} forever")
        if not 0 <= self.e0 <= 1:
            out.append(f"initial error E_0 = {self.e0} outside [0, 1]")
        return out

    def with_offset(self, delta):
        """Copy with ``delta`` added to every coefficient (negative-control fixtures)."""
        return SpectralErrorModel(self.eigenvalues, self.coefficients + delta, self.f_opt, self.e0, self.label)


@dataclass(frozen=True)
class TrajectoryMetrics:
    """Analytic series for t = 0..horizon; ``rate[0]`` is NaN (undefined)."""

    horizon: int
    fitness: np.ndarray
    error: np.ndarray
    rate: np.ndarray
    f_opt: object
    label: str = ""

    @property
    def t(self):
        return np.arange(self.horizon + 1)


def coefficients(problem, factors=None):
    """Spectral model of a level problem.

    ``c[k] = sum_{i <= j} e[i] * p[i, j, k] * q0[j] / f_opt``.  The power
    factors are computed when not supplied.
    """
    if not problem.f_opt > 0:
        raise ValueError(f"f_opt must be positive, got {problem.f_opt}")
    if factors is None:
        factors = compute_power_factors(problem.kernel)
    elif factors.kernel != problem.kernel:
        raise ValueError("power factors belong to a different kernel")
    p = factors.factors
    e = problem.errors
    q = problem.q0
    # sum over i, then j
    c = np.dot(q, np.tensordot(e, p, axes=(0, 0))) / problem.f_opt
    e0 = np.dot(e, q) / problem.f_opt
    return SpectralErrorModel(problem.kernel.diagonal, np.asarray(c), problem.f_opt, e0, problem.label)


def _check_t(t, minimum):
    if int(t) != t or t < minimum:
        raise ValueError(f"t must be an integer >= {minimum}, got {t!r}")
    return int(t)


def error_at(model, t):
    """E_t; t = 0 returns the stored initial error."""
    t = _check_t(t, 0)
    if t == 0:
        return model.e0
    total = model.coefficients[0] * 0
    for c, lam in zip(model.coefficients, model.eigenvalues):
        total += c * lam ** (t - 1)
    return total


def fitness_at(model, t):
    return model.f_opt * (1 - error_at(model, t))


def _rate(e_t, e0, t):
    if e0 == 0:
        raise UndefinedRateError("average convergence rate is undefined when the run starts at the optimum (E_0 = 0)")
    ratio = float(e_t / e0)
    # E_t >= 0 for any valid problem; negative values are roundoff
    if ratio <= 0.0:
        return 1.0
    return 1.0 - ratio ** (1.0 / t)


def avg_rate_at(model, t):
    """R_t = 1 - (E_t / E_0) ** (1/t) for t >= 1, as a float."""
    t = _check_t(t, 1)
    return _rate(error_at(model, t), model.e0, t)


def iter_errors(model):
    """Yield E_1, E_2, ... with 2L multiplications per step."""
    powers = [lam ** 0 for lam in model.eigenvalues]
    coeffs = list(model.coefficients)
    lams = list(model.eigenvalues)
    while True:
        total = coeffs[0] * powers[0]
        for k in range(1, len(coeffs)):
            total = total + coeffs[k] * powers[k]
        yield total
        powers = [pw * lam for pw, lam in zip(powers, lams)]


def series(model, horizon):
    """F_t, E_t and R_t for t = 0..horizon."""
    horizon = _check_t(horizon, 1)
    errs = [model.e0]
    gen = iter_errors(model)
    for _ in range(horizon):
        errs.append(next(gen))
    exact = isinstance(model.e0, Fraction)
    error = np.array(errs, dtype=object if exact else np.float64)
    fitness = np.array([model.f_opt * (1 - e) for e in errs], dtype=error.dtype)
    rate = np.full(horizon + 1, np.nan)
    if model.e0 != 0:
        for t in range(1, horizon + 1):
            rate[t] = _rate(errs[t], model.e0, t)
    return TrajectoryMetrics(horizon, fitness, error, rate, model.f_opt, model.label)


def exact_error_via_matrix(problem, t):
    """Oracle E_t = e . R**t q0 / f_opt by ``t`` matrix-vector steps."""
    t = _check_t(t, 0)
    r = problem.kernel.entries
    q = problem.q0.copy()
    for _ in range(t):
        q = r @ q
    return np.dot(problem.errors, q) / problem.f_opt


def bound_violations(problem, horizon=50, rtol=1e-12):
    """Times t in 1..horizon where the bidiagonal bound kernel fails to dominate.

    Compares ``e . S**t q0`` against ``e . R**t q0`` with ``S`` from
    :func:`~elitist_chain.levels.bound_kernel`; returns ``(t, bound, exact)``
    triples for every t where the bound is smaller (beyond ``rtol`` relative
    slack in float mode).
    """
    out = []
    r, s = problem.kernel.entries, bound_kernel(problem.kernel).entries
    qr, qs = problem.q0.copy(), problem.q0.copy()
    for t in range(1, horizon + 1):
        qr, qs = r @ qr, s @ qs
        er, es = np.dot(problem.errors, qr), np.dot(problem.errors, qs)
        slack = 0 if problem.exact else rtol * max(abs(float(er)), 1e-300)
        if es < er - slack:
            out.append((t, es, er))
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

MINUS = "−"


def _round(x, digits):
    # half-up on the decimal repr, so 1.3125 shows as 1.313
    return str(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


def _fmt_lambda(lam, digits):
    s = _round(lam, max(digits, 2)).rstrip("0")
    head, _, tail = s.partition(".")
    return f"{head}.{tail.ljust(2, '0')}"


def _mixture(model, digits, cutoff):
    terms, omitted = [], 0
    for c, lam in zip(model.coefficients, model.eigenvalues):
        c = float(c)
        if c == 0.0 or abs(c) < cutoff:
            omitted += c != 0.0
            continue
        terms.append((c, f"{_round(abs(c), digits)}×{_fmt_lambda(lam, digits)}^(t{MINUS}1)"))
    if not terms:
        return "0", omitted
    text = (MINUS if terms[0][0] < 0 else "") + terms[0][1]
    for c, body in terms[1:]:
        text += f" {MINUS if c < 0 else '+'} {body}"
    return text, omitted


def format_scalar(v, sig=12):
    """Compact decimal text with a typographic minus (report use only)."""
    v = round(float(v), sig)
    if v == 0:
        return "0"
    s = f"{v:.{sig}g}"
    return MINUS + s[1:] if s.startswith("-") else s


def closed_form_report(model, digits=3, cutoff=5e-4):
    """Human-readable closed forms of E_t, F_t and R_t.

    Coefficients are rounded to ``digits`` decimals for display only; terms
    with ``|c_k| < cutoff`` are dropped and the omission is noted.
    """
    mix, omitted = _mixture(model, digits, cutoff)
    f_opt = format_scalar(model.f_opt, 6)
    lines = [f"E_t = {mix}"]
    if mix == "0":
        lines.append(f"F_t = {f_opt}")
    else:
        lines.append(f"F_t = {f_opt}×(1 {MINUS} ({mix}))")
    if model.e0 == 0:
        lines.append("R_t undefined (E_0 = 0)")
    elif mix == "0":
        lines.append("R_t = 1")
    else:
        e0 = format_scalar(model.e0, 6)
        scaled = mix if e0 == "1" else f"({mix})/{e0}"
        lines.append(f"R_t = 1 {MINUS} ({scaled})^(1/t)")
    if omitted:
        lines.append(f"({omitted} term(s) with |c_k| < {cutoff:g} omitted)")
    return "\n".join(lines)
