"""Cosine and sine propagators for commuting families.

For pairwise commuting Hermitian A_1..A_n the propagator
cos(t sqrt(A_1^2+...+A_n^2)) is assembled from one-dimensional cosines:
the product cos(t w_1 A_1)...cos(t w_n A_n) is averaged over the unit
sphere (n odd) or over the unit ball against (1-|w|^2)^(-1/2) (n even),
and the derivative ladder D = d/dt (1/t d/dt)^(m-1) is applied to
t^(2m-1) times that average.  Per quadrature node the product of cosines
is expanded as an even power series in t, so D acts exactly on monomials
and no numerical differentiation enters.

The same machinery with the left-most d/dt dropped yields the smoothed
sine propagator sin(t sqrt(S)) / sqrt(S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcinv, roots_genlaguerre, roots_legendre

from .operators import HermitianOperator, as_matrix
from .quadrature import build_ball_rule, build_sphere_rule, stable_sum

__all__ = [
    "CommutingFamily",
    "OddTimeSeries",
    "EvenTimeSeries",
    "d_operator_apply",
    "cos_ascent_even",
    "cos_ascent_odd",
    "cos_ascent",
    "sin_ascent",
    "transmutation_check",
    "product_heat_expansion_check",
]

COMMUTATOR_RTOL = 1e-10
SERIES_TAIL_TOL = 1e-13
SERIES_ORDER_CAP = 120
NODE_CHUNK = 2048


@dataclass(eq=False)
class CommutingFamily:
    """Ordered family of pairwise commuting Hermitian operators."""

    operators: list
    commutator_defect: float = 0.0

    def __init__(self, operators):
        mats = [as_matrix(op) for op in operators]
        if not mats:
            raise ValueError("family must contain at least one operator")
        d = mats[0].shape[0]
        worst = 0.0
        for i, a in enumerate(mats):
            if a.shape != (d, d):
                raise ValueError("family members must share one dimension")
            na = np.linalg.norm(a)
            for b in mats[i + 1 :]:
                nb = np.linalg.norm(b)
                if na > 0 and nb > 0:
                    worst = max(worst, np.linalg.norm(a @ b - b @ a) / (na * nb))
        if worst > COMMUTATOR_RTOL:
            raise ValueError(
                f"family does not commute (relative defect {worst:.3e}); "
                "use the splitting-series route for non-commuting operators"
            )
        self.operators = mats
        self.commutator_defect = worst

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def norm_sum(self) -> float:
        return float(sum(np.linalg.norm(m, 2) for m in self.operators))


def _ladder_cos(k: int, m: int) -> float:
    """D maps t^(2k+2m-1) to this constant times t^(2k); 1 when m = 0."""
    if m == 0:
        return 1.0
    out = float(2 * k + 1)
    for j in range(1, m):
        out *= 2 * k + 2 * j + 1
    return out


def _ladder_sin(k: int, m: int) -> float:
    """Ladder with the left-most d/dt dropped: exponent stays 2k+1."""
    return _ladder_cos(k, m) / (2 * k + 1)


@dataclass(eq=False)
class OddTimeSeries:
    """Finite series sum_k c_k t^(2k+parity_order) with odd parity_order."""

    parity_order: int
    coefficients: list
    truncation: int
    tail_bound: float = 0.0

    def __post_init__(self):
        if self.parity_order < 1 or self.parity_order % 2 == 0:
            raise ValueError("parity_order must be a positive odd integer")

    def evaluate(self, t: float):
        t2 = t * t
        acc = np.zeros_like(np.asarray(self.coefficients[0], dtype=complex))
        power = float(t) ** self.parity_order
        for c in self.coefficients:
            acc = acc + np.asarray(c) * power
            power *= t2
        return acc

    __call__ = evaluate


@dataclass(eq=False)
class EvenTimeSeries:
    """Finite series sum_k c_k t^(2k); evaluation only sees t^2."""

    coefficients: list
    truncation: int
    tail_bound: float = 0.0

    def evaluate(self, t: float):
        t2 = t * t
        acc = np.zeros_like(np.asarray(self.coefficients[0], dtype=complex))
        power = 1.0
        for c in self.coefficients:
            acc = acc + np.asarray(c) * power
            power *= t2
        return acc

    __call__ = evaluate


def d_operator_apply(series: OddTimeSeries, m: int) -> EvenTimeSeries:
    """Apply D = d/dt (1/t d/dt)^(m-1) exactly to an odd monomial series.

    Requires parity_order = 2m-1; the coefficient of t^(2k+2m-1) picks up
    (2k+2m-1)(2k+2m-3)...(2k+3)(2k+1) and lands on t^(2k).
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if series.parity_order != 2 * m - 1:
        raise ValueError(
            f"series parity order {series.parity_order} does not match 2m-1 = {2 * m - 1}"
        )
    coeffs = [np.asarray(c) * _ladder_cos(k, m) for k, c in enumerate(series.coefficients)]
    amplified = series.tail_bound * _ladder_cos(series.truncation + 1, m)
    return EvenTimeSeries(coeffs, series.truncation, amplified)


def _truncation_order(norm_sum: float, t: float, m: int, tol: float = SERIES_TAIL_TOL) -> int:
    """Smallest N with ladder-amplified cosine-product tail below tol."""
    x = norm_sum * abs(t)
    if x == 0.0:
        return 2
    logx = math.log(x)
    n = 2
    while n < SERIES_ORDER_CAP:
        log_tail = (2 * n + 2) * logx - math.lgamma(2 * n + 3)
        log_tail += math.log(_ladder_cos(n + 1, max(m, 1)))
        if log_tail <= math.log(tol):
            return n
        n += 1
    raise ValueError(
        f"time horizon too large for the series route (norm*|t| = {x:.3e}); "
        "no truncation order below the cap reaches the tolerance"
    )


def _node_product_series(mats, nodes, weights, order: int) -> np.ndarray:
    """Weighted node sum of the even t-series of cos(t w_1 A_1)...cos(t w_n A_n).

    Returns G with shape (order+1, d, d): the quadrature of the coefficient
    of t^(2k).  Nodes are processed in fixed-size chunks and combined with
    compensated summation, so the accumulation order never varies.
    """
    d = mats[0].shape[0]
    squares = [m @ m for m in mats]
    total = np.zeros((order + 1, d, d), dtype=complex)
    comp = np.zeros_like(total)
    eye = np.eye(d, dtype=complex)
    for start in range(0, len(weights), NODE_CHUNK):
        nb = nodes[start : start + NODE_CHUNK]
        wb = weights[start : start + NODE_CHUNK]
        series = np.zeros((len(wb), order + 1, d, d), dtype=complex)
        series[:, 0] = eye
        for i, x2 in enumerate(squares):
            c2 = nb[:, i] ** 2
            updated = series.copy()
            running = series
            factor = np.ones(len(wb))
            for j in range(1, order + 1):
                factor = factor * (-c2) / ((2 * j) * (2 * j - 1))
                running = running[:, :-1] @ x2
                updated[:, j:] += factor[:, None, None, None] * running
            series = updated
        part = np.einsum("k,knab->nab", wb, series)
        y = part - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _ascent_series(fam: CommutingFamily, t: float, rule_level: int | None):
    """Shared quadrature stage: returns (G, m, prefactor, rule, N)."""
    n = len(fam)
    m, odd = (n // 2, False) if n % 2 == 0 else ((n - 1) // 2, True)
    order = _truncation_order(fam.norm_sum(), t, m)
    level = order if rule_level is None else rule_level
    if level < order:
        raise ValueError(
            f"quadrature level {level} cannot integrate the degree-{order} "
            f"series terms; need level >= {order}"
        )
    if odd:
        rule = build_sphere_rule(n, level)
        prefactor = 0.5 * (2.0 * math.pi) ** (-m)
    else:
        rule = build_ball_rule(n, level)
        prefactor = (2.0 * math.pi) ** (-m)
    coeffs = _node_product_series(fam.operators, rule.nodes, rule.weights, order)
    x = fam.norm_sum() * abs(t)
    tail = 0.0
    if x > 0:
        tail = math.exp((2 * order + 2) * math.log(x) - math.lgamma(2 * order + 3))
    tail += (rule.moment_error or 0.0)
    return coeffs, m, prefactor, rule, order, tail


def cos_ascent_even(fam: CommutingFamily, t: float, rule_level: int | None = None) -> np.ndarray:
    """cos(t sqrt(sum A_i^2)) for an even-sized commuting family.

    Realizes (2 pi)^(-m) D [ t^(2m-1) ball-average of the cosine product ]
    with the integrand expanded per node as an even series in t.
    """
    if len(fam) % 2 != 0:
        raise ValueError("even route requires an even number of operators")
    coeffs, m, prefactor, _, order, tail = _ascent_series(fam, t, rule_level)
    bracket = OddTimeSeries(2 * m - 1, list(coeffs), order, tail)
    return prefactor * d_operator_apply(bracket, m).evaluate(t)


def cos_ascent_odd(fam: CommutingFamily, t: float, rule_level: int | None = None) -> np.ndarray:
    """cos(t sqrt(sum A_i^2)) for an odd-sized commuting family.

    Sphere average with prefactor 1/(2 (2 pi)^m).  n = 1 degenerates to
    the plain two-point average, which reproduces cos(t A) exactly.
    """
    if len(fam) % 2 == 0:
        raise ValueError("odd route requires an odd number of operators")
    coeffs, m, prefactor, _, order, tail = _ascent_series(fam, t, rule_level)
    if m == 0:
        series = EvenTimeSeries(list(coeffs), order, tail)
        return prefactor * series.evaluate(t)
    bracket = OddTimeSeries(2 * m - 1, list(coeffs), order, tail)
    return prefactor * d_operator_apply(bracket, m).evaluate(t)


def cos_ascent(fam: CommutingFamily, t: float, rule_level: int | None = None) -> np.ndarray:
    """Parity dispatch for the cosine propagator of a commuting family."""
    if len(fam) % 2 == 0:
        return cos_ascent_even(fam, t, rule_level)
    return cos_ascent_odd(fam, t, rule_level)


def sin_ascent(fam: CommutingFamily, t: float, rule_level: int | None = None) -> np.ndarray:
    """sin(t sqrt(sum A_i^2)) / sqrt(sum A_i^2) for a commuting family.

    Same bracket as the cosine route with the left-most d/dt dropped; the
    coefficient of t^(2k) gains 1/(2k+1) relative to the cosine ladder and
    the result is odd in t.  At sum A_i^2 = 0 the value is t times the
    identity, matching the spectral convention.
    """
    coeffs, m, prefactor, _, order, tail = _ascent_series(fam, t, rule_level)
    t2 = t * t
    acc = np.zeros_like(coeffs[0])
    power = float(t)
    for k in range(order + 1):
        acc = acc + coeffs[k] * (_ladder_sin(k, m) * power)
        power *= t2
    return prefactor * acc


# ---------------------------------------------------------------------------
# heat-kernel identities used to certify the transmutation step


def transmutation_check(b, rho: float, tol: float = 1e-10):
    """Compare exp(-rho B^2) with its cosine-transform representation.

    rhs = (4 pi rho)^(-1/2) integral e^(-t^2/(4 rho)) cos(B t) dt over
    [-T, T], with T chosen so the discarded Gaussian tail is below tol.
    Returns (lhs, rhs, gap) with gap in the Frobenius norm.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    mat = as_matrix(b)
    dec = HermitianOperator(mat).decomposition()
    lhs = dec.matrix_function(lambda lam: np.exp(-rho * np.clip(lam * lam, 0.0, None)))
    norm_b = float(max(abs(dec.eigenvalues[0]), abs(dec.eigenvalues[-1]))) if mat.size else 0.0
    # two-sided Gaussian tail beyond T equals erfc(T / (2 sqrt(rho)))
    horizon = 2.0 * math.sqrt(rho) * float(erfcinv(min(tol / 10.0, 0.5)))
    count = max(96, int(1.5 * horizon * max(1.0, norm_b)) + 48)
    x, w = roots_legendre(count)
    ts = horizon * x
    gauss = (4.0 * math.pi * rho) ** (-0.5) * np.exp(-ts * ts / (4.0 * rho)) * (horizon * w)
    cos_t_lam = np.cos(np.outer(ts, dec.eigenvalues))  # (count, d)
    diag = stable_sum(gauss[:, None] * cos_t_lam)
    rhs = (dec.eigenvectors * diag) @ dec.eigenvectors.conj().T
    return lhs, rhs, float(np.linalg.norm(lhs - rhs))


def product_heat_expansion_check(fam: CommutingFamily, rho: float,
                                 sphere_level: int = 12, radial_count: int = 64):
    """Product of heat factors against its radial cosine representation.

    prod_i exp(-rho A_i^2) = (4 pi rho)^(-n/2) int_0^inf t^(n-1)
    e^(-t^2/(4 rho)) [sphere average of prod_i cos(t w_i A_i)] dt.
    The radial integral is mapped by u = t^2/(4 rho) onto a generalized
    Gauss-Laguerre rule; the integrand is entire in u, so the rule
    converges rapidly.  Returns (lhs, rhs, gap).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    mats = fam.operators
    n = len(mats)
    d = fam.dim
    lhs = np.eye(d, dtype=complex)
    decs = [HermitianOperator(m).decomposition() for m in mats]
    for dec in decs:
        lhs = lhs @ dec.matrix_function(
            lambda lam: np.exp(-rho * np.clip(lam * lam, 0.0, None))
        )
    rule = build_sphere_rule(n, sphere_level)
    u, wu = roots_genlaguerre(radial_count, n / 2.0 - 1.0)
    ts = 2.0 * np.sqrt(rho * u)
    prefactor = 2.0 ** (n - 1) * (4.0 * math.pi) ** (-n / 2.0)
    rhs = np.zeros((d, d), dtype=complex)
    for t_val, w_val in zip(ts, wu):
        inner = np.zeros((d, d), dtype=complex)
        for omega, w_s in zip(rule.nodes, rule.weights):
            prod = np.eye(d, dtype=complex)
            for oi, dec in zip(omega, decs):
                prod = prod @ dec.matrix_function(
                    lambda lam, s=t_val * oi: np.cos(s * lam)
                )
            inner += w_s * prod
        rhs += (prefactor * w_val) * inner
    return lhs, rhs, float(np.linalg.norm(lhs - rhs))
