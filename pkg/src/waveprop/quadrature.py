"""Quadrature on unit spheres and weighted unit balls.

The rules here integrate products of one-dimensional cosines against the
measures that appear in the dimension-lifting propagator formulas: the
surface measure on S^{n-1} and the measure (1 - |w|^2)^p dw on the unit
ball (p = -1/2 is the standard boundary weight, p = 0 the flat ball).

Tensor rules (radial Gauss-Jacobi in r^2 times a product-angle sphere
rule) are exact on even monomials up to the requested level.  Above
dimension 6 an importance-sampled Monte Carlo rule with a fixed seed is
used instead; its statistical error is reported, never hidden.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_jacobi

__all__ = [
    "MultiIndex",
    "SphereRule",
    "BallRule",
    "dirichlet_moment",
    "ball_moment",
    "dirichlet_moment_double_factorial",
    "gamma_duplication_check",
    "sphere_area",
    "build_sphere_rule",
    "build_ball_rule",
    "stable_sum",
]

TENSOR_DIM_LIMIT = 6  # tensor rules up to here, Monte Carlo beyond
MOMENT_PROBE_CAP = 400


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index of exponents, all non-negative."""

    components: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 or int(c) != c for c in self.components):
            raise ValueError("multi-index components must be non-negative integers")
        object.__setattr__(self, "components", tuple(int(c) for c in self.components))

    @property
    def order(self) -> int:
        return sum(self.components)

    def __len__(self) -> int:
        return len(self.components)


def _components(alpha) -> tuple[int, ...]:
    if isinstance(alpha, MultiIndex):
        return alpha.components
    return MultiIndex(tuple(alpha)).components


def stable_sum(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Compensated summation along one axis, deterministic order.

    One-dimensional float input goes through math.fsum (exact); otherwise
    fixed-size chunks are reduced pairwise and the chunk partials combined
    with Kahan compensation.
    """
    values = np.asarray(values)
    if values.ndim == 1 and values.dtype.kind == "f":
        return np.float64(math.fsum(values.tolist()))
    values = np.moveaxis(values, axis, 0)
    chunk = 1024
    partials = [values[i : i + chunk].sum(axis=0) for i in range(0, len(values), chunk)]
    total = np.zeros_like(partials[0])
    comp = np.zeros_like(partials[0])
    for p in partials:
        y = p - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


# ---------------------------------------------------------------------------
# closed-form moments


def dirichlet_moment(alpha, d: int | None = None) -> float:
    """Moment of w^(2*alpha) over the unit ball against (1-|w|^2)^(-1/2).

    Equals Gamma(a_1+1/2)...Gamma(a_d+1/2)Gamma(1/2) / Gamma(|a|+d/2+1/2),
    evaluated in log space.
    """
    comp = _components(alpha)
    if d is None:
        d = len(comp)
    if d != len(comp):
        raise ValueError(f"dimension {d} does not match multi-index length {len(comp)}")
    return ball_moment(comp, d, boundary_exponent=-0.5)


def ball_moment(alpha, d: int, boundary_exponent: float = -0.5) -> float:
    """Moment of w^(2*alpha) over the unit ball against (1-|w|^2)^p."""
    comp = _components(alpha)
    if d != len(comp):
        raise ValueError(f"dimension {d} does not match multi-index length {len(comp)}")
    p = boundary_exponent
    if p <= -1:
        raise ValueError("boundary exponent must exceed -1 for integrability")
    a = np.asarray(comp, dtype=float)
    lg = gammaln(a + 0.5).sum() + gammaln(p + 1.0) - gammaln(a.sum() + d / 2.0 + p + 1.0)
    return float(math.exp(lg))


def dirichlet_moment_double_factorial(alpha) -> float:
    """Same moment in even dimension d=2m through factorials alone.

    (2 pi)^m (2a)! / (2^|a| a! (2m+2|a|-1)!!); agreement with
    dirichlet_moment is an independent consistency check.
    """
    comp = _components(alpha)
    d = len(comp)
    if d % 2 != 0:
        raise ValueError("double-factorial form requires even dimension")
    m = d // 2
    k = sum(comp)
    a = np.asarray(comp, dtype=float)
    lg = m * math.log(2 * math.pi) + gammaln(2 * a + 1).sum()
    lg -= k * math.log(2.0) + gammaln(a + 1).sum()
    lg -= sum(math.log(j) for j in range(2 * m + 2 * k - 1, 0, -2))
    return float(math.exp(lg))


def gamma_duplication_check(k: int) -> tuple[float, float]:
    """Gamma(k+1/2) next to sqrt(pi) Gamma(2k) / (2^(2k-1) Gamma(k))."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    lhs = math.exp(gammaln(k + 0.5))
    rhs = math.exp(0.5 * math.log(math.pi) + gammaln(2 * k) - (2 * k - 1) * math.log(2.0) - gammaln(k))
    return lhs, rhs


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1) in R^n."""
    if n < 1:
        raise ValueError("ambient dimension must be positive")
    return float(2.0 * math.pi ** (n / 2.0) / math.exp(gammaln(n / 2.0)))


# ---------------------------------------------------------------------------
# rules


@dataclass(eq=False)
class SphereRule:
    """Nodes and weights on S^(dim-1); weights sum to the surface area."""

    dim: int
    level: int
    nodes: np.ndarray
    weights: np.ndarray
    method: str
    moment_error: float | None = None
    seed: int | None = None

    def integrate(self, values) -> np.ndarray | float:
        values = values(self.nodes) if callable(values) else np.asarray(values)
        return stable_sum(self.weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values)

    def error_estimate(self, values) -> float:
        values = values(self.nodes) if callable(values) else np.asarray(values)
        if self.method == "montecarlo":
            mass = float(self.weights.sum())
            return float(mass * np.std(values, axis=0).max() / math.sqrt(len(self.weights)))
        return 0.0 if self.moment_error is None else self.moment_error

    def to_csv(self, path) -> None:
        _rule_to_csv(path, self.nodes, self.weights)


@dataclass(eq=False)
class BallRule:
    """Nodes and weights on the unit ball against (1-|w|^2)^boundary_exponent."""

    dim: int
    level: int
    nodes: np.ndarray
    weights: np.ndarray
    method: str
    boundary_exponent: float = -0.5
    moment_error: float | None = None
    seed: int | None = None

    integrate = SphereRule.integrate
    error_estimate = SphereRule.error_estimate
    to_csv = SphereRule.to_csv


def _rule_to_csv(path, nodes, weights):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"w{i+1}" for i in range(nodes.shape[1])] + ["weight"])
        for row, w in zip(nodes, weights):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(w))])


def _sphere_tensor(n: int, degree: int):
    """Product-angle rule on S^(n-1), exact for polynomials up to degree.

    Recursion in the first coordinate: w = (s, sqrt(1-s^2) eta) with
    Gauss-Jacobi nodes in s for the weight (1-s^2)^((n-3)/2).  Node sets
    are symmetric under each coordinate sign flip, so odd monomials cancel.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        count = degree + 2 + (degree % 2)  # even count, trig-exact past degree
        theta = 2.0 * np.pi * np.arange(count) / count
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return nodes, np.full(count, 2.0 * np.pi / count)
    a = (n - 3) / 2.0
    k = (degree + 1) // 2 + 1
    s, v = roots_jacobi(k, a, a)
    sub_nodes, sub_weights = _sphere_tensor(n - 1, degree)
    blocks, weights = [], []
    for si, vi in zip(s, v):
        c = math.sqrt(max(0.0, 1.0 - si * si))
        first = np.full((len(sub_nodes), 1), si)
        blocks.append(np.concatenate([first, c * sub_nodes], axis=1))
        weights.append(vi * sub_weights)
    return np.concatenate(blocks), np.concatenate(weights)


def _even_probe_indices(d: int, level: int):
    """Representative even-monomial exponents with |alpha| <= level."""
    out = list(itertools.islice(
        (a for a in itertools.product(range(level + 1), repeat=d) if sum(a) <= level),
        MOMENT_PROBE_CAP,
    ))
    corners = [tuple(level if i == j else 0 for i in range(d)) for j in range(d)]
    for c in corners:
        if c not in out:
            out.append(c)
    return out


def build_sphere_rule(n: int, level: int, method: str = "auto",
                      samples: int = 200_000, seed: int = 0) -> SphereRule:
    """Rule on S^(n-1) exact (tensor) on even monomials of degree <= 2*level."""
    if n < 1:
        raise ValueError("ambient dimension must be positive")
    if level < 0:
        raise ValueError("level must be non-negative")
    if method == "auto":
        method = "tensor" if n <= TENSOR_DIM_LIMIT + 1 else "montecarlo"
    if method == "tensor":
        nodes, weights = _sphere_tensor(n, 2 * level)
        rule = SphereRule(n, level, nodes, weights, "tensor")
        rule.moment_error = _sphere_moment_selftest(rule)
        return rule
    if method != "montecarlo":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((samples, n))
    nodes = g / np.linalg.norm(g, axis=1, keepdims=True)
    weights = np.full(samples, sphere_area(n) / samples)
    return SphereRule(n, level, nodes, weights, "montecarlo", seed=seed)


def _sphere_moment_selftest(rule: SphereRule) -> float:
    """Max relative error on even sphere monomials w^(2a), |a| <= level.

    Exact value: 2 Gamma(a_1+1/2)...Gamma(a_n+1/2) / Gamma(|a|+n/2).
    """
    worst = 0.0
    n = rule.dim
    for alpha in _even_probe_indices(n, min(rule.level, 4)):
        a = np.asarray(alpha, dtype=float)
        exact = math.exp(math.log(2.0) + gammaln(a + 0.5).sum() - gammaln(a.sum() + n / 2.0))
        got = float(rule.integrate(np.prod(rule.nodes ** (2 * np.asarray(alpha)), axis=1)))
        worst = max(worst, abs(got - exact) / abs(exact))
    return worst


def build_ball_rule(d: int, level: int, method: str = "auto",
                    boundary_exponent: float = -0.5,
                    samples: int = 200_000, seed: int = 0) -> BallRule:
    """Rule on the unit ball in R^d against (1-|w|^2)^boundary_exponent.

    Tensor rules split radially: with u = r^2 the radial factor becomes a
    Jacobi weight u^(d/2-1) (1-u)^p on [0,1], handled by Gauss-Jacobi
    nodes; angles come from the tensor sphere rule.  Exact on monomials
    w^(2a) with |a| <= level.  Monte Carlo samples u ~ Beta(d/2, p+1) and
    uniform directions, with constant weights mass/samples.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if level < 0:
        raise ValueError("level must be non-negative")
    p = boundary_exponent
    if p <= -1:
        raise ValueError("boundary exponent must exceed -1")
    if method == "auto":
        method = "tensor" if d <= TENSOR_DIM_LIMIT else "montecarlo"
    if method == "tensor":
        k_rad = level // 2 + 1
        xj, wj = roots_jacobi(k_rad, p, d / 2.0 - 1.0)
        u = (xj + 1.0) / 2.0
        radii = np.sqrt(u)
        # int_0^1 r^(d-1)(1-r^2)^p g(r) dr = 2^(-p-d/2-1) sum w_j g(sqrt(u_j))
        w_rad = wj * 2.0 ** (-(p + d / 2.0 - 1.0) - 2.0)
        sphere_nodes, sphere_weights = _sphere_tensor(d, 2 * level)
        nodes = (radii[:, None, None] * sphere_nodes[None, :, :]).reshape(-1, d)
        weights = (w_rad[:, None] * sphere_weights[None, :]).reshape(-1)
        rule = BallRule(d, level, nodes, weights, "tensor", boundary_exponent=p)
        rule.moment_error = _ball_moment_selftest(rule)
        return rule
    if method != "montecarlo":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    u = rng.beta(d / 2.0, p + 1.0, size=samples)
    g = rng.standard_normal((samples, d))
    directions = g / np.linalg.norm(g, axis=1, keepdims=True)
    nodes = np.sqrt(u)[:, None] * directions
    mass = ball_moment((0,) * d, d, boundary_exponent=p)
    weights = np.full(samples, mass / samples)
    return BallRule(d, level, nodes, weights, "montecarlo",
                    boundary_exponent=p, seed=seed)


def _ball_moment_selftest(rule: BallRule) -> float:
    worst = 0.0
    for alpha in _even_probe_indices(rule.dim, min(rule.level, 4)):
        exact = ball_moment(alpha, rule.dim, rule.boundary_exponent)
        got = float(rule.integrate(np.prod(rule.nodes ** (2 * np.asarray(alpha)), axis=1)))
        worst = max(worst, abs(got - exact) / abs(exact))
    return worst
