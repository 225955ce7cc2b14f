"""Order-n Minkowski-loss posterior transforms.

For a per-class binary target t with P(t=1 | x) = mu, the expected order-n
Minkowski loss of a prediction y in [0, 1] is

    E[L](y) = (1 - mu) * y**n + mu * (1 - y)**n.

Its derivative in y, with the constant factor n dropped, is the degree n-1
polynomial

    g(y) = (1 - mu) * y**(n-1) + mu * (y - 1)**(n-1).

For even n this polynomial is strictly increasing on the reals, so it has
exactly one real root, and that root lies in [0, 1]: it is the order-n
optimal prediction. Order 2 reproduces mu itself (the usual posterior);
orders 4, 6, ... pull predictions toward 1/2 while preserving their order.
For odd n the root set is complex for mu in (0, 1), so no probability-valued
optimum exists; `analyze_odd_order` exposes those roots for inspection.

Three independent routes to the even-order root are provided and are meant
to cross-check one another:

* `closed_form_transform` - from the factored gradient,
  (1-mu) y^(n-1) = mu (1-y)^(n-1), giving y = r / (1 + r) with
  r = (mu / (1 - mu))**(1 / (n-1)).
* `newton_transform`      - safeguarded Newton iteration on [0, 1].
* `brute_force_transform` - grid minimization of the expected loss.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SolverError, ValidationError

__all__ = [
    "LossOrder",
    "Posterior",
    "SolverConfig",
    "GradientPolynomial",
    "RootAnalysis",
    "expected_loss",
    "gradient_coefficients",
    "closed_form_transform",
    "newton_transform",
    "brute_force_transform",
    "analyze_odd_order",
]

ODD_ORDER_EXPLANATION = (
    "its expected-loss gradient has complex roots, which can't be used as a "
    "probability; only even orders define a transform"
)


class LossOrder:
    """Validated Minkowski exponent.

    Normal construction requires an even value >= 2 (a usable transform
    order). Odd values >= 3 are representable only through
    `LossOrder.odd_for_analysis`, which exists solely to feed the
    complex-root analysis.
    """

    __slots__ = ("value",)

    def __init__(self, value: int):
        value = _check_order_int(value)
        if value % 2:
            raise ValidationError(f"order {value} is odd: {ODD_ORDER_EXPLANATION}")
        self.value = value

    @classmethod
    def odd_for_analysis(cls, value: int) -> "LossOrder":
        value = _check_order_int(value)
        if value % 2 == 0:
            raise ValidationError(
                f"order {value} is even; construct LossOrder({value}) directly"
            )
        obj = object.__new__(cls)
        obj.value = value
        return obj

    def __repr__(self) -> str:
        return f"LossOrder({self.value})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LossOrder) and self.value == other.value

    def __hash__(self) -> int:
        return hash((LossOrder, self.value))


@dataclass(frozen=True)
class Posterior:
    """A class posterior: a probability in [0, 1]. Rejects NaN and out-of-range values."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or not 0.0 <= v <= 1.0:
            raise ValidationError(f"posterior must be in [0, 1], got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class SolverConfig:
    """Newton solver tuning: absolute residual/step tolerance and iteration cap."""

    tolerance: float = 1e-12
    max_iterations: int = 100

    def __post_init__(self):
        if not self.tolerance > 0.0:
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance!r}")
        if self.max_iterations < 1:
            raise ValidationError(
                f"max_iterations must be >= 1, got {self.max_iterations!r}"
            )


@dataclass(frozen=True)
class GradientPolynomial:
    """Expected-loss derivative in y, coefficients highest degree first.

    The leading coefficient is 1 (the constant factor n of the derivative is
    dropped). Degree equals order - 1. For an even order and mu in (0, 1)
    the polynomial is strictly increasing on the reals, so it has exactly one
    real root, and that root lies in (0, 1).
    """

    coefficients: tuple[float, ...]
    order: int
    mu: float

    def __post_init__(self):
        if len(self.coefficients) != self.order:
            raise ValidationError(
                f"degree must equal order - 1: got {len(self.coefficients) - 1} "
                f"for order {self.order}"
            )
        if self.coefficients[0] != 1.0:
            raise ValidationError("leading coefficient must be 1")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, y: float) -> float:
        """Evaluate at y by Horner's rule."""
        acc = 0.0
        for c in self.coefficients:
            acc = acc * y + c
        return acc

    def derivative(self, y: float) -> float:
        deg = self.degree
        acc = 0.0
        for i, c in enumerate(self.coefficients[:-1]):
            acc = acc * y + (deg - i) * c
        return acc

    def roots(self) -> tuple[complex, ...]:
        """All complex roots, via the companion matrix."""
        rts = np.roots(np.asarray(self.coefficients, dtype=np.float64))
        return tuple(sorted((complex(r) for r in rts), key=lambda z: (z.real, z.imag)))


@dataclass(frozen=True)
class RootAnalysis:
    """Root set of an odd-order gradient polynomial.

    `has_valid_probability_root` is true iff some root is real (imaginary
    part within tolerance) and lies in [0, 1].
    """

    roots: tuple[complex, ...]
    has_valid_probability_root: bool


def _check_order_int(value) -> int:
    if isinstance(value, LossOrder):
        return value.value
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValidationError(f"order must be an integer, got {value!r}")
    value = int(value)
    if value < 2:
        raise ValidationError(f"order must be >= 2, got {value}")
    return value


def _even_order(order) -> int:
    n = _check_order_int(order)
    if n % 2:
        raise ValidationError(f"order {n} is odd: {ODD_ORDER_EXPLANATION}")
    return n


def _odd_order(order) -> int:
    n = _check_order_int(order)
    if n % 2 == 0:
        raise ValidationError(
            f"order {n} is even and has a real optimum; analyze_odd_order is for "
            "odd orders only"
        )
    return n


def _posterior_value(mu) -> float:
    if isinstance(mu, Posterior):
        return mu.value
    return Posterior(mu).value


def _check_prediction(y) -> float:
    y = float(y)
    if math.isnan(y) or not 0.0 <= y <= 1.0:
        raise ValidationError(f"prediction must be in [0, 1], got {y!r}")
    return y


def expected_loss(y: float, mu, order) -> float:
    """Expected order-n loss (1-mu)*y**n + mu*(1-y)**n of predicting y.

    Zero iff (mu=0, y=0) or (mu=1, y=1). Accepts even orders and
    analysis-only odd orders; for y in [0, 1] the signed and absolute-value
    forms of the loss coincide.
    """
    y = _check_prediction(y)
    mu = _posterior_value(mu)
    n = _check_order_int(order)
    return (1.0 - mu) * y**n + mu * (1.0 - y) ** n


def _poly_coefficients(mu: float, n: int) -> tuple[float, ...]:
    # Expansion of (1-mu)*y^m + mu*(y-1)^m with m = n - 1:
    # leading 1, then (-1)^k * C(m, k) * mu for k = 1..m.
    m = n - 1
    coeffs = [1.0]
    for k in range(1, m + 1):
        c = math.comb(m, k)
        coeffs.append((-float(c) if k % 2 else float(c)) * mu)
    return tuple(coeffs)


def gradient_coefficients(mu, order) -> GradientPolynomial:
    """Gradient polynomial of the expected loss for an even order.

    Order 4 yields [1, -3 mu, 3 mu, -mu]; order 6 yields
    [1, -5 mu, 10 mu, -10 mu, 5 mu, -mu]. Odd orders are rejected
    (use `analyze_odd_order`).
    """
    mu = _posterior_value(mu)
    n = _even_order(order)
    return GradientPolynomial(_poly_coefficients(mu, n), n, mu)


def _grad_value(y: float, mu: float, m: int) -> float:
    # Factored form; algebraically identical to the coefficient expansion
    # but free of cancellation between large binomial terms.
    return (1.0 - mu) * y**m + mu * (y - 1.0) ** m


def _grad_slope(y: float, mu: float, m: int) -> float:
    # m - 1 is even, so this is a positive combination of even powers.
    return m * ((1.0 - mu) * y ** (m - 1) + mu * (y - 1.0) ** (m - 1))


def closed_form_transform(mu, order) -> float:
    """Unique real root in [0, 1] of the even-order gradient polynomial.

    From the stationarity condition (1-mu) y^(n-1) = mu (1-y)^(n-1):
    y = r / (1 + r) with r = (mu / (1 - mu))**(1 / (n-1)). Returns exactly
    0 for mu=0, 1 for mu=1, and mu itself at order 2.
    """
    mu = _posterior_value(mu)
    n = _even_order(order)
    if n == 2:
        return mu
    if mu == 0.0:
        return 0.0
    if mu == 1.0:
        return 1.0
    r = (mu / (1.0 - mu)) ** (1.0 / (n - 1))
    return r / (1.0 + r)


def newton_transform(mu, order, config: SolverConfig | None = None) -> float:
    """Root of the even-order gradient polynomial by safeguarded Newton.

    Starts at mu**(1/(n-1)) (mirrored for mu > 1/2) and keeps every iterate
    inside the bracket [0, 1], taking a bisection step whenever the Newton
    step would leave the current bracket. The gradient is strictly
    increasing with g(0) <= 0 <= g(1), so the hybrid cannot lose the root.
    The start point sits near the root for every mu; starting at mu itself
    would strand the iteration in the flat region near the boundary for
    extreme mu, where |g| <= tolerance long before y is anywhere near the
    root. Converges when residual and step are both within the tolerance,
    returning the final polished step; raises SolverError if that does not
    happen within max_iterations (it does not for mu in [0, 1] under the
    defaults).
    """
    mu = _posterior_value(mu)
    n = _even_order(order)
    cfg = config if config is not None else SolverConfig()
    if mu == 0.0:
        return 0.0
    if mu == 1.0:
        return 1.0
    m = n - 1
    lo, hi = 0.0, 1.0
    y = mu ** (1.0 / m) if mu <= 0.5 else 1.0 - (1.0 - mu) ** (1.0 / m)
    residual = math.inf
    for _ in range(cfg.max_iterations):
        g = _grad_value(y, mu, m)
        residual = abs(g)
        if g == 0.0:
            return y
        slope = _grad_slope(y, mu, m)
        step = g / slope if slope > 0.0 else math.inf
        if residual <= cfg.tolerance and abs(step) <= cfg.tolerance:
            polished = y - step
            return polished if lo < polished < hi else y
        if g > 0.0:
            hi = y
        else:
            lo = y
        y_next = y - step
        if not lo < y_next < hi:
            y_next = 0.5 * (lo + hi)
        y = y_next
    raise SolverError(
        f"Newton failed to reach tolerance {cfg.tolerance} within "
        f"{cfg.max_iterations} iterations for mu={mu}, order={n}",
        last_iterate=y,
        residual=residual,
    )


@lru_cache(maxsize=8)
def _loss_tables(order: int, grid_steps: int):
    ys = np.linspace(0.0, 1.0, grid_steps + 1)
    return ys, ys**order, (1.0 - ys) ** order


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_refine(mu: float, n: int, a: float, b: float) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = expected_loss(c, mu, n)
    fd = expected_loss(d, mu, n)
    for _ in range(100):
        if b - a <= 1e-13:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = expected_loss(c, mu, n)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = expected_loss(d, mu, n)
    return 0.5 * (a + b)


def brute_force_transform(mu, order, grid_steps: int = 1_000_000) -> float:
    """Argmin of the expected loss over a uniform grid on [0, 1].

    Independent oracle for the root-based transforms: knows nothing about
    gradients. The grid argmin is refined by one golden-section pass on the
    winning cell; unimodality of the even-order expected loss puts the
    result within 10/grid_steps of the true minimizer (far closer in
    practice).
    """
    mu = _posterior_value(mu)
    n = _even_order(order)
    if grid_steps < 100:
        raise ValidationError(f"grid_steps must be >= 100, got {grid_steps}")
    ys, pow_y, pow_comp = _loss_tables(n, grid_steps)
    losses = (1.0 - mu) * pow_y + mu * pow_comp
    i = int(np.argmin(losses))
    return _golden_refine(mu, n, ys[max(i - 1, 0)], ys[min(i + 1, grid_steps)])


def analyze_odd_order(mu, order, real_tolerance: float = 1e-9) -> RootAnalysis:
    """Root set of the odd-order gradient polynomial.

    Order 3 (a quadratic in y) is solved analytically; higher odd orders go
    through the companion matrix. For mu in (0, 1) the polynomial
    (1-mu) y^(n-1) + mu (y-1)^(n-1) is a positive combination of even powers
    and therefore has no real root at all, which is why odd orders cannot
    produce a probability. At mu = 0 or 1 the root degenerates to an
    (n-1)-fold 0 or 1, which *is* a valid probability.
    """
    mu = _posterior_value(mu)
    n = _odd_order(order)
    m = n - 1
    if mu == 0.0:
        roots: tuple[complex, ...] = (complex(0.0),) * m
    elif mu == 1.0:
        roots = (complex(1.0),) * m
    elif n == 3:
        # y^2 - 2 mu y + mu = 0; discriminant 4 mu^2 - 4 mu < 0 on (0, 1).
        s = cmath.sqrt(complex(mu * mu - mu))
        roots = tuple(sorted((mu - s, mu + s), key=lambda z: (z.real, z.imag)))
    else:
        poly = GradientPolynomial(_poly_coefficients(mu, n), n, mu)
        roots = poly.roots()
    valid = any(
        abs(r.imag) <= real_tolerance and 0.0 <= r.real <= 1.0 for r in roots
    )
    return RootAnalysis(roots=roots, has_valid_probability_root=valid)
