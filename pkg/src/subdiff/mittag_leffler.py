"""Mittag-Leffler function E_{a,b}(-x) on the negative real axis.

The solvers in this package only ever need E_{a,b} at arguments -x with
x >= 0, a in (0, 1] and b > 0.  On that half-line the function is positive,
decays algebraically like x**-1 for a < 1, and can be evaluated to near
machine precision by combining three classical representations:

* the defining power series, safe for x <= 1,
* a wedge-contour (inverse Laplace) quadrature for intermediate x,
* the large-argument expansion with optimal truncation for large x.

The two-sided algebraic decay envelope

    1/(1 + gamma(1-a)*x)  <=  E_{a,1}(-x)  <=  1/(1 + x/gamma(1+a))

is exposed as :func:`decay_bounds`; it is used both as an independent check
on the evaluator and as an a-priori estimate of backward-problem
conditioning.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import rgamma as _rgamma

__all__ = [
    "MLArg",
    "MLBounds",
    "AccuracyWarning",
    "ml_series",
    "ml_asymptotic",
    "ml_contour",
    "ml_eval",
    "ml_eval_array",
    "decay_bounds",
    "asymptotic_crossover",
]

#: series is used up to this argument (alternating sum, no cancellation yet)
SERIES_MAX_X = 1.0
#: the large-argument expansion is never trusted below this argument
ASYMPTOTIC_MIN_X = 10.0
#: relative truncation target for series / asymptotic summation
_EPS = 1e-16
#: evaluator flags a loss-of-accuracy condition above this estimate
_ACCURACY_FLAG = 1e-9


class AccuracyWarning(UserWarning):
    """Estimated relative error of an evaluation exceeded 1e-9."""


@dataclass(frozen=True)
class MLArg:
    """Validated argument triple; the evaluators compute E_{alpha,beta}(-x).

    alpha must lie in (0, 1], beta must be positive and x non-negative.
    """

    alpha: float
    beta: float = 1.0
    x: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (np.isfinite(self.beta) and self.beta > 0.0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (np.isfinite(self.x) and self.x >= 0.0):
            raise ValueError(f"x must be finite and >= 0, got {self.x}")


@dataclass(frozen=True)
class MLBounds:
    lower: float
    upper: float


def decay_bounds(alpha: float, x: float) -> MLBounds:
    """Two-sided algebraic envelope of E_{alpha,1}(-x) for alpha in (0,1).

    Returns (1/(1 + gamma(1-alpha)*x), 1/(1 + x/gamma(1+alpha))); both
    bounds equal 1 at x = 0 and the sandwich is sharp to within the ratio
    gamma(1-alpha)*gamma(1+alpha) as x grows.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"bounds require alpha in (0, 1), got {alpha}")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    lower = 1.0 / (1.0 + _gamma(1.0 - alpha) * x)
    upper = 1.0 / (1.0 + x / _gamma(1.0 + alpha))
    return MLBounds(lower=lower, upper=upper)


def asymptotic_crossover(alpha: float) -> float:
    """Smallest x at which the large-argument expansion reaches ~1e-12.

    The optimally truncated expansion has a remainder of order
    exp(-x**(1/alpha)), so the usable threshold grows with alpha; 35**alpha
    keeps the floor below 1e-12 throughout alpha <= 0.95 while never
    dropping under ASYMPTOTIC_MIN_X.
    """
    return max(ASYMPTOTIC_MIN_X, 35.0**alpha)


def ml_series(arg: MLArg, terms: int = 200, x_max: float = SERIES_MAX_X) -> float:
    """Power-series evaluation, sum_k (-x)**k / gamma(k*alpha + beta).

    Terms are added until they drop below 1e-16 of the running sum or
    `terms` is reached.  Arguments above `x_max` are rejected because the
    alternating sum starts to cancel; pass a larger `x_max` to override.
    """
    a, b, x = arg.alpha, arg.beta, arg.x
    if x > x_max:
        raise ValueError(
            f"series evaluation rejected for x={x} > {x_max}; raise x_max to override"
        )
    s = 0.0
    p = 1.0  # (-x)**k
    for k in range(terms + 1):
        t = p * _rgamma(a * k + b)
        s += t
        if k >= 1 and abs(t) <= _EPS * abs(s):
            break
        p *= -x
    return s


def ml_asymptotic(arg: MLArg, terms: int = 300, x_min: float = ASYMPTOTIC_MIN_X) -> float:
    """Large-argument expansion -sum_{k>=1} (-x)**-k / gamma(beta - k*alpha).

    The expansion is divergent; summation stops at the smallest term of the
    envelope x**-k * gamma(k*alpha - beta + 1), i.e. after roughly
    x**(1/alpha)/alpha terms.  Terms whose gamma argument hits a pole
    (1/gamma = 0) vanish and are skipped; they must not be mistaken for the
    envelope minimum, which is why truncation is decided on the envelope
    rather than on the raw term magnitudes.
    """
    a, b, x = arg.alpha, arg.beta, arg.x
    if x < x_min:
        raise ValueError(
            f"asymptotic evaluation rejected for x={x} < {x_min}; lower x_min to override"
        )
    # envelope minimum: k*alpha near x**(1/alpha)
    with np.errstate(over="ignore"):
        m = x ** (1.0 / a)
    k_opt = int(np.floor(m / a)) if np.isfinite(m) else terms
    k_stop = max(1, min(k_opt, terms))
    s = 0.0
    sign = -1.0  # (-1)**k
    xk = 1.0 / x  # x**-k
    for k in range(1, k_stop + 1):
        rg = _rgamma(b - k * a)
        t = -sign * xk * rg
        s += t
        if rg != 0.0 and abs(t) <= _EPS * abs(s):
            break
        sign = -sign
        xk /= x
        if xk == 0.0:
            break
    return s


def _contour_eval(alpha, x, theta, sigma, nodes):
    """Wedge-contour quadrature of E_{alpha,1}(-x); x may be an array.

    Integrates exp(z) z**(alpha-1) / (z**alpha + x) over the contour made of
    two rays arg(z) = +-theta and the arc |z| = sigma, collapsed to the
    upper half by conjugate symmetry.  Valid for 0 < alpha < 1 (no poles of
    the integrand reach the principal sheet).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho_max = -np.log(1e-18) / abs(np.cos(theta))
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    # ray arg(z) = theta, rho in [sigma, rho_max]
    rho = 0.5 * (rho_max - sigma) * gl_x + 0.5 * (rho_max + sigma)
    w_rho = 0.5 * (rho_max - sigma) * gl_w
    z = rho * np.exp(1j * theta)
    za = z**alpha
    core = np.exp(z) * za / z * np.exp(1j * theta)
    ray = (w_rho * (core[:, None] / (za[:, None] + x[None, :])).imag.T).sum(axis=1)
    # arc |z| = sigma, psi in [0, theta]
    psi = 0.5 * theta * (gl_x + 1.0)
    w_psi = 0.5 * theta * gl_w
    zc = sigma * np.exp(1j * psi)
    zca = zc**alpha
    arc_core = np.exp(zc) * zca
    arc = (w_psi * (arc_core[:, None] / (zca[:, None] + x[None, :])).real.T).sum(axis=1)
    return (ray + arc) / np.pi


def ml_contour(
    alpha: float,
    x,
    theta: float = 0.75 * np.pi,
    sigma: float = 1.0,
    nodes: int = 200,
):
    """Contour-quadrature evaluation of E_{alpha,1}(-x), alpha in (0,1).

    Spectrally accurate on x in [1, ~35]; used between the series and
    asymptotic regimes.  Scalar in, scalar out; array in, array out.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"contour path requires alpha in (0, 1), got {alpha}")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    val = _contour_eval(alpha, x, theta, sigma, nodes)
    return float(val[0]) if scalar else val


def _estimate_and_flag(value, estimate, where):
    rel = estimate / abs(value) if value != 0.0 else estimate
    if rel > _ACCURACY_FLAG:
        warnings.warn(
            f"Mittag-Leffler {where} evaluation: estimated relative error "
            f"{rel:.2e} exceeds {_ACCURACY_FLAG:.0e}",
            AccuracyWarning,
            stacklevel=3,
        )


def ml_eval(arg: MLArg) -> float:
    """Evaluate E_{alpha,beta}(-x) by dispatching on the argument size.

    Regimes: power series for x <= 1; contour quadrature for intermediate
    x; optimally truncated large-argument expansion beyond
    :func:`asymptotic_crossover`.  alpha = 1 (with beta = 1) reduces to
    exp(-x) and is evaluated as such: neither the contour formula (a pole
    crosses the integration wedge exactly at alpha = 1) nor the asymptotic
    expansion (all algebraic terms vanish) applies there.  beta != 1 is
    supported only on the series domain.

    A warning of class :class:`AccuracyWarning` is issued if the internal
    error estimate exceeds 1e-9 relative.
    """
    a, b, x = arg.alpha, arg.beta, arg.x
    if a == 1.0 and b == 1.0:
        return float(np.exp(-x))
    if x <= SERIES_MAX_X:
        return ml_series(arg)
    if b != 1.0:
        raise ValueError(
            f"E_(alpha,beta) with beta={b} != 1 is only supported for x <= {SERIES_MAX_X}"
        )
    if x >= asymptotic_crossover(a):
        val = ml_asymptotic(arg, x_min=asymptotic_crossover(a))
        return val
    coarse = ml_contour(a, x, nodes=100)
    fine = ml_contour(a, x, nodes=200)
    _estimate_and_flag(fine, abs(fine - coarse), "contour")
    return fine


def ml_eval_array(alpha: float, x) -> np.ndarray:
    """Vectorized E_{alpha,1}(-x) over an array of non-negative arguments.

    Same regime dispatch as :func:`ml_eval`; this is the work-horse used by
    the spectral solvers, where x runs over eigenvalue grids spanning many
    orders of magnitude.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("ml_eval_array expects a 1-d array")
    if not (np.isfinite(x).all() and (x >= 0.0).all()):
        raise ValueError("arguments must be finite and >= 0")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if alpha == 1.0:
        return np.exp(-x)

    out = np.empty_like(x)
    xc = asymptotic_crossover(alpha)
    lo = x <= SERIES_MAX_X
    hi = x >= xc
    mid = ~(lo | hi)

    if lo.any():
        out[lo] = _series_array(alpha, x[lo])
    if hi.any():
        out[hi] = _asymptotic_array(alpha, x[hi])
    if mid.any():
        xm = x[mid]
        fine = _contour_eval(alpha, xm, 0.75 * np.pi, 1.0, 200)
        coarse = _contour_eval(alpha, xm, 0.75 * np.pi, 1.0, 100)
        worst = np.max(np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300))
        if worst > _ACCURACY_FLAG:
            warnings.warn(
                f"Mittag-Leffler contour evaluation: estimated relative error "
                f"{worst:.2e} exceeds {_ACCURACY_FLAG:.0e}",
                AccuracyWarning,
                stacklevel=2,
            )
        out[mid] = fine
    return out


def _series_array(alpha, x, terms=200):
    s = np.zeros_like(x)
    p = np.ones_like(x)
    for k in range(terms + 1):
        t = p * _rgamma(alpha * k + 1.0)
        s += t
        if k >= 1 and np.all(np.abs(t) <= _EPS * np.abs(s)):
            break
        p *= -x
    return s


def _asymptotic_array(alpha, x, terms=300):
    with np.errstate(over="ignore"):
        k_opt = np.floor(x ** (1.0 / alpha) / alpha)
    k_opt = np.where(np.isfinite(k_opt), k_opt, terms)
    s = np.zeros_like(x)
    sign = -1.0
    xk = 1.0 / x
    for k in range(1, terms + 1):
        rg = _rgamma(1.0 - k * alpha)
        active = k <= k_opt
        if not active.any():
            break
        t = np.where(active, -sign * xk * rg, 0.0)
        s += t
        if rg != 0.0 and np.all(np.abs(t) <= _EPS * np.abs(s)):
            break
        sign = -sign
        xk = xk / x
    return s
