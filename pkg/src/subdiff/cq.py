"""Backward-Euler convolution quadrature for the Caputo derivative.

The fractional derivative of order alpha in (0,1) is discretized on a
uniform grid t_n = n*tau by

    D_tau^alpha phi_n = tau^(-alpha) * sum_{j=0..n} b_j phi_{n-j},

where the weights b_j are the binomial coefficients of (1-xi)^alpha.  This
module provides the weights, the scalar decay factors F^n(lam) solving

    D_tau^alpha [F^n - F^0] + lam F^n = 0,   F^0 = 1,

and the fully discrete forward stepper for the subdiffusion equation: at
each step solve

    (tau^-alpha M + A) U_n = M f_n + tau^-alpha M (s_n U_0 - H_n),

with s_n the n-th partial weight sum and H_n = sum_{j=1..n} b_j U_{n-j} the
history convolution.  The history is accumulated in blocks so the bulk of
the O(N^2) work runs as matrix-matrix products.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .fem import Field, Mesh, assemble_mass, assemble_stiffness

__all__ = [
    "TimeGrid",
    "CQWeights",
    "cq_weights",
    "scalar_F",
    "scalar_F_many",
    "forward_solve",
    "terminal_map",
]

#: block size for the history convolution (dgemm granularity)
_BLOCK = 64


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid on [0, T] with N steps."""

    T: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"T must be positive, got {self.T}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.N + 1)


@dataclass(frozen=True)
class CQWeights:
    """Weights b_0..b_N of the generating function (1-xi)^alpha."""

    alpha: float
    b: np.ndarray = field(repr=False)

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.b)


def cq_weights(alpha: float, N: int) -> CQWeights:
    """Binomial weights via the recurrence b_j = b_{j-1} (j-1-alpha)/j.

    b_0 = 1, every later weight is negative, and the partial sums decrease
    monotonically from 1 to (N choose alpha)-type positive values.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    j = np.arange(1, N + 1)
    b = np.empty(N + 1)
    b[0] = 1.0
    if N:
        b[1:] = np.cumprod((j - 1.0 - alpha) / j)
    return CQWeights(alpha=alpha, b=b)


def _history_block_update(hist, b, states, s, e):
    """Push the contribution of states[s:e] into hist[e:].

    hist[n] accumulates sum_{k<e} b[n-k] states[k]; after this call the
    invariant holds for all n >= e.  The Toeplitz slab b[n-k] is formed
    once per block so the update is a single matrix product.
    """
    N = hist.shape[0] - 1
    if e > N:
        return
    rows = np.arange(e, N + 1)
    slab = b[rows[:, None] - np.arange(s, e)[None, :]]
    hist[e:] += slab @ states[s:e]


def scalar_F_many(alpha: float, grid: TimeGrid, lams) -> np.ndarray:
    """Decay factors F^n(lam) for an array of lam >= 0; shape (N+1, len(lams)).

    F^0 = 1 and F^n = (s_n - sum_{j=1..n} b_j F^{n-j}) / (1 + lam tau^alpha).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if np.any(lams < 0.0):
        raise ValueError("lam must be >= 0")
    N = grid.N
    w = cq_weights(alpha, N)
    b = w.b
    s = w.partial_sums
    denom = 1.0 + lams * grid.tau**alpha
    F = np.empty((N + 1, lams.size))
    F[0] = 1.0
    hist = np.zeros_like(F)
    for s0 in range(0, N + 1, _BLOCK):
        e0 = min(s0 + _BLOCK, N + 1)
        for n in range(max(s0, 1), e0):
            h = hist[n]
            if n > s0:  # in-block part: k in [s0, n), weight b[n-k]
                h = h + b[n - s0 : 0 : -1] @ F[s0:n]
            F[n] = (s[n] - h) / denom
        _history_block_update(hist, b, F, s0, e0)
    return F


def scalar_F(alpha: float, grid: TimeGrid, lam: float) -> np.ndarray:
    """Scalar decay sequence F^0..F^N for a single eigenvalue lam >= 0."""
    return scalar_F_many(alpha, grid, [lam])[:, 0]


class _ForwardStepper:
    """Cached machinery for the fully discrete forward scheme.

    Holds the factorized step matrix tau^-alpha M + A together with the CQ
    weights for one (mesh, grid, alpha) triple; building it is the
    expensive part, running a trajectory is cheap, so instances are cached
    and reused (notably by the conjugate-gradient backward solver, which
    applies the terminal map many times).
    """

    def __init__(self, mesh: Mesh, grid: TimeGrid, alpha: float):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        self.mesh = mesh
        self.grid = grid
        self.alpha = alpha
        self.M = assemble_mass(mesh)
        self.A = assemble_stiffness(mesh)
        self.scale = grid.tau ** (-alpha)
        self._solve = spla.factorized((self.scale * self.M + self.A).tocsc())
        w = cq_weights(alpha, grid.N)
        self.b = w.b
        self.s = w.partial_sums

    def run(self, u0: np.ndarray, source=None) -> np.ndarray:
        """Full trajectory (N+1, n_interior) starting from nodal values u0."""
        N = self.grid.N
        n = self.mesh.n_interior
        U = np.empty((N + 1, n))
        U[0] = u0
        hist = np.zeros_like(U)
        b = self.b
        tau = self.grid.tau
        for s0 in range(0, N + 1, _BLOCK):
            e0 = min(s0 + _BLOCK, N + 1)
            for k in range(max(s0, 1), e0):
                h = hist[k]
                if k > s0:  # in-block part: j in [s0, k), weight b[k-j]
                    h = h + b[k - s0 : 0 : -1] @ U[s0:k]
                rhs = self.scale * (self.s[k] * U[0] - h)
                if source is not None:
                    f = source(tau * k)
                    rhs = rhs + (f.values if isinstance(f, Field) else np.asarray(f))
                U[k] = self._solve(self.M @ rhs)
            _history_block_update(hist, b, U, s0, e0)
        return U


_stepper_cache: dict[tuple, _ForwardStepper] = {}


def _stepper(mesh: Mesh, grid: TimeGrid, alpha: float) -> _ForwardStepper:
    key = (mesh.dim, mesh.K, grid.T, grid.N, alpha)
    if key not in _stepper_cache:
        if len(_stepper_cache) > 16:
            _stepper_cache.clear()
        _stepper_cache[key] = _ForwardStepper(mesh, grid, alpha)
    return _stepper_cache[key]


def forward_solve(mesh: Mesh, grid: TimeGrid, alpha: float, u0: Field, source=None) -> np.ndarray:
    """Fully discrete forward trajectory; rows are nodal states U_0..U_N.

    `source`, when given, is a callable t -> Field (or plain nodal array)
    holding the projected source coefficients at that time; it is evaluated
    at t_1..t_N.
    """
    if u0.mesh != mesh:
        raise ValueError("initial data lives on a different mesh")
    return _stepper(mesh, grid, alpha).run(u0.values.copy(), source)


def terminal_map(mesh: Mesh, grid: TimeGrid, alpha: float, v: Field) -> Field:
    """Terminal state of the homogeneous forward problem started from v.

    This is the linear, M-self-adjoint map whose regularized inversion is
    the backward problem.
    """
    U = forward_solve(mesh, grid, alpha, v)
    return Field(mesh, U[-1])
