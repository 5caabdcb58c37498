"""P1 finite elements on the unit interval and the unit square.

Meshes are uniform: K+1 subintervals of length h = 1/(K+1) on (0,1), or a
K-by-K grid of squares (h = 1/K) each split into two right triangles along
the lower-left to upper-right diagonal on (0,1)^2.  Homogeneous Dirichlet
conditions are built in: all matrices and coefficient vectors live on the
interior nodes only.

The module provides mass/stiffness assembly, L2 projection of point data,
exact L2 norms and nested-mesh error norms of piecewise linear functions,
and the closed-form eigen-decomposition of the 1-d stiffness/mass pencil.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "Mesh",
    "Field",
    "SpectralBasis1D",
    "assemble_mass",
    "assemble_stiffness",
    "l2_project",
    "l2_norm",
    "l2_error",
    "prolongate",
    "eigenpairs_1d",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh on (0,1) or (0,1)^2 with Dirichlet boundary eliminated.

    Attributes
    ----------
    dim : 1 or 2.
    K : subdivision count; h = 1/(K+1) in 1-d (K interior nodes),
        h = 1/K in 2-d ((K-1)^2 interior nodes).
    """

    dim: int
    K: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.dim == 1 and self.K < 1:
            raise ValueError("1-d mesh needs K >= 1 interior nodes")
        if self.dim == 2 and self.K < 2:
            raise ValueError("2-d mesh needs K >= 2 subdivisions per side")

    @staticmethod
    def interval(K: int) -> "Mesh":
        return Mesh(dim=1, K=K)

    @staticmethod
    def unit_square(K: int) -> "Mesh":
        return Mesh(dim=2, K=K)

    @property
    def h(self) -> float:
        return 1.0 / (self.K + 1) if self.dim == 1 else 1.0 / self.K

    @property
    def n_interior(self) -> int:
        return self.K if self.dim == 1 else (self.K - 1) ** 2

    @property
    def interior_points(self) -> np.ndarray:
        """Coordinates of interior nodes: (K,) in 1-d, ((K-1)^2, 2) in 2-d."""
        if self.dim == 1:
            return self.h * np.arange(1, self.K + 1)
        g = self.h * np.arange(1, self.K)
        X, Y = np.meshgrid(g, g, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def nested_in(self, fine: "Mesh") -> bool:
        """True if this mesh's nodes are a subset of `fine`'s nodes."""
        if self.dim != fine.dim:
            return False
        if self.dim == 1:
            return (fine.K + 1) % (self.K + 1) == 0
        return fine.K % self.K == 0


@dataclass
class Field:
    """Nodal coefficients of a P1 function on the interior of a mesh."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_interior,):
            raise ValueError(
                f"expected {self.mesh.n_interior} coefficients, got {self.values.shape}"
            )

    @staticmethod
    def zeros(mesh: Mesh) -> "Field":
        return Field(mesh, np.zeros(mesh.n_interior))


@dataclass(frozen=True)
class SpectralBasis1D:
    """Eigenpairs of the 1-d interior stiffness/mass pencil A v = lam M v.

    The K eigenvalues have the closed form
        lam_j = (6/h^2) (1 - cos(j pi h)) / (2 + cos(j pi h)),   h = 1/(K+1),
    with eigenvectors sampling sqrt(2) sin(j pi x) at the interior nodes.
    """

    K: int
    h: float
    lam: np.ndarray = field(repr=False)

    def mode(self, j: int) -> np.ndarray:
        """Nodal samples of sqrt(2) sin(j pi x), j = 1..K.

        The phase j*i/(K+1) is reduced modulo 2 in exact integer arithmetic
        before multiplying by pi, so the samples stay accurate to ~1 ulp
        even for the most oscillatory modes.
        """
        n = self.K + 1
        m = (j * np.arange(1, self.K + 1)) % (2 * n)
        return np.sqrt(2.0) * _sinpi(m / n)


def _sinpi(r: np.ndarray) -> np.ndarray:
    """sin(pi*r) for r in [0,2), folded to first-quadrant evaluations."""
    r = np.asarray(r, dtype=float)
    sign = np.where(r > 1.0, -1.0, 1.0)
    r = np.where(r > 1.0, r - 1.0, r)  # now in [0,1]
    r = np.where(r > 0.5, 1.0 - r, r)  # fold to [0,0.5]
    return sign * np.sin(np.pi * r)


def eigenpairs_1d(K: int) -> SpectralBasis1D:
    if K < 1:
        raise ValueError("K must be >= 1")
    h = 1.0 / (K + 1)
    j = np.arange(1, K + 1)
    c = np.cos(j * np.pi * h)
    lam = (6.0 / h**2) * (1.0 - c) / (2.0 + c)
    return SpectralBasis1D(K=K, h=h, lam=lam)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

_matrix_cache: dict[tuple, sp.csr_matrix] = {}


def _square_grid(mesh: Mesh):
    """Full node grid and triangle list for the 2-d mesh (boundary included).

    Triangles split each cell along the lower-left/upper-right diagonal:
    (v00, v10, v11) and (v00, v11, v01), both counterclockwise.
    """
    K = mesh.K
    g = np.linspace(0.0, 1.0, K + 1)
    X, Y = np.meshgrid(g, g, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])  # id = i*(K+1) + j
    idx = np.arange((K + 1) ** 2).reshape(K + 1, K + 1)
    v00 = idx[:-1, :-1].ravel()
    v10 = idx[1:, :-1].ravel()
    v01 = idx[:-1, 1:].ravel()
    v11 = idx[1:, 1:].ravel()
    tri = np.vstack(
        [
            np.column_stack([v00, v10, v11]),
            np.column_stack([v00, v11, v01]),
        ]
    )
    interior = ((nodes[:, 0] > 0) & (nodes[:, 0] < 1) & (nodes[:, 1] > 0) & (nodes[:, 1] < 1))
    # interior numbering must match Mesh.interior_points ordering (x-major)
    inum = -np.ones((K + 1) ** 2, dtype=int)
    ids = idx[1:K, 1:K].ravel()
    inum[ids] = np.arange(ids.size)
    return nodes, tri, interior, inum


def _tri_geometry(nodes, tri):
    p0, p1, p2 = nodes[tri[:, 0]], nodes[tri[:, 1]], nodes[tri[:, 2]]
    d1 = p1 - p0
    d2 = p2 - p0
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    area = 0.5 * np.abs(det)
    # gradients of the barycentric functions
    g0 = np.column_stack([p1[:, 1] - p2[:, 1], p2[:, 0] - p1[:, 0]]) / det[:, None]
    g1 = np.column_stack([p2[:, 1] - p0[:, 1], p0[:, 0] - p2[:, 0]]) / det[:, None]
    g2 = np.column_stack([p0[:, 1] - p1[:, 1], p1[:, 0] - p0[:, 0]]) / det[:, None]
    return area, (g0, g1, g2)


def _assemble_2d(mesh: Mesh):
    nodes, tri, _, inum = _square_grid(mesh)
    area, grads = _tri_geometry(nodes, tri)
    nt = tri.shape[0]
    rows, cols = [], []
    mvals, avals = [], []
    for a in range(3):
        for b in range(3):
            rows.append(tri[:, a])
            cols.append(tri[:, b])
            mvals.append(area / 12.0 * (2.0 if a == b else 1.0) * np.ones(nt))
            avals.append(area * np.sum(grads[a] * grads[b], axis=1))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    n = nodes.shape[0]
    M = sp.coo_matrix((np.concatenate(mvals), (rows, cols)), shape=(n, n)).tocsr()
    A = sp.coo_matrix((np.concatenate(avals), (rows, cols)), shape=(n, n)).tocsr()
    keep = inum >= 0
    order = np.argsort(inum[keep])
    ids = np.flatnonzero(keep)[order]
    return M[np.ix_(ids, ids)].tocsr(), A[np.ix_(ids, ids)].tocsr()


def _matrices(mesh: Mesh):
    key = (mesh.dim, mesh.K)
    if key not in _matrix_cache:
        if mesh.dim == 1:
            K, h = mesh.K, mesh.h
            main = np.full(K, 2.0 * h / 3.0)
            off = np.full(K - 1, h / 6.0)
            M = sp.diags([off, main, off], [-1, 0, 1], format="csr")
            main = np.full(K, 2.0 / h)
            off = np.full(K - 1, -1.0 / h)
            A = sp.diags([off, main, off], [-1, 0, 1], format="csr")
        else:
            M, A = _assemble_2d(mesh)
        _matrix_cache[key] = (M, A)
    return _matrix_cache[key]


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """Interior mass matrix M_ij = (phi_i, phi_j); symmetric positive definite."""
    return _matrices(mesh)[0]


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Interior stiffness matrix A_ij = (grad phi_i, grad phi_j).

    On the 2-d right-triangle mesh this reproduces the classical 5-point
    stencil exactly: 4 on the diagonal, -1 to the four axis neighbours, and
    no diagonal coupling.
    """
    return _matrices(mesh)[1]


# ---------------------------------------------------------------------------
# L2 projection
# ---------------------------------------------------------------------------

# 3-point Gauss-Legendre on [0,1]
_GAUSS3_X = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5, 0.5 + np.sqrt(15.0) / 10.0])
_GAUSS3_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


def _load_vector_1d(mesh: Mesh, f, jumps):
    """b_i = (f, phi_i) by 3-point Gauss per element, split at any jump."""
    K, h = mesh.K, mesh.h
    edges = h * np.arange(K + 2)
    b = np.zeros(K)

    def accumulate(lo, hi, e):
        # e is the element index [x_e, x_{e+1}]; integrate f * (each hat)
        if hi <= lo:
            return
        pts = lo + (hi - lo) * _GAUSS3_X
        w = (hi - lo) * _GAUSS3_W
        fv = np.asarray(f(pts), dtype=float)
        lam = (pts - edges[e]) / h  # local coordinate in [0,1]
        if e >= 1:  # left vertex x_e is interior node e-1
            b[e - 1] += np.sum(w * fv * (1.0 - lam))
        if e + 1 <= K:  # right vertex x_{e+1} is interior node e
            b[e] += np.sum(w * fv * lam)

    for e in range(K + 1):
        lo, hi = edges[e], edges[e + 1]
        cuts = [c for c in jumps if lo < c < hi]
        pieces = [lo, *sorted(cuts), hi]
        for a, bnd in zip(pieces[:-1], pieces[1:]):
            accumulate(a, bnd, e)
    return b


# degree-2 exact rule on the reference triangle (edge midpoints)
_TRI_MID = np.array([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])


def _load_vector_2d(mesh: Mesh, f):
    nodes, tri, _, inum = _square_grid(mesh)
    area, _ = _tri_geometry(nodes, tri)
    p0, p1, p2 = nodes[tri[:, 0]], nodes[tri[:, 1]], nodes[tri[:, 2]]
    b = np.zeros(mesh.n_interior)
    # barycentric values of the three vertex hats at the edge midpoints
    bary = np.column_stack([1.0 - _TRI_MID.sum(axis=1), _TRI_MID[:, 0], _TRI_MID[:, 1]])
    for q in range(3):
        pts = (
            p0 * bary[q, 0]
            + p1 * bary[q, 1]
            + p2 * bary[q, 2]
        )
        fv = np.asarray(f(pts), dtype=float) * area / 3.0
        for a in range(3):
            ids = inum[tri[:, a]]
            keep = ids >= 0
            np.add.at(b, ids[keep], fv[keep] * bary[q, a])
    return b


def l2_project(mesh: Mesh, f, jumps=()) -> Field:
    """L2-orthogonal projection of a point function onto the P1 space.

    Solves M c = b with b_i = (f, phi_i).  `f` maps an array of points
    (coordinates in 1-d, (n,2) rows in 2-d) to values.  In 1-d, known
    discontinuity locations can be passed in `jumps`; element integrals are
    then split there so step data is projected exactly instead of with
    O(h) quadrature pollution.
    """
    if mesh.dim == 1:
        b = _load_vector_1d(mesh, f, jumps)
    else:
        if jumps:
            raise ValueError("jump splitting is only implemented in 1-d")
        b = _load_vector_2d(mesh, f)
    M = assemble_mass(mesh)
    c = spla.splu(M.tocsc()).solve(b)
    return Field(mesh, c)


# ---------------------------------------------------------------------------
# norms and nested-mesh errors
# ---------------------------------------------------------------------------


def l2_norm(u: Field) -> float:
    """Exact L2(Omega) norm of the piecewise linear function with these nodes."""
    M = assemble_mass(u.mesh)
    return float(np.sqrt(abs(u.values @ (M @ u.values))))


def prolongate(u: Field, fine: Mesh) -> Field:
    """Exact representation of a coarse P1 function on a nested finer mesh."""
    coarse = u.mesh
    if not coarse.nested_in(fine):
        raise ValueError("meshes are not nested")
    if coarse.dim == 1:
        xc = np.concatenate([[0.0], coarse.interior_points, [1.0]])
        vc = np.concatenate([[0.0], u.values, [0.0]])
        vals = np.interp(fine.interior_points, xc, vc)
        return Field(fine, vals)
    # 2-d: evaluate the coarse function at the fine interior nodes
    pts = fine.interior_points
    vals = _eval_p1_2d(u, pts)
    return Field(fine, vals)


def _eval_p1_2d(u: Field, pts: np.ndarray) -> np.ndarray:
    """Evaluate a 2-d P1 interior field at arbitrary points of [0,1]^2."""
    K = u.mesh.K
    h = u.mesh.h
    full = np.zeros((K + 1, K + 1))
    full[1:K, 1:K] = u.values.reshape(K - 1, K - 1)
    fx = np.clip(pts[:, 0] / h, 0.0, K * (1.0 - 1e-15))
    fy = np.clip(pts[:, 1] / h, 0.0, K * (1.0 - 1e-15))
    i = np.minimum(fx.astype(int), K - 1)
    j = np.minimum(fy.astype(int), K - 1)
    xi = fx - i
    eta = fy - j
    v00 = full[i, j]
    v10 = full[i + 1, j]
    v01 = full[i, j + 1]
    v11 = full[i + 1, j + 1]
    lower = (1.0 - xi) * v00 + (xi - eta) * v10 + eta * v11
    upper = (1.0 - eta) * v00 + (eta - xi) * v01 + xi * v11
    return np.where(xi >= eta, lower, upper)


def l2_error(u: Field, ref: Field) -> float:
    """L2 norm of (u - ref) where ref lives on a nested finer mesh.

    The coarse function is prolongated exactly, so the returned value is the
    exact L2 norm of the piecewise linear difference (no sampling error).
    """
    fine = prolongate(u, ref.mesh)
    diff = Field(ref.mesh, fine.values - ref.values)
    return l2_norm(diff)
