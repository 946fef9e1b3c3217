"""Dense symmetric linear algebra and Gaussian data generation.

Matrices are plain ``numpy`` float arrays; a dataset is an ``n x p`` array.
All densities elsewhere in the package are handled in natural-log space.
"""

import math

import numpy as np
from scipy.linalg import lapack
from scipy.special import gammaln

from .graph import LabeledGraph


class NotPositiveDefinite(ValueError):
    """Raised when a Cholesky factorisation breaks down.

    ``pivot`` is the 0-based index of the leading minor that failed.
    """

    def __init__(self, pivot, message=None):
        self.pivot = pivot
        super().__init__(message or "matrix is not positive definite (pivot %d)" % pivot)


def as_dataset(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("dataset must be a 2-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("dataset has non-finite entries")
    return x


def center(x):
    """Subtract each column mean."""
    x = as_dataset(x)
    if x.shape[0] < 1:
        raise ValueError("centering needs at least one observation")
    return x - x.mean(axis=0)


def standardize(m):
    """Rescale a symmetric matrix to unit diagonal: m_ij / sqrt(m_ii m_jj)."""
    m = np.asarray(m, dtype=float)
    d = np.diag(m)
    if np.any(d <= 0):
        raise ValueError("standardize needs a positive diagonal")
    s = 1.0 / np.sqrt(d)
    out = m * s[:, None] * s[None, :]
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 1.0)
    return out


def log_multigamma(q: int, a: float) -> float:
    """log of the multivariate gamma function Gamma_q(a)."""
    if q < 1:
        raise ValueError("dimension must be positive")
    if a + (1 - q) / 2.0 <= 0:
        raise ValueError("log_multigamma(%d, %g): argument out of domain" % (q, a))
    j = np.arange(1, q + 1)
    return q * (q - 1) / 4.0 * math.log(math.pi) + float(np.sum(gammaln(a + (1 - j) / 2.0)))


def cholesky_logdet(m):
    """Lower Cholesky factor and log-determinant of a symmetric PD matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] == 0:
        return m.copy(), 0.0
    factor, info = lapack.dpotrf(m, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:
        raise ValueError("invalid argument to dpotrf")
    return factor, 2.0 * float(np.sum(np.log(np.diag(factor))))


def jacobi_eigenvalues(m, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Kept independent of LAPACK so it can serve as a cross-check.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.sqrt(np.sum(np.diag(a) ** 2))):
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                if a[i, j] == 0.0:
                    continue
                diff = a[j, j] - a[i, i]
                if abs(a[i, j]) < 1e-18 * abs(diff):
                    t = a[i, j] / diff  # theta is huge; first-order rotation
                else:
                    theta = diff / (2.0 * a[i, j])
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ai = a[:, i].copy()
                aj = a[:, j].copy()
                a[:, i] = c * ai - s * aj
                a[:, j] = s * ai + c * aj
                ri = a[i, :].copy()
                rj = a[j, :].copy()
                a[i, :] = c * ri - s * rj
                a[j, :] = s * ri + c * rj
    return np.sort(np.diag(a))


def precision_from_graph(g: LabeledGraph, r: float):
    """Identity with -r at every edge position."""
    k = np.eye(g.p)
    for u, v in g.edges:
        k[u, v] = k[v, u] = -r
    return k


def cov_from_graph(g: LabeledGraph, r: float):
    """Correlation matrix whose partial correlation is r on every edge and 0 elsewhere.

    Raises NotPositiveDefinite when the implied precision matrix is not PD.
    """
    k = precision_from_graph(g, r)
    factor, _ = cholesky_logdet(k)
    inv = lapack.dpotri(factor, lower=1)[0]
    inv = np.tril(inv) + np.tril(inv, -1).T
    return standardize(inv)


def cov_from_graph_eigshift(g: LabeledGraph, k0, margin: float = 0.1):
    """Make ``k0`` PD by adding a multiple of I, then invert and standardize.

    If the smallest eigenvalue is below ``margin`` the diagonal is raised so
    that it becomes exactly ``margin``; a matrix that is already PD is left
    alone.  Returns ``(sigma, shift)``.
    """
    k0 = np.asarray(k0, dtype=float)
    if margin <= 0:
        raise ValueError("margin must be positive")
    if np.any(np.diag(k0) <= 0):
        raise ValueError("k0 needs a positive diagonal")
    p = g.p
    for u in range(p):
        for v in range(u + 1, p):
            if not g.has_edge(u, v) and k0[u, v] != 0.0:
                raise ValueError("k0 has a non-zero entry at non-edge (%d, %d)" % (u, v))
    lam_min = jacobi_eigenvalues(k0)[0]
    shift = 0.0 if lam_min > 0 else margin - lam_min
    k = k0 + shift * np.eye(p)
    sigma = np.linalg.inv(k)
    return standardize(0.5 * (sigma + sigma.T)), shift


def star_validity(partials) -> bool:
    """A star with these partial correlations on its rays is realisable iff sum of squares < 1."""
    c = np.asarray(partials, dtype=float)
    if c.size < 1:
        raise ValueError("need at least one partial correlation")
    return float(np.sum(c * c)) < 1.0


def vshape_correlations(c12: float, c13: float):
    """Correlations of a V-shape 2-1-3 given standardized precision entries c12, c13."""
    if c12 * c12 >= 1 or c13 * c13 >= 1 or c12 * c12 + c13 * c13 >= 1:
        raise ValueError("invalid standardized precision entries")
    a = math.sqrt(1 - c12 * c12)
    b = math.sqrt(1 - c13 * c13)
    r12 = -c12 / b
    r13 = -c13 / a
    return r12, r13, r12 * r13


def sample_mvn(sigma, n: int, seed):
    """n draws from N(0, sigma) as rows of an n x p array."""
    sigma = np.asarray(sigma, dtype=float)
    factor, _ = cholesky_logdet(sigma)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((int(n), sigma.shape[0]))
    return z @ factor.T


def partial_correlations(sigma):
    """Negated standardized precision matrix, with unit diagonal."""
    k = np.linalg.inv(np.asarray(sigma, dtype=float))
    c = -standardize(0.5 * (k + k.T))
    np.fill_diagonal(c, 1.0)
    return c


def read_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_matrix(m, path):
    np.savetxt(path, np.asarray(m), delimiter=",", fmt="%.17g")
