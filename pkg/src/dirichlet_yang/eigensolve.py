"""Dirichlet spectra of host networks.

The Dirichlet Laplacian on ``Omega`` is not symmetric in the Euclidean sense
when ``pi`` is not constant, so it is conjugated by ``D^{1/2}`` first:
``M = D^{1/2} (I - P) D^{-1/2}`` restricted to the interior.  ``M`` is
diagonalised by cyclic Jacobi and eigenvectors are mapped back with
``u = D^{-1/2} v``, which makes them ``pi``-orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .errors import DomainError, NumericError
from .network import HostNetwork

DEFAULT_TOL = 1e-13
MAX_SWEEPS = 50


def dirichlet_matrix(net: HostNetwork) -> np.ndarray:
    """Symmetrised Dirichlet Laplacian on the interior, shape ``(n, n)``.

    Row/column ``t`` corresponds to host vertex ``net.interior[t]``.
    """
    n = net.n_interior
    pos = np.full(net.n_vertices, -1, dtype=np.int64)
    pos[net.interior] = np.arange(n)
    keep = net.interior_mask[net.src] & net.interior_mask[net.dst]
    s, d, w = net.src[keep], net.dst[keep], net.weight[keep]
    m = np.eye(n)
    # sqrt(pi_x * pi_y) is symmetric in x, y bit for bit
    np.subtract.at(m, (pos[s], pos[d]), w / np.sqrt(net.pi[s] * net.pi[d]))
    return m


def _round_robin(n: int):
    """Yield ``(p, q)`` index arrays; each round pairs every index at most once."""
    m = n + (n % 2)
    players = list(range(m))
    for _ in range(m - 1):
        p, q = [], []
        for t in range(m // 2):
            a, b = players[t], players[m - 1 - t]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        yield np.array(p, dtype=np.int64), np.array(q, dtype=np.int64)
        players = [players[0], players[-1]] + players[1:-1]


def symmetric_eigh(m, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round act on disjoint index pairs and can be
    applied together.  Iteration stops once every off-diagonal entry is at
    most ``tol * ||m||_F``.

    Returns ``(eigenvalues, q)`` with eigenvalues ascending and the columns of
    ``q`` the matching orthonormal eigenvectors.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("symmetric_eigh expects a square matrix")
    if tol <= 0:
        raise DomainError("tol must be positive")
    n = a.shape[0]
    scale = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(1.0, scale):
        raise DomainError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    vt = np.eye(n)  # accumulated rotations, transposed so updates touch contiguous rows
    threshold = tol * scale
    skip = 1e-3 * threshold
    rounds = list(_round_robin(n)) if n > 1 else []

    def off_max():
        return np.max(np.abs(a - np.diag(np.diag(a))), initial=0.0)

    sweeps = 0
    while off_max() > threshold:
        if sweeps == max_sweeps:
            raise NumericError(f"Jacobi did not converge in {max_sweeps} sweeps")
        for p, q in rounds:
            apq = a[p, q]
            # entries far below the stopping threshold cannot delay convergence
            active = np.abs(apq) > skip
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            ap, aq = a[:, p], a[:, q]
            a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
            c, s = c[:, None], s[:, None]
            ap, aq = a[p], a[q]
            a[p], a[q] = c * ap - s * aq, s * ap + c * aq
            vp, vq = vt[p], vt[q]
            vt[p], vt[q] = c * vp - s * vq, s * vp + c * vq
            a[p, q] = 0.0
            a[q, p] = 0.0
        sweeps += 1

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], vt.T[:, order]


@dataclass(frozen=True, eq=False)
class DirichletSystem:
    """Sorted Dirichlet eigenvalues with a ``pi``-orthonormal eigenbasis.

    ``eigenvectors`` has shape ``(N, n)``; column ``i`` is ``u_{i+1}`` on the
    whole host and vanishes off the interior.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    lambda_min: float

    @property
    def interior_size(self) -> int:
        return int(self.eigenvalues.size)

    def u(self, i: int) -> np.ndarray:
        """Eigenvector ``u_i`` with 1-based index, as in the usual notation."""
        return self.eigenvectors[:, i - 1]


def _transition_operator(net: HostNetwork) -> csr_matrix:
    return csr_matrix((net.weight / net.pi[net.src], (net.src, net.dst)),
                      shape=(net.n_vertices, net.n_vertices))


def laplacian_residuals(net: HostNetwork, values, vectors) -> np.ndarray:
    """``||Delta u_i - lambda_i u_i||_pi`` over interior rows, for each column."""
    p = _transition_operator(net)
    lap = vectors - p @ vectors
    r = (lap - vectors * values[None, :])[net.interior]
    return np.sqrt(np.einsum("i,ij->j", net.pi[net.interior], r * r))


def dirichlet_system(net: HostNetwork, lambda_min: float = 0.0, tol: float = DEFAULT_TOL) -> DirichletSystem:
    """Diagonalise the Dirichlet Laplacian of ``net`` on its interior.

    ``lambda_min`` is the bottom of the ambient spectrum.  It is an
    infinite-volume quantity and is taken from the caller, never estimated.
    """
    values, q = symmetric_eigh(dirichlet_matrix(net), tol=tol)
    vectors = np.zeros((net.n_vertices, values.size))
    vectors[net.interior] = q / np.sqrt(net.pi[net.interior])[:, None]
    if values[0] < lambda_min - 1e-12:
        raise DomainError(f"lambda_min={lambda_min!r} exceeds lambda_1={values[0]!r}")
    residuals = laplacian_residuals(net, values, vectors)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return DirichletSystem(values, vectors, residuals, float(lambda_min))


def spectrum_rows(system: DirichletSystem):
    """Rows ``(k, lambda_k, residual)`` in increasing ``k``."""
    return [(k + 1, float(lam), float(res))
            for k, (lam, res) in enumerate(zip(system.eigenvalues, system.residuals))]
