"""Dense complex linear algebra used throughout the package.

Matrices are plain :class:`numpy.ndarray` objects of complex dtype. Two
eigensolvers are available behind :func:`herm_eig`: LAPACK (``numpy.linalg.eigh``)
and a cyclic complex Jacobi iteration written here. The Jacobi path doubles as an
independent check on the LAPACK path in the test-suite.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10
MAX_SWEEPS = 200
# components below this fraction of the column maximum are skipped when fixing phases
_PHASE_CUTOFF = 1e-6


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in descending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt coefficients (squared singular values) and the two local bases.

    The coefficient matrix is recovered as
    ``left_basis @ diag(sqrt(coefficients)) @ right_basis.T``.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reassemble(self):
        root = np.sqrt(np.clip(self.coefficients, 0.0, None))
        return (self.left_basis * root) @ self.right_basis.T


def as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or infinite entries")
    return M


def hermiticity_defect(M):
    """Relative Frobenius deviation ``||M - M^H|| / ||M||`` (0 for the zero matrix)."""
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(M - M.conj().T) / norm)


def fix_phase(vectors):
    """Rotate each column so its first non-negligible component is real positive."""
    vectors = np.array(vectors, dtype=complex, copy=True)
    if vectors.ndim == 1:
        return fix_phase(vectors[:, None])[:, 0]
    for c in range(vectors.shape[1]):
        col = vectors[:, c]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        k = int(np.argmax(mags > _PHASE_CUTOFF * top))
        vectors[:, c] = col * (np.conj(col[k]) / mags[k])
        vectors[k, c] = mags[k]
    return vectors


def _sort_descending(w, V):
    order = np.argsort(-w, kind="stable")
    return w[order], fix_phase(V[:, order])


def _jacobi_eigh(M, max_sweeps=MAX_SWEEPS):
    A = np.array(M, dtype=complex, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if scale == 0.0 or n == 1:
        return np.real(np.diag(A)).copy(), V
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        # direct sum; the difference of squared norms cancels to noise
        off = np.linalg.norm(A[~np.eye(n, dtype=bool)])
        if off <= n * eps * scale:
            return np.real(np.diag(A)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                mag = abs(b)
                if mag <= eps * 1e-3 * scale:
                    continue
                phase = b / mag
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = col_p * g_pp + col_q * g_qp
                A[:, q] = col_p * g_pq + col_q * g_qq
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                A[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = vp * g_pp + vq * g_qp
                V[:, q] = vp * g_pq + vq * g_qq
    raise NoConvergence(f"Jacobi iteration did not converge within {max_sweeps} sweeps")


def herm_eig(M, method="lapack", tol=HERMITIAN_TOL, max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    M : array_like
        Square Hermitian matrix.
    method : {"lapack", "jacobi"}
        Backend. ``"jacobi"`` runs cyclic sweeps of complex Givens rotations.
    tol : float
        Allowed relative deviation from Hermiticity.

    Returns
    -------
    EigenSystem
        Eigenvalues sorted descending; each eigenvector column has its first
        non-negligible component made real positive, so outputs are
        deterministic up to genuine degeneracy.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {M.shape}")
    defect = hermiticity_defect(M)
    if defect > tol:
        raise NotHermitian(f"relative Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    H = 0.5 * (M + M.conj().T)
    if method == "lapack":
        w, V = np.linalg.eigh(H)
    elif method == "jacobi":
        w, V = _jacobi_eigh(H, max_sweeps=max_sweeps)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    w, V = _sort_descending(np.asarray(w, dtype=float), V)
    return EigenSystem(w, V)


def effective_rank(eigenvalues, tol=RANK_TOL):
    """Number of eigenvalues exceeding ``tol`` times their sum."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    total = eigenvalues.sum()
    return int(np.count_nonzero(eigenvalues > tol * total))


def schmidt_decompose(A):
    """Schmidt form of a bipartite pure state given by its coefficient matrix."""
    A = as_matrix(getattr(A, "A", A))
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"coefficient matrix must be square, got {A.shape}")
    U, s, Vh = np.linalg.svd(A)
    return SchmidtForm(coefficients=s**2, left_basis=U, right_basis=Vh.T)


def partial_transpose(rho, N, sys=1):
    """Transpose one tensor factor of an ``N^2 x N^2`` operator.

    ``sys=1`` (default) transposes the second factor, giving
    ``<i k|rho^T_B|j l> = <i l|rho|j k>``; ``sys=0`` transposes the first.
    """
    rho = as_matrix(rho)
    if rho.shape != (N * N, N * N):
        raise DimensionMismatch(f"expected a {N * N}x{N * N} matrix for N={N}, got {rho.shape}")
    t = rho.reshape(N, N, N, N)
    if sys == 1:
        t = t.transpose(0, 3, 2, 1)
    elif sys == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("sys must be 0 or 1")
    return t.reshape(N * N, N * N)


def kron(A, B):
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def projector(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())
