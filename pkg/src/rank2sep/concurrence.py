"""Local-unitary invariants and the generalized concurrence of bipartite pure states."""

import numpy as np

from .errors import AlphaOutOfRange, DimensionMismatch, InternalConsistencyError, NotNormalized
from .linalg import fix_phase
from .states import LocalUnitary, PureState

CONCURRENCE_TOL = 1e-9
_RADICAND_FLOOR = -1e-12
_FORM_AGREEMENT = 1e-10


def _as_state(psi):
    return psi if isinstance(psi, PureState) else PureState(psi)


def _as_unitary(U):
    return U if isinstance(U, LocalUnitary) else LocalUnitary(U)


def apply_local_unitary(psi, U, V=None):
    """Apply ``U (x) V`` to ``psi``; the coefficient matrix maps to ``U A V^T``.

    ``V`` defaults to ``U``.
    """
    psi = _as_state(psi)
    U = _as_unitary(U)
    V = U if V is None else _as_unitary(V)
    if U.N != psi.N or V.N != psi.N:
        raise DimensionMismatch(f"unitaries of size {U.N}, {V.N} cannot act on N={psi.N}")
    return PureState(U.U @ psi.A @ V.U.T)


def invariant(psi, alpha):
    """``Tr (A A^H)^(alpha + 1)`` for ``alpha`` in ``0 .. N-1``."""
    psi = _as_state(psi)
    if not 0 <= alpha <= psi.N - 1:
        raise AlphaOutOfRange(f"alpha={alpha} outside 0..{psi.N - 1}")
    gram = psi.A @ psi.A.conj().T
    return float(np.real(np.trace(np.linalg.matrix_power(gram, alpha + 1))))


def minors(A):
    """All 2x2 minors ``A[i,j] A[k,l] - A[i,l] A[k,j]`` as an ``(N, N, N, N)`` array."""
    A = np.asarray(A, dtype=complex)
    return np.einsum("ij,kl->ijkl", A, A) - np.einsum("il,kj->ijkl", A, A)


def _minor_sum(A):
    # rows i<j, columns k<m; each unordered minor appears four times in the full sum
    i, j = np.triu_indices(A.shape[0], 1)
    k, m = i, j
    compound = A[np.ix_(i, k)] * A[np.ix_(j, m)] - A[np.ix_(i, m)] * A[np.ix_(j, k)]
    return 4.0 * float(np.sum(np.abs(compound) ** 2))


def concurrence_radicands(psi):
    """The two radicands of ``C_N^2``: invariant form and minor-sum form."""
    psi = _as_state(psi)
    N = psi.N
    I0 = invariant(psi, 0)
    I1 = invariant(psi, 1) if N > 1 else I0**2
    invariant_form = N / (N - 1) * (I0**2 - I1)
    minor_form = N / (2 * (N - 1)) * _minor_sum(psi.A)
    return invariant_form, minor_form


def generalized_concurrence(psi):
    """Generalized concurrence ``C_N`` in ``[0, 1]``.

    Both closed forms are evaluated and must agree; the minor-sum form is
    returned because it does not lose precision near product states.
    """
    psi = _as_state(psi)
    if psi.N < 2:
        return 0.0
    inv_form, minor_form = concurrence_radicands(psi)
    if abs(inv_form - minor_form) > _FORM_AGREEMENT:
        raise InternalConsistencyError(
            f"concurrence forms disagree: {inv_form:.16g} vs {minor_form:.16g}"
        )
    if minor_form < _RADICAND_FLOOR:
        raise InternalConsistencyError(f"negative concurrence radicand {minor_form:.3e}")
    return float(min(np.sqrt(max(minor_form, 0.0)), 1.0))


def schmidt_concurrence(lambdas, tol=1e-10):
    """``C_N`` from Schmidt coefficients: ``sqrt(N/(N-1) * sum_{i != j} L_i L_j)``."""
    lam = np.asarray(lambdas, dtype=float)
    N = lam.size
    total = lam.sum()
    if abs(total - 1.0) > tol or np.any(lam < -tol):
        raise NotNormalized(f"Schmidt coefficients sum to {total:.12g}")
    if N < 2:
        return 0.0
    cross = total**2 - np.sum(lam**2)
    return float(min(np.sqrt(max(N / (N - 1) * cross, 0.0)), 1.0))


def product_residual(A):
    """Largest modulus over all 2x2 minors of ``A``."""
    return float(np.max(np.abs(minors(A))))


def is_product(psi, tol=CONCURRENCE_TOL):
    return product_residual(_as_state(psi).A) <= tol


def product_factors(A):
    """Rank-one factorization ``A ~ outer(u, v)`` from the dominant singular triplet.

    ``u`` is unit norm with its leading component real positive; ``v`` carries
    the scale.
    """
    A = np.asarray(getattr(A, "A", A), dtype=complex)
    U, s, Vh = np.linalg.svd(A)
    u = U[:, 0]
    u_fixed = fix_phase(u)
    phase = np.vdot(u, u_fixed)
    v = s[0] * Vh[0, :] * np.conj(phase)
    return u_fixed, v


def is_maximally_entangled(psi, tol=CONCURRENCE_TOL):
    return 1.0 - generalized_concurrence(psi) <= tol
