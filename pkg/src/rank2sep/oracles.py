"""Independent cross-checks and seeded instance generators.

Randomness comes from numpy's Philox4x64 counter-based bit generator, seeded
with the integer seed handed to each generator, so every instance replays
bit-for-bit from ``(parameters, seed)``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .concurrence import product_residual
from .errors import DimensionMismatch
from .linalg import as_matrix, partial_transpose, projector
from .separability import Decomposition, Term, check_complex, DEFAULT_TOL
from .states import PureState, Rank2State

PRNG_ALGORITHM = "numpy.random.Philox (Philox4x64-10)"
PPT_TOL = 1e-10
_MAX_RESAMPLES = 100
_COLLINEAR = 1.0 - 1e-6


class Agreement(str, Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    ONE_SIDED_ONLY = "OneSidedOnly"


class Ensemble(str, Enum):
    GENERIC = "Generic"
    MAXIMALLY_ENTANGLED_E2 = "MaximallyEntangledE2"
    REAL_COEFFICIENTS = "RealCoefficients"


@dataclass(frozen=True)
class OracleReport:
    ppt_holds: bool
    min_pt_eigenvalue: float
    reconstruction_error: float
    agreement: Agreement
    separable: bool = None
    N: int = None


def rng_for(seed):
    return np.random.Generator(np.random.Philox(seed))


def ppt_test(rho, N, tol=PPT_TOL, sys=1):
    """Peres-Horodecki test: ``(holds, min eigenvalue of the partial transpose)``."""
    rho = as_matrix(rho)
    if rho.shape != (N * N, N * N):
        raise DimensionMismatch(f"expected a {N * N}x{N * N} matrix for N={N}, got {rho.shape}")
    pt = partial_transpose(rho, N, sys=sys)
    lam_min = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return lam_min >= -tol, lam_min


def verify_decomposition(rho, decomposition, tol=1e-8, product_tol=1e-9):
    """Check a claimed product decomposition of ``rho`` against the matrix itself."""
    rho = as_matrix(rho)
    N = int(round(np.sqrt(rho.shape[0])))
    error = float(np.linalg.norm(rho - decomposition.density()))
    weights = decomposition.weights
    ok = (
        error <= tol
        and abs(weights.sum() - 1.0) <= 1e-12
        and np.all(weights > 0)
        and np.all(weights <= 1)
        and decomposition.max_product_residual() <= product_tol
    )
    holds, lam_min = ppt_test(rho, N)
    return OracleReport(
        ppt_holds=holds,
        min_pt_eigenvalue=lam_min,
        reconstruction_error=error,
        agreement=Agreement.CONSISTENT if ok else Agreement.INCONSISTENT,
        separable=True,
        N=N,
    )


def random_unit_vector(rng, n, real=False):
    v = rng.standard_normal(n)
    if not real:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def haar_unitary(rng, n):
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_product_mixture(N, p_prime, seed):
    """``p' |u v><u v| + (1 - p') |x y><x y|`` for random unit vectors.

    Returns ``(rho, planted)`` where ``planted`` is the generating decomposition.
    """
    if not 0.0 < p_prime < 1.0:
        raise ValueError(f"p_prime={p_prime} must lie in (0, 1)")
    rng = rng_for(seed)
    for _ in range(_MAX_RESAMPLES):
        u, v, x, y = (random_unit_vector(rng, N) for _ in range(4))
        first = np.kron(u, v)
        second = np.kron(x, y)
        if abs(np.vdot(first, second)) < _COLLINEAR:
            break
    else:  # pragma: no cover - needs 100 consecutive near-collinear draws
        raise RuntimeError("could not draw non-collinear product vectors")
    rho = p_prime * projector(first) + (1.0 - p_prime) * projector(second)
    planted = Decomposition(
        (
            Term(float(p_prime), PureState(np.outer(u, v)), (u, v)),
            Term(float(1.0 - p_prime), PureState(np.outer(x, y)), (x, y)),
        )
    )
    return rho, planted


def _orthogonal_to(rng, E2, real):
    n = E2.size
    for _ in range(_MAX_RESAMPLES):
        v = random_unit_vector(rng, n, real=real)
        if abs(np.vdot(E2, v)) > _COLLINEAR:
            continue
        v = v - np.vdot(E2, v) * E2
        v = v - np.vdot(E2, v) * E2
        return v / np.linalg.norm(v)
    raise RuntimeError("could not draw a vector orthogonal to E2")  # pragma: no cover


def random_rank2(N, p, seed, ensemble=Ensemble.GENERIC):
    """Random rank-two state with eigenvalue weight ``p`` on ``E1``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p={p} must lie in (0, 1)")
    ensemble = Ensemble(ensemble)
    rng = rng_for(seed)
    real = ensemble is Ensemble.REAL_COEFFICIENTS
    if ensemble is Ensemble.MAXIMALLY_ENTANGLED_E2:
        U, V = haar_unitary(rng, N), haar_unitary(rng, N)
        E2 = (U @ V.T / np.sqrt(N)).reshape(-1)
    else:
        E2 = random_unit_vector(rng, N * N, real=real)
    E1 = _orthogonal_to(rng, E2, real)
    if real:
        E1, E2 = E1.real, E2.real
    return Rank2State(p, PureState(E1.reshape(N, N)), PureState(E2.reshape(N, N)))


def cross_validate(state, tol=DEFAULT_TOL, ppt_tol=PPT_TOL):
    """Run the rank-two decision next to the PPT test and grade the agreement.

    At ``N = 2`` the two must agree exactly; at larger ``N`` only
    "separable implies PPT" is required.
    """
    rho = state.density()
    verdict = check_complex(state, tol)
    holds, lam_min = ppt_test(rho, state.N, ppt_tol)
    error = float("nan")
    if verdict.separable:
        error = float(np.linalg.norm(rho - verdict.decomposition.density()))
    agreement = grade_agreement(verdict.separable, holds, state.N)
    return OracleReport(holds, lam_min, error, agreement, separable=verdict.separable, N=state.N)


def grade_agreement(separable, ppt_holds, N):
    """PPT is necessary everywhere and sufficient at ``N = 2``."""
    if separable and not ppt_holds:
        return Agreement.INCONSISTENT
    if N == 2:
        return Agreement.CONSISTENT if separable == ppt_holds else Agreement.INCONSISTENT
    if not separable and ppt_holds:
        return Agreement.ONE_SIDED_ONLY
    return Agreement.CONSISTENT


def conjugate_pair_mixture(N, seed, real_basis=True):
    """Separable real state ``(|w><w| + |w*><w*|)/2`` for a random complex product vector ``w``.

    Its eigenvectors are real and the product vectors in its range come as a
    complex-conjugate pair, so the common roots are purely imaginary.
    """
    rng = rng_for(seed)
    w = np.kron(random_unit_vector(rng, N), random_unit_vector(rng, N))
    rho = 0.5 * (projector(w) + projector(w.conj()))
    return rho.real.astype(complex) if real_basis else rho


def product_residual_of(vector, N):
    return product_residual(np.asarray(vector).reshape(N, N))
