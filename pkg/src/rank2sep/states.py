"""Value types for bipartite pure states and rank-two mixtures on ``C^N x C^N``."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotNormalized, NotOrthogonal, NotUnitary, RankDegenerate
from .linalg import as_matrix, projector

NORM_TOL = 1e-10


@dataclass(frozen=True)
class PureState:
    """Pure state ``sum_ij A[i, j] e_i (x) e_j`` stored as its coefficient matrix."""

    A: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        A = as_matrix(self.A)
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"coefficient matrix must be square, got {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        if self.check:
            norm = np.linalg.norm(A)
            if abs(norm - 1.0) > NORM_TOL:
                raise NotNormalized(f"Frobenius norm {norm:.12g} differs from 1 by {abs(norm - 1):.3e}")

    @property
    def N(self):
        return self.A.shape[0]

    @classmethod
    def from_vector(cls, psi, N=None, normalize=False):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        if N is None:
            N = int(round(np.sqrt(psi.size)))
        if N * N != psi.size:
            raise DimensionMismatch(f"vector of length {psi.size} is not N^2 for N={N}")
        if normalize:
            psi = psi / np.linalg.norm(psi)
        return cls(psi.reshape(N, N))

    @classmethod
    def product(cls, u, v):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        return cls(np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v)))

    @property
    def vector(self):
        return self.A.reshape(-1)

    def density(self):
        return projector(self.vector)

    def overlap(self, other):
        """Inner product ``<self|other>``."""
        return complex(np.vdot(self.vector, other.vector))

    def with_phase(self, phi):
        return PureState(self.A * np.exp(1j * phi))


def maximally_entangled(N):
    return PureState(np.eye(N, dtype=complex) / np.sqrt(N))


@dataclass(frozen=True)
class LocalUnitary:
    U: np.ndarray

    def __post_init__(self):
        U = as_matrix(self.U)
        n = U.shape[0]
        if U.shape != (n, n):
            raise DimensionMismatch(f"unitary must be square, got {U.shape}")
        defect = np.linalg.norm(U.conj().T @ U - np.eye(n))
        if defect > NORM_TOL:
            raise NotUnitary(f"U^H U deviates from identity by {defect:.3e}")
        object.__setattr__(self, "U", U)

    @property
    def N(self):
        return self.U.shape[0]


@dataclass(frozen=True)
class Rank2State:
    """``rho = p |E1><E1| + (1 - p) |E2><E2|`` with orthonormal ``E1``, ``E2``."""

    p: float
    E1: PureState
    E2: PureState

    def __post_init__(self):
        p = float(self.p)
        object.__setattr__(self, "p", p)
        if not 0.0 < p < 1.0:
            raise RankDegenerate(f"eigenvalue weight p={p!r} must lie in the open interval (0, 1)")
        if self.E1.N != self.E2.N:
            raise DimensionMismatch(f"eigenvectors live in different spaces: N={self.E1.N} vs N={self.E2.N}")
        overlap = abs(self.E1.overlap(self.E2))
        if overlap > NORM_TOL:
            raise NotOrthogonal(f"|<E1|E2>| = {overlap:.3e} exceeds {NORM_TOL:.0e}")

    @property
    def N(self):
        return self.E1.N

    @property
    def q(self):
        return 1.0 - self.p

    def density(self):
        return self.p * self.E1.density() + self.q * self.E2.density()

    def swapped(self):
        return Rank2State(1.0 - self.p, self.E2, self.E1)

    @property
    def is_real(self):
        return not (np.any(self.E1.A.imag) or np.any(self.E2.A.imag))
