"""Separability of rank-two bipartite density matrices.

A vector ``E1 + lam * E2`` in the range of ``rho`` is a product vector exactly
when every 2x2 minor of ``A1 + lam * A2`` vanishes, i.e. when ``lam`` solves

    alpha[i,j,k,l] * lam**2 + beta[i,j,k,l] * lam + gamma[i,j,k,l] = 0

for every index quadruple. ``rho`` is separable iff it is a convex mixture of
the (at most two) product vectors so obtained, with weights fixed in closed form
by the two common roots. :func:`check_complex` runs that decision for arbitrary
complex eigenvectors; :func:`check_real` is the separate real-coefficient
route based on the two aggregate residuals ``delta1``/``delta2``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .concurrence import (
    CONCURRENCE_TOL,
    generalized_concurrence,
    is_maximally_entangled,
    minors,
    product_factors,
    product_residual,
)
from .errors import (
    CommonRootViolation,
    DimensionMismatch,
    E2Product,
    NotDensityMatrix,
    NotProduct,
    NotRealInput,
    UnsupportedRank,
    WeightOutOfRange,
)
from .linalg import RANK_TOL, as_matrix, effective_rank, herm_eig, projector
from .states import PureState, Rank2State

DEFAULT_TOL = 1e-9
WEIGHT_MARGIN = 1e-9
WEIGHT_EQ_TOL = 1e-10


class Branch(str, Enum):
    BOTH_PRODUCT = "BothEigenvectorsProduct"
    THEOREM1_EQ6 = "Theorem1_Eq6"
    THEOREM1_EQ7 = "Theorem1_Eq7"
    THEOREM2 = "Theorem2"
    PURE_PRODUCT = "PureProduct"
    PURE_ENTANGLED = "PureEntangled"
    ENTANGLED_COROLLARY = "EntangledCorollary"
    ENTANGLED_CONDITION_FAIL = "EntangledConditionFail"
    ENTANGLED_WEIGHT_OUT_OF_RANGE = "EntangledWeightOutOfRange"
    ENTANGLED_EQUAL_ROOTS = "EntangledEqualRoots"
    ENTANGLED_E2_PRODUCT_E1_NOT = "EntangledE2ProductE1Not"

    @property
    def separable(self):
        return self in _SEPARABLE_BRANCHES


_SEPARABLE_BRANCHES = {
    Branch.BOTH_PRODUCT,
    Branch.THEOREM1_EQ6,
    Branch.THEOREM1_EQ7,
    Branch.THEOREM2,
    Branch.PURE_PRODUCT,
}


@dataclass(frozen=True)
class QuadSystem:
    """Coefficient tensors of the quadratic system, each indexed ``[i, j, k, l]``."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @property
    def N(self):
        return self.alpha.shape[0]

    @property
    def scale(self):
        """``sqrt(|alpha|^2 + |beta|^2 + |gamma|^2)``; normalizes residuals."""
        return float(np.sqrt(sum(np.linalg.norm(t) ** 2 for t in (self.alpha, self.beta, self.gamma))))

    def pivot(self):
        """Index quadruple of the largest ``|alpha|``."""
        return tuple(int(x) for x in np.unravel_index(np.argmax(np.abs(self.alpha)), self.alpha.shape))

    def evaluate(self, lam):
        return self.alpha * lam**2 + self.beta * lam + self.gamma


@dataclass(frozen=True)
class Term:
    weight: float
    state: PureState
    factors: tuple

    @property
    def vector(self):
        return self.state.vector


@dataclass(frozen=True)
class Decomposition:
    """Convex mixture of product pure states."""

    terms: tuple

    @property
    def weights(self):
        return np.array([t.weight for t in self.terms])

    def density(self):
        return sum(t.weight * projector(t.vector) for t in self.terms)

    def max_product_residual(self):
        return max(product_residual(t.state.A) for t in self.terms)


@dataclass(frozen=True)
class Verdict:
    separable: bool
    branch: Branch
    theta: Optional[float] = None
    roots: Optional[tuple] = None
    p_prime: Optional[float] = None
    residuals: dict = field(default_factory=dict)
    decomposition: Optional[Decomposition] = None
    tol: float = DEFAULT_TOL
    note: str = ""

    def __post_init__(self):
        if self.separable and (self.decomposition is None or not self.branch.separable):
            raise ValueError("a separable verdict needs a decomposition and a separable branch")


def _term(weight, A):
    u, v = product_factors(A)
    return Term(float(weight), PureState(A, check=False), (u, v))


def build_quad_system(state):
    A1 = state.E1.A
    A2 = state.E2.A
    alpha = minors(A2)
    gamma = minors(A1)
    beta = (
        np.einsum("ij,kl->ijkl", A1, A2)
        + np.einsum("ij,kl->ijkl", A2, A1)
        - np.einsum("il,kj->ijkl", A2, A1)
        - np.einsum("il,kj->ijkl", A1, A2)
    )
    return QuadSystem(alpha, beta, gamma)


def _require_real(sys, tol):
    worst = max(float(np.max(np.abs(t.imag))) for t in (sys.alpha, sys.beta, sys.gamma))
    if worst > tol:
        raise NotRealInput(f"tensor entries have imaginary parts up to {worst:.3e}")


def _shared_kl_proportionality(alpha, beta):
    # sum over (k,l) and all (i,j),(m,n) of |b_ij a_mn - a_ij b_mn|^2. Per (k,l)
    # slice this equals 2 |a|^2 |b_perp|^2 with b_perp the part of b orthogonal
    # to a; the |a|^2|b|^2 - |<a,b>|^2 form cancels catastrophically.
    N = alpha.shape[0]
    a = alpha.transpose(2, 3, 0, 1).reshape(N * N, N * N)
    b = beta.transpose(2, 3, 0, 1).reshape(N * N, N * N)
    na = np.sum(np.abs(a) ** 2, axis=1)
    safe = np.where(na > 0, na, 1.0)
    coef = np.sum(np.conj(a) * b, axis=1) / safe
    b_perp = b - coef[:, None] * a
    return float(np.sum(2.0 * na * np.sum(np.abs(b_perp) ** 2, axis=1)))


def delta1(sys, p, tol=DEFAULT_TOL):
    """First aggregate residual for real coefficients (zero iff the real-root family holds)."""
    _require_real(sys, tol)
    c = 1.0 - 1.0 / p
    first = float(np.sum(np.abs(sys.gamma - c * sys.alpha) ** 2))
    return first + _shared_kl_proportionality(sys.alpha, sys.beta)


def delta2(sys, p, tol=DEFAULT_TOL):
    """Second aggregate residual for real coefficients (zero iff the imaginary-root family holds)."""
    _require_real(sys, tol)
    c = 1.0 - 1.0 / p
    first = float(np.sum(np.abs(sys.gamma + c * sys.alpha) ** 2))
    return first + float(np.sum(np.abs(sys.beta) ** 2))


def _delta_parts(sys, p):
    c = 1.0 - 1.0 / p
    return (
        float(np.sum(np.abs(sys.gamma - c * sys.alpha) ** 2)),
        _shared_kl_proportionality(sys.alpha, sys.beta),
        float(np.sum(np.abs(sys.gamma + c * sys.alpha) ** 2)),
        float(np.sum(np.abs(sys.beta) ** 2)),
    )


def solve_quadratic(a, b, c):
    """Both roots of ``a x^2 + b x + c`` without cancellation; ``a`` must be nonzero."""
    a, b, c = complex(a), complex(b), complex(c)
    sq = np.sqrt(b * b - 4.0 * a * c + 0j)
    if (np.conj(b) * sq).real < 0:
        sq = -sq
    q = -0.5 * (b + sq)
    if q == 0:
        return 0j, 0j
    return q / a, c / q


def _order_roots(r1, r2):
    # ascending by real part then imaginary part: real roots end with mu2 the larger
    key = lambda z: (round(z.real, 12), z.imag)
    return tuple(sorted((complex(r1), complex(r2)), key=key))


def root_residual(sys, mu):
    """Scale-free residual of ``mu`` against every equation of the system."""
    denom = (
        np.linalg.norm(sys.alpha) * abs(mu) ** 2
        + np.linalg.norm(sys.beta) * abs(mu)
        + np.linalg.norm(sys.gamma)
    )
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(sys.evaluate(mu)) / denom)


def roots(sys, tol=DEFAULT_TOL):
    """Common roots ``(mu1, mu2, pivot)`` of the quadratic system.

    The pivot is the quadruple with the largest ``|alpha|``. Both roots are then
    checked against every equation; a failure raises
    :class:`CommonRootViolation`.
    """
    pivot = sys.pivot()
    a = sys.alpha[pivot]
    alpha_norm = np.linalg.norm(sys.alpha)
    if alpha_norm == 0.0 or alpha_norm <= tol * max(sys.scale, 1.0):
        raise E2Product("all alpha entries vanish; the system has no quadratic equation")
    mu1, mu2 = _order_roots(*solve_quadratic(a, sys.beta[pivot], sys.gamma[pivot]))
    for mu in (mu1, mu2):
        res = root_residual(sys, mu)
        if res > tol:
            raise CommonRootViolation(f"root {mu:.6g} leaves residual {res:.3e} > {tol:.1e}", residual=res)
    return mu1, mu2, pivot


def weight_equation_residuals(p, mu1, mu2, p_prime):
    n1 = 1.0 + abs(mu1) ** 2
    n2 = 1.0 + abs(mu2) ** 2
    diagonal = p_prime / n1 + (1.0 - p_prime) / n2 - p
    off_diagonal = mu1 * p_prime / n1 + mu2 * (1.0 - p_prime) / n2
    return float(abs(diagonal)), float(abs(off_diagonal))


def closed_form_weight(mu1, mu2):
    z = mu2 - mu1
    return complex(mu2 * (1.0 + abs(mu1) ** 2) / (z - mu1 * mu2 * np.conj(z)))


def decompose(state, mu1, mu2, tol=WEIGHT_EQ_TOL, margin=WEIGHT_MARGIN):
    """Two-term product decomposition built from the common roots.

    Returns the terms ``(p', (E1 + mu1 E2)/|.|)`` and ``(1 - p', (E1 + mu2 E2)/|.|)``.
    """
    mu1, mu2 = complex(mu1), complex(mu2)
    z = mu2 - mu1
    if abs(z) <= margin * (1.0 + abs(mu1) + abs(mu2)):
        raise ValueError("decomposition needs two distinct roots")
    w = closed_form_weight(mu1, mu2)
    if abs(w.imag) > tol * (1.0 + abs(w)) or not margin < w.real < 1.0 - margin:
        raise WeightOutOfRange(f"weight p'={w:.6g} is not a real number in (0, 1)", p_prime=w)
    p_prime = w.real
    res_diag, res_off = weight_equation_residuals(state.p, mu1, mu2, p_prime)
    if max(res_diag, res_off) > tol:
        raise WeightOutOfRange(
            f"weight equations violated (residuals {res_diag:.3e}, {res_off:.3e})", p_prime=w
        )
    A1, A2 = state.E1.A, state.E2.A
    tilde = [(A1 + mu * A2) / np.sqrt(1.0 + abs(mu) ** 2) for mu in (mu1, mu2)]
    worst = max(product_residual(T) for T in tilde)
    if worst > max(tol, CONCURRENCE_TOL):
        raise NotProduct(f"constructed term has product residual {worst:.3e}")
    return Decomposition((_term(p_prime, tilde[0]), _term(1.0 - p_prime, tilde[1])))


def _both_product(state, tol, residuals):
    terms = (_term(state.p, state.E1.A), _term(state.q, state.E2.A))
    return Verdict(True, Branch.BOTH_PRODUCT, residuals=residuals, decomposition=Decomposition(terms), tol=tol)


def _product_flags(state, tol):
    c1 = generalized_concurrence(state.E1)
    c2 = generalized_concurrence(state.E2)
    return c1, c2, c1 <= tol, c2 <= tol


def check_real(state, tol=DEFAULT_TOL):
    """Decide separability of a real-coefficient rank-two state from the two aggregate residuals."""
    if not np.all(np.abs(state.E1.A.imag) <= tol) or not np.all(np.abs(state.E2.A.imag) <= tol):
        raise NotRealInput("eigenvector coefficients are not real within tolerance")
    real_state = Rank2State(
        state.p, PureState(state.E1.A.real, check=False), PureState(state.E2.A.real, check=False)
    )
    return _check_real(real_state, tol, allow_swap=True)


def _check_real(state, tol, allow_swap):
    c1, c2, e1_prod, e2_prod = _product_flags(state, tol)
    residuals = {"C(E1)": c1, "C(E2)": c2}
    if e1_prod and e2_prod:
        return _both_product(state, tol, residuals)
    if e2_prod:
        if allow_swap:
            swapped = _check_real(state.swapped(), tol, allow_swap=False)
            if swapped.separable:
                return swapped
        return Verdict(False, Branch.ENTANGLED_E2_PRODUCT_E1_NOT, residuals=residuals, tol=tol)

    sys = build_quad_system(state)
    s2 = sys.scale**2
    g_minus, prop, g_plus, b_sq = _delta_parts(sys, state.p)
    d1 = float(np.sqrt(g_minus / s2 + prop / s2**2))
    d2 = float(np.sqrt(g_plus / s2 + b_sq / s2))
    residuals.update({"delta1": d1, "delta2": d2})
    if d1 <= tol:
        branch = Branch.THEOREM1_EQ6
    elif d2 <= tol:
        branch = Branch.THEOREM1_EQ7
    else:
        return Verdict(False, Branch.ENTANGLED_CONDITION_FAIL, residuals=residuals, tol=tol)
    try:
        mu1, mu2, _ = roots(sys, tol)
    except CommonRootViolation as exc:
        residuals["common_root"] = exc.residual
        return Verdict(False, Branch.ENTANGLED_CONDITION_FAIL, residuals=residuals, tol=tol)
    residuals["common_root"] = max(root_residual(sys, mu1), root_residual(sys, mu2))
    return _finish(state, sys, branch, mu1, mu2, residuals, tol, theta=None)


def _finish(state, sys, branch, mu1, mu2, residuals, tol, theta):
    z = mu2 - mu1
    if abs(z) <= tol * (1.0 + abs(mu1) + abs(mu2)):
        return Verdict(False, Branch.ENTANGLED_EQUAL_ROOTS, theta=theta, roots=(mu1, mu2), residuals=residuals, tol=tol)
    w = closed_form_weight(mu1, mu2)
    residuals["p_prime_imag"] = abs(w.imag)
    try:
        dec = decompose(state, mu1, mu2, tol=max(tol, WEIGHT_EQ_TOL))
    except WeightOutOfRange:
        return Verdict(
            False,
            Branch.ENTANGLED_WEIGHT_OUT_OF_RANGE,
            theta=theta,
            roots=(mu1, mu2),
            p_prime=w.real,
            residuals=residuals,
            tol=tol,
        )
    res_diag, res_off = weight_equation_residuals(state.p, mu1, mu2, dec.terms[0].weight)
    residuals.update(
        {
            "weight_eq_diagonal": res_diag,
            "weight_eq_offdiagonal": res_off,
            "term_product": dec.max_product_residual(),
        }
    )
    return Verdict(
        True,
        branch,
        theta=theta,
        roots=(mu1, mu2),
        p_prime=dec.terms[0].weight,
        residuals=residuals,
        decomposition=dec,
        tol=tol,
    )


def check_complex(state, tol=DEFAULT_TOL):
    """Decide separability of an arbitrary rank-two state.

    The returned :class:`Verdict` carries the branch that fired, the residual of
    every condition tested, the phase ``theta``, the two roots, the weight
    ``p'`` and, when separable, the explicit decomposition.
    """
    return _check_complex(state, tol, allow_swap=True)


def _check_complex(state, tol, allow_swap):
    c1, c2, e1_prod, e2_prod = _product_flags(state, tol)
    residuals = {"C(E1)": c1, "C(E2)": c2}
    if e1_prod and e2_prod:
        return _both_product(state, tol, residuals)
    if e2_prod:
        if allow_swap:
            swapped = _check_complex(state.swapped(), tol, allow_swap=False)
            if swapped.separable:
                return swapped
        return Verdict(False, Branch.ENTANGLED_E2_PRODUCT_E1_NOT, residuals=residuals, tol=tol)

    sys = build_quad_system(state)
    fail = lambda **kw: Verdict(False, Branch.ENTANGLED_CONDITION_FAIL, residuals=residuals, tol=tol, **kw)
    c = 1.0 - 1.0 / state.p
    pivot = sys.pivot()
    phase = sys.gamma[pivot] / (c * sys.alpha[pivot])
    residuals["phase_modulus"] = abs(abs(phase) - 1.0)
    if residuals["phase_modulus"] > tol:
        return fail()
    phase = phase / abs(phase)
    theta = float(np.angle(phase))

    a_norm = np.linalg.norm(sys.alpha)
    residuals["gamma_alpha"] = float(
        np.linalg.norm(sys.gamma - phase * c * sys.alpha) / (np.linalg.norm(sys.gamma) + abs(c) * a_norm)
    )
    # component of beta orthogonal to alpha, relative to the overall tensor scale
    beta_par = np.vdot(sys.alpha, sys.beta) / a_norm**2 * sys.alpha
    residuals["beta_alpha"] = float(np.linalg.norm(sys.beta - beta_par) / sys.scale)
    if residuals["gamma_alpha"] > tol or residuals["beta_alpha"] > tol:
        return fail(theta=theta)

    try:
        mu1, mu2, _ = roots(sys, tol)
    except CommonRootViolation as exc:
        residuals["common_root"] = exc.residual
        return fail(theta=theta)
    residuals["common_root"] = max(root_residual(sys, mu1), root_residual(sys, mu2))

    z = mu2 - mu1
    if abs(z) <= tol * (1.0 + abs(mu1) + abs(mu2)):
        return Verdict(False, Branch.ENTANGLED_EQUAL_ROOTS, theta=theta, roots=(mu1, mu2), residuals=residuals, tol=tol)
    residuals["z_phase"] = float(abs(z - phase * np.conj(z)) / abs(z))
    recovered_p = 1.0 / (1.0 - mu1 * mu2 * np.conj(z) / z)
    residuals["p_recovered"] = float(abs(recovered_p - state.p))
    if residuals["z_phase"] > tol or residuals["p_recovered"] > tol:
        return fail(theta=theta, roots=(mu1, mu2))
    return _finish(state, sys, Branch.THEOREM2, mu1, mu2, residuals, tol, theta=theta)


@dataclass(frozen=True)
class CorollaryBound:
    """Concurrence-ratio diagnostic and, when it applies, the fast entangled verdict."""

    verdict: Optional[Verdict]
    ratio: float
    expected_ratio: float
    residual: float


def concurrence_ratio_residual(state):
    """``|C(E1) - ((1-p)/p) C(E2)|`` together with the observed ratio ``C(E1)/C(E2)``."""
    c1 = generalized_concurrence(state.E1)
    c2 = generalized_concurrence(state.E2)
    expected = state.q / state.p
    ratio = c1 / c2 if c2 > 0 else float("inf")
    return abs(c1 - expected * c2), ratio, expected


def corollary_bound(state, tol=DEFAULT_TOL):
    """Fast entangled verdict when ``E2`` is maximally entangled and carries weight above 1/2.

    Always returns a :class:`CorollaryBound`; its ``verdict`` is ``None`` when the
    shortcut does not apply.
    """
    residual, ratio, expected = concurrence_ratio_residual(state)
    verdict = None
    orthogonal = abs(state.E1.overlap(state.E2)) <= max(tol, 1e-10)
    if orthogonal and state.p < 0.5 - tol and is_maximally_entangled(state.E2, tol):
        verdict = Verdict(
            False,
            Branch.ENTANGLED_COROLLARY,
            residuals={"concurrence_ratio": residual},
            tol=tol,
            note=f"corollary fast path: p={state.p:.6g} < 1/2",
        )
    return CorollaryBound(verdict, ratio, expected, residual)


def _corollary_either_way(state, tol):
    hit = corollary_bound(state, tol).verdict
    if hit is None:
        hit = corollary_bound(state.swapped(), tol).verdict
    return hit


def check_rank2(state, tol=DEFAULT_TOL):
    """Corollary fast path in either eigenvector labelling, then the full decision."""
    return _corollary_either_way(state, tol) or check_complex(state, tol)


def extract_rank2(rho, N, tol=DEFAULT_TOL, rank_tol=RANK_TOL):
    """Validate ``rho`` and return ``(rank, eigen_system)``."""
    rho = as_matrix(rho)
    if rho.shape != (N * N, N * N):
        raise DimensionMismatch(f"expected a {N * N}x{N * N} density matrix for N={N}, got {rho.shape}")
    eig = herm_eig(rho, tol=max(tol, 1e-12))
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > max(tol, 1e-9):
        raise NotDensityMatrix(f"trace {trace:.12g} differs from 1 by {abs(trace - 1):.3e}")
    if eig.eigenvalues[-1] < -max(tol, 1e-9):
        raise NotDensityMatrix(f"negative eigenvalue {eig.eigenvalues[-1]:.3e}")
    return effective_rank(np.clip(eig.eigenvalues, 0.0, None), rank_tol), eig


def check(rho, N, tol=DEFAULT_TOL, rank_tol=RANK_TOL):
    """End-to-end verdict for a density matrix of rank one or two."""
    rank, (w, V) = extract_rank2(rho, N, tol, rank_tol)
    if rank == 1:
        psi = PureState.from_vector(V[:, 0], N, normalize=True)
        res = product_residual(psi.A)
        residuals = {"product": res, "C": generalized_concurrence(psi)}
        if res <= tol:
            dec = Decomposition((_term(1.0, psi.A),))
            return Verdict(True, Branch.PURE_PRODUCT, residuals=residuals, decomposition=dec, tol=tol)
        return Verdict(False, Branch.PURE_ENTANGLED, residuals=residuals, tol=tol)
    if rank != 2:
        raise UnsupportedRank(f"density matrix has rank {rank}; only ranks 1 and 2 are supported", rank=rank)
    lam = w[:2]
    p = float(lam[0] / lam.sum())
    E1 = PureState.from_vector(V[:, 0], N, normalize=True)
    E2 = PureState.from_vector(V[:, 1], N, normalize=True)
    return check_rank2(Rank2State(p, E1, E2), tol)


