import itertools

import numpy as np
import pytest

from rank2sep.concurrence import (
    apply_local_unitary,
    concurrence_radicands,
    generalized_concurrence,
    invariant,
    is_maximally_entangled,
    is_product,
    product_factors,
    schmidt_concurrence,
)
from rank2sep.errors import AlphaOutOfRange, DimensionMismatch, NotNormalized, NotUnitary
from rank2sep.linalg import schmidt_decompose
from rank2sep.oracles import haar_unitary, random_unit_vector, rng_for
from rank2sep.states import LocalUnitary, PureState, maximally_entangled

S = 1 / np.sqrt(2)


def random_state(rng, N):
    return PureState.from_vector(random_unit_vector(rng, N * N))


def random_product(rng, N):
    return PureState.product(random_unit_vector(rng, N), random_unit_vector(rng, N))


def concurrence_by_loops(A):
    N = A.shape[0]
    total = 0.0
    for i, j, k, m in itertools.product(range(N), repeat=4):
        total += abs(A[i, k] * A[j, m] - A[i, m] * A[j, k]) ** 2
    return np.sqrt(N / (2 * (N - 1)) * total)


def test_golden_values():
    assert generalized_concurrence(np.array([[1, 0], [0, 0]])) == pytest.approx(0, abs=1e-12)
    assert generalized_concurrence(np.eye(2) * S) == pytest.approx(1, abs=1e-12)
    # C_2 = 2 |a11 a22 - a12 a21| = 2 * 0.48
    assert generalized_concurrence(np.diag([0.8, 0.6])) == pytest.approx(0.96, abs=1e-12)


def test_matches_brute_force_minor_sum():
    rng = rng_for(1)
    for N in (2, 3, 4, 5):
        psi = random_state(rng, N)
        assert generalized_concurrence(psi) == pytest.approx(concurrence_by_loops(psi.A), abs=1e-12)


def test_two_closed_forms_agree():
    rng = rng_for(2)
    for t in range(500):
        psi = random_state(rng, 2 + t % 4)
        inv_form, minor_form = concurrence_radicands(psi)
        assert abs(inv_form - minor_form) < 1e-10
        assert 0 <= generalized_concurrence(psi) <= 1


def test_local_unitary_identity():
    rng = rng_for(3)
    psi = random_state(rng, 3)
    out = apply_local_unitary(psi, np.eye(3), np.eye(3))
    np.testing.assert_array_equal(out.A, psi.A)


def test_local_unitary_matches_kron_action():
    rng = rng_for(4)
    psi = random_state(rng, 3)
    U, V = haar_unitary(rng, 3), haar_unitary(rng, 3)
    out = apply_local_unitary(psi, U, V)
    np.testing.assert_allclose(out.vector, np.kron(U, V) @ psi.vector, atol=1e-14)


def test_local_unitary_keeps_products_product():
    rng = rng_for(5)
    psi = PureState(np.diag([1, 0, 0]).astype(complex))
    out = apply_local_unitary(psi, haar_unitary(rng, 3), haar_unitary(rng, 3))
    assert np.linalg.matrix_rank(out.A, tol=1e-12) == 1
    assert is_product(out)


def test_local_unitary_errors():
    with pytest.raises(DimensionMismatch):
        apply_local_unitary(maximally_entangled(2), np.eye(3))
    with pytest.raises(NotUnitary):
        LocalUnitary(np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_invariance_under_local_unitaries(N):
    rng = rng_for(10 + N)
    psi = random_state(rng, N)
    c = generalized_concurrence(psi)
    base = [invariant(psi, a) for a in range(N)]
    for _ in range(50):
        U = haar_unitary(rng, N)
        moved = apply_local_unitary(psi, U)
        assert abs(generalized_concurrence(moved) - c) < 1e-10
        assert max(abs(invariant(moved, a) - b) for a, b in enumerate(base)) < 1e-10
        moved = apply_local_unitary(psi, U, haar_unitary(rng, N))
        assert abs(generalized_concurrence(moved) - c) < 1e-10


def test_bell_concurrence_invariant_under_u_u():
    rng = rng_for(6)
    bell = maximally_entangled(2)
    for _ in range(20):
        assert generalized_concurrence(apply_local_unitary(bell, haar_unitary(rng, 2))) == pytest.approx(1, abs=1e-10)


def test_invariant_examples():
    rng = rng_for(7)
    assert invariant(random_state(rng, 4), 0) == pytest.approx(1, abs=1e-14)
    for N in (2, 3, 4):
        # A A^H = I/N, so Tr (A A^H)^2 = N / N^2
        assert invariant(maximally_entangled(N), 1) == pytest.approx(1 / N, abs=1e-14)
    prod = random_product(rng, 3)
    for a in range(3):
        assert invariant(prod, a) == pytest.approx(1, abs=1e-12)


def test_invariant_alpha_range():
    with pytest.raises(AlphaOutOfRange):
        invariant(maximally_entangled(2), 2)
    with pytest.raises(AlphaOutOfRange):
        invariant(maximally_entangled(2), -1)


def test_schmidt_concurrence_examples():
    assert schmidt_concurrence([1, 0]) == 0
    for N in (2, 3, 5):
        assert schmidt_concurrence(np.full(N, 1 / N)) == pytest.approx(1, abs=1e-12)
    # sqrt(2 * 2 * 0.64 * 0.36)
    assert schmidt_concurrence([0.64, 0.36]) == pytest.approx(0.96, abs=1e-12)
    assert schmidt_concurrence([0.64, 0.36]) == pytest.approx(generalized_concurrence(np.diag([0.8, 0.6])), abs=1e-12)
    with pytest.raises(NotNormalized):
        schmidt_concurrence([0.5, 0.4])


def test_schmidt_concurrence_matches_generalized():
    rng = rng_for(8)
    for t in range(200):
        psi = random_state(rng, 2 + t % 4)
        lam = schmidt_decompose(psi).coefficients
        assert abs(schmidt_concurrence(lam) - generalized_concurrence(psi)) < 1e-9


def test_is_product_examples():
    rng = rng_for(9)
    assert is_product(random_product(rng, 3))
    assert not is_product(maximally_entangled(2))
    A = np.array([[np.sqrt(0.5), np.sqrt(0.25)], [np.sqrt(0.125), np.sqrt(0.125)]])
    # a11 a22 - a12 a21 = 0.25 - 0.1767... != 0
    assert abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) > 0.07
    assert not is_product(A)


def test_product_factors_recover_state():
    rng = rng_for(12)
    for N in (2, 3, 4):
        psi = random_product(rng, N)
        u, v = product_factors(psi.A)
        np.testing.assert_allclose(np.outer(u, v), psi.A, atol=1e-12)
        assert u[np.argmax(np.abs(u) > 1e-6)].imag == 0


def test_three_way_product_agreement():
    rng = rng_for(13)
    for t in range(300):
        N = 2 + t % 4
        psi = random_product(rng, N) if t % 2 else random_state(rng, N)
        tol = 1e-9
        flags = (
            is_product(psi, tol),
            generalized_concurrence(psi) < tol,
            abs(schmidt_decompose(psi).coefficients[0] - 1) < tol,
        )
        assert len(set(flags)) == 1
        assert flags[0] == bool(t % 2)


def test_is_maximally_entangled():
    rng = rng_for(14)
    for N in (2, 3, 4):
        assert is_maximally_entangled(maximally_entangled(N))
        moved = apply_local_unitary(maximally_entangled(N), haar_unitary(rng, N), haar_unitary(rng, N))
        assert is_maximally_entangled(moved)
        assert not is_maximally_entangled(random_product(rng, N))


def test_pure_state_requires_normalization():
    with pytest.raises(NotNormalized):
        PureState(np.eye(2))
