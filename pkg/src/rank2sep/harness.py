"""Seeded property harness behind ``rank2sep selftest``.

Each property runs ``trials`` seeded instances and counts passes and failures.
Seeds for trial ``t`` of a property are ``base_seed + t`` so single failures can
be replayed with the generators in :mod:`rank2sep.oracles`.
"""

import os
from dataclasses import dataclass

import numpy as np

from .concurrence import (
    apply_local_unitary,
    concurrence_radicands,
    generalized_concurrence,
    invariant,
    schmidt_concurrence,
)
from .linalg import herm_eig, schmidt_decompose
from .oracles import (
    Ensemble,
    conjugate_pair_mixture,
    cross_validate,
    haar_unitary,
    ppt_test,
    random_product_mixture,
    random_rank2,
    random_unit_vector,
    rng_for,
)
from .separability import DEFAULT_TOL, check, check_complex, check_rank2, check_real
from .states import PureState, Rank2State

DEFAULT_SEED = 20240101
SEED_ENV = "RANK2SEP_SEED"


@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    failed: int = 0
    first_failure: str = ""

    def record(self, ok, detail=""):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if not self.first_failure:
                self.first_failure = detail

    @property
    def ok(self):
        return self.failed == 0


def default_seed():
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def _concurrence_invariance(trials, seed, tol):
    res = PropertyResult("concurrence bounds, form agreement and U(x)U invariance")
    for t in range(trials):
        rng = rng_for(seed + t)
        N = 2 + t % 4
        psi = PureState.from_vector(random_unit_vector(rng, N * N))
        U = haar_unitary(rng, N)
        moved = apply_local_unitary(psi, U)
        c = generalized_concurrence(psi)
        inv, minor = concurrence_radicands(psi)
        lam = schmidt_decompose(psi).coefficients
        ok = (
            0.0 <= c <= 1.0
            and abs(inv - minor) < 1e-10
            and abs(c - generalized_concurrence(moved)) < 1e-10
            and all(abs(invariant(psi, a) - invariant(moved, a)) < 1e-10 for a in range(N))
            and abs(schmidt_concurrence(lam) - c) < 1e-9
        )
        res.record(ok, f"seed {seed + t}, N={N}")
    return res


def _ppt_equivalence_n2(trials, seed, tol):
    res = PropertyResult("N=2 verdict agrees with PPT")
    for t in range(trials):
        s = seed + t
        rng = rng_for(s)
        kind = t % 3
        if kind == 0:
            rho, _ = random_product_mixture(2, rng.uniform(0.05, 0.95), s)
            holds, _ = ppt_test(rho, 2, tol=1e-8)
            ok = check(rho, 2, tol).separable == holds
        else:
            ens = Ensemble.GENERIC if kind == 1 else Ensemble.MAXIMALLY_ENTANGLED_E2
            state = random_rank2(2, rng.uniform(0.05, 0.95), s, ens)
            ok = cross_validate(state, tol, ppt_tol=1e-8).agreement == "Consistent"
        res.record(ok, f"seed {s}")
    return res


def _one_sided(trials, seed, tol):
    res = PropertyResult("N=3,4 separable implies PPT")
    for t in range(trials):
        s = seed + t
        rng = rng_for(s)
        N = 3 + t % 2
        if t % 2:
            rho, _ = random_product_mixture(N, rng.uniform(0.05, 0.95), s)
        else:
            rho = random_rank2(N, rng.uniform(0.05, 0.95), s).density()
        verdict = check(rho, N, tol)
        res.record(not verdict.separable or ppt_test(rho, N)[0], f"seed {s}, N={N}")
    return res


def _planted(trials, seed, tol):
    res = PropertyResult("planted product mixtures are separable and reconstruct")
    for t in range(trials):
        s = seed + t
        N = 2 + t % 3
        p_prime = rng_for(s).uniform(0.05, 0.95)
        rho, _ = random_product_mixture(N, p_prime, s)
        v = check(rho, N, tol)
        ok = (
            v.separable
            and np.linalg.norm(rho - v.decomposition.density()) < 1e-8
            and v.decomposition.max_product_residual() < 1e-9
        )
        res.record(ok, f"seed {s}, N={N}")
    return res


def _corollary(trials, seed, tol):
    res = PropertyResult("maximally entangled E2 with weight above 1/2 is entangled")
    grid = [0.05 * k for k in range(1, 10)]
    for t in range(trials):
        s = seed + t
        N = 2 + t % 3
        p = grid[t % len(grid)]
        state = random_rank2(N, p, s, Ensemble.MAXIMALLY_ENTANGLED_E2)
        ok = not check_rank2(state, tol).separable and not ppt_test(state.density(), N)[0]
        res.record(ok, f"seed {s}, N={N}, p={p}")
    return res


def _rotate_pair(state, rng):
    W = haar_unitary(rng, 2)
    v1 = W[0, 0] * state.E1.vector + W[1, 0] * state.E2.vector
    v2 = W[0, 1] * state.E1.vector + W[1, 1] * state.E2.vector
    return Rank2State(state.p, PureState.from_vector(v1), PureState.from_vector(v2))


def _symmetry(trials, seed, tol):
    res = PropertyResult("verdict invariant under swap, phases and degenerate rotation")
    for t in range(trials):
        s = seed + t
        rng = rng_for(s)
        N = 2 + t % 3
        if t % 2:
            rho, _ = random_product_mixture(N, rng.uniform(0.05, 0.95), s)
            w, V = herm_eig(rho)
            state = Rank2State(w[0] / w[:2].sum(), PureState.from_vector(V[:, 0]), PureState.from_vector(V[:, 1]))
        else:
            state = random_rank2(N, rng.uniform(0.05, 0.95), s)
        base = check_complex(state, tol).separable
        phased = Rank2State(state.p, state.E1.with_phase(rng.uniform(0, 2 * np.pi)),
                            state.E2.with_phase(rng.uniform(0, 2 * np.pi)))
        ok = check_complex(state.swapped(), tol).separable == base
        ok = ok and check_complex(phased, tol).separable == base
        degenerate = _orthogonal_product_pair(N, rng)
        ok = ok and check_complex(_rotate_pair(degenerate, rng), tol).separable
        res.record(ok, f"seed {s}, N={N}")
    return res


def _orthogonal_product_pair(N, rng):
    u, v, y = (random_unit_vector(rng, N) for _ in range(3))
    x = random_unit_vector(rng, N)
    x = x - np.vdot(u, x) * u
    x /= np.linalg.norm(x)
    return Rank2State(0.5, PureState.product(u, v), PureState.product(x, y))


def _real_complex(trials, seed, tol):
    res = PropertyResult("real and complex routes agree on real states")
    for t in range(trials):
        s = seed + t
        rng = rng_for(s)
        N = 2 + t % 3
        if t % 3 == 0:
            state = random_rank2(N, rng.uniform(0.05, 0.95), s, Ensemble.REAL_COEFFICIENTS)
        else:
            rho = conjugate_pair_mixture(N, s) if t % 3 == 1 else _real_product_mixture(N, rng)
            w, V = herm_eig(rho)
            state = Rank2State(w[0] / w[:2].sum(), PureState.from_vector(V[:, 0].real.astype(complex), normalize=True),
                               PureState.from_vector(V[:, 1].real.astype(complex), normalize=True))
        ok = check_real(state, tol).separable == check_complex(state, tol).separable
        res.record(ok, f"seed {s}, N={N}")
    return res


def _real_product_mixture(N, rng):
    a, b = (np.kron(random_unit_vector(rng, N, real=True), random_unit_vector(rng, N, real=True)) for _ in range(2))
    w = rng.uniform(0.05, 0.95)
    return (w * np.outer(a, a) + (1 - w) * np.outer(b, b)).astype(complex)


PROPERTIES = (
    _concurrence_invariance,
    _ppt_equivalence_n2,
    _one_sided,
    _planted,
    _corollary,
    _symmetry,
    _real_complex,
)


def run_selftest(trials=200, seed=None, tol=DEFAULT_TOL):
    seed = default_seed() if seed is None else seed
    return [prop(trials, seed + 100_000 * k, tol) for k, prop in enumerate(PROPERTIES)]
