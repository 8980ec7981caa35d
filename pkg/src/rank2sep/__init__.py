"""Constructive separability test for rank-two bipartite density matrices."""

__version__ = "0.1.0"

from .concurrence import (
    apply_local_unitary,
    generalized_concurrence,
    invariant,
    is_maximally_entangled,
    is_product,
    schmidt_concurrence,
)
from .linalg import effective_rank, herm_eig, kron, partial_transpose, schmidt_decompose
from .oracles import cross_validate, ppt_test, random_product_mixture, random_rank2, verify_decomposition
from .separability import (
    Branch,
    Decomposition,
    QuadSystem,
    Verdict,
    build_quad_system,
    check,
    check_complex,
    check_rank2,
    check_real,
    corollary_bound,
    decompose,
    delta1,
    delta2,
    roots,
)
from .states import LocalUnitary, PureState, Rank2State, maximally_entangled
