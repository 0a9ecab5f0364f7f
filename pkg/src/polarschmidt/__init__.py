"""Schmidt decompositions of multipartite pure states, with verifiable verdicts."""

from .bipartite import (
    SchmidtDecomposition,
    degeneracy_report,
    entanglement_entropy,
    expectation_consistency,
    reduced_density,
    rotate_group,
    schmidt_decompose,
)
from .errors import SchmidtError
from .linalg import hermitian_eig, numerical_rank, polar_decompose, svd
from .multipartite import (
    GeneralizedSchmidtResult,
    MixtureSpec,
    ProductTestResult,
    counting_check,
    generalized_schmidt_test,
    product_test,
    pure_vs_mixture_gap,
)
from .states import (
    Bipartition,
    PureState,
    apply_local_unitary,
    make_correlated_state,
    matricize,
    normalize,
    random_state,
)

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "GeneralizedSchmidtResult",
    "MixtureSpec",
    "ProductTestResult",
    "PureState",
    "SchmidtDecomposition",
    "SchmidtError",
    "apply_local_unitary",
    "counting_check",
    "degeneracy_report",
    "entanglement_entropy",
    "expectation_consistency",
    "generalized_schmidt_test",
    "hermitian_eig",
    "make_correlated_state",
    "matricize",
    "normalize",
    "numerical_rank",
    "polar_decompose",
    "product_test",
    "pure_vs_mixture_gap",
    "random_state",
    "reduced_density",
    "rotate_group",
    "schmidt_decompose",
    "svd",
]
