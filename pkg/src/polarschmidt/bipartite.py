"""
Bipartite Schmidt decomposition through the polar decomposition.

For a split ``L|R`` the coefficient matrix ``A = matricize(state, split)``
factors as ``A = U |A|``.  The eigenpairs ``(lam, phi)`` of ``|A|`` give the
Schmidt weights, and ``U phi`` the left Schmidt vectors.  Because ``A`` has
rows indexed by ``L`` and columns by ``R``,

    A = sum_i lam_i |psi_i><phi_i|   <=>   state = sum_i lam_i psi_i (x) conj(phi_i),

so the right Schmidt vectors stored here are ``conj(phi_i)``; with them the
state is reconstructed literally as ``sum_i lam_i psi_i (x) right_i``.  The
same conjugation makes the right reduced density matrix ``(A^+ A)^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    DEFAULT_DEG_TOL,
    DEFAULT_TOL,
    hermitian_eig,
    is_unitary,
    polar_decompose,
    tie_blocks,
)
from .states import Bipartition, PureState, matricize

NON_CANONICAL_NOTE = (
    "vectors inside a degenerate group are one arbitrary orthonormal choice; "
    "any unitary rotation within the group is an equally valid decomposition"
)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """``state = sum_i weights[i] * left[:, i] (x) right[:, i]``.

    ``left_zero_dim`` and ``right_zero_dim`` record the dimensions of the
    zero-weight spaces on either side, which are not part of the expansion.
    """

    weights: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    groups: tuple[tuple[int, ...], ...]
    split: Bipartition
    left_zero_dim: int = 0
    right_zero_dim: int = 0
    deg_tol: float = DEFAULT_DEG_TOL

    @property
    def rank(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        """Coefficient matrix ``sum_i w_i left_i right_i^T`` (rows = left side)."""
        return (self.left_vectors * self.weights) @ self.right_vectors.T


@dataclass(frozen=True)
class DegeneracyReport:
    groups: tuple[tuple[int, ...], ...]
    sizes: tuple[int, ...]
    weights: tuple[float, ...]
    unique: bool
    basis: str
    freedom: tuple[int, ...] = field(default=())
    note: str = ""


def degeneracy_groups(weights: np.ndarray, deg_tol: float = DEFAULT_DEG_TOL) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(b) for b in tie_blocks(np.asarray(weights), deg_tol))


def schmidt_decompose(
    state: PureState,
    split: Bipartition,
    tol: float = DEFAULT_TOL,
    deg_tol: float = DEFAULT_DEG_TOL,
) -> SchmidtDecomposition:
    """Schmidt decomposition of ``state`` across ``split``.

    Weights are the eigenvalues of ``|A|`` above ``tol * lam_max``; the
    numerical zero space is dropped and only its dimension kept.
    """
    a = matricize(state, split)
    polar = polar_decompose(a, tol)
    eig = hermitian_eig(polar.positive_part, tol=max(tol, 1e-12))
    vals = eig.eigenvalues
    top = vals[0] if vals.size else 0.0
    keep = vals > tol * top if top > 0 else np.zeros(vals.shape, bool)
    weights = vals[keep].copy()
    phi = eig.eigenvectors[:, keep]
    psi = polar.isometry @ phi
    # U is an isometry on the range of |A|; renormalize to strip round-off
    psi = psi / np.linalg.norm(psi, axis=0, keepdims=True)
    r = len(weights)
    return SchmidtDecomposition(
        weights=weights,
        left_vectors=psi,
        right_vectors=phi.conj(),
        groups=degeneracy_groups(weights, deg_tol),
        split=split,
        left_zero_dim=a.shape[0] - r,
        right_zero_dim=a.shape[1] - r,
        deg_tol=deg_tol,
    )


def reduced_density(state: PureState, split: Bipartition, side: str = "right") -> np.ndarray:
    """Reduced density matrix of ``state`` on one side of ``split``.

    ``side="left"`` gives ``A A^+``; ``side="right"`` gives ``(A^+ A)^T``,
    the operator whose trace against ``B`` reproduces ``<state| 1 (x) B |state>``.
    """
    a = matricize(state, split)
    if side == "left":
        rho = a @ a.conj().T
    elif side == "right":
        rho = (a.conj().T @ a).T
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return 0.5 * (rho + rho.conj().T)


def expectation_consistency(state: PureState, split: Bipartition, b) -> tuple[complex, complex]:
    """``<state|(1 (x) B)|state>`` two ways: tensor contraction and a trace.

    Returns ``(direct, trace)``; the caller decides whether they agree.
    """
    a = matricize(state, split)
    b = np.asarray(b, dtype=complex)
    if b.shape != (a.shape[1], a.shape[1]):
        raise DimensionMismatch(f"operator shape {b.shape} does not match right factor dimension {a.shape[1]}")
    direct = np.einsum("ij,jk,ik->", a.conj(), b, a)
    trace = np.trace(reduced_density(state, split, "right") @ b)
    return complex(direct), complex(trace)


def entanglement_entropy(d: SchmidtDecomposition) -> float:
    """Von Neumann entropy ``-sum p ln p`` of ``p = weights**2`` in nats."""
    p = np.asarray(d.weights) ** 2
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log(p))))


def degeneracy_report(d: SchmidtDecomposition, deg_tol: float | None = None) -> DegeneracyReport:
    """Group equal weights and say how much basis freedom the decomposition has.

    The weights themselves are always unique.  Vectors are unique up to phases
    only when every group is a singleton; a group of size ``k`` can be rotated
    by any ``k x k`` unitary.
    """
    groups = d.groups if deg_tol is None else degeneracy_groups(d.weights, deg_tol)
    sizes = tuple(len(g) for g in groups)
    unique = all(s == 1 for s in sizes)
    freedom = tuple(s for s in sizes if s > 1)
    if unique:
        basis = "unique up to phases"
    else:
        basis = "unitary freedom of dimension " + ", ".join(str(s) for s in freedom) + " per degenerate group"
    return DegeneracyReport(
        groups=groups,
        sizes=sizes,
        weights=tuple(float(np.mean(d.weights[list(g)])) for g in groups),
        unique=unique,
        basis=basis,
        freedom=freedom,
        note="" if unique else NON_CANONICAL_NOTE,
    )


def rotate_group(d: SchmidtDecomposition, group: int, v) -> SchmidtDecomposition:
    """Second valid decomposition obtained by rotating one degenerate group.

    The right vectors of ``group`` become ``phi'_a = sum_b v[b, a] phi_b`` and
    the left vectors follow as ``psi'_a = sum_b conj(v[b, a]) psi_b``; the
    weights are untouched.
    """
    idx = list(d.groups[group])
    v = np.asarray(v, dtype=complex)
    if v.shape != (len(idx), len(idx)) or not is_unitary(v):
        raise DimensionMismatch(f"need a {len(idx)}x{len(idx)} unitary for group {group}")
    left = d.left_vectors.copy()
    right = d.right_vectors.copy()
    right[:, idx] = d.right_vectors[:, idx] @ v
    left[:, idx] = d.left_vectors[:, idx] @ v.conj()
    return SchmidtDecomposition(
        weights=d.weights,
        left_vectors=left,
        right_vectors=right,
        groups=d.groups,
        split=d.split,
        left_zero_dim=d.left_zero_dim,
        right_zero_dim=d.right_zero_dim,
        deg_tol=d.deg_tol,
    )


def max_entropy(d: SchmidtDecomposition) -> float:
    dl = d.rank + d.left_zero_dim
    dr = d.rank + d.right_zero_dim
    return math.log(min(dl, dr))
