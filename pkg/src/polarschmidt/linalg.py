"""
Dense complex matrix primitives.

Hermitian eigensystems, the canonical (singular value) representation of a
finite-dimensional operator, polar decomposition and numerical rank.  The
heavy lifting is delegated to LAPACK through :mod:`numpy.linalg`; this module
adds the thresholding, ordering and phase conventions that make the results
reproducible.

Conventions
-----------
* Thresholds are relative: a singular value ``s`` counts as nonzero iff
  ``s > tol * s_max``.  The zero matrix has rank 0.
* Values are returned in descending order.  Vectors whose values agree to
  round-off are ordered by a tolerant lexicographic comparison on their
  (real, imag) components, largest first.
* Phase gauge: the largest-magnitude component of every eigenvector and
  right singular vector is real and positive.  The paired left singular
  vector carries the same phase so that ``w v^+`` is unchanged.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NotHermitian

DEFAULT_TOL = 1e-10
DEFAULT_DEG_TOL = 1e-8

# Values closer than this (relative to the largest) are treated as exact ties
# for vector ordering.  Much tighter than DEFAULT_DEG_TOL on purpose.
_TIE_TOL = 1e-13
_LEX_TOL = 1e-9


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class PolarDecomposition:
    """``m = isometry @ positive_part`` with ``positive_part = (m^+ m)^(1/2)``."""

    isometry: np.ndarray
    positive_part: np.ndarray


@dataclass(frozen=True)
class CanonicalRepresentation:
    """``m = sum_k weights[k] |left[:, k]><right[:, k]|`` over nonzero weights."""

    weights: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.weights)

    def reconstruct(self, shape: tuple[int, int] | None = None) -> np.ndarray:
        if shape is None:
            shape = (self.left_vectors.shape[0], self.right_vectors.shape[0])
        if self.rank == 0:
            return np.zeros(shape, dtype=complex)
        return (self.left_vectors * self.weights) @ self.right_vectors.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array (a copy)."""
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains NaN or Inf entries")
    return a


def fix_phase(v: np.ndarray) -> tuple[np.ndarray, complex]:
    """Rotate ``v`` so its largest-magnitude component is real positive.

    Returns the rotated vector and the unit phase it was multiplied by.  When
    several components share the maximal magnitude (to 1e-9 relative) the
    first one is used.
    """
    mags = np.abs(v)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return v.copy(), 1.0 + 0j
    idx = int(np.argmax(mags >= top * (1.0 - 1e-9)))
    phase = np.conj(v[idx]) / mags[idx]
    return v * phase, complex(phase)


def _lex_cmp(a: np.ndarray, b: np.ndarray, tol: float = _LEX_TOL) -> int:
    # descending lexicographic order on interleaved (re, im) parts
    for x, y in zip(_interleave(a), _interleave(b)):
        if abs(x - y) > tol:
            return -1 if x > y else 1
    return 0


def _interleave(v: np.ndarray) -> np.ndarray:
    return np.column_stack([v.real, v.imag]).ravel()


def lex_order(vectors: list[np.ndarray], tol: float = _LEX_TOL) -> list[int]:
    """Indices that sort ``vectors`` by descending tolerant lexicographic order."""
    keyed = functools.cmp_to_key(lambda i, j: _lex_cmp(vectors[i], vectors[j], tol))
    return sorted(range(len(vectors)), key=keyed)


def tie_blocks(values: np.ndarray, rel_tol: float) -> list[list[int]]:
    """Split descending ``values`` into consecutive blocks of near-equal entries.

    A new block starts whenever a value falls more than ``rel_tol * max|values|``
    below the first value of the current block, so the spread inside a block
    never exceeds the threshold.
    """
    if len(values) == 0:
        return []
    scale = float(np.max(np.abs(values)))
    thresh = rel_tol * scale
    blocks = [[0]]
    for k in range(1, len(values)):
        if values[blocks[-1][0]] - values[k] <= thresh:
            blocks[-1].append(k)
        else:
            blocks.append([k])
    return blocks


def _order_ties(values: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Reorder columns of ``vecs`` inside exact-tie blocks; values stay put."""
    out = vecs.copy()
    for block in tie_blocks(values, _TIE_TOL):
        if len(block) > 1:
            cols = [vecs[:, k] for k in block]
            order = lex_order(cols)
            out[:, block] = vecs[:, [block[o] for o in order]]
    return out


def hermitian_eig(m, tol: float = DEFAULT_TOL) -> HermitianEigenSystem:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    m : array_like
        Square matrix with ``max|m - m^+| <= tol * max(1, max|m|)``.
    tol : float
        Hermiticity tolerance.

    Raises
    ------
    NotHermitian
        If ``m`` is not square or violates the Hermiticity bound.
    NonFinite
        If ``m`` has NaN or Inf entries.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    resid = float(np.max(np.abs(a - a.conj().T)))
    if resid > tol * scale:
        raise NotHermitian(f"Hermiticity residual {resid:.3e} exceeds {tol * scale:.3e}")
    a = 0.5 * (a + a.conj().T)
    vals, vecs = np.linalg.eigh(a)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1]
    vecs = np.column_stack([fix_phase(vecs[:, k])[0] for k in range(vecs.shape[1])])
    vecs = _order_ties(vals, vecs)
    return HermitianEigenSystem(vals, vecs)


def _raw_svd(a: np.ndarray, tol: float):
    """Thresholded, gauged, ordered SVD pieces ``(s, W, V)`` with ``a ~ W s V^+``."""
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(0), np.zeros((a.shape[0], 0), complex), np.zeros((a.shape[1], 0), complex)
    keep = s > tol * s[0]
    s = s[keep]
    w = u[:, keep]
    v = vh[keep, :].conj().T
    for k in range(len(s)):
        v[:, k], ph = fix_phase(v[:, k])
        w[:, k] = w[:, k] * ph
    order = np.arange(len(s))
    for block in tie_blocks(s, _TIE_TOL):
        if len(block) > 1:
            sub = lex_order([v[:, k] for k in block])
            order[block] = [block[o] for o in sub]
    return s, w[:, order], v[:, order]


def svd(m, tol: float = DEFAULT_TOL) -> CanonicalRepresentation:
    """Canonical representation ``m = sum_k s_k |w_k><v_k|`` of ``m``.

    Only singular values above ``tol * s_max`` are kept; the numerical kernel
    does not appear in the result.  The zero matrix gives an empty
    representation.
    """
    a = as_matrix(m)
    s, w, v = _raw_svd(a, tol)
    return CanonicalRepresentation(s, w, v)


def polar_decompose(m, tol: float = DEFAULT_TOL) -> PolarDecomposition:
    """Polar decomposition ``m = U |m|``.

    ``|m| = (m^+ m)^(1/2)`` is built from the full singular spectrum.  ``U``
    maps each right singular vector with weight above ``tol * s_max`` to its
    left partner and annihilates the numerical kernel, so ``U^+ U`` is the
    projector onto the numerical range of ``|m|``.
    """
    a = as_matrix(m)
    _, s_all, vh_all = np.linalg.svd(a, full_matrices=False)
    positive = (vh_all.conj().T * s_all) @ vh_all
    positive = 0.5 * (positive + positive.conj().T)
    s, w, v = _raw_svd(a, tol)
    isometry = w @ v.conj().T if len(s) else np.zeros((a.shape[0], a.shape[1]), complex)
    return PolarDecomposition(isometry, positive)


def numerical_rank(m, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol * s_max`` (0 for the zero matrix)."""
    a = as_matrix(m)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def is_unitary(u: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)
