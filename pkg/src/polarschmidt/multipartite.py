"""
Homogeneous Schmidt forms on three or more factors, and product tests.

A state on ``n >= 3`` factors has a homogeneous Schmidt form when

    state = sum_i lam_i  Phi_i^0 (x) Phi_i^1 (x) ... (x) Phi_i^{n-1}

with positive ``lam_i`` and orthonormal ``{Phi_i^v}_i`` on every factor.
Such a form is unique when it exists, but most states have none.  The test
here works with ranks and spectra, never with a nonlinear solver:

1. every single-factor marginal must have the same spectrum ``lam_i**2``;
2. if that spectrum is non-degenerate, each right Schmidt vector of the
   ``{0}|rest`` split must itself be a product (peeled by :func:`product_test`);
3. inside degenerate blocks the factor bases are fixed by jointly
   diagonalizing each marginal with a random observable from a neighbouring
   factor, and the amplitude tensor must come out diagonal in those bases.

Every ``Exists`` verdict passes an explicit reconstruction check, and the
randomized route is repeated with a second seed.  Runs that disagree give
``Indeterminate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidMixture, TooFewParties
from .linalg import DEFAULT_DEG_TOL, fix_phase, hermitian_eig, lex_order, svd, tie_blocks
from .states import PureState, matricize, normalize, single_party_split

DEFAULT_MULTI_TOL = 1e-8

EXISTS = "Exists"
NOT_EXISTS = "NotExists"
INDETERMINATE = "Indeterminate"
IS_PRODUCT = "IsProduct"
NOT_PRODUCT = "NotProduct"


@dataclass(frozen=True)
class Witness:
    """Why a form does not exist: a split whose numerical rank exceeds one.

    ``kind`` is ``"marginal_spectrum_mismatch"`` (the split is a
    single-party split of the input state whose spectrum disagrees with
    party 0's) or ``"entangled_eigenvector"`` (the split is between parties
    of the Schmidt vector at ``weight_index``, which should have been a product).
    """

    kind: str
    left: tuple[int, ...]
    right: tuple[int, ...]
    rank: int
    weight_index: int | None = None


@dataclass(frozen=True)
class GeneralizedSchmidtResult:
    verdict: str
    weights: np.ndarray | None = None
    party_bases: tuple[np.ndarray, ...] | None = None
    witness: Witness | None = None
    seeds_used: tuple[int, ...] = ()
    residual: float | None = None
    route: str = ""

    def reconstruct(self) -> np.ndarray:
        """Flat amplitudes of ``sum_i lam_i (x)_v Phi_i^v``."""
        if self.weights is None:
            raise ValueError(f"no decomposition for verdict {self.verdict}")
        return _assemble(self.weights, self.party_bases)


@dataclass(frozen=True)
class ProductTestResult:
    verdict: str
    factors: tuple[np.ndarray, ...] | None = None
    witness: Witness | None = None
    residual: float | None = None

    @property
    def is_product(self) -> bool:
        return self.verdict == IS_PRODUCT


@dataclass(frozen=True)
class MixtureSpec:
    """Convex combination ``sum_i weights[i] |phi_i><phi_i|``, ``phi_i = components[:, i]``."""

    weights: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        c = np.asarray(self.components, dtype=complex)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", c)
        if len(w) == 0 or c.shape[1] != len(w):
            raise InvalidMixture(f"{len(w)} weights for {c.shape[1]} components")
        if np.any(w <= 0):
            raise InvalidMixture("mixture weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidMixture(f"mixture weights sum to {w.sum()!r}")
        if np.max(np.abs(c.conj().T @ c - np.eye(len(w)))) > 1e-10:
            raise InvalidMixture("mixture components are not orthonormal")


@dataclass(frozen=True)
class CountingRecord:
    unknowns: int
    equations: int
    overdetermined: bool
    dim: int | None = None
    parties: int | None = None


# -- product test ------------------------------------------------------------

def _assemble(weights, bases) -> np.ndarray:
    out = 0
    for i, lam in enumerate(weights):
        term = np.array([lam], dtype=complex)
        for b in bases:
            term = np.kron(term, b[:, i])
        out = out + term
    return out


def _kron_all(vectors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def product_test(state: PureState, tol: float = DEFAULT_MULTI_TOL, party_labels: Sequence[int] | None = None) -> ProductTestResult:
    """Decide whether ``state`` is a tensor product of single-factor vectors.

    Peels one factor at a time: matricize the first remaining factor against
    the rest; a numerical rank above one means the state is entangled across
    that factor, otherwise the left singular vector is the factor and the
    right one carries on as a state on one fewer factor.

    ``party_labels`` renames the parties in the witness (used when the state
    is itself a piece of a larger state).
    """
    n = state.n_parties
    labels = tuple(range(n)) if party_labels is None else tuple(party_labels)
    dims = state.dims
    vec = np.array(state.amps)
    factors = []
    for k in range(n - 1):
        rep = svd(vec.reshape(dims[k], -1), tol)
        if rep.rank > 1:
            witness = Witness(
                kind="entangled_split",
                left=(labels[k],),
                right=labels[:k] + labels[k + 1:],
                rank=rep.rank,
            )
            return ProductTestResult(NOT_PRODUCT, witness=witness)
        f, ph = fix_phase(rep.left_vectors[:, 0])
        factors.append(f)
        # vec = s * w (x) conj(v); moving phase ph onto w leaves conj(ph) on the rest
        vec = rep.weights[0] * rep.right_vectors[:, 0].conj() * np.conj(ph)
    factors.append(vec / np.linalg.norm(vec))
    residual = float(np.linalg.norm(state.amps - _kron_all(factors)))
    return ProductTestResult(IS_PRODUCT, factors=tuple(factors), residual=residual)


def single_party_ranks(state: PureState, tol: float = DEFAULT_MULTI_TOL) -> list[int]:
    """Numerical rank of every ``{v}|rest`` matricization, computed independently."""
    if state.n_parties == 1:
        return [1]
    return [svd(matricize(state, single_party_split(p, state.n_parties)), tol).rank for p in range(state.n_parties)]


# -- generalized Schmidt test ------------------------------------------------

def _marginal_spectra(state: PureState, tol: float) -> list[np.ndarray]:
    return [svd(matricize(state, single_party_split(p, state.n_parties)), tol).weights for p in range(state.n_parties)]


def _spectrum_witness(state: PureState, spectra, tol: float) -> Witness | None:
    ref = spectra[0]
    n = state.n_parties
    for p in range(1, n):
        s = spectra[p]
        m = max(len(ref), len(s))
        a = np.pad(ref, (0, m - len(ref)))
        b = np.pad(s, (0, m - len(s)))
        diff = np.abs(a - b)
        if len(ref) != len(s) or diff.max() > tol:
            first = int(np.argmax(diff > tol)) if diff.max() > tol else min(len(ref), len(s))
            # two rank-one splits of a unit vector have identical spectra, so
            # at least one of the pair has rank >= 2
            q = p if len(s) >= len(ref) else 0
            split = single_party_split(q, n)
            return Witness(
                kind="marginal_spectrum_mismatch",
                left=split.left,
                right=split.right,
                rank=len(spectra[q]),
                weight_index=first,
            )
    return None


def _random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)


def _apply_on_axis(t: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)


def _joint_basis(state: PureState, party: int, rank: int, rng, deg_tol: float) -> np.ndarray:
    """Eigenbasis of party ``party``'s marginal, split inside degenerate blocks.

    The splitting observable is ``X = M_B M^+`` with ``M`` the ``{party}|rest``
    matricization and ``M_B`` the same after a random Hermitian ``B`` acts on
    the next party.  In a homogeneous form ``X`` is diagonal in the factor
    basis with generically distinct entries.
    """
    n = state.n_parties
    other = (party + 1) % n
    t = state.tensor
    split = single_party_split(party, n)
    m = matricize(state, split)
    b = _random_hermitian(rng, state.dims[other])
    tb = _apply_on_axis(t, b, other)
    mb = np.transpose(tb, split.left + split.right).reshape(m.shape)
    x = mb @ m.conj().T
    x = 0.5 * (x + x.conj().T)
    rho = m @ m.conj().T
    eig = hermitian_eig(0.5 * (rho + rho.conj().T), tol=1e-9)
    vecs = eig.eigenvectors[:, :rank].copy()
    vals = eig.eigenvalues[:rank]
    for block in tie_blocks(vals, deg_tol):
        if len(block) > 1:
            sub = vecs[:, block]
            inner = hermitian_eig(sub.conj().T @ x @ sub, tol=1e-9)
            vecs[:, block] = sub @ inner.eigenvectors
    return vecs


def _core(t: np.ndarray, bases) -> np.ndarray:
    c = t
    for b in bases:
        c = np.tensordot(c, b.conj(), axes=([0], [0]))
    return c


def _align(t: np.ndarray, bases: list[np.ndarray]) -> list[np.ndarray] | None:
    """Permute each factor basis so the core tensor's mass sits on the diagonal."""
    n = len(bases)
    c = _core(t, bases)
    mass = np.abs(c) ** 2
    aligned = [bases[0]]
    for v in range(1, n):
        others = tuple(a for a in range(n) if a not in (0, v))
        pair = mass.sum(axis=others) if others else mass
        perm = np.argmax(pair, axis=1)
        if len(set(perm.tolist())) != len(perm):
            return None
        aligned.append(bases[v][:, perm])
    return aligned


def _phase_and_order(t: np.ndarray, bases: list[np.ndarray], deg_tol: float):
    """Fix gauges (last factor absorbs the phase) and sort terms canonically."""
    n = len(bases)
    r = bases[0].shape[1]
    bases = [b.copy() for b in bases]
    for v in range(n - 1):
        for i in range(r):
            bases[v][:, i] = fix_phase(bases[v][:, i])[0]
    c = _core(t, bases)
    diag = np.array([c[(i,) * n] for i in range(r)])
    weights = np.abs(diag)
    for i in range(r):
        if weights[i] > 0:
            bases[n - 1][:, i] = bases[n - 1][:, i] * diag[i] / weights[i]
    order = list(np.argsort(-weights, kind="stable"))
    weights = weights[order]
    for block in tie_blocks(weights, deg_tol):
        if len(block) > 1:
            idx = [order[k] for k in block]
            sub = lex_order([bases[0][:, i] for i in idx], tol=1e-6)
            for k, s in zip(block, sub):
                order[k] = idx[s]
    weights = np.abs(diag)[order]
    bases = [b[:, order] for b in bases]
    offdiag = c.copy()
    for i in range(r):
        offdiag[(i,) * n] = 0
    return weights, bases, float(np.linalg.norm(offdiag))


def _verify(state: PureState, weights, bases, tol: float) -> tuple[bool, float]:
    residual = float(np.linalg.norm(state.amps - _assemble(weights, bases)))
    ortho = max(float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1])))) for b in bases)
    return residual <= tol and ortho <= tol, residual


def _eigenvector_witness(state: PureState, party0: np.ndarray, tol: float) -> Witness | None:
    """First vector ``(<Phi_i^0| (x) 1) state`` that fails the product test."""
    n = state.n_parties
    m = matricize(state, single_party_split(0, n))
    labels = tuple(range(1, n))
    for i in range(party0.shape[1]):
        chi = party0[:, i].conj() @ m
        res = product_test(normalize(chi, state.dims[1:]), tol, party_labels=labels)
        if not res.is_product:
            w = res.witness
            return Witness("entangled_eigenvector", w.left, w.right, w.rank, weight_index=i)
    return None


@dataclass
class _Run:
    verdict: str
    weights: np.ndarray | None = None
    bases: list[np.ndarray] | None = None
    witness: Witness | None = None
    residual: float | None = None
    randomized: bool = False
    route: str = ""


def _peel_route(state: PureState, weights: np.ndarray, tol: float) -> _Run:
    n = state.n_parties
    rep = svd(matricize(state, single_party_split(0, n)), tol)
    party0 = rep.left_vectors
    witness = _eigenvector_witness(state, party0, tol)
    if witness is not None:
        return _Run(NOT_EXISTS, witness=witness, route="peel")
    m = matricize(state, single_party_split(0, n))
    cols = [[party0[:, i]] for i in range(rep.rank)]
    for i in range(rep.rank):
        chi = normalize(party0[:, i].conj() @ m, state.dims[1:])
        cols[i].extend(product_test(chi, tol).factors)
    bases = [np.column_stack([cols[i][v] for i in range(rep.rank)]) for v in range(n)]
    return _finish(state, bases, tol, randomized=False, route="peel")


def _joint_route(state: PureState, rank: int, tol: float, deg_tol: float, seed: int) -> _Run:
    rng = np.random.default_rng(seed)
    bases = [_joint_basis(state, v, rank, rng, deg_tol) for v in range(state.n_parties)]
    aligned = _align(state.tensor, bases)
    if aligned is not None:
        run = _finish(state, aligned, tol, randomized=True, route="joint_diagonalization")
        if run.verdict == EXISTS:
            return run
    witness = _eigenvector_witness(state, bases[0], tol)
    if witness is not None:
        return _Run(NOT_EXISTS, witness=witness, randomized=True, route="joint_diagonalization")
    return _Run(INDETERMINATE, randomized=True, route="joint_diagonalization")


def _finish(state, bases, tol, randomized, route) -> _Run:
    weights, bases, offdiag = _phase_and_order(state.tensor, bases, DEFAULT_DEG_TOL)
    ok, residual = _verify(state, weights, bases, tol)
    if ok and offdiag <= tol:
        return _Run(EXISTS, weights, bases, residual=residual, randomized=randomized, route=route)
    return _Run(INDETERMINATE, residual=residual, randomized=randomized, route=route)


def _single_run(state: PureState, tol: float, deg_tol: float, seed: int) -> _Run:
    spectra = _marginal_spectra(state, tol)
    witness = _spectrum_witness(state, spectra, tol)
    if witness is not None:
        return _Run(NOT_EXISTS, witness=witness, route="marginal_spectra")
    weights = spectra[0]
    if all(len(g) == 1 for g in tie_blocks(weights, deg_tol)):
        return _peel_route(state, weights, tol)
    return _joint_route(state, len(weights), tol, deg_tol, seed)


def _same_decomposition(a: _Run, b: _Run, tol: float) -> bool:
    if len(a.weights) != len(b.weights) or np.max(np.abs(a.weights - b.weights)) > tol:
        return False
    for x, y in zip(a.bases, b.bases):
        overlaps = np.abs(np.sum(x.conj() * y, axis=0))
        if np.any(overlaps < 1 - 1e-6):
            return False
    return True


def generalized_schmidt_test(
    state: PureState,
    tol: float = DEFAULT_MULTI_TOL,
    seeds: Sequence[int] = (0, 1),
    deg_tol: float = DEFAULT_DEG_TOL,
) -> GeneralizedSchmidtResult:
    """Decide whether ``state`` has a homogeneous Schmidt form and build it.

    Parameters
    ----------
    state : PureState
        State on at least three factors.
    tol : float
        Spectrum agreement, rank cut-off and reconstruction tolerance.
    seeds : sequence of int
        Seeds for the random observables of the degenerate route.  A single
        seed is complemented by ``seed + 1``; all runs must agree.
    deg_tol : float
        Relative gap below which weights count as degenerate.

    Raises
    ------
    TooFewParties
        If the state has fewer than three factors.
    """
    if state.n_parties < 3:
        raise TooFewParties(f"need at least 3 parties, got {state.n_parties}")
    seeds = [int(s) for s in seeds] or [0]
    if len(seeds) == 1:
        seeds.append(seeds[0] + 1)
    first = _single_run(state, tol, deg_tol, seeds[0])
    runs = [first]
    if first.randomized:
        runs += [_single_run(state, tol, deg_tol, s) for s in seeds[1:]]
    verdicts = {r.verdict for r in runs}
    used = tuple(seeds)
    if verdicts == {EXISTS}:
        if all(_same_decomposition(first, r, tol) for r in runs[1:]):
            return GeneralizedSchmidtResult(
                EXISTS,
                weights=first.weights,
                party_bases=tuple(first.bases),
                seeds_used=used,
                residual=first.residual,
                route=first.route,
            )
        return GeneralizedSchmidtResult(INDETERMINATE, seeds_used=used, route=first.route)
    if verdicts == {NOT_EXISTS}:
        return GeneralizedSchmidtResult(NOT_EXISTS, witness=first.witness, seeds_used=used, route=first.route)
    return GeneralizedSchmidtResult(INDETERMINATE, seeds_used=used, route=first.route)


# -- mixtures and counting ---------------------------------------------------

def pure_vs_mixture_gap(psi, mix: MixtureSpec) -> float:
    """``1 - sum_i lam_i |<psi|phi_i>|^2``, zero only when the mixture is ``psi`` itself."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape[0] != mix.components.shape[0]:
        raise DimensionMismatch(f"vector of dimension {psi.shape[0]} vs mixture on {mix.components.shape[0]}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DimensionMismatch("psi must be a unit vector")
    overlaps = np.abs(mix.components.conj().T @ psi) ** 2
    return float(1.0 - np.dot(mix.weights, overlaps))


def counting_check(dim: int, parties: int) -> CountingRecord:
    """Unknowns ``dim * parties`` vs equations ``dim ** parties`` of the product ansatz."""
    if dim < 1 or parties < 1:
        raise ValueError("dim and parties must be positive")
    unknowns = dim * parties
    equations = dim**parties
    return CountingRecord(unknowns, equations, equations > unknowns, dim, parties)


def counting_for_dims(dims: Sequence[int]) -> CountingRecord:
    """Same counts for arbitrary factor dimensions (sum vs product)."""
    dims = tuple(int(d) for d in dims)
    if len(set(dims)) == 1:
        return counting_check(dims[0], len(dims))
    unknowns = sum(dims)
    equations = math.prod(dims)
    return CountingRecord(unknowns, equations, equations > unknowns, None, len(dims))
