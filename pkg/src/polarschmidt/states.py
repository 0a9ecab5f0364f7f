"""
Multipartite pure states and their matricizations.

Amplitudes are stored flat in row-major order with the last party's index
varying fastest, i.e. ``amps.reshape(dims)`` is the amplitude tensor.  A
bipartition keeps the parties on each side in the order given; it never
sorts them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CoeffsExceedDimension,
    DimensionMismatch,
    InvalidBipartition,
    NonFinite,
    NotNormalized,
    NotUnitary,
    ShapeMismatch,
    ZeroVector,
)
from .linalg import is_unitary

MAX_DIM = 2**20
_ZERO_NORM = 1e-300


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector over an ordered list of factor dimensions.

    Build instances with :func:`normalize` (or the generators below); the
    constructor itself does not rescale.
    """

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        self.amps.setflags(write=False)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.amps, other.amps)

    __hash__ = None


@dataclass(frozen=True)
class Bipartition:
    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def of(cls, left: Iterable[int], right: Iterable[int] | None = None, n_parties: int | None = None):
        """Build a bipartition; ``right`` defaults to the complement of ``left``."""
        left = tuple(int(p) for p in left)
        if right is None:
            if n_parties is None:
                raise InvalidBipartition("need n_parties to complete the right side")
            right = tuple(p for p in range(n_parties) if p not in left)
        return cls(left, tuple(int(p) for p in right))

    @classmethod
    def parse(cls, text: str, n_parties: int) -> "Bipartition":
        """Parse ``"0,1|2"``.  An empty right side means the complement."""
        if "|" not in text:
            raise InvalidBipartition(f"split must look like 'L|R', got {text!r}")
        lhs, rhs = text.split("|", 1)
        try:
            left = [int(t) for t in lhs.split(",") if t.strip()]
            right = [int(t) for t in rhs.split(",") if t.strip()] or None
        except ValueError as exc:
            raise InvalidBipartition(f"bad party index in {text!r}") from exc
        split = cls.of(left, right, n_parties)
        split.validate(n_parties)
        return split

    def validate(self, n_parties: int) -> None:
        both = self.left + self.right
        if not self.left or not self.right:
            raise InvalidBipartition("both sides of a bipartition must be nonempty")
        if sorted(both) != list(range(n_parties)):
            raise InvalidBipartition(
                f"{self.left}|{self.right} is not a partition of parties 0..{n_parties - 1}"
            )

    def __str__(self):
        return ",".join(map(str, self.left)) + "|" + ",".join(map(str, self.right))


def single_party_split(party: int, n_parties: int) -> Bipartition:
    return Bipartition.of([party], None, n_parties)


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ShapeMismatch(f"dimensions must be positive integers, got {dims}")
    if math.prod(dims) > MAX_DIM:
        raise ShapeMismatch(f"state space of size {math.prod(dims)} exceeds {MAX_DIM}")
    return dims


def normalize(amps, dims: Sequence[int]) -> PureState:
    """Return the unit-norm state proportional to ``amps``.

    Raises
    ------
    ShapeMismatch
        If ``len(amps) != prod(dims)``.
    ZeroVector
        If the norm is below 1e-300.
    NonFinite
        If any amplitude is NaN or Inf.
    """
    dims = _check_dims(dims)
    a = np.asarray(amps, dtype=complex).ravel()
    if a.size != math.prod(dims):
        raise ShapeMismatch(f"{a.size} amplitudes do not fit dims {dims}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("amplitudes contain NaN or Inf")
    norm = np.linalg.norm(a)
    if not norm > _ZERO_NORM:
        raise ZeroVector("state vector has zero norm")
    return PureState(dims, a / norm)


def matricize(state: PureState, split: Bipartition) -> np.ndarray:
    """Coefficient matrix of ``state`` across ``split``.

    Rows run over the composite index of ``split.left`` and columns over that
    of ``split.right``, each row-major in the order the parties are listed.
    """
    split.validate(state.n_parties)
    t = np.transpose(state.tensor, split.left + split.right)
    rows = math.prod(state.dims[p] for p in split.left)
    return t.reshape(rows, -1).copy()


def unmatricize(m: np.ndarray, dims: Sequence[int], split: Bipartition) -> np.ndarray:
    """Inverse of :func:`matricize`: flat amplitudes in the standard order."""
    dims = tuple(dims)
    perm = split.left + split.right
    t = np.asarray(m).reshape([dims[p] for p in perm])
    return np.transpose(t, np.argsort(perm)).ravel()


def apply_local_unitary(state: PureState, party: int, u, tol: float = 1e-10) -> PureState:
    """Apply ``u`` to tensor slot ``party`` of ``state``."""
    u = np.asarray(u, dtype=complex)
    if not 0 <= party < state.n_parties:
        raise DimensionMismatch(f"party {party} out of range for {state.n_parties} parties")
    if u.shape != (state.dims[party], state.dims[party]):
        raise DimensionMismatch(f"operator of shape {u.shape} does not act on dimension {state.dims[party]}")
    if not is_unitary(u, tol):
        raise NotUnitary("operator is not unitary within tolerance")
    t = np.tensordot(u, state.tensor, axes=([1], [party]))
    t = np.moveaxis(t, 0, party)
    return PureState(state.dims, t.ravel())


def random_state(dims: Sequence[int], seed: int) -> PureState:
    """Haar-random pure state: i.i.d. complex normal amplitudes, normalized."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(int(seed))
    size = math.prod(dims)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return normalize(z, dims)


def make_correlated_state(coeffs, dims: Sequence[int] | int, n_parties: int | None = None) -> PureState:
    """``sum_i c_i |i>^{(x)n}`` over the first ``len(coeffs)`` basis vectors.

    ``dims`` may be a single integer, in which case all ``n_parties`` factors
    share that dimension.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if isinstance(dims, (int, np.integer)):
        if n_parties is None:
            raise ShapeMismatch("n_parties is required when dims is a single integer")
        dims = (int(dims),) * n_parties
    dims = _check_dims(dims)
    if n_parties is not None and n_parties != len(dims):
        raise ShapeMismatch(f"{n_parties} parties requested but {len(dims)} dims given")
    if len(dims) < 2:
        raise ShapeMismatch("a correlated state needs at least two parties")
    if len(c) == 0 or len(c) > min(dims):
        raise CoeffsExceedDimension(f"{len(c)} coefficients do not fit dims {dims}")
    if abs(np.vdot(c, c).real - 1.0) > 1e-12:
        raise NotNormalized(f"sum |c_i|^2 = {np.vdot(c, c).real!r}, expected 1")
    t = np.zeros(dims, dtype=complex)
    for i, ci in enumerate(c):
        t[(i,) * len(dims)] = ci
    return PureState(dims, t.ravel())


def singlet() -> PureState:
    return normalize([0, 1, -1, 0], (2, 2))


def ghz(n_parties: int = 3, dim: int = 2) -> PureState:
    return make_correlated_state(np.full(dim, 1 / np.sqrt(dim)), dim, n_parties)


def w_state(n_parties: int = 3) -> PureState:
    t = np.zeros((2,) * n_parties, dtype=complex)
    for p in range(n_parties):
        idx = [0] * n_parties
        idx[p] = 1
        t[tuple(idx)] = 1.0
    return normalize(t.ravel(), (2,) * n_parties)


def product_state(factors: Sequence[np.ndarray]) -> PureState:
    vecs = [np.asarray(f, dtype=complex).ravel() for f in factors]
    out = vecs[0]
    for v in vecs[1:]:
        out = np.kron(out, v)
    return normalize(out, [len(v) for v in vecs])


# -- state files -------------------------------------------------------------

def state_from_json(obj) -> PureState:
    """Parse ``{"dims": [...], "amps": [[re, im], ...]}``; amplitudes are normalized."""
    if not isinstance(obj, dict) or "dims" not in obj or "amps" not in obj:
        raise ShapeMismatch("state object needs 'dims' and 'amps'")
    dims, amps = obj["dims"], obj["amps"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise ShapeMismatch("'dims' must be a list of integers")
    if not isinstance(amps, list):
        raise ShapeMismatch("'amps' must be a list of [re, im] pairs")
    vals = []
    for pair in amps:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ShapeMismatch(f"amplitude entry {pair!r} is not an [re, im] pair")
        vals.append(complex(pair[0], pair[1]))
    return normalize(vals, dims)


def state_to_json(state: PureState) -> dict:
    # "+ 0.0" folds negative zeros so files are stable
    return {
        "dims": list(state.dims),
        "amps": [[float(a.real) + 0.0, float(a.imag) + 0.0] for a in state.amps],
    }


def load_state(path) -> PureState:
    with open(path, "rb") as fh:
        return state_from_json(json.loads(fh.read()))


def dump_state(state: PureState) -> str:
    return json.dumps(state_to_json(state), allow_nan=False) + "\n"
