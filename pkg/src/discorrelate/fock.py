"""Truncated Fock-space states and the tensor algebra shared by every module.

A mode truncated at ``dim`` holds occupations ``0 .. dim-1``; index equals
photon number.  Two-mode grids are indexed ``coeffs[n, m]`` with ``n`` the
occupation of the first mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BadModeSet, RankOverflow, SpecError, ZeroNorm

MAX_MODES = 4
ZERO_NORM = 1e-300
# normalize() leaves states this close to unit norm untouched, which keeps it
# exactly idempotent
_UNIT_SLACK = 1e-14


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _combine_discarded(a: float, b: float) -> float:
    return 1.0 - (1.0 - a) * (1.0 - b)


@dataclass(frozen=True, eq=False)
class PureState:
    """Pure state on one to four truncated modes.

    ``coeffs`` has one axis per mode.  ``discarded`` records the probability
    weight cut off by truncation before the state was renormalized.
    """

    coeffs: np.ndarray
    discarded: float = 0.0

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if not 1 <= c.ndim <= MAX_MODES:
            raise RankOverflow(f"pure states support 1..{MAX_MODES} modes, got {c.ndim}")
        if min(c.shape) < 2:
            raise SpecError(f"every mode needs dim >= 2, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.coeffs.shape

    @property
    def rank(self) -> int:
        return self.coeffs.ndim

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def padded(self, dims: Sequence[int]) -> "PureState":
        """Embed into a larger truncation by zero-padding each mode."""
        dims = tuple(dims)
        if len(dims) != self.rank or any(d < s for d, s in zip(dims, self.dims)):
            raise SpecError(f"cannot pad {self.dims} to {dims}")
        out = np.zeros(dims, dtype=complex)
        out[tuple(slice(0, s) for s in self.dims)] = self.coeffs
        return PureState(out, self.discarded)

    def __repr__(self):
        return f"PureState(dims={self.dims}, norm={self.norm:.12g})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Density operator over ``len(dims)`` truncated modes.

    ``matrix`` is square with side ``prod(dims)``; rows and columns run over the
    row-major flattening of the occupation tuple.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    discarded: float = 0.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        side = int(np.prod(dims))
        m = _frozen(self.matrix)
        if m.shape != (side, side):
            raise SpecError(f"matrix shape {m.shape} does not match dims {dims}")
        if not 1 <= len(dims) <= MAX_MODES:
            raise RankOverflow(f"density operators support 1..{MAX_MODES} modes")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, discarded: float = 0.0) -> "DensityOperator":
        k = tensor.ndim // 2
        dims = tensor.shape[:k]
        side = int(np.prod(dims))
        return cls(np.reshape(tensor, (side, side)), dims, discarded)

    @property
    def tensor(self) -> np.ndarray:
        """View with axes ``(row modes..., column modes...)``."""
        return self.matrix.reshape(self.dims + self.dims)

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    def diagonal(self) -> np.ndarray:
        """Number-basis populations reshaped onto the mode grid."""
        return np.real(np.diag(self.matrix)).reshape(self.dims)

    def __repr__(self):
        return f"DensityOperator(dims={self.dims}, trace={self.trace:.12g})"


State = Union[PureState, DensityOperator]


def normalize(state: State) -> tuple[State, float]:
    """Rescale to unit norm (pure) or unit trace (mixed).

    The input is taken to be a truncation of a unit-norm object, so the
    returned discarded weight is ``1 - norm**2`` (``1 - trace``), clipped at
    zero.  States already at unit norm come back unchanged.
    """
    if isinstance(state, PureState):
        weight = float(np.vdot(state.coeffs, state.coeffs).real)
    else:
        weight = state.trace
    if not weight > ZERO_NORM:
        raise ZeroNorm(f"cannot normalize a state of weight {weight:.3g}")
    if abs(weight - 1.0) <= _UNIT_SLACK:
        return state, 0.0
    cut = max(0.0, 1.0 - weight)
    total = _combine_discarded(state.discarded, cut)
    if isinstance(state, PureState):
        return PureState(state.coeffs / np.sqrt(weight), total), cut
    return DensityOperator(state.matrix / weight, state.dims, total), cut


def tensor_product(a: State, b: State) -> State:
    """Outer product ``a ⊗ b``; mixed if either factor is mixed."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        if a.rank + b.rank > MAX_MODES:
            raise RankOverflow(f"{a.rank} + {b.rank} modes exceeds {MAX_MODES}")
        return PureState(np.multiply.outer(a.coeffs, b.coeffs),
                         _combine_discarded(a.discarded, b.discarded))
    ra, rb = to_density(a), to_density(b)
    if ra.rank + rb.rank > MAX_MODES:
        raise RankOverflow(f"{ra.rank} + {rb.rank} modes exceeds {MAX_MODES}")
    return DensityOperator(np.kron(ra.matrix, rb.matrix), ra.dims + rb.dims,
                           _combine_discarded(ra.discarded, rb.discarded))


def to_density(psi: State) -> DensityOperator:
    if isinstance(psi, DensityOperator):
        return psi
    v = psi.coeffs.reshape(-1)
    return DensityOperator(np.outer(v, v.conj()), psi.dims, psi.discarded)


def _check_modes(modes: Sequence[int], rank: int) -> tuple[int, ...]:
    modes = tuple(int(m) for m in modes)
    if not modes or len(set(modes)) != len(modes) or any(not 0 <= m < rank for m in modes):
        raise BadModeSet(f"invalid mode set {modes} for a {rank}-mode state")
    return tuple(sorted(modes))


def partial_trace(rho: State, keep: Sequence[int]) -> DensityOperator:
    """Reduced density operator on the modes in ``keep`` (kept in ascending order)."""
    keep = _check_modes(keep, rho.rank)
    traced = [i for i in range(rho.rank) if i not in keep]
    if isinstance(rho, PureState):
        c = np.transpose(rho.coeffs, keep + tuple(traced))
        kept_dims = c.shape[: len(keep)]
        side = int(np.prod(kept_dims))
        c = c.reshape(side, -1)
        return DensityOperator(c @ c.conj().T, kept_dims, rho.discarded)
    k = rho.rank
    letters = "abcdefgh"
    rows = list(letters[:k])
    cols = list(letters[k:2 * k])
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho.tensor)
    return DensityOperator.from_tensor(t, rho.discarded)


def product_state(*factors: PureState) -> PureState:
    out = factors[0]
    for f in factors[1:]:
        out = tensor_product(out, f)
    return out
