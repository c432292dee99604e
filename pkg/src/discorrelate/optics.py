"""Beam splitters, photon loss and single-photon heralding.

Beam-splitter convention on an ordered mode pair ``(i, j)``::

    a_i^dag -> t a_i^dag - r a_j^dag
    a_j^dag -> r a_i^dag + t a_j^dag

With this choice a single photon displaced by a coherent state on a balanced
splitter reproduces the ``(n - m)`` amplitude pattern with no extra local
phases, provided the photon enters the first mode of the pair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.special import comb, gammaln

from .errors import BadModeSet, SpecError, TruncationOverflow, ZeroNorm
from .fock import ZERO_NORM, DensityOperator, PureState


@dataclass(frozen=True)
class BeamSplitter:
    t: float
    r: float

    def __post_init__(self):
        if not 0 <= self.t <= 1:
            raise SpecError(f"transmissivity must lie in [0, 1], got {self.t}")
        if abs(self.t ** 2 + self.r ** 2 - 1) > 1e-12:
            raise SpecError(f"t^2 + r^2 = {self.t ** 2 + self.r ** 2!r}, expected 1")

    @classmethod
    def from_t(cls, t: float) -> "BeamSplitter":
        return cls(float(t), math.sqrt(max(0.0, 1.0 - float(t) ** 2)))

    def inverse(self) -> "BeamSplitter":
        return BeamSplitter(self.t, -self.r)


BALANCED = BeamSplitter.from_t(1 / math.sqrt(2))


class LossPoint(enum.Enum):
    ANCILLA_PREPARATION = "ancilla"
    BEFORE_HERALD_DETECTORS = "herald"
    AFTER_DISCORRELATION = "output"


def bs_fock_amplitude(n1: int, n2: int, m1: int, m2: int, bs: BeamSplitter) -> float:
    """Matrix element ``<m1, m2| U |n1, n2>`` of the beam splitter."""
    if n1 + n2 != m1 + m2 or min(n1, n2, m1, m2) < 0:
        return 0.0
    t, r = bs.t, bs.r
    total = 0.0
    for k in range(max(0, m1 - n2), min(n1, m1) + 1):
        j = m1 - k
        term = comb(n1, k, exact=True) * comb(n2, j, exact=True)
        term = term * t ** (k + n2 - j) * r ** (n1 - k + j)
        total += -term if (n1 - k) % 2 else term
    scale = 0.5 * (gammaln(m1 + 1) + gammaln(m2 + 1) - gammaln(n1 + 1) - gammaln(n2 + 1))
    return total * math.exp(scale)


def _sector_unitary(total: int, bs: BeamSplitter) -> np.ndarray:
    """Splitter restricted to ``{|k, total-k>}``, indexed by ``k``.

    ``U = exp(theta (a^dag b - a b^dag))`` with ``theta = atan2(r, t)``,
    exponentiated through a Hermitian eigendecomposition so the block is
    unitary to machine precision; the closed-form sum in
    :func:`bs_fock_amplitude` cancels badly above ~40 photons.
    """
    k = np.arange(total)
    hop = np.sqrt((k + 1.0) * (total - k))
    gen = np.zeros((total + 1, total + 1), dtype=complex)
    gen[k + 1, k] = -1j * hop
    gen[k, k + 1] = 1j * hop
    w, v = np.linalg.eigh(gen)
    theta = math.atan2(bs.r, bs.t)
    return ((v * np.exp(1j * theta * w)) @ v.conj().T).real


@lru_cache(maxsize=32)
def _pair_unitary(dim: int, t: float, r: float) -> sparse.csr_matrix:
    """Block-diagonal splitter on the flattened ``dim x dim`` pair space.

    Only sectors with ``n1 + n2 <= dim - 1`` are closed under the splitter;
    rows and columns of higher sectors are left at zero.  Stored sparse:
    the blocks fill about ``2 / (3 dim)`` of the matrix.
    """
    bs = BeamSplitter(t, r)
    rows, cols, vals = [], [], []
    for total in range(dim):
        k = np.arange(total + 1)
        flat = k * dim + (total - k)
        rows.append(np.repeat(flat, total + 1))
        cols.append(np.tile(flat, total + 1))
        vals.append(_sector_unitary(total, bs).reshape(-1))
    shape = (dim * dim, dim * dim)
    return sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=shape)


def _pair_overflow(dim: int) -> np.ndarray:
    n = np.arange(dim)
    return (n[:, None] + n[None, :] > dim - 1).reshape(-1)


def _check_pair(dims: Sequence[int], modes: Sequence[int]) -> tuple[int, int]:
    i, j = (int(m) for m in modes)
    if i == j or not (0 <= i < len(dims) and 0 <= j < len(dims)):
        raise BadModeSet(f"bad mode pair {modes} for {len(dims)} modes")
    if dims[i] != dims[j]:
        raise SpecError(f"beam-splitter modes need equal truncation, got {dims[i]} and {dims[j]}")
    return i, j


def _apply_pair(tensor: np.ndarray, axes: tuple[int, int], u: np.ndarray) -> np.ndarray:
    dim = tensor.shape[axes[0]]
    moved = np.moveaxis(tensor, axes, (-2, -1))
    shape = moved.shape
    flat = moved.reshape(shape[:-2] + (dim * dim,))
    if np.any(flat[..., _pair_overflow(dim)] != 0):
        raise TruncationOverflow(
            f"populated sector exceeds {dim - 1} photons in the beam-splitter pair")
    out = (u @ flat.reshape(-1, dim * dim).T).T.reshape(shape)
    return np.moveaxis(out, (-2, -1), axes)


def beam_splitter(state: PureState, modes: Sequence[int], bs: BeamSplitter) -> PureState:
    """Apply the splitter to ``modes = (i, j)`` of a pure state."""
    i, j = _check_pair(state.dims, modes)
    u = _pair_unitary(state.dims[i], bs.t, bs.r)
    return PureState(_apply_pair(state.coeffs, (i, j), u), state.discarded)


def beam_splitter_density(rho: DensityOperator, modes: Sequence[int],
                          bs: BeamSplitter) -> DensityOperator:
    """``U rho U^dag`` with the same sector unitary as :func:`beam_splitter`."""
    i, j = _check_pair(rho.dims, modes)
    k = rho.rank
    u = _pair_unitary(rho.dims[i], bs.t, bs.r)
    t = _apply_pair(rho.tensor, (i, j), u)
    t = _apply_pair(t, (k + i, k + j), u)  # real blocks, so conj(u) = u
    return DensityOperator.from_tensor(t, rho.discarded)


def loss_kraus(eta: float, dim: int) -> list[np.ndarray]:
    """Kraus operators ``K_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>``."""
    _check_eta(eta)
    ops = []
    n = np.arange(dim)
    for k in range(dim):
        op = np.zeros((dim, dim))
        src = n[k:]
        op[src - k, src] = np.sqrt(comb(src, k) * eta ** (src - k) * (1 - eta) ** k)
        ops.append(op)
    return ops


def loss_branches(state: PureState, mode: int, eta: float) -> list[PureState]:
    """Unnormalized Kraus branches ``K_k |psi>`` of the loss channel on one mode.

    ``sum_k |b_k><b_k|`` over the returned branches is the lossy density
    operator; branches that vanish identically are dropped.
    """
    _check_eta(eta)
    if not 0 <= mode < state.rank:
        raise BadModeSet(f"mode {mode} out of range for {state.rank} modes")
    if eta == 1:
        return [state]
    out = []
    for op in loss_kraus(eta, state.dims[mode]):
        c = np.moveaxis(np.tensordot(op, state.coeffs, axes=([1], [mode])), 0, mode)
        if np.any(c != 0):
            out.append(PureState(c, state.discarded))
    return out


def _check_eta(eta: float) -> None:
    if not 0 <= eta <= 1:
        raise SpecError(f"transmitted fraction eta must lie in [0, 1], got {eta}")


def loss_channel(rho: DensityOperator, mode: int, eta: float) -> DensityOperator:
    """Pure-loss channel with transmitted intensity fraction ``eta`` on one mode.

    Uses the closed form
    ``rho'[i, j] = sum_k sqrt(C(i+k,k) C(j+k,k)) eta^((i+j)/2) (1-eta)^k rho[i+k, j+k]``
    which avoids materialising the Kraus sum.
    """
    _check_eta(eta)
    if not 0 <= mode < rho.rank:
        raise BadModeSet(f"mode {mode} out of range for {rho.rank} modes")
    if eta == 1:
        return rho
    k = rho.rank
    dim = rho.dims[mode]
    t = np.moveaxis(rho.tensor, (mode, k + mode), (0, 1))
    out = np.zeros_like(t)
    idx = np.arange(dim)
    extra = (1,) * (t.ndim - 2)
    for lost in range(dim):
        keep = dim - lost
        i = idx[:keep]
        ci = np.sqrt(comb(i + lost, lost))
        w = np.outer(ci * eta ** (i / 2), ci * eta ** (i / 2)) * (1 - eta) ** lost
        out[:keep, :keep] += w.reshape((keep, keep) + extra) * t[lost:, lost:]
    out = np.moveaxis(out, (0, 1), (mode, k + mode))
    return DensityOperator.from_tensor(out, rho.discarded)


def herald(state: PureState, mode: int, photons: int = 1) -> tuple[PureState, float]:
    """Project ``mode`` onto ``|photons>``; return the renormalized remainder and its probability."""
    if state.rank < 2:
        raise BadModeSet("heralding needs at least two modes")
    if not 0 <= mode < state.rank:
        raise BadModeSet(f"mode {mode} out of range for {state.rank} modes")
    if photons >= state.dims[mode]:
        return _impossible(photons)
    sl = np.take(state.coeffs, photons, axis=mode)
    prob = float(np.vdot(sl, sl).real)
    if not prob > ZERO_NORM:
        return _impossible(photons)
    return PureState(sl / math.sqrt(prob), state.discarded), prob


def _impossible(photons: int):
    raise ZeroNorm(f"heralding on {photons} photon(s) has zero probability")


def herald_single_photon(state: PureState, mode: int) -> tuple[PureState, float]:
    return herald(state, mode, 1)


def herald_mixed(rho: DensityOperator, mode: int,
                 photons: int = 1) -> tuple[DensityOperator, float]:
    if rho.rank < 2:
        raise BadModeSet("heralding needs at least two modes")
    if not 0 <= mode < rho.rank:
        raise BadModeSet(f"mode {mode} out of range for {rho.rank} modes")
    if photons >= rho.dims[mode]:
        return _impossible(photons)
    k = rho.rank
    t = np.take(rho.tensor, photons, axis=mode)
    t = np.take(t, photons, axis=k + mode - 1)
    reduced = DensityOperator.from_tensor(t, rho.discarded)
    prob = reduced.trace
    if not prob > ZERO_NORM:
        return _impossible(photons)
    return DensityOperator(reduced.matrix / prob, reduced.dims, rho.discarded), prob


def herald_single_photon_mixed(rho: DensityOperator, mode: int) -> tuple[DensityOperator, float]:
    return herald_mixed(rho, mode, 1)
