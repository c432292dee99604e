"""Brute-force simulation of the discorrelation circuits.

Built only from :mod:`fock`, :mod:`states` and :mod:`optics`; importing
:mod:`analytic` here would let a shared bug hide a formula error.

Mode layout of the four-mode register::

    0  HOM arm A   (becomes output mode A)
    1  HOM arm B   (becomes output mode B)
    2  input A     (heralded on one photon)
    3  input B     (heralded on one photon)

Arm A meets input A on the pair ``(0, 2)``; input B meets arm B on the pair
``(3, 1)``.  That ordering of the second splitter is what puts the ``(-1)^m``
phase on output mode B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import SpecError, ZeroNorm
from .fock import ZERO_NORM, DensityOperator, PureState, tensor_product
from .optics import (BALANCED, BeamSplitter, LossPoint, beam_splitter, loss_branches,
                     loss_channel)
from .states import coherent, fock

HOM_MODES = (0, 1)
SIDE_A = (0, 2)
SIDE_B = (3, 1)
HERALD_MODES = (2, 3)


@dataclass(frozen=True)
class CircuitConfig:
    """Inputs and wiring for one run of the heralded circuit.

    Either give two single-mode inputs ``input_a``/``input_b`` or one two-mode
    ``input_ab`` that replaces their product.  ``loss`` lists
    ``(LossPoint, eta)`` pairs with ``eta`` the transmitted fraction.
    """

    input_a: Optional[PureState] = None
    input_b: Optional[PureState] = None
    input_ab: Optional[PureState] = None
    bs: BeamSplitter = BALANCED
    loss: tuple = field(default_factory=tuple)

    def __post_init__(self):
        separable = self.input_a is not None and self.input_b is not None
        if separable == (self.input_ab is not None):
            raise SpecError("give either input_a and input_b, or input_ab")
        if separable and (self.input_a.rank, self.input_b.rank) != (1, 1):
            raise SpecError("input_a and input_b must be single-mode states")
        if not separable and self.input_ab.rank != 2:
            raise SpecError("input_ab must be a two-mode state")
        loss = tuple((LossPoint(p), float(eta)) for p, eta in self.loss)
        for _, eta in loss:
            if not 0 <= eta <= 1:
                raise SpecError(f"eta must lie in [0, 1], got {eta}")
        object.__setattr__(self, "loss", loss)

    def input_state(self) -> PureState:
        if self.input_ab is not None:
            return self.input_ab
        d = max(self.input_a.dims[0], self.input_b.dims[0])
        return tensor_product(self.input_a.padded((d,)), self.input_b.padded((d,)))

    @property
    def mode_dim(self) -> int:
        """Per-mode truncation: the HOM arm can add two photons to any input sector."""
        return max(self.input_state().dims) + 2

    def eta(self, point: LossPoint) -> float:
        """Combined transmission at ``point`` (1 when no loss is listed there)."""
        return math.prod(eta for p, eta in self.loss if p is point)


def simulate_displaced_photon(alpha: complex, dim: int) -> PureState:
    """``|1> ⊗ |alpha>`` through a balanced splitter, photon in mode 0.

    ``dim`` truncates the coherent input; the output modes carry ``dim + 1``
    levels so no sector is cut by the splitter.
    """
    d = dim + 1
    psi = tensor_product(fock(1, d), coherent(alpha, dim).padded((d,)))
    return beam_splitter(psi, (0, 1), BALANCED)


def _ancilla_branches(d: int, eta: float) -> list[PureState]:
    branches = [tensor_product(fock(1, d), fock(1, d))]
    if eta < 1:
        for mode in HOM_MODES:
            branches = [b for s in branches for b in loss_branches(s, mode, eta)]
    return [beam_splitter(b, HOM_MODES, BALANCED) for b in branches]


def _herald_slices(full: np.ndarray, eta: float) -> list[np.ndarray]:
    """Unnormalized output vectors for one photon at each herald detector.

    With detector-side loss a click at one photon can come from ``k + 1``
    photons of which ``k`` were lost: ``<1| K_k = sqrt((k+1) eta (1-eta)^k) <k+1|``.
    """
    if eta == 1:
        return [full[:, :, 1, 1]]
    d = full.shape[2]
    k = np.arange(d - 1)
    w = np.sqrt((k + 1) * eta * (1 - eta) ** k)
    out = []
    for ka in k:
        for kb in k:
            sl = full[:, :, ka + 1, kb + 1]
            if w[ka] * w[kb] > 0 and np.any(sl != 0):
                out.append(w[ka] * w[kb] * sl)
    return out


def _run(cfg: CircuitConfig) -> tuple[list[np.ndarray], float]:
    d = cfg.mode_dim
    inputs = cfg.input_state().padded((d, d))
    vectors = []
    for anc in _ancilla_branches(d, cfg.eta(LossPoint.ANCILLA_PREPARATION)):
        full = tensor_product(anc, inputs)
        full = beam_splitter(full, SIDE_A, cfg.bs)
        full = beam_splitter(full, SIDE_B, cfg.bs)
        vectors.extend(_herald_slices(full.coeffs, cfg.eta(LossPoint.BEFORE_HERALD_DETECTORS)))
    prob = float(sum(np.vdot(v, v).real for v in vectors))
    if not prob > ZERO_NORM:
        raise ZeroNorm(f"double single-photon herald has probability {prob:.3g}")
    return vectors, prob


def simulate_discorrelation_circuit(
        cfg: CircuitConfig) -> tuple[Union[PureState, DensityOperator], float]:
    """Heralded two-mode output state and the joint herald probability.

    Lossless configs return a normalized :class:`PureState`; any loss entry
    switches to :func:`simulate_with_loss`.
    """
    if cfg.loss:
        return simulate_with_loss(cfg)
    vectors, prob = _run(cfg)
    discarded = cfg.input_state().discarded
    return PureState(vectors[0] / math.sqrt(prob), discarded), prob


def heralded_amplitudes(cfg: CircuitConfig) -> np.ndarray:
    """Unnormalized lossless output grid; its squared norm is the herald probability."""
    if cfg.loss:
        raise SpecError("heralded_amplitudes is defined for lossless configs only")
    return _run(cfg)[0][0]


def simulate_with_loss(cfg: CircuitConfig) -> tuple[DensityOperator, float]:
    """Mixed-state run with loss at the listed points, applied to both arms.

    Loss before heralding is carried as an ensemble of Kraus branches (the
    four-mode density operator would need ``dim**8`` entries); the heralded
    ensemble is summed into a two-mode density operator before any
    output-side loss.
    """
    if not cfg.loss:
        raise SpecError("simulate_with_loss needs at least one (LossPoint, eta) entry")
    vectors, prob = _run(cfg)
    d = cfg.mode_dim
    stack = np.stack([v.reshape(-1) for v in vectors])
    rho = DensityOperator((stack.T @ stack.conj()) / prob, (d, d),
                          cfg.input_state().discarded)
    eta_out = cfg.eta(LossPoint.AFTER_DISCORRELATION)
    if eta_out < 1:
        rho = loss_channel(loss_channel(rho, 0, eta_out), 1, eta_out)
    return rho, prob
