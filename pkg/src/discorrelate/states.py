"""Constructors for the input states of the discorrelation circuits."""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import OutOfRange, SpecError, TailTooLarge
from .fock import PureState, normalize

TAIL_BOUND = 1e-8

# Relative sign of |0,2> in the HOM state.  It is what the beam-splitter
# convention in optics.py produces from |1,1>; see test_hom_from_interference.
HOM_SIGN = -1.0


def amplitude(magnitude: float, phase: float = 0.0) -> complex:
    """Complex coherent amplitude ``|a| e^{i phase}`` with the phase taken mod 2π."""
    if not (math.isfinite(magnitude) and magnitude >= 0):
        raise SpecError(f"coherent magnitude must be finite and >= 0, got {magnitude}")
    return cmath.rect(magnitude, math.fmod(phase, 2 * math.pi) % (2 * math.pi))


def _power_series(z: complex, log_weights: np.ndarray) -> np.ndarray:
    """``z**k * exp(log_weights[k])`` evaluated in log space."""
    k = np.arange(len(log_weights))
    if z == 0:
        out = np.zeros(len(log_weights), dtype=complex)
        out[0] = np.exp(log_weights[0])
        return out
    logmag = k * math.log(abs(z)) + log_weights
    return np.exp(logmag) * np.exp(1j * k * cmath.phase(z))


def fock(n: int, dim: int) -> PureState:
    if not 0 <= n < dim:
        raise OutOfRange(f"occupation {n} outside truncation dim {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return PureState(amps)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Untruncated-normalization amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    n = np.arange(dim)
    return _power_series(complex(alpha), -0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1))


def coherent(alpha: complex, dim: int, tail_bound: float = TAIL_BOUND) -> PureState:
    """Coherent state truncated at ``dim`` and renormalized.

    Raises TailTooLarge when the truncation would discard ``tail_bound`` or
    more of the Poisson weight.
    """
    state, cut = normalize(PureState(coherent_amplitudes(alpha, dim)))
    if cut >= tail_bound:
        raise TailTooLarge(
            f"dim={dim} discards {cut:.3g} of |alpha|^2={abs(alpha) ** 2:.4g}; "
            f"bound is {tail_bound:.1g}")
    return state


def _check_squeezing(lam: complex, edge: bool) -> complex:
    lam = complex(lam)
    if abs(lam) > 1 + 1e-12:
        raise SpecError(f"|lambda| must be <= 1, got {abs(lam):.6g}")
    if abs(lam) >= 1 - 1e-12 and not edge:
        raise SpecError("|lambda| = 1 is only normalizable after truncation; pass edge=True")
    return lam


def smsv(lam: complex, dim: int, edge: bool = False) -> PureState:
    """Single-mode squeezed vacuum, ``amps[2n] ∝ lam^n sqrt((2n)!) / (2^n n!)``.

    With ``lam = -e^{i theta} tanh(r)`` this is ``S(r e^{i theta})|0>``.
    ``|lam| = 1`` requires ``edge=True`` and is meaningful only as a
    truncated, renormalized state.
    """
    lam = _check_squeezing(lam, edge)
    if dim < 4:
        raise SpecError("smsv needs dim >= 4")
    k = np.arange((dim + 1) // 2)
    amps = np.zeros(dim, dtype=complex)
    amps[::2] = _power_series(lam, 0.5 * gammaln(2 * k + 1) - k * math.log(2) - gammaln(k + 1))
    raw = PureState(amps)
    if abs(lam) < 1:
        # exact vacuum amplitude (1 - |lam|^2)^{1/4} makes the cut measurable
        raw = PureState(amps * (1 - abs(lam) ** 2) ** 0.25)
    return normalize(raw)[0] if abs(lam) < 1 else _renormalized(raw)


def tmsv(lam: complex, dim: int, edge: bool = False) -> PureState:
    """Two-mode squeezed vacuum ``∝ sum_n lam^n |n, n>``."""
    lam = _check_squeezing(lam, edge)
    if dim < 2:
        raise SpecError("tmsv needs dim >= 2")
    coeffs = np.diag(_power_series(lam, np.zeros(dim)))
    if abs(lam) < 1:
        return normalize(PureState(coeffs * math.sqrt(1 - abs(lam) ** 2)))[0]
    return _renormalized(PureState(coeffs))


def _renormalized(raw: PureState) -> PureState:
    # the untruncated |lam| = 1 state has no finite norm, so there is no
    # meaningful discarded weight to report
    return PureState(raw.coeffs / raw.norm, raw.discarded)


def hom_state(dim: int) -> PureState:
    """``(|2,0> + HOM_SIGN |0,2>) / sqrt(2)``."""
    if dim < 3:
        raise SpecError("hom_state needs dim >= 3")
    coeffs = np.zeros((dim, dim), dtype=complex)
    coeffs[2, 0] = 1 / math.sqrt(2)
    coeffs[0, 2] = HOM_SIGN / math.sqrt(2)
    return PureState(coeffs)


def mean_photon_number(state: PureState, mode: int = 0) -> float:
    p = state.probabilities()
    axes = tuple(i for i in range(state.rank) if i != mode)
    marginal = p.sum(axis=axes) if axes else p
    return float(np.arange(len(marginal)) @ marginal / marginal.sum())


def required_dim(mean_photons: float, tail_bound: float = TAIL_BOUND) -> int:
    """Smallest dim whose Poisson(mean) tail is below ``tail_bound``."""
    dim = 2
    while poisson.sf(dim - 1, mean_photons) >= tail_bound:
        dim += 1
    return dim
