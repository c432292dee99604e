"""Photon-number statistics, logarithmic negativity and the discorrelation score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import poisson

from .errors import DegenerateReference, SpecError
from .fock import DensityOperator, PureState, to_density

EIG_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint photon-number distribution ``probs[n, m]`` of a two-mode state."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float, copy=True)
        if p.ndim != 2:
            raise SpecError("joint distributions are two-dimensional")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return self.probs.sum(axis=1), self.probs.sum(axis=0)

    @property
    def same_count_prob(self) -> float:
        return float(np.trace(self.probs))

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def mean_photons(self) -> tuple[float, float]:
        pa, pb = self.marginals
        return (float(np.arange(len(pa)) @ pa) / self.total,
                float(np.arange(len(pb)) @ pb) / self.total)


TwoModeState = Union[PureState, DensityOperator]


def _require_two_mode(state: TwoModeState) -> None:
    if state.rank != 2:
        raise SpecError(f"expected a two-mode state, got {state.rank} modes")


def joint_distribution(state: TwoModeState) -> JointDistribution:
    _require_two_mode(state)
    if isinstance(state, PureState):
        return JointDistribution(state.probabilities())
    return JointDistribution(state.diagonal())


def same_count_probability(jd: JointDistribution) -> float:
    """Probability that both modes register the same photon number."""
    return jd.same_count_prob


def partial_transpose(rho: TwoModeState) -> DensityOperator:
    """Transpose on the second mode: ``((n,m),(n',m')) -> ((n,m'),(n',m))``.

    The result is Hermitian with unit trace but need not be positive.
    """
    _require_two_mode(rho)
    t = to_density(rho).tensor
    return DensityOperator.from_tensor(np.transpose(t, (0, 3, 2, 1)), rho.discarded)


def trace_norm_of_partial_transpose(rho: TwoModeState) -> float:
    w = np.linalg.eigvalsh(partial_transpose(rho).matrix)
    w[np.abs(w) < EIG_FLOOR] = 0.0
    return float(np.sum(np.abs(w)))


def logarithmic_negativity(rho: TwoModeState) -> float:
    """``log2`` of the trace norm of the partial transpose."""
    return max(0.0, math.log2(trace_norm_of_partial_transpose(rho)))


def schmidt_log_negativity(psi: PureState) -> float:
    """Pure-state negativity from Schmidt coefficients, ``2 log2(sum_k s_k)``."""
    _require_two_mode(psi)
    s = np.linalg.svd(psi.coeffs / psi.norm, compute_uv=False)
    return max(0.0, 2 * math.log2(float(np.sum(s))))


@dataclass(frozen=True)
class DiscorrelationScore:
    """``value = 1 - state_same_prob / reference_same_prob``.

    1 means no same-count events; negative values mean more same-count events
    than the uncorrelated reference.
    """

    value: float
    reference_same_prob: float
    state_same_prob: float


def coherent_reference(mean_a: float, mean_b: float, tail: float = 1e-15) -> JointDistribution:
    """Product of two Poisson distributions: an uncorrelated coherent-state pair."""
    dim = max(int(poisson.isf(tail, max(mean_a, mean_b, 1e-12))) + 2, 2)
    n = np.arange(dim)
    return JointDistribution(np.outer(poisson.pmf(n, mean_a), poisson.pmf(n, mean_b)))


def discorrelation_metric(state: Union[TwoModeState, JointDistribution],
                          reference: JointDistribution) -> DiscorrelationScore:
    ref = reference.same_count_prob / reference.total
    if not ref > 1e-300:
        raise DegenerateReference(f"reference same-count probability {ref:.3g}")
    jd = state if isinstance(state, JointDistribution) else joint_distribution(state)
    same = jd.same_count_prob / jd.total
    return DiscorrelationScore(1.0 - same / ref, ref, same)


def reference_for(state: TwoModeState) -> JointDistribution:
    """Coherent reference matched to the marginal mean photon numbers of ``state``.

    Pass the lossless state; the reference stays fixed while loss is swept.
    """
    return coherent_reference(*joint_distribution(state).mean_photons())
