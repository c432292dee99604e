"""Closed-form output coefficients of the discorrelation circuits.

Nothing here touches the circuit simulator; the two are compared against
each other in the test suite.  Coefficient vectors are read as zero outside
their stored range, so ``c[-1]`` and ``c[len(c)]`` both contribute nothing.

Every ``*_grid`` function is the vectorised form of the scalar function it
sits next to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateBeamSplitter
from .optics import BeamSplitter

DEGENERATE_R = 1e-9


def _at(c: np.ndarray, idx):
    """``c[idx]`` with zeros outside ``0 .. len(c)-1``; works on index arrays."""
    idx = np.asarray(idx)
    ok = (idx >= 0) & (idx < len(c))
    return np.where(ok, c[np.clip(idx, 0, len(c) - 1)], 0)


def _at2(c: np.ndarray, i, j):
    i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
    ok = (i >= 0) & (i < c.shape[0]) & (j >= 0) & (j < c.shape[1])
    return np.where(ok, c[np.clip(i, 0, c.shape[0] - 1), np.clip(j, 0, c.shape[1] - 1)], 0)


def _log_power(z: complex, k):
    """``z**k`` for integer arrays ``k`` (possibly negative) via logs; ``0**0 = 1``."""
    k = np.asarray(k, dtype=float)
    if z == 0:
        return np.where(k == 0, 1.0 + 0j, 0j)
    return np.exp(k * math.log(abs(z))) * np.exp(1j * k * np.angle(z))


def _grid(dim: int):
    n = np.arange(dim)
    return np.meshgrid(n, n, indexing="ij")


# -- displaced single photon -------------------------------------------------

def displaced_photon_coeff(n: int, m: int, alpha: complex) -> complex:
    """Normalized amplitude of ``|n, m>`` after ``|alpha> ⊗ |1>`` hits a balanced splitter."""
    return complex(displaced_photon_grid(alpha, max(n, m) + 1)[n, m])


def displaced_photon_grid(alpha: complex, dim: int) -> np.ndarray:
    n, m = _grid(dim)
    gamma = complex(alpha) / math.sqrt(2)
    total = n + m - 1
    log_mag = -0.5 * abs(alpha) ** 2 - 0.5 * (math.log(2) + gammaln(n + 1) + gammaln(m + 1))
    out = _log_power(gamma, np.maximum(total, 0)) * np.exp(log_mag) * (n - m)
    return np.where(total >= 0, out, 0)


# -- heralded two-sided circuit ------------------------------------------------

def _heralded(cA, cB, bs: BeamSplitter, n, m):
    t, r = bs.t, abs(bs.r)
    t2 = t * t
    up = _at(cA, n + 1) * _at(cB, m - 1) * np.sqrt(m * (n + 1)) * (1 - (m + 1) * t2 / 2)
    down = _at(cA, n - 1) * _at(cB, m + 1) * np.sqrt(n * (m + 1)) * (1 - (n + 1) * t2 / 2)
    sign = np.where(np.asarray(m) % 2 == 0, 1.0, -1.0)
    expo = np.asarray(n + m - 2, dtype=float)
    if r == 0:
        # limit r -> 0: the n+m = 1 entries carry r^-1 (1 - t^2) = r -> 0
        radial = np.where(expo == 0, 1.0, 0.0)
    else:
        radial = r ** expo
    return sign * t2 * radial * (up - down)


def heralded_coeff(cA, cB, bs: BeamSplitter, n: int, m: int) -> complex:
    """Unnormalized amplitude of ``|n, m>`` after double single-photon heralding.

    ``cA`` and ``cB`` are the number-basis amplitudes of the two inputs that
    each meet one arm of the HOM state on a splitter of transmissivity
    ``bs.t``.
    """
    return complex(_heralded(np.asarray(cA), np.asarray(cB), bs, np.asarray(n), np.asarray(m)))


def heralded_grid(cA, cB, bs: BeamSplitter, dim: int) -> np.ndarray:
    n, m = _grid(dim)
    return _heralded(np.asarray(cA), np.asarray(cB), bs, n, m).astype(complex)


def herald_probability(cA, cB, bs: BeamSplitter, dim: int) -> float:
    """Probability that both ancilla detectors see exactly one photon."""
    return float(np.sum(np.abs(heralded_grid(cA, cB, bs, dim)) ** 2))


def diagonal_coeff(cA, cB, bs: BeamSplitter, n: int) -> complex:
    """``heralded_coeff(n, n)`` in factored form.

    Vanishes for every input when ``t = sqrt(2 / (n + 1))``.
    """
    cA, cB = np.asarray(cA), np.asarray(cB)
    t, r = bs.t, abs(bs.r)
    if n == 0:
        return 0j
    radial = r ** (2 * (n - 1)) if r > 0 else float(n == 1)
    cross = _at(cA, n + 1) * _at(cB, n - 1) - _at(cA, n - 1) * _at(cB, n + 1)
    return complex((-1) ** n * t * t * radial * math.sqrt(n * (n + 1))
                   * (1 - (n + 1) * t * t / 2) * cross)


@dataclass(frozen=True)
class CriterionCheck:
    """Largest violation of a discorrelation criterion over ``n_range`` (inclusive)."""

    max_violation: float
    n_range: tuple[int, int]

    def satisfied(self, tol: float = 1e-12) -> bool:
        return self.max_violation < tol


def check_discorrelation_condition(cA, cB, n_max: int) -> CriterionCheck:
    """Cross-multiplied criterion ``cA[n+1] cB[n-1] == cA[n-1] cB[n+1]`` for ``n = 1..n_max``."""
    cA, cB = np.asarray(cA), np.asarray(cB)
    n = np.arange(1, n_max + 1)
    gap = _at(cA, n + 1) * _at(cB, n - 1) - _at(cA, n - 1) * _at(cB, n + 1)
    return CriterionCheck(float(np.max(np.abs(gap), initial=0.0)), (1, n_max))


# -- equal coherent inputs -------------------------------------------------------

def coherent_output_coeff(n: int, m: int, alpha: complex, bs: BeamSplitter) -> complex:
    """Unnormalized heralded amplitude for two equal coherent inputs ``alpha``."""
    return complex(coherent_output_grid(alpha, bs, max(n, m) + 1)[n, m])


def coherent_output_grid(alpha: complex, bs: BeamSplitter, dim: int) -> np.ndarray:
    n, m = _grid(dim)
    t, r = bs.t, abs(bs.r)
    t2 = t * t
    log_mag = -abs(alpha) ** 2 - 0.5 * (gammaln(n + 1) + gammaln(m + 1))
    amp = _log_power(complex(alpha), n + m) * np.exp(log_mag)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    expo = (n + m - 2).astype(float)
    if r == 0:
        # the n + m = 1 bracket equals r^2, so r^-1 times it vanishes with r
        radial = np.where(expo == 0, 1.0, 0.0)
    else:
        radial = r ** expo
    out = amp * sign * t2 * radial * (1 - t2 / 2 * (n + m + 1)) * (n - m)
    return out.astype(complex)


# -- entangled two-mode input ------------------------------------------------------

def _entangled(c, bs: BeamSplitter, n, m):
    t, r = bs.t, abs(bs.r)
    if r < DEGENERATE_R:
        raise DegenerateBeamSplitter(f"r = {r:.3g}: the entangled-input formula divides by r^2")
    k = t * t / (2 * r * r)
    first = _at2(c, n - 1, m + 1) * np.sqrt(n * (m + 1)) * (1 - k * (n - 1))
    second = _at2(c, n + 1, m - 1) * np.sqrt(m * (n + 1)) * (1 - k * (m - 1))
    sign = np.where(np.asarray(m) % 2 == 0, 1.0, -1.0)
    return t * t * r ** np.asarray(n + m, dtype=float) * sign * (first - second)


def entangled_output_coeff(c_in, bs: BeamSplitter, n: int, m: int) -> complex:
    """Unnormalized heralded amplitude when a two-mode state ``c_in[n, m]`` replaces the two inputs."""
    return complex(_entangled(np.asarray(c_in), bs, np.asarray(n), np.asarray(m)))


def entangled_output_grid(c_in, bs: BeamSplitter, dim: int) -> np.ndarray:
    n, m = _grid(dim)
    return _entangled(np.asarray(c_in), bs, n, m).astype(complex)


def check_entangled_condition(c_in, n_max: int) -> CriterionCheck:
    """``max |c[n-1, n+1] - c[n+1, n-1]|`` over ``n = 1..n_max``."""
    c = np.asarray(c_in)
    n = np.arange(1, n_max + 1)
    gap = _at2(c, n - 1, n + 1) - _at2(c, n + 1, n - 1)
    return CriterionCheck(float(np.max(np.abs(gap), initial=0.0)), (1, n_max))
