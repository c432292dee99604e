import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discorrelate.analysis import (JointDistribution, coherent_reference, discorrelation_metric,
                                   joint_distribution, logarithmic_negativity, partial_transpose,
                                   reference_for, same_count_probability,
                                   schmidt_log_negativity)
from discorrelate.errors import DegenerateReference, SpecError
from discorrelate.fock import DensityOperator, PureState, tensor_product, to_density
from discorrelate.optics import loss_channel
from discorrelate.states import coherent, fock, hom_state, tmsv

from conftest import random_state


def test_hom_is_one_ebit():
    assert logarithmic_negativity(hom_state(4)) == pytest.approx(1.0, abs=1e-12)


def test_product_state_has_no_negativity():
    psi = tensor_product(coherent(1.0, 15), coherent(0.5j, 15))
    assert logarithmic_negativity(psi) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("lam", [0.1, 1 / 3, 0.6])
def test_tmsv_negativity_closed_form(lam):
    e = logarithmic_negativity(tmsv(lam, 40))
    # the trace norm sums amplitudes, so the truncated tail enters at lam**dim
    assert e == pytest.approx(math.log2((1 + lam) / (1 - lam)), abs=1e-7)


@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10 ** 6))
def test_pure_state_negativity_matches_schmidt(da, db, seed):
    psi = PureState(random_state(np.random.default_rng(seed), (da, db)))
    assert logarithmic_negativity(psi) == pytest.approx(schmidt_log_negativity(psi), abs=1e-10)


def test_negativity_invariant_under_local_phase(rng):
    c = random_state(rng, (4, 4))
    phase = np.exp(1j * rng.uniform(0, 6, 4))
    a = logarithmic_negativity(PureState(c))
    b = logarithmic_negativity(PureState(c * phase[None, :]))
    assert a == pytest.approx(b, abs=1e-12)


def test_partial_transpose_hermitian_unit_trace(rng):
    rho = to_density(PureState(random_state(rng, (3, 4))))
    pt = partial_transpose(rho)
    np.testing.assert_allclose(pt.matrix, pt.matrix.conj().T, atol=1e-15)
    assert pt.trace == pytest.approx(1.0)


def test_negativity_decreases_under_loss():
    rho = to_density(hom_state(3))
    values = []
    for eta in (1.0, 0.8, 0.5, 0.2, 0.0):
        lossy = loss_channel(loss_channel(rho, 0, eta), 1, eta)
        values.append(logarithmic_negativity(lossy))
    assert values[0] == pytest.approx(1.0)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] == 0.0


def test_maximally_mixed_has_no_negativity():
    assert logarithmic_negativity(DensityOperator(np.eye(9) / 9, (3, 3))) == 0.0


def test_joint_distribution_and_same_count():
    jd = joint_distribution(tensor_product(fock(1, 3), fock(1, 3)))
    assert same_count_probability(jd) == pytest.approx(1.0)
    assert jd.mean_photons() == pytest.approx((1.0, 1.0))
    with pytest.raises(SpecError):
        joint_distribution(fock(1, 3))


def test_coherent_reference_marginals():
    ref = coherent_reference(2.0, 0.5)
    assert ref.total == pytest.approx(1.0, abs=1e-14)
    assert ref.mean_photons() == pytest.approx((2.0, 0.5), rel=1e-12)
    assert ref.same_count_prob == pytest.approx(
        sum(math.exp(-2.5) * (2.0 * 0.5) ** n / math.factorial(n) ** 2 for n in range(40)))


def test_discorrelation_metric_limits():
    hom = hom_state(3)
    score = discorrelation_metric(hom, reference_for(hom))
    assert score.value == pytest.approx(1.0)
    pair = tensor_product(coherent(1.5, 20), coherent(1.5, 20))
    assert discorrelation_metric(pair, reference_for(pair)).value == pytest.approx(0.0, abs=1e-8)
    twin = tmsv(0.5, 30)
    assert discorrelation_metric(twin, reference_for(twin)).value < 0


def test_degenerate_reference():
    empty = JointDistribution(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DegenerateReference):
        discorrelation_metric(hom_state(3), empty)
