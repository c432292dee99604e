import math

import numpy as np
import pytest
from scipy.linalg import expm

from discorrelate.errors import OutOfRange, SpecError, TailTooLarge
from discorrelate.optics import BALANCED, beam_splitter
from discorrelate.states import (HOM_SIGN, amplitude, coherent, fock, hom_state,
                                 mean_photon_number, required_dim, smsv, tmsv)
from discorrelate.fock import tensor_product

BIG = 90


def _ladder(d):
    return np.diag(np.sqrt(np.arange(1, d)), 1)


def _vacuum(d):
    v = np.zeros(d, dtype=complex)
    v[0] = 1
    return v


def test_fock_bounds():
    assert fock(2, 4).coeffs[2] == 1
    with pytest.raises(OutOfRange):
        fock(4, 4)


@pytest.mark.parametrize("alpha", [0.3, 1.2 - 0.7j, 2j])
def test_coherent_matches_displacement_operator(alpha):
    a = _ladder(BIG)
    disp = expm(alpha * a.conj().T - np.conj(alpha) * a) @ _vacuum(BIG)
    dim = 24
    psi = coherent(alpha, dim)
    expected = disp[:dim] / np.linalg.norm(disp[:dim])
    np.testing.assert_allclose(psi.coeffs, expected, atol=1e-12)


def test_coherent_tail_guard():
    with pytest.raises(TailTooLarge):
        coherent(math.sqrt(8), 15)
    assert coherent(math.sqrt(8), 30).discarded < 1e-8


@pytest.mark.parametrize("r,theta", [(0.3, 0.0), (0.6, 1.1), (0.9, -2.0)])
def test_smsv_matches_squeeze_operator(r, theta):
    a = _ladder(BIG)
    xi = r * np.exp(1j * theta)
    sq = expm(0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T)) @ _vacuum(BIG)
    lam = -np.exp(1j * theta) * math.tanh(r)
    dim = 40
    psi = smsv(lam, dim)
    np.testing.assert_allclose(psi.coeffs, sq[:dim] / np.linalg.norm(sq[:dim]), atol=1e-10)
    assert psi.discarded == pytest.approx(1 - np.linalg.norm(sq[:dim]) ** 2, abs=1e-10)


def test_smsv_odd_terms_vanish():
    psi = smsv(0.7, 20)
    assert np.all(psi.coeffs[1::2] == 0)


def test_tmsv_matches_two_mode_squeeze_operator():
    d = 30
    a = np.kron(_ladder(d), np.eye(d))
    b = np.kron(np.eye(d), _ladder(d))
    r = 0.5
    gen = r * (a.conj().T @ b.conj().T - a @ b)
    out = (expm(gen) @ np.kron(_vacuum(d), _vacuum(d))).reshape(d, d)
    dim = 12
    psi = tmsv(math.tanh(r), dim)
    block = out[:dim, :dim]
    np.testing.assert_allclose(psi.coeffs, block / np.linalg.norm(block), atol=1e-10)


def test_edge_squeezing_requires_flag():
    with pytest.raises(SpecError):
        smsv(1.0, 10)
    with pytest.raises(SpecError):
        tmsv(1.0, 10)
    with pytest.raises(SpecError):
        tmsv(1.2, 10, edge=True)
    psi = tmsv(1.0, 10, edge=True)
    np.testing.assert_allclose(np.diag(psi.coeffs), np.full(10, 1 / math.sqrt(10)))
    assert smsv(-1.0, 10, edge=True).norm == pytest.approx(1.0)


def test_hom_from_interference():
    out = beam_splitter(tensor_product(fock(1, 3), fock(1, 3)), (0, 1), BALANCED)
    np.testing.assert_allclose(out.coeffs, hom_state(3).coeffs, atol=1e-15)
    assert HOM_SIGN == -1.0


def test_mean_photon_number():
    assert mean_photon_number(coherent(2.0, 30)) == pytest.approx(4.0, rel=1e-8)
    assert mean_photon_number(tmsv(0.5, 40), 1) == pytest.approx(0.25 / 0.75, rel=1e-10)


def test_required_dim_meets_bound():
    d = required_dim(8.0)
    assert coherent(math.sqrt(8), d).discarded < 1e-8
    with pytest.raises(TailTooLarge):
        coherent(math.sqrt(8), d - 1)


def test_amplitude():
    assert amplitude(2, math.pi / 2) == pytest.approx(2j)
    with pytest.raises(SpecError):
        amplitude(-1)
