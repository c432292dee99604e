import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discorrelate import analytic as an
from discorrelate.errors import DegenerateBeamSplitter
from discorrelate.optics import BALANCED, BeamSplitter
from discorrelate.states import coherent, coherent_amplitudes, smsv, tmsv

DIM = 10
# transmissivities that filter the n = m sector for some n < DIM
FILTERS = [math.sqrt(2 / (n + 1)) for n in range(1, DIM)]


def _safe_t(rng):
    while True:
        t = rng.uniform(0.25, 0.8)
        if min(abs(t - f) for f in FILTERS) > 0.02:
            return t


def _cvec(rng, n=DIM - 2):
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return c / np.linalg.norm(c)


def test_condition_sound_both_ways(rng):
    agree = {True: 0, False: 0}
    for trial in range(100):
        cA = _cvec(rng)
        if trial % 2:
            k_even, k_odd = rng.normal(size=2) + 1j * rng.normal(size=2)
            cB = np.where(np.arange(len(cA)) % 2 == 0, k_even, k_odd) * cA
        else:
            cB = _cvec(rng)
        bs = BeamSplitter.from_t(_safe_t(rng))
        grid = an.heralded_grid(cA, cB, bs, DIM)
        zero_diag = np.max(np.abs(np.diag(grid))) < 1e-12
        holds = an.check_discorrelation_condition(cA, cB, DIM - 1).satisfied()
        assert holds == zero_diag
        agree[holds] += 1
    assert agree[True] == 50 and agree[False] == 50


def test_entangled_condition_sound_both_ways(rng):
    seen = set()
    for trial in range(100):
        c = rng.normal(size=(DIM - 2,) * 2) + 1j * rng.normal(size=(DIM - 2,) * 2)
        if trial % 2:
            c = c + c.T
        c /= np.linalg.norm(c)
        bs = BeamSplitter.from_t(rng.uniform(0.25, 0.8))
        k = bs.t ** 2 / (2 * bs.r ** 2)
        if any(abs(1 - k * (n - 1)) < 0.05 for n in range(1, DIM)):
            continue
        grid = an.entangled_output_grid(c, bs, DIM)
        zero_diag = np.max(np.abs(np.diag(grid))) < 1e-12
        holds = an.check_entangled_condition(c, DIM - 1).satisfied()
        assert holds == zero_diag
        seen.add(holds)
    assert seen == {True, False}


@pytest.mark.parametrize("n", [2, 3, 5])
def test_fock_filtering_zero(rng, n):
    bs = BeamSplitter.from_t(math.sqrt(2 / (n + 1)))
    for _ in range(20):
        cA, cB = _cvec(rng, 10), _cvec(rng, 10)
        assert abs(an.diagonal_coeff(cA, cB, bs, n)) < 1e-12
        assert abs(an.heralded_coeff(cA, cB, bs, n, n)) < 1e-12
        assert abs(an.heralded_coeff(cA, cB, bs, n + 1, n + 1)) > 1e-12


def test_diagonal_coeff_matches_grid(rng):
    cA, cB = _cvec(rng), _cvec(rng)
    bs = BeamSplitter.from_t(0.43)
    grid = an.heralded_grid(cA, cB, bs, DIM)
    for n in range(DIM):
        assert an.diagonal_coeff(cA, cB, bs, n) == pytest.approx(grid[n, n], abs=1e-15)


def test_scalar_and_grid_agree(rng):
    cA, cB = _cvec(rng), _cvec(rng)
    bs = BeamSplitter.from_t(0.37)
    grid = an.heralded_grid(cA, cB, bs, DIM)
    for n, m in [(0, 1), (3, 4), (6, 2), (7, 7)]:
        assert an.heralded_coeff(cA, cB, bs, n, m) == pytest.approx(grid[n, m], abs=1e-15)
    ent = an.entangled_output_grid(np.outer(cA, cB), bs, DIM)
    assert an.entangled_output_coeff(np.outer(cA, cB), bs, 3, 5) == pytest.approx(ent[3, 5])


def test_entangled_form_reduces_to_product_form(rng):
    cA, cB = _cvec(rng), _cvec(rng)
    bs = BeamSplitter.from_t(0.52)
    prod = an.heralded_grid(cA, cB, bs, DIM)
    ent = an.entangled_output_grid(np.outer(cA, cB), bs, DIM)
    np.testing.assert_allclose(ent, -prod, atol=1e-14)


@given(st.floats(0.1, 2.5), st.floats(-math.pi, math.pi), st.floats(0.2, 0.9))
def test_coherent_form_matches_general_form(mag, phase, t):
    alpha = mag * complex(math.cos(phase), math.sin(phase))
    dim = 30
    c = coherent_amplitudes(alpha, dim)
    bs = BeamSplitter.from_t(t)
    block = slice(0, dim - 1)
    # the two closed forms differ by a global sign only
    np.testing.assert_allclose(an.coherent_output_grid(alpha, bs, dim)[block, block],
                               -an.heralded_grid(c, c, bs, dim)[block, block], atol=1e-14)


def test_displaced_photon_properties():
    alpha = 1.7 - 0.4j
    grid = an.displaced_photon_grid(alpha, 40)
    assert np.sum(np.abs(grid) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diag(grid) == 0)
    assert an.displaced_photon_coeff(3, 1, alpha) == pytest.approx(grid[3, 1])


def test_equal_coherent_removes_antidiagonal_14():
    alpha = math.sqrt(8)
    bs = BeamSplitter.from_t(math.sqrt(2 / 15))
    grid = an.coherent_output_grid(alpha, bs, 32)
    grid = grid / np.linalg.norm(grid)
    n = np.arange(32)
    anti = (n[:, None] + n[None, :]) == 14
    assert np.max(np.abs(grid[anti])) < 1e-12
    assert np.max(np.abs(grid[(n[:, None] + n[None, :]) == 13])) > 1e-3


def test_tmsv_antidiagonal_zero_location():
    c = tmsv(0.8, 20).coeffs
    n = np.arange(22)
    s = n[:, None] + n[None, :]
    half = an.entangled_output_grid(c, BALANCED, 22)
    assert np.max(np.abs(half[s == 4])) < 1e-15
    assert np.max(np.abs(half[s == 6])) > 1e-3
    narrow = an.entangled_output_grid(c, BeamSplitter.from_t(math.sqrt(2 / 15)), 22)
    assert np.max(np.abs(narrow[s == 4])) > 1e-3
    assert np.max(np.abs(narrow[s == 26])) < 1e-12 * np.max(np.abs(narrow))


def test_tmsv_output_offset():
    c = tmsv(0.6, 16).coeffs
    g = an.entangled_output_grid(c, BeamSplitter.from_t(0.4), 18)
    n = np.arange(18)
    off = np.abs(n[:, None] - n[None, :]) != 2
    assert np.all(g[off] == 0)


def test_equal_smsv_is_discorrelated():
    c = smsv(0.5, 20).coeffs
    assert an.check_discorrelation_condition(c, c, 18).satisfied()
    assert not an.check_discorrelation_condition(c, smsv(-0.5, 20).coeffs, 18).satisfied()


def test_degenerate_splitter():
    with pytest.raises(DegenerateBeamSplitter):
        an.entangled_output_grid(np.eye(3), BeamSplitter(1.0, 0.0), 4)
    # r = 0 limit of the product form: only n + m = 2 survives
    c = coherent(0.5, 10).coeffs
    g = an.heralded_grid(c, c, BeamSplitter(1.0, 0.0), 10)
    n = np.arange(10)
    assert np.all(g[(n[:, None] + n[None, :]) != 2] == 0)
