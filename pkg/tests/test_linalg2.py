import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopjam.errors import ZeroChannelError
from coopjam.linalg2 import (
    ComplexPair,
    Hermitian2,
    bilinear,
    herm_eig2,
    inner,
    null_direction,
    quad_form,
)

from conftest import hermitians, nonzero_pairs, pairs


def test_identity_eigenvalues():
    eig = herm_eig2(Hermitian2.identity())
    assert (eig.lambda_hi, eig.lambda_lo) == (1.0, 1.0)


def test_diagonal_eigenpairs():
    eig = herm_eig2(Hermitian2(2.0, 0.0, 0j))
    assert eig.lambda_hi == 2.0 and eig.lambda_lo == 0.0
    assert eig.v_hi == ComplexPair(1 + 0j, 0j)
    assert eig.v_lo == ComplexPair(0j, 1 + 0j)


def test_rank_one_spectrum():
    g = ComplexPair(0.22 - 0.03j, 0.88 + 0.15j)
    norm_sq = 0.22**2 + 0.03**2 + 0.88**2 + 0.15**2
    eig = herm_eig2(Hermitian2.outer(g))
    assert eig.lambda_hi == pytest.approx(0.8462, abs=1e-12)
    assert eig.lambda_hi == pytest.approx(norm_sq, abs=1e-14)
    assert abs(eig.lambda_lo) < 1e-15


@given(hermitians)
def test_eig_matches_numpy(m):
    ref = np.linalg.eigvalsh(m.to_array())
    eig = herm_eig2(m)
    scale = 1 + np.abs(ref).max()
    assert eig.lambda_hi == pytest.approx(ref[1], abs=1e-12 * scale)
    assert eig.lambda_lo == pytest.approx(ref[0], abs=1e-12 * scale)


@given(hermitians)
def test_eigenpair_invariants(m):
    eig = herm_eig2(m)
    assert eig.lambda_hi >= eig.lambda_lo
    for lam, v in ((eig.lambda_hi, eig.v_hi), (eig.lambda_lo, eig.v_lo)):
        assert abs(v.norm() - 1) <= 1e-12
        mv = m.apply(v)
        res = math.hypot(abs(mv.c1 - lam * v.c1), abs(mv.c2 - lam * v.c2))
        assert res <= 1e-10 * (1 + abs(lam))
        # phase convention: first nonzero component real and positive
        lead = v.c1 if v.c1 != 0 else v.c2
        assert lead.imag == 0 and lead.real > 0
    assert abs(inner(eig.v_hi, eig.v_lo)) <= 1e-10


@given(hermitians)
def test_reconstruction_and_trace(m):
    eig = herm_eig2(m)
    rebuilt = eig.lambda_hi * Hermitian2.outer(eig.v_hi) + eig.lambda_lo * Hermitian2.outer(eig.v_lo)
    scale = max(1.0, abs(m.a), abs(m.d), abs(m.b))
    assert abs(rebuilt.a - m.a) <= 1e-10 * scale
    assert abs(rebuilt.d - m.d) <= 1e-10 * scale
    assert abs(rebuilt.b - m.b) <= 1e-10 * scale
    assert eig.lambda_hi + eig.lambda_lo == pytest.approx(m.trace, abs=1e-12 * scale)


def test_eig_is_deterministic():
    m = Hermitian2(0.3, -1.2, 0.4 - 0.9j)
    assert herm_eig2(m) == herm_eig2(m)


def test_null_direction_unit_basis():
    assert null_direction(ComplexPair(1 + 0j, 0j)) == ComplexPair(-0j, 1 + 0j)


def test_null_direction_paper_h1():
    h = ComplexPair(0.76 - 0.64j, -0.10 - 0.84j)
    u = null_direction(h)
    n = math.sqrt(1.7028)
    assert u.c1 == pytest.approx((0.10 + 0.84j) / n, abs=1e-15)
    assert u.c2 == pytest.approx((0.76 - 0.64j) / n, abs=1e-15)
    assert abs(bilinear(h, u)) <= 1e-12 * h.norm()
    assert abs(u.norm() - 1) <= 1e-12


def test_null_direction_zero_channel():
    with pytest.raises(ZeroChannelError):
        null_direction(ComplexPair(0j, 0j))
    with pytest.raises(ZeroChannelError):
        null_direction(ComplexPair(1e-9 + 0j, 0j), tol=1e-6)


@given(nonzero_pairs)
def test_null_direction_annihilates(h):
    u = null_direction(h)
    assert abs(u.norm() - 1) <= 1e-12
    assert quad_form(Hermitian2.outer(u), h) <= 1e-20 * h.norm() ** 4 + 1e-300


def test_quad_form_examples():
    assert quad_form(Hermitian2.identity(), ComplexPair(1 + 0j, 1j)) == 2.0
    assert quad_form(Hermitian2(1.0, 0.0, 0j), ComplexPair(0j, 1 + 0j)) == 0.0


def test_quad_form_nulling_identity():
    h = ComplexPair(0.76 - 0.64j, -0.10 - 0.84j)
    s = Hermitian2.outer(null_direction(h))
    assert abs(quad_form(s, h)) <= 1e-20 * h.norm_sq() ** 2


@given(hermitians, pairs)
def test_quad_form_matches_matrix_product(s, v):
    arr = np.array(v)
    ref = (arr @ s.to_array() @ arr.conj()).real
    assert quad_form(s, v) == pytest.approx(ref, abs=1e-10 * (1 + abs(ref)))


@given(hermitians, pairs, st.floats(0, 2 * math.pi))
def test_quad_form_phase_invariant(s, v, theta):
    rot = v.scale(cmath.exp(1j * theta))
    base = quad_form(s, v)
    assert quad_form(s, rot) == pytest.approx(base, abs=1e-12 * (1 + abs(base)))


def test_psd_tolerance_is_relative():
    assert Hermitian2(1.0, 0.0, 0j).is_psd()
    assert not Hermitian2(1.0, -1e-3, 0j).is_psd()
    big = Hermitian2(1e6, 1e6, 1e6 + 1e-6)
    assert big.is_psd()


@given(pairs, pairs)
def test_rank_one_root_agrees_with_entries(u, v):
    s = Hermitian2.outer(u)
    plain = Hermitian2(s.a, s.d, s.b)
    ref = quad_form(plain, v)
    assert quad_form(s, v) == pytest.approx(ref, abs=1e-10 * (1 + u.norm_sq() * v.norm_sq()))
    assert quad_form(0.25 * s, v) == pytest.approx(0.25 * quad_form(s, v), rel=1e-12, abs=1e-300)
