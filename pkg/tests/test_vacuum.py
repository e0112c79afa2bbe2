import math

import numpy as np
import pytest

from plasmavac import linalg, vacuum
from plasmavac.errors import InvertibilityError, NuRangeError
from plasmavac.geometry import FrontDerivs
from plasmavac.suites import sample_derivs, sample_eps, sample_nu


@pytest.fixture
def rng():
    return np.random.default_rng(5)


def test_maxwell_matrices_symmetric():
    for B in vacuum.assemble_B():
        assert linalg.is_symmetric(B)
        assert linalg.sym_eigvals(B).tolist() == pytest.approx([-1, -1, 0, 0, 1, 1])


def test_frak_b0_spectrum_example():
    nu = [0.3, 0.4, 0.0]
    fam = vacuum.assemble_secondary(nu)
    assert linalg.sym_eigvals(fam.B[0]) == pytest.approx([0.5, 0.5, 1, 1, 1.5, 1.5])
    assert vacuum.positivity_frak_B0(nu) == pytest.approx(0.5)


def test_nu_range_gate():
    with pytest.raises(NuRangeError):
        vacuum.assemble_secondary([0.6, 0.8, 0.0])


def test_augmentation_identity(rng):
    for _ in range(20):
        fam = vacuum.assemble_secondary(sample_nu(rng))
        for j in (1, 2, 3):
            assert np.allclose(fam.B[j], vacuum.augmentation_rhs(fam, j), atol=1e-14)


def test_det_flat_example():
    nu = [0.5, 0.0, 0.0]
    assert vacuum.det_frak_B1_flat(nu) == pytest.approx(0.25 * 0.75**2)
    fam = vacuum.assemble_secondary(nu)
    assert linalg.det(fam.B[1]) == pytest.approx(vacuum.det_frak_B1_flat(nu))


def test_det_curved(rng):
    for _ in range(50):
        eps = sample_eps(rng)
        f, d = vacuum.det_frak_B1_curved(sample_nu(rng), sample_derivs(rng, eps), eps)
        assert abs(f - d) <= 1e-10 * max(1.0, abs(f))


def test_B0_cubic(rng):
    for _ in range(50):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        B0 = vacuum.assemble_B0(d, eps)
        assert linalg.asymmetry(B0) < 1e-12
        c = vacuum.b0_cubic(d, eps)
        scaled = vacuum.b0_scale(d, eps) * B0
        got = linalg.char_poly(0.5 * (scaled + scaled.T))
        assert np.allclose(got, np.polynomial.polynomial.polymul(c, c), rtol=1e-9, atol=1e-9)


def test_B0_is_identity_for_flat_front():
    assert np.allclose(vacuum.assemble_B0(FrontDerivs(0, 0, 0, 0), 0.5), np.eye(6))


def test_B4_matches_finite_difference():
    def at(t):
        return FrontDerivs(0.2 * math.sin(t), 0.1 * t, 0.3 * math.cos(t), -0.2 * t * t)

    def dt_at(t):
        return FrontDerivs(0.2 * math.cos(t), 0.1, -0.3 * math.sin(t), -0.4 * t)

    _, B4 = vacuum.assemble_B0_B4(at(0.4), dt_at(0.4), 0.6)
    assert np.allclose(B4, vacuum.b4_finite_difference(at, 0.4, 0.6), atol=1e-8)


def test_M_family(rng):
    for _ in range(30):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        nu = sample_nu(rng)
        fam = vacuum.assemble_M(nu, d, eps)
        for M in fam.M + fam.Mg:
            assert linalg.asymmetry(M) < 1e-10 * max(1.0, np.abs(M).max())
        flat = d._replace(x1=0.0)
        assert np.allclose(vacuum.m1_block_form(nu, flat, eps), vacuum.assemble_M(nu, flat, eps).M[1], atol=1e-10)
    with pytest.raises(ValueError):
        vacuum.m1_block_form([0.1, 0, 0], FrontDerivs(0, 0.2, 0, 0), 0.5)


def test_quadratic_form_M1(rng):
    for _ in range(30):
        closed, direct = vacuum.quadratic_form_M1(rng.normal(size=6), 0.1, -0.2, 0.3, 0.4, -0.1, 0.5)
        assert closed == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_invertibility_gate():
    with pytest.raises(InvertibilityError):
        vacuum.assemble_B0(FrontDerivs(2.0, 0, 0, 0), 0.5)


def test_order_fit():
    hs = [0.1, 0.05, 0.025]
    assert vacuum.order_fit(hs, [h**2 for h in hs]) == pytest.approx(2.0)
