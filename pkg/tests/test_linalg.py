import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from plasmavac import linalg
from plasmavac.errors import AsymmetryError, ShapeError, SingularMatrixError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def sym_matrices(draw):
    n = draw(st.integers(1, 8))
    a = draw(arrays(float, (n, n), elements=finite))
    return a + a.T


@settings(max_examples=150, deadline=None)
@given(sym_matrices())
def test_jacobi_matches_reference(s):
    w, V = linalg.sym_eigen(s)
    scale = max(1.0, np.abs(s).max())
    assert np.allclose(w, np.linalg.eigvalsh(s), atol=1e-11 * scale)
    assert np.allclose(s @ V, V * w, atol=1e-10 * scale)
    assert np.allclose(V.T @ V, np.eye(len(w)), atol=1e-12)


def test_jacobi_handles_degenerate_and_tiny_offdiagonal():
    w = linalg.sym_eigvals(np.ones((6, 6)))
    assert np.allclose(w, [0, 0, 0, 0, 0, 6], atol=1e-14)
    d = np.diag([1.0, 2.0, 3.0]) + 1e-200 * np.ones((3, 3))
    assert np.allclose(linalg.sym_eigvals(d), [1, 2, 3])
    assert np.array_equal(linalg.sym_eigvals(np.zeros((4, 4))), np.zeros(4))


def test_jacobi_rejects_asymmetric():
    with pytest.raises(AsymmetryError):
        linalg.sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_shape_checks():
    with pytest.raises(ShapeError):
        linalg.det(np.ones((2, 3)))
    with pytest.raises(ShapeError):
        linalg.det(np.eye(9))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: arrays(float, (n, n), elements=finite)))
def test_det_matches_reference(a):
    ref = np.linalg.det(a)
    assert abs(linalg.det(a) - ref) <= 1e-9 * max(1.0, abs(ref), np.abs(a).max() ** a.shape[0])


def test_solve_and_inverse():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    b = rng.normal(size=6)
    assert np.allclose(a @ linalg.solve(a, b), b)
    assert np.allclose(linalg.inverse(a) @ a, np.eye(6))
    with pytest.raises(SingularMatrixError):
        linalg.solve(np.ones((3, 3)), np.ones(3))


def test_char_poly_and_sign_changes():
    a = np.diag([1.0, 2.0, 3.0])
    # (t-1)(t-2)(t-3) = t^3 - 6 t^2 + 11 t - 6, ascending order
    assert np.allclose(linalg.char_poly(a), [-6, 11, -6, 1])
    assert linalg.sign_changes([-6, 11, -6, 1]) == 3
    assert linalg.sign_changes([1, 0, 1]) == 0


def test_signature_count():
    m = np.diag([-2.0, 0.0, 0.0, 1.0, 3.0])
    assert linalg.signature_count(m) == (1, 2, 2)
