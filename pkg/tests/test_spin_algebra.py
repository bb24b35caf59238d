from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krylovlab import _mp
from krylovlab.errors import InvalidArgument
from krylovlab.spin_algebra import (
    as_spin,
    build_spin_triple,
    commutator,
    hs_inner,
    identity,
    is_hermitian,
    tensor_product,
)

spins = st.integers(min_value=1, max_value=40).map(lambda k: Fraction(k, 2))


@given(spins)
def test_su2_algebra(S):
    t = build_spin_triple(S)
    h = t.hbar_eff
    assert np.allclose(commutator(t.x_hat, t.y_hat), 1j * h * t.z_hat, atol=1e-12)
    assert np.allclose(commutator(t.y_hat, t.z_hat), 1j * h * t.x_hat, atol=1e-12)
    assert np.allclose(commutator(t.z_hat, t.x_hat), 1j * h * t.y_hat, atol=1e-12)


@given(spins)
def test_casimir(S):
    t = build_spin_triple(S)
    cas = t.x_hat @ t.x_hat + (t.y_hat @ t.y_hat).real + t.z_hat @ t.z_hat
    assert np.allclose(cas, (1 + 1 / float(S)) * np.eye(t.dim), atol=1e-12)


@given(spins)
def test_hermitian_and_spectrum(S):
    t = build_spin_triple(S)
    for A in (t.x_hat, t.y_hat, t.z_hat):
        assert is_hermitian(A)
        ev = np.linalg.eigvalsh(A)
        assert np.allclose(ev, np.arange(-float(S), float(S) + 1) / float(S), atol=1e-12)


def test_z_diagonal_descending():
    t = build_spin_triple(2)
    assert np.allclose(np.diag(t.z_hat), [1, 0.5, 0, -0.5, -1])


@pytest.mark.parametrize("S", [Fraction(1, 2), 3, Fraction(7, 2)])
def test_multiprecision_matches_float(S):
    f = build_spin_triple(S)
    m = build_spin_triple(S, precision=256)
    assert _mp.precision_of(m.x_hat) == 256
    assert np.allclose(_mp.to_float(m.x_hat), f.x_hat, atol=1e-15)
    assert np.allclose(_mp.to_float(m.z_hat), f.z_hat, atol=1e-15)
    assert np.allclose(_mp.to_float(m.y_hat), f.y_hat, atol=1e-15)


@pytest.mark.parametrize("bad", [0, -1, Fraction(1, 3), 0.3, float("nan"), "x", None])
def test_invalid_spin(bad):
    with pytest.raises(InvalidArgument):
        as_spin(bad)


def test_spin_parsing():
    assert as_spin(2.5) == Fraction(5, 2)
    assert as_spin("3/2") == Fraction(3, 2)


@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_hs_inner_properties(D, seed):
    rng = np.random.default_rng(seed)
    A, B, C = (rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D)) for _ in range(3))
    a = complex(rng.normal(), rng.normal())
    assert np.isclose(hs_inner(A, B), np.conj(hs_inner(B, A)))
    assert np.isclose(hs_inner(A, a * B + C), a * hs_inner(A, B) + hs_inner(A, C))
    assert hs_inner(A, A).real > 0
    assert np.allclose(commutator(A, B), -commutator(B, A))
    assert np.isclose(hs_inner(identity(D), identity(D)), 1.0)


def test_tensor_product_and_errors():
    t = build_spin_triple(1)
    P = tensor_product(t.x_hat, identity(3))
    assert P.shape == (9, 9)
    assert np.allclose(commutator(P, tensor_product(identity(3), t.z_hat)), 0)
    with pytest.raises(InvalidArgument):
        commutator(np.eye(2), np.eye(3))
    with pytest.raises(InvalidArgument):
        hs_inner(np.ones(3), np.ones(3))
