import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from krylovlab.errors import InvalidArgument
from krylovlab.evolution import (
    autocorrelation_direct,
    autocorrelation_from_wavefunction,
    default_times,
    evolve_wavefunction,
    evolve_wavefunction_rk4,
    fit_exponential,
    fit_spectral_tail,
    k_complexity,
    otoc,
    spectral_function,
)
from krylovlab.krylov import lanczos
from krylovlab.models import build_lmg, eigendecompose

b_lists = st.lists(st.floats(0.05, 20), min_size=1, max_size=60)


@given(b_lists, st.floats(-30, 30))
def test_unitarity(b, t):
    w = evolve_wavefunction(b, [0.0, t])
    assert np.allclose(w.total_probability(), 1.0, atol=1e-8)
    assert np.allclose(w.amplitudes[0], np.eye(len(b) + 1)[0])


@given(b_lists, st.lists(st.floats(-3, 3), min_size=61, max_size=61), st.floats(0, 20))
def test_unitarity_with_diagonal(b, a, t):
    w = evolve_wavefunction(b, [t], np.array(a[: len(b) + 1]))
    assert np.allclose(w.total_probability(), 1.0, atol=1e-8)


@given(b_lists, st.floats(0.01, 10))
def test_time_reversal(b, t):
    w = evolve_wavefunction(b, [-t, t])
    sign = (-1.0) ** np.arange(len(b) + 1)
    assert np.allclose(w.amplitudes[0], sign * w.amplitudes[1], atol=1e-10)


def test_linear_growth_closed_form():
    # b_n = alpha n gives phi_0 = sech(alpha t) and K = sinh^2(alpha t)
    alpha = 0.7
    b = alpha * np.arange(1, 401)
    t = np.linspace(0, 3, 61)
    w = evolve_wavefunction(b, t)
    assert np.allclose(autocorrelation_from_wavefunction(w), 1 / np.cosh(alpha * t), atol=1e-10)
    assert np.allclose(k_complexity(w).K, np.sinh(alpha * t) ** 2, rtol=1e-8, atol=1e-12)


def test_rk4_matches_exact():
    rng = np.random.default_rng(7)
    b = np.sort(rng.uniform(0.5, 5, 40))
    t = np.linspace(0, 5, 26)
    exact = evolve_wavefunction(b, t).amplitudes
    rk = evolve_wavefunction_rk4(b, t).amplitudes
    assert np.max(np.abs(exact - rk)) < 1e-8
    assert np.allclose(evolve_wavefunction_rk4(b, t).total_probability(), 1, atol=1e-8)


def test_k_complexity_starts_at_zero():
    w = evolve_wavefunction([1.0, 2.0, 3.0], default_times(5, 11))
    assert k_complexity(w).K[0] == 0


def test_dual_path_autocorrelation_S25():
    m = build_lmg(25, 2.0, precision=256)
    sd = eigendecompose(m.H_tilde)
    out = lanczos(m.H_tilde, m.seed("z"), spectral=sd)
    t = default_times(20, 401)
    C1 = autocorrelation_from_wavefunction(evolve_wavefunction(out.b, t))
    C2 = autocorrelation_direct(sd, m.seed("z"), None, t)
    assert np.max(np.abs(C1 - C2)) < 1e-6


def test_otoc_against_matrix_exponential():
    m = build_lmg(4, 2.0)
    sd = eigendecompose(m.H_tilde)
    z = m.seed("z")
    t = np.array([0.0, 0.3, 1.1, 2.5])
    got = otoc(sd, z, m.hbar_eff, t).values
    ref = []
    for tk in t:
        U = expm(1j * m.H_tilde * tk)
        Zt = U @ z @ U.conj().T
        C = Zt @ z - z @ Zt
        ref.append(np.trace(C @ C.conj().T).real / m.dim / m.hbar_eff**2)
    assert np.allclose(got, ref, rtol=1e-10, atol=1e-14)
    assert got[0] == 0


def test_otoc_non_negative():
    m = build_lmg(8, 2.0)
    v = otoc(eigendecompose(m.H_tilde), m.seed("z"), m.hbar_eff, default_times(10, 101)).values
    assert np.all(v >= -1e-10)


def test_otoc_rejects_bad_hbar():
    m = build_lmg(2, 1.0)
    with pytest.raises(InvalidArgument):
        otoc(eigendecompose(m.H_tilde), m.seed("z"), 0.0, [0.0])


@given(st.floats(-3, 3), st.floats(-2, 2))
def test_fit_exponential_exact(lam, c):
    t = np.linspace(0, 2, 21)
    fit = fit_exponential(t, np.exp(lam * t + c), (0.5, 1.5))
    assert fit.lam == pytest.approx(lam, abs=1e-10)
    assert fit.intercept == pytest.approx(c, abs=1e-9)
    assert fit.r2 == pytest.approx(1.0)


def test_fit_exponential_errors():
    t = np.linspace(0, 2, 21)
    with pytest.raises(InvalidArgument):
        fit_exponential(t, t - 1, (0, 2))
    with pytest.raises(InvalidArgument):
        fit_exponential(t, np.exp(t), (1, 5))


def test_sech_spectral_tail():
    alpha = 1.3
    t = np.linspace(0, 40, 8001)
    sf = spectral_function(t, 1 / np.cosh(alpha * t), np.linspace(0, 12, 241))
    assert not sf.windowed
    rate = fit_spectral_tail(sf, (3, 10))
    assert rate == pytest.approx(np.pi / (2 * alpha), rel=0.05)


def test_spectral_function_symmetric_grid_and_pulse():
    t = np.linspace(-20, 20, 4001)
    sigma = 0.05
    pulse = np.exp(-(t**2) / (2 * sigma**2))
    sf = spectral_function(t, pulse, np.linspace(0, 20, 41))
    # narrow Gaussian pulse: nearly flat transform sqrt(2 pi) sigma exp(-w^2 sigma^2 / 2)
    exact = np.sqrt(2 * np.pi) * sigma * np.exp(-(sf.frequencies**2) * sigma**2 / 2)
    assert np.allclose(sf.values, exact, rtol=1e-6)
    assert sf.values[-1] > 0.6 * sf.values[0]
    half = spectral_function(t[2000:], pulse[2000:], np.linspace(0, 20, 41))
    assert np.allclose(half.values, sf.values, rtol=1e-10)


def test_spectral_function_windowing_and_errors():
    t = np.linspace(0, 10, 101)
    assert spectral_function(t, np.cos(t)).windowed
    with pytest.raises(InvalidArgument):
        spectral_function(t**2, np.ones_like(t))
    with pytest.raises(InvalidArgument):
        spectral_function(t + 1, np.ones_like(t))


def test_bad_inputs():
    with pytest.raises(InvalidArgument):
        evolve_wavefunction([1.0, -1.0], [0.0])
    with pytest.raises(InvalidArgument):
        evolve_wavefunction_rk4([1.0], [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        evolve_wavefunction([1.0], [0.0, np.nan])
