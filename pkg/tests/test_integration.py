"""Cross-module consistency at S = 75 and the installed entry points."""

import subprocess
import sys

import numpy as np
import pytest

from krylovlab import __version__
from krylovlab.evolution import evolve_wavefunction, fit_spectral_tail, spectral_function
from krylovlab.krylov import fit_linear_slope, lanczos


@pytest.fixture(scope="module")
def b75(lmg75):
    model, sd = lmg75
    return lanczos(model.H_tilde, model.seed("z"), max_n=600, spectral=sd).b


def test_spectral_tail_matches_lanczos_slope(b75):
    alpha = fit_linear_slope(b75, (2, 37)).alpha
    t = np.linspace(0, 20, 4001)
    C = evolve_wavefunction(b75, t).amplitudes[:, 0]
    sf = spectral_function(t, C, np.linspace(0, 12, 121))
    rate = fit_spectral_tail(sf, (3, 8))
    assert rate == pytest.approx(np.pi / (2 * alpha), rel=0.2)


def test_probability_conserved_on_long_chain(b75):
    w = evolve_wavefunction(b75, np.linspace(0, 20, 201))
    assert np.max(np.abs(w.total_probability() - 1)) <= 1e-8


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "krylovlab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == __version__
    res = subprocess.run([sys.executable, "-m", "krylovlab", "fp-bound", "--cmin", "2"], capture_output=True, text=True)
    assert res.returncode == 2
