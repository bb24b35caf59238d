"""Time-domain quantities: Krylov-chain wavefunctions, K-complexity, auto-correlation, OTOC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .krylov import InnerProductSpec, seed_in_eigenbasis
from .models import SpectralDecomposition
from .spin_algebra import DenseOperator, check_operator


def default_times(t_max: float = 20.0, points: int = 2001) -> np.ndarray:
    return np.linspace(0.0, t_max, points)


def _check_times(times, start_at_zero=True):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
        raise InvalidArgument("times must be a nonempty finite 1-d grid")
    if np.any(np.diff(t) <= 0):
        raise InvalidArgument("times must be strictly ascending")
    if start_at_zero and t[0] != 0:
        raise InvalidArgument("time grid must start at t = 0")
    return t


@dataclass(frozen=True)
class KrylovWavefunction:
    """Amplitudes phi_n(t); ``amplitudes[k, n]`` is phi_n at ``times[k]``."""

    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def krylov_dim(self) -> int:
        return self.amplitudes.shape[1]

    def total_probability(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)


@dataclass(frozen=True)
class ComplexityCurve:
    times: np.ndarray
    K: np.ndarray


@dataclass(frozen=True)
class OtocCurve:
    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class ExponentFit:
    lam: float
    window: tuple
    r2: float
    method: str = "log-linear least squares"
    intercept: float = 0.0


@dataclass(frozen=True)
class SpectralFunction:
    frequencies: np.ndarray
    values: np.ndarray
    windowed: bool = False


def _hopping_matrix(b, a=None) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise InvalidArgument("Lanczos coefficients must be a finite positive sequence")
    T = np.zeros((b.size + 1, b.size + 1))
    idx = np.arange(b.size)
    T[idx, idx + 1] = b
    T[idx + 1, idx] = b
    if a is not None:
        a = np.asarray(a, dtype=float)
        if a.shape != (b.size + 1,):
            raise InvalidArgument("diagonal coefficients need one entry per Krylov vector")
        T[np.arange(b.size + 1), np.arange(b.size + 1)] = a
    return T


def evolve_wavefunction(b, times, a=None) -> KrylovWavefunction:
    """Solve d(phi_n)/dt = b_n phi_{n-1} - b_{n+1} phi_{n+1} with phi_n(0) = delta_n0.

    With psi_n = i^n phi_n the chain becomes d(psi)/dt = i T psi for the real
    symmetric tridiagonal T built from b, so the solution is exact through the
    eigendecomposition of T. Negative times are allowed.

    Optional diagonal coefficients ``a`` (one per Krylov vector, as produced by
    a microcanonical run) enter the diagonal of T; the amplitudes are then
    complex and phi_0(t) is the full complex auto-correlation.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
        raise InvalidArgument("times must be a nonempty finite 1-d grid")
    b = np.asarray(b, dtype=float)
    if a is not None and not np.any(a):
        a = None
    if b.size == 0:
        if a is None:
            return KrylovWavefunction(t, np.ones((t.size, 1)))
        return KrylovWavefunction(t, np.exp(1j * a[0] * t)[:, None])
    theta, U = np.linalg.eigh(_hopping_matrix(b, a))
    phases = np.exp(1j * np.outer(t, theta)) * U[0][None, :]
    psi = phases @ U.T
    n = np.arange(b.size + 1)
    phi = psi * (1j) ** (-(n % 4))[None, :]
    # t = 0 is the initial condition itself; keep it free of eigh roundoff
    phi[t == 0] = np.eye(1, b.size + 1)[0]
    return KrylovWavefunction(t, phi if a is not None else phi.real)


def evolve_wavefunction_rk4(b, times, h: float | None = None) -> KrylovWavefunction:
    """Classic fourth-order Runge-Kutta on the same chain; a cross-check of the exact path.

    The step is at most 0.1 / max(b) and is shrunk so that every grid point is hit.
    """
    t = _check_times(times)
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        return KrylovWavefunction(t, np.ones((t.size, 1)))
    _hopping_matrix(b)
    hmax = 0.1 / b.max() if h is None else min(h, 0.1 / b.max())
    up = np.concatenate([b, [0.0]])
    down = np.concatenate([[0.0], b])

    def rhs(p):
        out = -up * np.concatenate([p[1:], [0.0]])
        out += down * np.concatenate([[0.0], p[:-1]])
        return out

    phi = np.zeros(b.size + 1)
    phi[0] = 1.0
    out = np.empty((t.size, b.size + 1))
    out[0] = phi
    for k in range(1, t.size):
        span = t[k] - t[k - 1]
        steps = int(np.ceil(span / hmax))
        dt = span / steps
        for _ in range(steps):
            k1 = rhs(phi)
            k2 = rhs(phi + 0.5 * dt * k1)
            k3 = rhs(phi + 0.5 * dt * k2)
            k4 = rhs(phi + dt * k3)
            phi = phi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k] = phi
    return KrylovWavefunction(t, out)


def k_complexity(w: KrylovWavefunction) -> ComplexityCurve:
    n = np.arange(w.krylov_dim)
    return ComplexityCurve(w.times, np.abs(w.amplitudes) ** 2 @ n)


def autocorrelation_from_wavefunction(w: KrylovWavefunction) -> np.ndarray:
    """C(t) = phi_0(t) (complex when the chain carried diagonal coefficients)."""
    return w.amplitudes[:, 0].copy()


def autocorrelation_direct(
    eigen: SpectralDecomposition,
    O: DenseOperator,
    inner: InnerProductSpec | None,
    times,
) -> np.ndarray:
    """(O|O(t)) / (O|O) with O(t) = exp(i H t) O exp(-i H t) from the eigenphases of ``eigen``.

    ``eigen`` must decompose the generator of the dynamics (H_tilde).
    """
    check_operator(O, "O")
    t = np.asarray(times, dtype=float)
    inner = inner or InnerProductSpec()
    X = seed_in_eigenbasis(eigen, O, floor=0.0)
    w = inner.column_weights(eigen.dim)
    weight = np.abs(X) ** 2 * w[None, :]
    mask = weight > 0
    norm = weight[mask].sum()
    if norm == 0:
        raise InvalidArgument("operator has zero norm under this inner product")
    omega = (eigen.values[:, None] - eigen.values[None, :])[mask]
    p = weight[mask] / norm
    out = np.empty(t.size, dtype=complex)
    # chunk to keep the (times x support) phase table small
    step = max(1, 2_000_000 // max(1, omega.size))
    for s in range(0, t.size, step):
        out[s : s + step] = np.exp(1j * np.outer(t[s : s + step], omega)) @ p
    return out


def otoc(eigen: SpectralDecomposition, O: DenseOperator, hbar_eff: float, times) -> OtocCurve:
    """(1/hbar^2) Tr([O(t), O][O(t), O]^dagger) / D with O(t) from the eigenphases of H_tilde."""
    check_operator(O, "O")
    if not hbar_eff > 0:
        raise InvalidArgument("hbar_eff must be positive")
    t = np.asarray(times, dtype=float)
    X = seed_in_eigenbasis(eigen, O, floor=0.0)
    D = eigen.dim
    vals = np.empty(t.size)
    for k, tk in enumerate(t):
        ph = np.exp(1j * eigen.values * tk)
        Xt = ph[:, None] * X * ph.conj()[None, :]
        C = Xt @ X - X @ Xt
        vals[k] = np.vdot(C, C).real / D
    return OtocCurve(t, vals / hbar_eff**2)


def fit_exponential(times, values, window) -> ExponentFit:
    """Least-squares fit of ln(values) = lam * t + c over ``lo <= t <= hi``."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    lo, hi = (float(x) for x in window)
    if t.shape != v.shape:
        raise InvalidArgument("times and values differ in length")
    if lo < t.min() - 1e-12 or hi > t.max() + 1e-12 or hi <= lo:
        raise InvalidArgument(f"fit window [{lo}, {hi}] lies outside the data range")
    sel = (t >= lo) & (t <= hi)
    if sel.sum() < 2:
        raise InvalidArgument("fit window holds fewer than two samples")
    if np.any(v[sel] <= 0):
        raise InvalidArgument("exponential fit needs strictly positive values in the window")
    y = np.log(v[sel])
    lam, c = np.polyfit(t[sel], y, 1)
    ss_res = np.sum((lam * t[sel] + c - y) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    # a flat curve has no variance to explain; report a perfect fit
    flat = ss_tot <= 1e-24 * max(1.0, float(np.sum(y * y)))
    r2 = 1.0 if flat else 1.0 - ss_res / ss_tot
    return ExponentFit(float(lam), (lo, hi), float(r2), intercept=float(c))


def spectral_function(times, C, frequencies=None) -> SpectralFunction:
    """Fourier transform of an even auto-correlation sampled on a uniform grid.

    ``times`` is either a half grid starting at 0 (C is extended as an even
    function) or a grid symmetric about 0. Trapezoidal weights are used; when
    |C| at the grid ends exceeds 1e-3 a Hann taper is applied first.
    """
    t = np.asarray(times, dtype=float)
    c = np.asarray(C)
    if t.ndim != 1 or t.size < 3 or c.shape != t.shape:
        raise InvalidArgument("spectral function needs matching 1-d grids of at least 3 points")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * abs(dt[0]) or dt[0] <= 0:
        raise InvalidArgument("spectral function needs a uniform ascending time grid")
    if abs(t[0]) <= 1e-12 * dt[0]:
        t = np.concatenate([-t[:0:-1], t])
        c = np.concatenate([np.conj(c[:0:-1]), c])
    elif abs(t[0] + t[-1]) > 1e-9 * dt[0]:
        raise InvalidArgument("time grid must start at 0 or be symmetric about 0")
    T = t[-1]
    windowed = bool(max(abs(c[0]), abs(c[-1])) > 1e-3)
    if windowed:
        c = c * np.cos(np.pi * t / (2 * T)) ** 2
    wts = np.full(t.size, dt[0])
    wts[[0, -1]] *= 0.5
    if frequencies is None:
        frequencies = np.linspace(0.0, np.pi / dt[0], 1025)
    f = np.asarray(frequencies, dtype=float)
    vals = np.empty(f.size, dtype=complex)
    step = max(1, 2_000_000 // t.size)
    for s in range(0, f.size, step):
        vals[s : s + step] = np.exp(-1j * np.outer(f[s : s + step], t)) @ (wts * c)
    return SpectralFunction(f, vals.real, windowed)


def fit_spectral_tail(sf: SpectralFunction, window) -> float:
    """Decay rate r of C~(w) ~ exp(-r |w|) fitted over ``window`` in frequency."""
    fit = fit_exponential(np.abs(sf.frequencies), np.abs(sf.values), window)
    return -fit.lam
