"""Energy-resolved Lanczos slope alpha(E) of the classical LMG model.

The auto-correlation of z at energy E has its nearest singularity at imaginary
time sigma*, and alpha(E) = pi / (4 sigma*). sigma* has a closed form through the
complete elliptic integral K in the parameter convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvalidArgument

GOLDEN = (np.sqrt(5) - 1) / 2


def _agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = (a + b) / 2, np.sqrt(a * b)
    return (a + b) / 2


def elliptic_K(m: float) -> float:
    """K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta) for m < 1, via the AGM.

    Negative m is mapped through K(m) = K(m / (m - 1)) / sqrt(1 - m).
    """
    m = float(m)
    if np.isnan(m) or m >= 1:
        raise DomainError(f"elliptic K needs m < 1, got {m!r}")
    if m == -np.inf:
        return 0.0
    if m < 0:
        # m / (m - 1) lies in (0, 1); its complement 1 / (1 - m) is passed exactly
        return _K_complement(1 / (1 - m)) / np.sqrt(1 - m)
    return _K_complement(1 - m)


def _K_complement(mc: float) -> float:
    """K as a function of the complementary parameter 1 - m."""
    return np.pi / (2 * _agm(1.0, np.sqrt(mc)))


def energy_range(J: float) -> tuple[float, float]:
    """Open interval of classical energies x + J z^2 on the sphere (J > 0)."""
    if not (np.isfinite(J) and J > 0):
        raise InvalidArgument(f"coupling must be positive and finite, got {J!r}")
    return -1.0, (J + 1 / (4 * J)) if J >= 0.5 else 1.0


def _check_energy(E, J):
    lo, hi = energy_range(J)
    if not (np.isfinite(E) and lo < E < hi):
        raise DomainError(f"E = {float(E)!r} lies outside the open energy range ({lo}, {hi:.15g}) for J = {J}")


def elliptic_parameter(E: float, J: float) -> float:
    _check_energy(E, J)
    r = np.sqrt(4 * J * J - 4 * E * J + 1)
    return (1 - 2 * E * J + r) / (1 - 2 * E * J - r)


def sigma_star(E: float, J: float) -> float:
    """Imaginary-time distance of the nearest singularity of z(t) at energy E."""
    m = elliptic_parameter(E, J)
    r = np.sqrt(4 * J * J - 4 * E * J + 1)
    return np.sqrt(2) * elliptic_K(m) / np.sqrt(r + 2 * E * J - 1)


def alpha_of_E(E: float, J: float) -> float:
    return np.pi / (4 * sigma_star(E, J))


@dataclass(frozen=True)
class MicrocanonicalAlphaCurve:
    J: float
    energies: np.ndarray
    alpha: np.ndarray
    sigma_star: np.ndarray

    @property
    def tau_star(self) -> np.ndarray:
        return 2 * self.sigma_star


def alpha_curve(J: float, energies) -> MicrocanonicalAlphaCurve:
    E = np.asarray(energies, dtype=float)
    sig = np.array([sigma_star(e, J) for e in E])
    return MicrocanonicalAlphaCurve(float(J), E, np.pi / (4 * sig), sig)


def sup_alpha(J: float, eps: float = 1e-6, grid: int = 400, tol: float = 1e-12) -> tuple[float, float]:
    """(E*, alpha*) maximizing alpha_of_E over (E_min + eps, E_max - eps).

    A coarse grid brackets the maximum, then golden-section search refines it.
    """
    lo, hi = energy_range(J)
    lo, hi = lo + eps, hi - eps
    Es = np.linspace(lo, hi, grid)
    vals = np.array([alpha_of_E(e, J) for e in Es])
    k = int(np.argmax(vals))
    a, b = Es[max(k - 1, 0)], Es[min(k + 1, grid - 1)]
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = alpha_of_E(c, J), alpha_of_E(d, J)
    while b - a > tol * max(1.0, abs(a)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = alpha_of_E(c, J)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = alpha_of_E(d, J)
    E_star = (a + b) / 2
    best = alpha_of_E(E_star, J)
    if vals[k] > best:
        return float(Es[k]), float(vals[k])
    return float(E_star), float(best)


def fp_coupling_map(c: float) -> float:
    """LMG coupling J = 2(1-c)/(1+c) of the equal-spin FP submanifold."""
    if not (np.isfinite(c) and -1 < c < 1):
        raise DomainError(f"c must lie in the open interval (-1, 1), got {float(c)!r}")
    return 2 * (1 - c) / (1 + c)


def fp_lower_bound_alpha(c: float) -> float:
    """2(1+c) * sup_E alpha_LMG(E; J = 2(1-c)/(1+c))."""
    J = fp_coupling_map(c)
    return 2 * (1 + c) * sup_alpha(J)[1]
