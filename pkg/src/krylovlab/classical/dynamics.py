"""Classical LMG and FP trajectories on unit spheres, fixed points and their linearization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import InvalidArgument

SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """``states[k]`` is the phase-space point (or batch of points) at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray


@dataclass(frozen=True)
class SaddlePoint:
    coords: tuple
    jacobian_eigenvalues: np.ndarray
    omega_saddle: float
    label: str = ""


def lmg_energy(state, J: float):
    s = np.asarray(state, dtype=float)
    return s[..., 0] + J * s[..., 2] ** 2


def fp_energy(state, c: float):
    s = np.asarray(state, dtype=float)
    return (1 + c) * (s[..., 0] + s[..., 3]) + 4 * (1 - c) * s[..., 2] * s[..., 5]


def lmg_rhs(state, J: float):
    x, y, z = state[..., 0], state[..., 1], state[..., 2]
    return np.stack([-2 * J * y * z, -z + 2 * J * x * z, y], axis=-1)


def fp_rhs(state, c: float):
    x1, y1, z1, x2, y2, z2 = (state[..., i] for i in range(6))
    k = 4 * (1 - c)
    return np.stack(
        [
            -k * y1 * z2,
            -(1 + c) * z1 + k * x1 * z2,
            (1 + c) * y1,
            -k * y2 * z1,
            -(1 + c) * z2 + k * x2 * z1,
            (1 + c) * y2,
        ],
        axis=-1,
    )


def _check_sphere(state, width: int) -> np.ndarray:
    s = np.asarray(state, dtype=float)
    if s.shape[-1] != width or s.ndim > 2 or not np.all(np.isfinite(s)):
        raise InvalidArgument(f"state must have {width} finite components (or be an (N, {width}) batch)")
    r2 = np.sum(s.reshape(s.shape[:-1] + (width // 3, 3)) ** 2, axis=-1)
    if np.any(np.abs(r2 - 1) > SPHERE_TOL):
        raise InvalidArgument("initial state is off the unit sphere")
    return s


def _integrate(rhs, s0, width, t_end, t_eval, rtol, atol):
    if not (np.isfinite(t_end) and t_end > 0):
        raise InvalidArgument("t_end must be positive and finite")
    batch = s0.reshape(-1, width)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 1001)

    def f(_t, y):
        return rhs(y.reshape(-1, width)).ravel()

    # all initial states are advanced together as one stacked system
    sol = solve_ivp(f, (0.0, t_end), batch.ravel(), method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    states = sol.y.T.reshape((len(sol.t),) + s0.shape)
    return Trajectory(sol.t, states)


def integrate_lmg(state0, J: float, t_end: float, t_eval=None, rtol=1e-13, atol=1e-14) -> Trajectory:
    """Integrate x' = -2Jyz, y' = -z + 2Jxz, z' = y with DOP853.

    ``state0`` is a point (3,) or a batch (N, 3). No projection back onto the
    sphere is applied, so constraint drift stays visible as a diagnostic.
    """
    s0 = _check_sphere(state0, 3)
    return _integrate(lambda y: lmg_rhs(y, J), s0, 3, t_end, t_eval, rtol, atol)


def integrate_fp(state0, c: float, t_end: float, t_eval=None, rtol=1e-13, atol=1e-14) -> Trajectory:
    """Integrate the two-top FP equations; ``state0`` is (x1, y1, z1, x2, y2, z2) or a batch."""
    if not (np.isfinite(c) and -1 <= c <= 1):
        raise InvalidArgument("c must lie in [-1, 1]")
    s0 = _check_sphere(state0, 6)
    return _integrate(lambda y: fp_rhs(y, c), s0, 6, t_end, t_eval, rtol, atol)


def random_sphere_points(n: int, spheres: int = 1, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    v = rng.normal(size=(n, spheres, 3))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return v.reshape(n, 3 * spheres)


def lmg_jacobian(state, J: float) -> np.ndarray:
    x, y, z = state
    return np.array(
        [
            [0.0, -2 * J * z, -2 * J * y],
            [2 * J * z, 0.0, 2 * J * x - 1],
            [0.0, 1.0, 0.0],
        ]
    )


def fp_jacobian(state, c: float) -> np.ndarray:
    x1, y1, z1, x2, y2, z2 = state
    k = 4 * (1 - c)
    a = 1 + c
    return np.array(
        [
            [0, -k * z2, 0, 0, 0, -k * y1],
            [k * z2, 0, -a, 0, 0, k * x1],
            [0, a, 0, 0, 0, 0],
            [0, 0, -k * y2, 0, -k * z1, 0],
            [0, 0, k * x2, k * z1, 0, -a],
            [0, 0, 0, 0, a, 0],
        ],
        dtype=float,
    )


def _saddle(coords, jac, label):
    ev = np.linalg.eigvals(jac)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    omega = float(max(0.0, np.max(ev.real)))
    return SaddlePoint(tuple(float(v) for v in coords), ev, omega, label)


def find_saddles_lmg(J: float) -> list[SaddlePoint]:
    """Fixed points of the LMG flow with their Jacobian spectra.

    (+-1, 0, 0) always exist; the pair (1/2J, 0, +-sqrt(1 - 1/4J^2)) exists for |J| >= 1/2.
    """
    if not np.isfinite(J):
        raise InvalidArgument("J must be finite")
    pts = [((1.0, 0.0, 0.0), "x=+1"), ((-1.0, 0.0, 0.0), "x=-1")]
    if abs(J) > 0.5:
        x0 = 1 / (2 * J)
        z0 = np.sqrt(1 - x0 * x0)
        pts += [((x0, 0.0, z0), "z>0"), ((x0, 0.0, -z0), "z<0")]
    return [_saddle(p, lmg_jacobian(p, J), label) for p, label in pts]


def find_saddles_fp(c: float) -> list[SaddlePoint]:
    """Fixed points of the two-top flow with their Jacobian spectra.

    The first four have each top at (+-1, 0, 0); (+1, +1) is the unstable saddle.
    For c < 3/5 the tilted points x1 = x2 = +-a, z1 = +-z2 with
    a = (1+c) / (4(1-c)) follow; their spectra are purely imaginary.
    """
    if not (np.isfinite(c) and -1 <= c <= 1):
        raise InvalidArgument("c must lie in [-1, 1]")
    out = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            p = (s1, 0.0, 0.0, s2, 0.0, 0.0)
            out.append(_saddle(p, fp_jacobian(p, c), f"x1={s1:+.0f},x2={s2:+.0f}"))
    if c < 0.6:
        a = (1 + c) / (4 * (1 - c))
        h = np.sqrt(1 - a * a)
        for x, z1, z2 in ((a, h, h), (a, -h, -h), (-a, h, -h), (-a, -h, h)):
            p = (x, 0.0, z1, x, 0.0, z2)
            out.append(_saddle(p, fp_jacobian(p, c), f"tilted x={x:+.3g},z1={z1:+.3g},z2={z2:+.3g}"))
    return out


def fp_gamma_point(c: float, gamma: float) -> tuple[SaddlePoint, float]:
    """Classify the point x1 = a gamma, x2 = a / gamma (y = 0, z > 0) with a = (1+c) / (4(1-c)).

    Returns the point with its Jacobian spectrum and the residual max |dX/dt|
    there. The residual vanishes only at gamma = 1, so this one-parameter set
    holds a single fixed point.
    """
    if not (np.isfinite(c) and -1 < c < 1):
        raise InvalidArgument("c must lie in the open interval (-1, 1)")
    a = (1 + c) / (4 * (1 - c))
    if not (np.isfinite(gamma) and a <= gamma <= 1 / a):
        raise InvalidArgument(f"gamma must lie in [{a:.6g}, {1 / a:.6g}]")
    x1, x2 = a * gamma, a / gamma
    p = (x1, 0.0, np.sqrt(max(0.0, 1 - x1 * x1)), x2, 0.0, np.sqrt(max(0.0, 1 - x2 * x2)))
    residual = float(np.max(np.abs(fp_rhs(np.array(p), c))))
    return _saddle(p, fp_jacobian(p, c), f"gamma={gamma:.6g}"), residual


def fp_saddle_exponent(c: float) -> float:
    """omega(c) = sqrt((1+c)(3-5c)) on [-1, 3/5], zero beyond."""
    if not (np.isfinite(c) and -1 <= c <= 1):
        raise InvalidArgument("c must lie in [-1, 1]")
    if c > 0.6:
        return 0.0
    return float(np.sqrt(max(0.0, (1 + c) * (3 - 5 * c))))
