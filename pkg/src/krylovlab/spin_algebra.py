"""Rescaled spin-S matrices and the operator-space primitives built on them.

Operators are plain square numpy arrays. With ``precision=None`` they are
float64/complex128; with ``precision=bits`` the real operators hold gmpy2
``mpfr`` entries (object dtype) so that downstream eigenvector work can keep
tiny matrix elements at full relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from . import _mp
from .errors import InvalidArgument

DenseOperator = np.ndarray


def as_spin(S) -> Fraction:
    """Validate a spin value and return it as an exact fraction (2S a positive integer)."""
    try:
        if isinstance(S, float):
            if not np.isfinite(S) or abs(2 * S - round(2 * S)) > 1e-12:
                raise ValueError
            S = Fraction(round(2 * S), 2)
        else:
            S = Fraction(S)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidArgument(f"spin must be a positive half-integer, got {S!r}") from exc
    if (2 * S).denominator != 1 or S <= 0:
        raise InvalidArgument(f"spin must be a positive half-integer, got {S!r}")
    return S


def check_operator(A: DenseOperator, name: str = "operator") -> DenseOperator:
    if not isinstance(A, np.ndarray) or A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidArgument(f"{name} must be a nonempty square matrix")
    return A


def is_hermitian(A: DenseOperator, tol: float = 1e-12) -> bool:
    Af = _mp.to_float(A)
    scale = float(np.max(np.abs(Af))) if Af.size else 0.0
    return float(np.max(np.abs(Af - Af.conj().T))) <= tol * max(scale, 1e-300)


def _same_dim(A, B):
    check_operator(A, "A")
    check_operator(B, "B")
    if A.shape != B.shape:
        raise InvalidArgument(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")


@dataclass(frozen=True)
class SpinTriple:
    spin: Fraction
    x_hat: DenseOperator
    y_hat: DenseOperator
    z_hat: DenseOperator
    hbar_eff: float

    @property
    def dim(self) -> int:
        return self.z_hat.shape[0]


def build_spin_triple(S, precision: int | None = None) -> SpinTriple:
    """Rescaled spin operators x = Sx/S, y = Sy/S, z = Sz/S in the |S, m> basis.

    ``z`` is diagonal with descending entries m/S. With ``precision`` set, ``x``
    and ``z`` carry mpfr entries and ``y`` carries mpc entries.
    """
    S = as_spin(S)
    D = int(2 * S) + 1
    ms = [S - k for k in range(D)]
    # <m+1|S+|m> = sqrt((S - m)(S + m + 1)); the product is an integer
    ladder = [(S - ms[k]) * (S + ms[k] + 1) for k in range(1, D)]
    if precision is None:
        sp = np.zeros((D, D))
        for k in range(1, D):
            sp[k - 1, k] = np.sqrt(float(ladder[k - 1]))
        s = float(S)
        x = (sp + sp.T) / (2 * s)
        y = (sp - sp.T) / (2j * s)
        z = np.diag([float(m) / s for m in ms])
        return SpinTriple(S, x, y, z, 1.0 / s)

    with _mp.working_precision(precision):
        two_s = gmpy2.mpfr(2 * S.numerator) / S.denominator
        x = _mp.mp_zeros((D, D))
        y = np.empty((D, D), dtype=object)
        y.fill(gmpy2.mpc(0))
        z = _mp.mp_zeros((D, D))
        for k in range(1, D):
            v = gmpy2.sqrt(gmpy2.mpfr(int(ladder[k - 1]))) / two_s
            x[k - 1, k] = v
            x[k, k - 1] = v
            y[k - 1, k] = gmpy2.mpc(0, -v)
            y[k, k - 1] = gmpy2.mpc(0, v)
        for k, m in enumerate(ms):
            q = m / S
            z[k, k] = gmpy2.mpfr(q.numerator) / q.denominator
    return SpinTriple(S, x, y, z, 1.0 / float(S))


def hs_inner(A: DenseOperator, B: DenseOperator) -> complex:
    """Infinite-temperature inner product Tr(A^dagger B) / D."""
    _same_dim(A, B)
    D = A.shape[0]
    if A.dtype == object or B.dtype == object:
        return np.sum(np.conj(A) * B) / D
    return np.vdot(A, B) / D


def commutator(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    _same_dim(A, B)
    return A @ B - B @ A


def tensor_product(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    check_operator(A, "A")
    check_operator(B, "B")
    return np.kron(A, B)


def identity(D: int, like: DenseOperator | None = None) -> DenseOperator:
    if like is not None and like.dtype == object:
        I = _mp.mp_zeros((D, D))
        for i in range(D):
            I[i, i] = gmpy2.mpfr(1)
        return I
    return np.eye(D)
