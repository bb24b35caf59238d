"""Quantum LMG and Feingold-Peres Hamiltonians and their spectral decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from . import _mp
from .errors import InvalidArgument
from .spin_algebra import (
    DenseOperator,
    SpinTriple,
    as_spin,
    build_spin_triple,
    check_operator,
    identity,
    is_hermitian,
    tensor_product,
)


def _scale(A: DenseOperator, k, precision: int | None) -> DenseOperator:
    if A.dtype == object:
        with _mp.working_precision(precision):
            return A * gmpy2.mpfr(k.numerator) / k.denominator
    return A * float(k)


@dataclass(frozen=True)
class LmgModel:
    """H = x + J z^2 in order-one units; ``H_tilde = S * H`` is the generator used for dynamics."""

    spin: Fraction
    coupling: float
    H: DenseOperator
    H_tilde: DenseOperator
    triple: SpinTriple = field(repr=False)
    precision: int | None = None

    @property
    def hbar_eff(self) -> float:
        return 1.0 / float(self.spin)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def seed(self, name: str) -> DenseOperator:
        try:
            return {"z": self.triple.z_hat, "x": self.triple.x_hat}[name]
        except KeyError:
            raise InvalidArgument(f"unknown LMG seed operator {name!r}; choose 'z' or 'x'") from None


@dataclass(frozen=True)
class FpModel:
    """H = (1+c)(x1 + x2) + 4(1-c) z1 z2 on two spin-s sites; ``H_tilde = s * H``."""

    spin: Fraction
    c: float
    H: DenseOperator
    H_tilde: DenseOperator
    site_ops: dict = field(repr=False)
    precision: int | None = None

    @property
    def hbar_eff(self) -> float:
        return 1.0 / float(self.spin)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def seed(self, name: str) -> DenseOperator:
        if name == "x1+x2":
            return self.site_ops["x1"] + self.site_ops["x2"]
        try:
            return self.site_ops[name]
        except KeyError:
            raise InvalidArgument(
                f"unknown FP seed operator {name!r}; choose one of x1+x2, x1, x2, z1, z2"
            ) from None


def build_lmg(S, J: float, precision: int | None = None) -> LmgModel:
    if not np.isfinite(J):
        raise InvalidArgument(f"coupling must be finite, got {J!r}")
    S = as_spin(S)
    t = build_spin_triple(S, precision)
    x, z = t.x_hat, t.z_hat
    if precision is None:
        H = x + J * (z @ z)
    else:
        with _mp.working_precision(precision):
            H = x + gmpy2.mpfr(float(J)) * (z @ z)
    return LmgModel(S, float(J), H, _scale(H, S, precision), t, precision)


def build_fp(s, c: float, precision: int | None = None) -> FpModel:
    if not (np.isfinite(c) and -1.0 <= c <= 1.0):
        raise InvalidArgument(f"FP parameter c must lie in [-1, 1], got {c!r}")
    s = as_spin(s)
    t = build_spin_triple(s, precision)
    I = identity(t.dim, like=t.x_hat)
    ops = {
        "x1": tensor_product(t.x_hat, I),
        "x2": tensor_product(I, t.x_hat),
        "z1": tensor_product(t.z_hat, I),
        "z2": tensor_product(I, t.z_hat),
    }
    if precision is None:
        H = (1 + c) * (ops["x1"] + ops["x2"]) + 4 * (1 - c) * (ops["z1"] @ ops["z2"])
    else:
        with _mp.working_precision(precision):
            cc = gmpy2.mpfr(float(c))
            H = (1 + cc) * (ops["x1"] + ops["x2"]) + 4 * (1 - cc) * (ops["z1"] * np.diag(ops["z2"])[None, :])
    return FpModel(s, float(c), H, _scale(H, s, precision), ops, precision)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian operator.

    ``exact_values``/``exact_vectors`` hold the multiprecision pair when the
    decomposition was refined; ``values``/``vectors`` are always float64.
    """

    values: np.ndarray
    vectors: np.ndarray
    exact_values: np.ndarray | None = None
    exact_vectors: np.ndarray | None = None
    precision: int | None = None

    @property
    def dim(self) -> int:
        return len(self.values)

    def scaled(self, k) -> "SpectralDecomposition":
        """Decomposition of ``k * H`` for a positive scalar ``k`` (same eigenvectors)."""
        k = Fraction(k) if not isinstance(k, float) else Fraction(k)
        if k <= 0:
            raise InvalidArgument("scale factor must be positive")
        ev = None
        if self.exact_values is not None:
            with _mp.working_precision(self.precision):
                ev = self.exact_values * gmpy2.mpfr(k.numerator) / k.denominator
        return SpectralDecomposition(
            self.values * float(k), self.vectors, ev, self.exact_vectors, self.precision
        )

    def window(self, lo: float, hi: float) -> np.ndarray:
        return np.flatnonzero((self.values >= lo) & (self.values <= hi))


def _fix_signs(V: np.ndarray, Vx: np.ndarray | None = None):
    """Make the first significant component of every column positive."""
    for j in range(V.shape[1]):
        col = V[:, j]
        thresh = 1e-8 * np.max(np.abs(col))
        i = int(np.flatnonzero(np.abs(col) > thresh)[0])
        lead = col[i]
        phase = lead / abs(lead)
        if np.iscomplexobj(V):
            V[:, j] = col / phase
        elif phase < 0:
            V[:, j] = -col
            if Vx is not None:
                Vx[:, j] = -Vx[:, j]


def eigendecompose(H: DenseOperator, precision: int | None = None) -> SpectralDecomposition:
    """Hermitian eigendecomposition with deterministic ordering and sign convention.

    Object-dtype (mpfr) input is refined to the precision of its entries (or
    ``precision`` when given); float input goes straight to LAPACK.
    """
    check_operator(H, "H")
    if not is_hermitian(H):
        raise InvalidArgument("eigendecompose requires a Hermitian operator")
    if H.dtype == object:
        bits = precision or _mp.precision_of(H)
        vals_x, vecs_x = _mp.refine_eigh(H, bits)
        vals = _mp.to_float(vals_x)
        order = np.argsort(vals, kind="stable")
        vals_x, vecs_x, vals = vals_x[order], vecs_x[:, order], vals[order]
        vecs = _mp.to_float(vecs_x)
        # gmpy2 rounds even a negation to the active context precision
        with _mp.working_precision(bits):
            _fix_signs(vecs, vecs_x)
        return SpectralDecomposition(vals, vecs, vals_x, vecs_x, bits)
    Hf = np.asarray(H)
    vals, vecs = np.linalg.eigh(Hf)
    vecs = np.array(vecs)
    _fix_signs(vecs)
    return SpectralDecomposition(vals, vecs)
