"""Lanczos recursion over operator space.

The Liouvillian L(O) = [H, O] is diagonal in the energy eigenbasis: it
multiplies the matrix element O_ij by w_ij = E_i - E_j. The engine therefore
transforms the seed once into the eigenbasis and runs the recursion on the
vector of its nonzero elements, weighted by the inner product. This keeps each
step at O(support) work and makes the small seed elements (which control the
high-n coefficients) as accurate as the eigenvectors they were computed from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from . import _mp
from .errors import EmptyWindowError, InvalidArgument
from .models import SpectralDecomposition, eigendecompose
from .spin_algebra import DenseOperator, check_operator


class Termination(str, enum.Enum):
    BREAKDOWN_ZERO = "BreakdownZero"
    MAX_ITERATIONS = "MaxIterations"
    DIMENSION_BOUND = "DimensionBound"
    DEGREE_CAP = "DegreeCap"


@dataclass(frozen=True)
class InnerProductSpec:
    """Operator inner product (A|B) = sum_j weight_j <j|A^dagger B|j>.

    ``InfiniteTemperature`` weights every eigenstate by 1/D. ``Microcanonical``
    weights the ``count`` eigenstates in ``window_states`` by 1/count and the rest
    by zero, so it may be only positive semi-definite.
    """

    kind: str = "InfiniteTemperature"
    center: float | None = None
    half_width: float | None = None
    window_states: tuple = ()
    count: int | None = None

    def __post_init__(self):
        if self.kind not in ("InfiniteTemperature", "Microcanonical"):
            raise InvalidArgument(f"unknown inner-product kind {self.kind!r}")
        if self.kind == "Microcanonical":
            if not self.window_states or self.count != len(self.window_states):
                raise InvalidArgument("microcanonical inner product needs a nonempty window")

    @property
    def is_microcanonical(self) -> bool:
        return self.kind == "Microcanonical"

    def column_weights(self, D: int) -> np.ndarray:
        if not self.is_microcanonical:
            return np.full(D, 1.0 / D)
        if max(self.window_states) >= D:
            raise InvalidArgument("window state index exceeds the Hilbert-space dimension")
        w = np.zeros(D)
        w[list(self.window_states)] = 1.0 / self.count
        return w

    def evaluate(self, A: DenseOperator, B: DenseOperator, vectors: np.ndarray | None = None) -> complex:
        """(A|B) for operators in the computational basis; ``vectors`` are the eigenvectors."""
        if not self.is_microcanonical:
            return np.vdot(A, B) / A.shape[0]
        if vectors is None:
            raise InvalidArgument("microcanonical inner product requires the eigenvectors")
        Vw = vectors[:, list(self.window_states)]
        AV, BV = A @ Vw, B @ Vw
        return np.vdot(AV, BV) / self.count


def microcanonical_inner_spec(spectral: SpectralDecomposition, E: float, dE: float) -> InnerProductSpec:
    """Window of eigenstates of ``spectral`` with eigenvalue in [E - dE, E + dE]."""
    if not (np.isfinite(E) and np.isfinite(dE)) or dE < 0:
        raise InvalidArgument("window center must be finite and half-width non-negative")
    idx = spectral.window(E - dE, E + dE)
    if idx.size == 0:
        nearest = float(spectral.values[np.argmin(np.abs(spectral.values - E))])
        raise EmptyWindowError(E, dE, nearest)
    return InnerProductSpec("Microcanonical", float(E), float(dE), tuple(int(i) for i in idx), int(idx.size))


@dataclass(frozen=True)
class LanczosOutput:
    """Coefficients b_1, b_2, ... (``b[0]`` is b_1) and the Krylov dimension.

    ``a`` holds the diagonal coefficients a_n = (O_n|L O_n) for n = 0 .. K-1.
    They vanish for a Hermitian seed under the infinite-temperature form but not
    under a microcanonical one, where the reorthogonalization removes them.
    """

    b: np.ndarray
    krylov_dim: int
    termination: Termination
    basis: tuple | None = field(default=None, repr=False)
    support: int = 0
    a: np.ndarray | None = None

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self.b) + 1)


def seed_in_eigenbasis(spectral: SpectralDecomposition, seed: DenseOperator, floor: float | None = None):
    """Matrix elements V^dagger O V, with entries below ``floor * max|.|`` set to zero.

    Multiprecision decompositions give elements accurate to about 2^-bits relative
    to the largest one, so the default floor there is 2^(-bits/2). A float64
    decomposition carries roundoff near 1e-16 and defaults to a 1e-12 floor.
    """
    if spectral.exact_vectors is not None:
        bits = spectral.precision
        if np.iscomplexobj(seed) and seed.dtype != object:
            if np.any(np.asarray(seed).imag != 0):
                raise InvalidArgument("the multiprecision path supports real seeds only")
            seed = seed.real
        Ox = _mp.to_mp(seed, bits)
        V = spectral.exact_vectors
        with _mp.working_precision(bits):
            X = V.T @ _mp.band_matmul(_mp.band_diagonals(Ox), V)
        X = _mp.to_float(X)
        default = 2.0 ** (-bits / 2)
    else:
        V = spectral.vectors
        X = V.conj().T @ np.asarray(seed) @ V
        if np.iscomplexobj(X) and np.max(np.abs(X.imag)) <= 1e-14 * np.max(np.abs(X)):
            X = X.real.copy()
        default = 1e-12
    floor = default if floor is None else floor
    scale = np.max(np.abs(X))
    X[np.abs(X) < floor * scale] = 0
    return X


def lanczos(
    H_tilde: DenseOperator,
    seed: DenseOperator,
    inner: InnerProductSpec | None = None,
    max_n: int | None = None,
    breakdown_tol: float = 1e-8,
    *,
    spectral: SpectralDecomposition | None = None,
    floor: float | None = None,
    store_basis: bool = False,
) -> LanczosOutput:
    """Lanczos coefficients of ``seed`` under the Liouvillian of ``H_tilde``.

    ``max_n`` caps the number of coefficients computed. ``spectral`` may carry a
    precomputed decomposition of ``H_tilde`` (for instance a multiprecision one);
    passing a multiprecision ``H_tilde`` triggers that decomposition here.
    Full reorthogonalization (classical Gram-Schmidt, repeated when the first
    pass removes more than 1e-8 of the norm) keeps the basis orthonormal.
    """
    check_operator(H_tilde, "H_tilde")
    check_operator(seed, "seed")
    if seed.shape != H_tilde.shape:
        raise InvalidArgument("seed and Hamiltonian dimensions differ")
    if not breakdown_tol > 0:
        raise InvalidArgument("breakdown_tol must be positive")
    if max_n is not None and max_n < 0:
        raise InvalidArgument("max_n must be non-negative")
    inner = inner or InnerProductSpec()
    if spectral is None:
        spectral = eigendecompose(H_tilde)
    elif spectral.dim != H_tilde.shape[0]:
        raise InvalidArgument("spectral decomposition does not match H_tilde")
    D = spectral.dim
    bound = D * D - D + 1

    X = seed_in_eigenbasis(spectral, seed, floor)
    if not np.any(X):
        raise InvalidArgument("seed operator is zero")
    w = inner.column_weights(D)
    rows, cols = np.nonzero(X * (w[None, :] > 0))
    omega = spectral.values[rows] - spectral.values[cols]
    u = np.sqrt(w[cols]) * X[rows, cols]
    norm = np.linalg.norm(u)
    if norm == 0:
        # the seed has no weight inside the window: degenerate form, clean stop
        return LanczosOutput(np.empty(0), 1, Termination.BREAKDOWN_ZERO, None, 0, np.zeros(1))
    u = u / norm

    limit = bound if max_n is None else min(bound, max_n + 1)
    cap = min(limit, u.size + 1)
    Q = np.zeros((min(cap, 256), u.size), dtype=u.dtype)
    Q[0] = u
    b: list[float] = []
    diag: list[float] = []
    k = 1
    termination = Termination.DIMENSION_BOUND if limit == bound else Termination.MAX_ITERATIONS
    omega_scale = float(np.max(np.abs(omega))) if omega.size else 0.0
    while k < limit:
        a = omega * Q[k - 1]
        diag.append(float(np.vdot(Q[k - 1], a).real))
        if k > 1:
            a -= b[-1] * Q[k - 2]
        before = np.linalg.norm(a)
        a -= Q[:k].T @ (Q[:k].conj() @ a)
        after = np.linalg.norm(a)
        if after > 0 and (before - after) > 1e-8 * before:
            a -= Q[:k].T @ (Q[:k].conj() @ a)
            after = np.linalg.norm(a)
        ref = b[0] if b else omega_scale
        if k >= cap or not after > breakdown_tol * ref:
            termination = Termination.BREAKDOWN_ZERO
            break
        if k == Q.shape[0]:
            Q = np.concatenate([Q, np.zeros((min(cap, 2 * k) - k, u.size), dtype=Q.dtype)])
        b.append(float(after))
        Q[k] = a / after
        k += 1

    if len(diag) < k:
        diag.append(float(np.vdot(Q[k - 1], omega * Q[k - 1]).real))
    basis = None
    if store_basis:
        basis = tuple(_to_operator(Q[i], rows, cols, w, spectral.vectors, D) for i in range(k))
    return LanczosOutput(np.array(b), k, termination, basis, int(u.size), np.array(diag))


def _to_operator(q, rows, cols, w, V, D):
    Y = np.zeros((D, D), dtype=np.result_type(q, V))
    Y[rows, cols] = q / np.sqrt(w[cols])
    return V @ Y @ V.conj().T


@dataclass(frozen=True)
class SlopeFit:
    """Straight-line fit b_n = alpha n + intercept, optionally with a power law alpha' n^delta."""

    alpha: float
    intercept: float
    window: tuple
    residual: float
    delta: float | None = None
    prefactor: float | None = None


def _window(b, window):
    b = np.asarray(b, dtype=float)
    if isinstance(window, range):
        if window.step != 1 or len(window) == 0:
            raise InvalidArgument("fit window must be a contiguous range")
        lo, hi = window.start, window.stop - 1
    else:
        lo, hi = (int(v) for v in window)
    if lo < 1 or hi > len(b) or hi - lo + 1 < 3:
        raise InvalidArgument(f"fit window [{lo}, {hi}] must hold at least 3 of n = 1..{len(b)}")
    n = np.arange(lo, hi + 1, dtype=float)
    return n, b[lo - 1 : hi], (lo, hi)


def fit_linear_slope(b, window) -> SlopeFit:
    """Least-squares line through (n, b_n) for n in ``window``.

    ``window`` is either an inclusive pair ``(lo, hi)`` of labels n (b_1 is the
    first coefficient) or a ``range`` of them.
    """
    n, y, win = _window(b, window)
    alpha, beta = np.polyfit(n, y, 1)
    resid = float(np.sqrt(np.mean((alpha * n + beta - y) ** 2)))
    return SlopeFit(float(alpha), float(beta), win, resid)


def fit_power_law(b, window) -> SlopeFit:
    """Fit b_n = prefactor * n^delta by least squares in log-log; the linear fit rides along."""
    n, y, win = _window(b, window)
    if np.any(y <= 0):
        raise InvalidArgument("power-law fit needs positive coefficients")
    lin = fit_linear_slope(b, win)
    delta, logc = np.polyfit(np.log(n), np.log(y), 1)
    return SlopeFit(lin.alpha, lin.intercept, win, lin.residual, float(delta), float(np.exp(logc)))


def decompose_oscillation(b):
    """Split b_n = f(n) + (-1)^n g(n) with f the two-point average.

    Returns ``(f, g)`` for n = 1 .. len(b) - 1, with f(n) = (b_n + b_{n+1})/2 and
    g(n) = (-1)^n (b_n - f(n)). A smooth b_n leaves |g| at half the local slope.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or len(b) < 4:
        raise InvalidArgument("oscillation decomposition needs at least 4 coefficients")
    n = np.arange(1, len(b))
    f = (b[:-1] + b[1:]) / 2
    g = (-1.0) ** n * (b[:-1] - f)
    return f, g
