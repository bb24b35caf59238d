"""Multiprecision helpers built on gmpy2 ``mpfr`` scalars stored in numpy object arrays.

Only real symmetric matrices are supported on the high-precision path; that is
all the LMG and FP Hamiltonians and their seeds need.
"""

from __future__ import annotations

import contextlib

import gmpy2
import numpy as np

from .errors import InvalidArgument


@contextlib.contextmanager
def working_precision(bits: int):
    with gmpy2.context(gmpy2.get_context(), precision=int(bits)):
        yield


def is_mp(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def precision_of(a: np.ndarray) -> int:
    """Largest mpfr precision found among the entries of ``a`` (53 if none)."""
    bits = 53
    for v in a.flat:
        p = getattr(v, "precision", None)
        if p is not None and p > bits:
            bits = p
    return bits


def to_float(a) -> np.ndarray:
    """Round an object array of mpfr/mpc values (or any array) to float64/complex128."""
    a = np.asarray(a)
    if a.dtype != object:
        return a
    if any(isinstance(v, type(gmpy2.mpc(0))) or isinstance(v, complex) for v in a.flat):
        return np.array([complex(v) for v in a.flat], dtype=complex).reshape(a.shape)
    return np.array([float(v) for v in a.flat], dtype=float).reshape(a.shape)


def to_mp(a: np.ndarray, bits: int) -> np.ndarray:
    """Exact conversion of a real float array into mpfr entries."""
    a = np.asarray(a)
    if a.dtype == object:
        return a
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise InvalidArgument("high-precision path supports real operators only")
        a = a.real
    with working_precision(bits):
        return np.array([gmpy2.mpfr(float(v)) for v in a.flat], dtype=object).reshape(a.shape)


def mp_zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(gmpy2.mpfr(0))
    return out


def band_diagonals(A: np.ndarray) -> dict[int, np.ndarray]:
    """Nonzero diagonals of a square object array, keyed by offset (``A[i, i+k]``)."""
    n = A.shape[0]
    diags = {}
    for k in range(-(n - 1), n):
        d = np.diagonal(A, offset=k)
        if any(v != 0 for v in d):
            diags[k] = np.array(d, dtype=object)
    return diags


def band_matmul(diags: dict[int, np.ndarray], Y: np.ndarray) -> np.ndarray:
    n = Y.shape[0]
    R = mp_zeros(Y.shape)
    for k, d in diags.items():
        if k >= 0:
            R[: n - k] += d[:, None] * Y[k:]
        else:
            R[-k:] += d[:, None] * Y[: n + k]
    return R


def _band_solve(A: np.ndarray, mu, rhs: np.ndarray, bw: int, tiny) -> np.ndarray:
    """Solve ``(A - mu) X = rhs`` by banded Gaussian elimination with partial pivoting."""
    n = A.shape[0]
    M = A.copy()
    for i in range(n):
        M[i, i] = M[i, i] - mu
    X = rhs.copy()
    upper = 2 * bw
    for k in range(n):
        hi = min(k + bw + 1, n)
        col = [abs(M[i, k]) for i in range(k, hi)]
        p = k + int(np.argmax(col))
        if p != k:
            M[[k, p]] = M[[p, k]]
            X[[k, p]] = X[[p, k]]
        piv = M[k, k]
        if piv == 0:
            piv = M[k, k] = tiny
        right = min(k + upper + 1, n)
        for i in range(k + 1, hi):
            if M[i, k] != 0:
                f = M[i, k] / piv
                M[i, k:right] -= f * M[k, k:right]
                X[i] -= f * X[k]
    for k in range(n - 1, -1, -1):
        right = min(k + upper + 1, n)
        acc = X[k].copy()
        for j in range(k + 1, right):
            if M[k, j] != 0:
                acc -= M[k, j] * X[j]
        X[k] = acc / M[k, k]
    return X


def _orthonormalize(Y: np.ndarray) -> np.ndarray:
    Y = Y.copy()
    for j in range(Y.shape[1]):
        for _ in range(2):
            for i in range(j):
                Y[:, j] -= np.dot(Y[:, i], Y[:, j]) * Y[:, i]
        Y[:, j] /= gmpy2.sqrt(np.dot(Y[:, j], Y[:, j]))
    return Y


def _small_eigh(M: np.ndarray, bits: int):
    import mpmath

    with mpmath.workprec(bits):
        E, Q = mpmath.eigsy(mpmath.matrix([[mpmath.mpf(str(v)) for v in row] for row in M]))
        k = M.shape[0]
        vals = [gmpy2.mpfr(mpmath.nstr(E[i], bits // 3 + 5)) for i in range(k)]
        vecs = np.array(
            [[gmpy2.mpfr(mpmath.nstr(Q[i, j], bits // 3 + 5)) for j in range(k)] for i in range(k)],
            dtype=object,
        )
    order = sorted(range(len(vals)), key=lambda i: vals[i])
    return [vals[i] for i in order], vecs[:, order]


def refine_eigh(A: np.ndarray, bits: int, cluster_tol: float = 1e-9, max_iter: int = 12):
    """Eigendecomposition of a real symmetric mpfr matrix to ``bits`` of precision.

    A float64 ``eigh`` seeds a shifted block inverse iteration carried out in
    multiprecision. Eigenvalues closer than ``cluster_tol * scale`` in float64 are
    refined together as one invariant subspace and split by a Rayleigh-Ritz step.

    Returns ``(values, vectors)`` as object arrays, ascending.
    """
    n = A.shape[0]
    Af = to_float(A)
    if np.iscomplexobj(Af):
        raise InvalidArgument("high-precision eigensolver supports real symmetric matrices only")
    E0, V0 = np.linalg.eigh(Af)
    scale = max(1.0, float(np.max(np.abs(E0))))
    diags = band_diagonals(A)
    bw = max(abs(k) for k in diags) if diags else 0

    clusters = [[0]]
    for i in range(1, n):
        if E0[i] - E0[clusters[-1][-1]] <= cluster_tol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    values = np.empty(n, dtype=object)
    vectors = np.empty((n, n), dtype=object)
    with working_precision(bits):
        eps = gmpy2.mpfr(2) ** (-bits)
        tol = eps * scale * n * 64
        tiny = eps * scale
        for c in clusters:
            X = np.array([[gmpy2.mpfr(float(v)) for v in row] for row in V0[:, c]], dtype=object)
            X = _orthonormalize(X)
            mu = gmpy2.mpfr(float(np.mean(E0[c])))
            for _ in range(max_iter):
                Y = _orthonormalize(_band_solve(A, mu, X, bw, tiny))
                AY = band_matmul(diags, Y)
                M = Y.T @ AY
                R = AY - Y @ M
                X = Y
                mu = sum(M[i, i] for i in range(len(c))) / len(c)
                if max(abs(v) for v in R.flat) <= tol:
                    break
            if len(c) == 1:
                values[c[0]] = M[0, 0]
                vectors[:, c[0]] = X[:, 0]
            else:
                M = (M + M.T) / 2
                vals, U = _small_eigh(M, bits)
                W = X @ U
                for j, idx in enumerate(c):
                    values[idx] = vals[j]
                    vectors[:, idx] = W[:, j]
    return values, vectors
