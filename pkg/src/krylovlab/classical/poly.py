"""Polynomials on products of unit spheres with the SU(2) Lie-Poisson bracket.

Each sphere contributes variables (x, y, z) with {x, y} = z and cyclic. A
polynomial is kept in canonical form, where every z appears at most linearly,
by rewriting z^2 = 1 - x^2 - y^2. Exponent tuples list (a, b, c) per sphere.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from ..errors import InvalidArgument
from ..krylov import LanczosOutput, Termination

_VARS = {"x": 0, "y": 1, "z": 2}


@lru_cache(maxsize=None)
def _z_power_expansion(k: int) -> tuple:
    """(1 - x^2 - y^2)^k as ((i, j), coefficient) pairs for x^(2i) y^(2j)."""
    out = []
    for i in range(k + 1):
        for j in range(k + 1 - i):
            coef = comb(k, i) * comb(k - i, j) * (-1) ** (i + j)
            out.append(((2 * i, 2 * j), coef))
    return tuple(out)


def _reduce(terms: dict, spheres: int) -> dict:
    out: dict = {}
    for exps, coef in terms.items():
        expanded = [(exps, coef)]
        for s in range(spheres):
            nxt = []
            for e, cf in expanded:
                c = e[3 * s + 2]
                if c < 2:
                    nxt.append((e, cf))
                    continue
                for (da, db), m in _z_power_expansion(c // 2):
                    e2 = list(e)
                    e2[3 * s] += da
                    e2[3 * s + 1] += db
                    e2[3 * s + 2] = c % 2
                    nxt.append((tuple(e2), cf * m))
            expanded = nxt
        for e, cf in expanded:
            out[e] = out.get(e, 0) + cf
    return {e: c for e, c in out.items() if c != 0}


class SpherePolynomial:
    """Real polynomial in (x_s, y_s, z_s) for ``spheres`` unit spheres, canonical form."""

    __slots__ = ("terms", "spheres")

    def __init__(self, terms: dict | None = None, spheres: int = 1):
        if spheres < 1:
            raise InvalidArgument("need at least one sphere")
        terms = dict(terms or {})
        for e in terms:
            if len(e) != 3 * spheres or any(int(v) != v or v < 0 for v in e):
                raise InvalidArgument(f"bad exponent tuple {e!r} for {spheres} sphere(s)")
        self.spheres = spheres
        self.terms = _reduce({tuple(int(v) for v in e): c for e, c in terms.items()}, spheres)

    @classmethod
    def constant(cls, value, spheres: int = 1) -> "SpherePolynomial":
        return cls({(0,) * (3 * spheres): value}, spheres)

    @classmethod
    def variable(cls, name: str, sphere: int = 0, spheres: int = 1) -> "SpherePolynomial":
        if name not in _VARS or not 0 <= sphere < spheres:
            raise InvalidArgument(f"unknown variable {name!r} on sphere {sphere}")
        e = [0] * (3 * spheres)
        e[3 * sphere + _VARS[name]] = 1
        return cls({tuple(e): 1}, spheres)

    def _coerce(self, other) -> "SpherePolynomial":
        if isinstance(other, SpherePolynomial):
            if other.spheres != self.spheres:
                raise InvalidArgument("polynomials live on different numbers of spheres")
            return other
        return SpherePolynomial.constant(other, self.spheres)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return SpherePolynomial(t, self.spheres)

    __radd__ = __add__

    def __neg__(self):
        return SpherePolynomial({e: -c for e, c in self.terms.items()}, self.spheres)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SpherePolynomial):
            return SpherePolynomial({e: c * other for e, c in self.terms.items()}, self.spheres)
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return SpherePolynomial(t, self.spheres)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = SpherePolynomial.constant(1, self.spheres)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SpherePolynomial):
            other = SpherePolynomial.constant(other, self.spheres)
        return self.spheres == other.spheres and (self - other).is_zero()

    def __repr__(self):
        return f"SpherePolynomial({self.terms!r}, spheres={self.spheres})"

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def derivative(self, var: int) -> "SpherePolynomial":
        """Partial derivative with respect to flat variable index ``var`` (ambient coordinates)."""
        t = {}
        for e, c in self.terms.items():
            if e[var]:
                e2 = list(e)
                e2[var] -= 1
                t[tuple(e2)] = c * e[var]
        return SpherePolynomial(t, self.spheres)

    def evaluate(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(p.shape[0])
        for e, c in self.terms.items():
            out += float(c) * np.prod(p ** np.array(e)[None, :], axis=1)
        return out


def poisson_bracket(p: SpherePolynomial, q: SpherePolynomial) -> SpherePolynomial:
    """{p, q} = sum over spheres of eps_ijk x_k dp/dx_i dq/dx_j, reduced to canonical form."""
    q = p._coerce(q)
    out = SpherePolynomial({}, p.spheres)
    for s in range(p.spheres):
        ix, iy, iz = 3 * s, 3 * s + 1, 3 * s + 2
        dp = [p.derivative(i) for i in (ix, iy, iz)]
        dq = [q.derivative(i) for i in (ix, iy, iz)]
        X, Y, Z = (SpherePolynomial.variable(n, s, p.spheres) for n in "xyz")
        out = out + X * (dp[1] * dq[2] - dp[2] * dq[1])
        out = out + Y * (dp[2] * dq[0] - dp[0] * dq[2])
        out = out + Z * (dp[0] * dq[1] - dp[1] * dq[0])
    return out


@lru_cache(maxsize=None)
def _odd_double_factorial(n: int) -> int:
    """n!! for odd n >= -1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def monomial_average(exps: tuple) -> Fraction:
    """Uniform average of x^a y^b z^c over each unit sphere, multiplied across spheres."""
    out = Fraction(1)
    for s in range(len(exps) // 3):
        a, b, c = exps[3 * s : 3 * s + 3]
        if a % 2 or b % 2 or c % 2:
            return Fraction(0)
        out *= Fraction(
            _odd_double_factorial(a - 1) * _odd_double_factorial(b - 1) * _odd_double_factorial(c - 1),
            _odd_double_factorial(a + b + c + 1),
        )
    return out


def sphere_average(p: SpherePolynomial):
    return sum((c * monomial_average(e) for e, c in p.terms.items()), 0)


def _monomials(spheres: int, max_degree: int) -> list:
    """Canonical exponent tuples (z exponent <= 1 on every sphere) up to ``max_degree``."""
    per = [(a, b, c) for c in (0, 1) for a in range(max_degree + 1) for b in range(max_degree + 1 - a - c) if a + b + c <= max_degree]
    out = [()]
    for _ in range(spheres):
        out = [e + m for e in out for m in per if sum(e) + sum(m) <= max_degree]
    return sorted(out, key=lambda e: (sum(e), e))


def _gram(mons: list) -> np.ndarray:
    """G_ij = average of m_i m_j, vectorized through per-sphere double-factorial tables."""
    E = np.array(mons, dtype=np.int64)
    n, width = E.shape
    top = int(2 * E.max()) + 3 if E.size else 3
    # f[k] = (k - 1)!! for even k, as float; odd k never contributes
    f = np.array([float(_odd_double_factorial(k - 1)) if k % 2 == 0 else 0.0 for k in range(top + 1)])
    g = np.array([1.0 / _odd_double_factorial(k + 1) if k % 2 == 0 else 0.0 for k in range(3 * top + 1)])
    G = np.ones((n, n))
    for s in range(width // 3):
        tot = np.zeros((n, n), dtype=np.int64)
        part = np.ones((n, n))
        for v in range(3):
            col = E[:, 3 * s + v]
            k = col[:, None] + col[None, :]
            part *= f[k]
            tot += k
        G *= part * g[tot]
    return G


def classical_lanczos(
    H: SpherePolynomial,
    seed: SpherePolynomial,
    max_n: int | None = None,
    degree_cap: int = 40,
    breakdown_tol: float = 1e-8,
    max_monomials: int = 20000,
) -> LanczosOutput:
    """Lanczos on sphere polynomials with L(f) = {f, H} and (f|g) = average(f g).

    Polynomials are expanded on the canonical monomials up to
    ``degree_cap + deg(H) - 1``. The run stops with ``DegreeCap`` as soon as the
    next basis element would exceed ``degree_cap``.
    """
    seed = H._coerce(seed)
    if seed.is_zero():
        raise InvalidArgument("seed polynomial is zero on the sphere")
    if seed.degree > degree_cap:
        raise InvalidArgument("seed degree exceeds the degree cap")
    spheres = H.spheres
    top = degree_cap + max(H.degree - 1, 0)
    mons = _monomials(spheres, top)
    if len(mons) > max_monomials:
        raise InvalidArgument(
            f"{len(mons)} monomials up to degree {top}; lower degree_cap or raise max_monomials"
        )
    index = {e: i for i, e in enumerate(mons)}
    deg = np.array([sum(e) for e in mons])
    N = len(mons)
    G = _gram(mons)

    # Liouvillian on monomials of degree <= degree_cap
    L = np.zeros((N, N))
    for j, e in enumerate(mons):
        if deg[j] > degree_cap:
            continue
        for e2, c in poisson_bracket(SpherePolynomial({e: 1}, spheres), H).terms.items():
            L[index[e2], j] = float(c)
    Lmask = L != 0

    def norm(v):
        return np.sqrt(max(float(v @ G @ v), 0.0))

    q = np.zeros(N)
    for e, c in seed.terms.items():
        q[index[e]] = float(c)
    support = q != 0
    q /= norm(q)
    Q = [q]
    GQ = [G @ q]
    b: list[float] = []
    limit = max_n if max_n is not None else N
    termination = Termination.MAX_ITERATIONS
    while len(b) < limit:
        support = support | (Lmask[:, support].any(axis=1))
        if deg[support].max() > degree_cap:
            termination = Termination.DEGREE_CAP
            break
        a = L @ Q[-1]
        if len(Q) > 1:
            a += b[-1] * Q[-2]
        for _ in range(2):
            Qm, GQm = np.array(Q), np.array(GQ)
            a -= Qm.T @ (GQm @ a)
        bn = norm(a)
        if not bn > breakdown_tol * (b[0] if b else 1.0):
            termination = Termination.BREAKDOWN_ZERO
            break
        b.append(bn)
        Q.append(a / bn)
        GQ.append(G @ Q[-1])
    return LanczosOutput(np.array(b), len(Q), termination, None, int(support.sum()))
