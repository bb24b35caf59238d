from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ellipk

from krylovlab.classical import (
    SpherePolynomial,
    alpha_curve,
    alpha_of_E,
    classical_lanczos,
    elliptic_K,
    elliptic_parameter,
    energy_range,
    find_saddles_fp,
    find_saddles_lmg,
    fp_coupling_map,
    fp_energy,
    fp_gamma_point,
    fp_jacobian,
    fp_lower_bound_alpha,
    fp_saddle_exponent,
    integrate_fp,
    integrate_lmg,
    lmg_energy,
    poisson_bracket,
    random_sphere_points,
    sigma_star,
    sphere_average,
    sup_alpha,
)
from krylovlab.classical.dynamics import fp_rhs, lmg_rhs
from krylovlab.errors import DomainError, InvalidArgument
from krylovlab.krylov import Termination

SQ3 = np.sqrt(3.0)

# sigma* from direct quadrature of 2 / (J sqrt((2 z0 + s^2)((z0 + s^2)^2 - u_-))) over s >= 0
QUADRATURE_SIGMA = [
    ((-0.5, 0.75), 1.7510707208966243),
    ((0.3, 1.0), 1.3983614323099205),
    ((1.5, 2.0), 0.9280288182878335),
    ((0.0, 3.0), 0.7828594840314029),
    ((5.0, 10.0), 0.28654632746817776),
    ((-0.9, 2.0), 1.4055820602590086),
    ((2.1, 2.0), 1.2705358560820181),
]


# --- saddles ----------------------------------------------------------------------


def test_lmg_saddle_J2():
    s = find_saddles_lmg(2.0)[0]
    assert s.coords == (1.0, 0.0, 0.0)
    assert np.allclose(np.sort(s.jacobian_eigenvalues.real), [-SQ3, 0, SQ3], atol=1e-10)
    assert np.allclose(s.jacobian_eigenvalues.imag, 0, atol=1e-10)
    assert s.omega_saddle == pytest.approx(SQ3, abs=1e-10)


@given(st.floats(-20, 20).filter(lambda J: abs(J) > 1e-3))
def test_lmg_fixed_points_are_stationary(J):
    pts = find_saddles_lmg(J)
    assert len(pts) == (4 if abs(J) > 0.5 else 2)
    for p in pts:
        c = np.array(p.coords)
        assert np.max(np.abs(lmg_rhs(c, J))) <= 1e-12
        assert abs(np.dot(c, c) - 1) <= 1e-12
    # omega at (1, 0, 0) is sqrt(2J - 1) whenever that is real
    if J > 0.5:
        assert pts[0].omega_saddle == pytest.approx(np.sqrt(2 * J - 1), rel=1e-10)


@given(st.floats(-1, 1))
def test_fp_fixed_points(c):
    for p in find_saddles_fp(c):
        assert np.max(np.abs(fp_rhs(np.array(p.coords), c))) <= 1e-12
    ev = np.linalg.eigvals(fp_jacobian((1, 0, 0, 1, 0, 0), c))
    assert max(0.0, ev.real.max()) == pytest.approx(fp_saddle_exponent(c), abs=1e-7)


def test_fp_tilted_points():
    pts = find_saddles_fp(0.0)
    assert len(pts) == 8
    for p in pts[4:]:
        assert np.allclose(p.jacobian_eigenvalues.real, 0, atol=1e-10)
        assert p.omega_saddle <= 1e-10
    assert len(find_saddles_fp(0.7)) == 4


@given(st.floats(-0.9, 0.5), st.floats(0, 1))
def test_fp_gamma_points(c, u):
    a = (1 + c) / (4 * (1 - c))
    gamma = a + u * (1 / a - a)
    point, residual = fp_gamma_point(c, gamma)
    assert (residual <= 1e-12) == (abs(gamma - 1) <= 1e-12) or abs(gamma - 1) < 1e-6
    assert fp_gamma_point(c, 1.0)[1] <= 1e-12
    with pytest.raises(InvalidArgument):
        fp_gamma_point(c, 10 / a)


def test_fp_exponent_maximum():
    assert fp_saddle_exponent(-0.2) == pytest.approx(4 / np.sqrt(5), abs=1e-12)
    grid = np.linspace(-1, 1, 20001)
    vals = np.array([fp_saddle_exponent(c) for c in grid])
    assert grid[np.argmax(vals)] == pytest.approx(-0.2, abs=1e-4)
    assert fp_saddle_exponent(0.7) == 0.0
    with pytest.raises(InvalidArgument):
        fp_saddle_exponent(1.5)


# --- elliptic integral and alpha(E) ---------------------------------------------------


@given(st.floats(-1e6, 0.999999))
def test_elliptic_K_against_scipy(m):
    assert elliptic_K(m) == pytest.approx(float(ellipk(m)), rel=1e-13)


@pytest.mark.parametrize("m", [1.0, 2.0, float("nan")])
def test_elliptic_K_domain(m):
    with pytest.raises(DomainError):
        elliptic_K(m)


def test_elliptic_K_special_values():
    assert elliptic_K(0.0) == pytest.approx(np.pi / 2, rel=1e-15)
    assert elliptic_K(-np.inf) == 0.0


@pytest.mark.parametrize("args,expected", QUADRATURE_SIGMA)
def test_sigma_star_against_quadrature(args, expected):
    assert sigma_star(*args) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("J", [1, 2, 3, 10])
def test_alpha_collapse_at_saddle_energy(J):
    assert 2 * alpha_of_E(1.0, J) == pytest.approx(np.sqrt(2 * J - 1), abs=1e-10)


@given(st.floats(0.51, 50), st.floats(0.01, 0.99))
def test_alpha_positive_and_parameter_negative(J, frac):
    lo, hi = energy_range(J)
    E = lo + frac * (hi - lo)
    if abs(E - 1) < 1e-6:
        return
    assert alpha_of_E(E, J) > 0
    assert elliptic_parameter(E, J) < 1


def test_energy_range_and_errors():
    assert energy_range(2.0) == (-1.0, 2.125)
    assert energy_range(0.25) == (-1.0, 1.0)
    with pytest.raises(InvalidArgument):
        energy_range(0.0)
    with pytest.raises(DomainError):
        alpha_of_E(2.2, 2.0)
    with pytest.raises(DomainError):
        alpha_of_E(-1.0, 2.0)


def test_sup_alpha_location():
    E2, a2 = sup_alpha(2.0)
    assert E2 == pytest.approx(1.0, abs=1e-5)
    assert 2 * a2 == pytest.approx(SQ3, abs=1e-3)
    assert sup_alpha(1.0)[0] < 1
    assert sup_alpha(3.0)[0] > 1


def test_alpha_curve_tau():
    curve = alpha_curve(2.0, [0.0, 0.5, 1.5])
    assert np.allclose(curve.tau_star, 2 * curve.sigma_star)
    assert np.allclose(curve.alpha, np.pi / (4 * curve.sigma_star))


def test_fp_bound():
    assert fp_lower_bound_alpha(0.0) == pytest.approx(SQ3, abs=1e-3)
    assert fp_coupling_map(0.0) == 2.0
    with pytest.raises(DomainError):
        fp_coupling_map(-1.0)


# --- integrators ------------------------------------------------------------------------


def test_lmg_integrator_conservation():
    s0 = random_sphere_points(100, rng=1)
    tr = integrate_lmg(s0, 2.0, 100.0, t_eval=np.linspace(0, 100, 11))
    drift_E = np.abs(lmg_energy(tr.states, 2.0) - lmg_energy(s0, 2.0)[None, :])
    drift_r = np.abs(np.sum(tr.states**2, axis=-1) - 1)
    assert drift_E.max() <= 1e-9
    assert drift_r.max() <= 1e-9


def test_fp_integrator_conservation():
    s0 = random_sphere_points(100, spheres=2, rng=2)
    tr = integrate_fp(s0, 0.0, 100.0, t_eval=np.linspace(0, 100, 11))
    drift_E = np.abs(fp_energy(tr.states, 0.0) - fp_energy(s0, 0.0)[None, :])
    r = tr.states.reshape(tr.states.shape[:-1] + (2, 3))
    assert drift_E.max() <= 1e-9
    assert np.abs(np.sum(r**2, axis=-1) - 1).max() <= 1e-9


def test_saddle_escape_rate():
    # a point displaced along the unstable direction separates at rate sqrt(3)
    J = 2.0
    eps = 1e-9
    d = np.array([0.0, 1.0, 1 / SQ3])
    d /= np.linalg.norm(d)
    p = np.array([1.0, 0.0, 0.0]) + eps * d
    p /= np.linalg.norm(p)
    tr = integrate_lmg(p, J, 8.0, t_eval=np.array([0.0, 4.0, 8.0]))
    dist = np.linalg.norm(tr.states - np.array([1.0, 0.0, 0.0]), axis=-1)
    assert np.log(dist[2] / dist[1]) / 4 == pytest.approx(SQ3, rel=1e-3)


def test_integrator_rejects_off_sphere():
    with pytest.raises(InvalidArgument):
        integrate_lmg([1.0, 0.1, 0.0], 2.0, 1.0)
    with pytest.raises(InvalidArgument):
        integrate_fp([1, 0, 0, 1, 0, 0], 2.0, 1.0)


# --- Poisson algebra ------------------------------------------------------------------------

V = SpherePolynomial.variable


def _poly(draw_terms, spheres=1):
    terms = {}
    for exps, c in draw_terms:
        terms[tuple(exps[: 3 * spheres])] = Fraction(c)
    return SpherePolynomial(terms, spheres)


poly_terms = st.lists(
    st.tuples(st.lists(st.integers(0, 2), min_size=6, max_size=6), st.integers(-3, 3)),
    min_size=1,
    max_size=4,
)


def test_su2_brackets():
    assert poisson_bracket(V("x"), V("y")) == V("z")
    assert poisson_bracket(V("y"), V("z")) == V("x")
    assert poisson_bracket(V("z"), V("x")) == V("y")
    r2 = V("x") ** 2 + V("y") ** 2 + V("z") ** 2
    assert r2 == 1
    assert poisson_bracket(r2, V("x") * V("z")).is_zero()


@given(poly_terms, poly_terms, poly_terms, st.integers(1, 2))
def test_jacobi_antisymmetry_leibniz(ta, tb, tc, spheres):
    A, B, C = (_poly(t, spheres) for t in (ta, tb, tc))
    pb = poisson_bracket
    jac = pb(A, pb(B, C)) + pb(B, pb(C, A)) + pb(C, pb(A, B))
    assert jac.is_zero()
    assert (pb(A, B) + pb(B, A)).is_zero()
    assert (pb(A, B * C) - (pb(A, B) * C + B * pb(A, C))).is_zero()


def test_jacobi_identity_float_coefficients():
    rng = np.random.default_rng(3)
    mons = [(a, b, c) for a in range(3) for b in range(3) for c in range(2)]
    A, B, C = (SpherePolynomial({m: rng.normal() for m in mons}) for _ in range(3))
    pb = poisson_bracket
    jac = pb(A, pb(B, C)) + pb(B, pb(C, A)) + pb(C, pb(A, B))
    assert jac.is_zero(tol=1e-12)


def test_sphere_average_exact_and_monte_carlo():
    x, y, z = V("x"), V("y"), V("z")
    assert sphere_average(x**2 * z**2) == Fraction(1, 15)
    assert sphere_average(z**2) == Fraction(1, 3)
    assert sphere_average(x**4) == Fraction(1, 5)
    assert sphere_average(x * z) == 0
    pts = random_sphere_points(400_000, rng=4)
    mc = np.mean(pts[:, 0] ** 2 * pts[:, 2] ** 2)
    assert mc == pytest.approx(1 / 15, abs=5 * 0.08 / np.sqrt(pts.shape[0]))


def test_evaluate_matches_definition():
    p = V("x") * V("y") + 3 * V("z") ** 3
    pts = random_sphere_points(10, rng=5)
    x, y, z = pts.T
    assert np.allclose(p.evaluate(pts), x * y + 3 * z**3)


def test_invalid_polynomials():
    with pytest.raises(InvalidArgument):
        V("w")
    with pytest.raises(InvalidArgument):
        SpherePolynomial({(1, 0): 1})
    with pytest.raises(InvalidArgument):
        V("x") + V("x", 1, 2)


# --- classical Lanczos ---------------------------------------------------------------------


def exact_classical_b(H, seed, steps):
    """Monic recursion p_{n+1} = {p_n, H} + (|p_n|^2 / |p_{n-1}|^2) p_{n-1} in exact rationals."""
    norms = [sphere_average(seed * seed)]
    prev, cur = None, seed
    b = []
    for _ in range(steps):
        nxt = poisson_bracket(cur, H)
        if prev is not None:
            nxt = nxt + (norms[-1] / norms[-2]) * prev
        prev, cur = cur, nxt
        norms.append(sphere_average(cur * cur))
        b.append(float(norms[-1] / norms[-2]) ** 0.5)
    return np.array(b)


def test_classical_lanczos_against_exact_oracle():
    H = V("x") + 2 * V("z") ** 2
    ref = exact_classical_b(H, V("z"), 12)
    out = classical_lanczos(H, V("z"), max_n=12)
    assert np.allclose(out.b, ref, rtol=1e-10)
    assert out.b[0] == pytest.approx(1.0)


def test_classical_lanczos_fp_against_exact_oracle():
    x1, x2, z1, z2 = V("x", 0, 2), V("x", 1, 2), V("z", 0, 2), V("z", 1, 2)
    H = x1 + x2 + 4 * z1 * z2
    ref = exact_classical_b(H, x1 + x2, 5)
    out = classical_lanczos(H, x1 + x2, max_n=5, degree_cap=8)
    assert np.allclose(out.b, ref, rtol=1e-10)


def test_classical_lanczos_degree_cap_and_invariant_seed():
    H = V("x") + 2 * V("z") ** 2
    out = classical_lanczos(H, V("z"), degree_cap=6)
    assert out.termination == Termination.DEGREE_CAP
    # H is conserved, so its Krylov space is one-dimensional
    out = classical_lanczos(H, H)
    assert out.b.size == 0 and out.termination == Termination.BREAKDOWN_ZERO
    with pytest.raises(InvalidArgument):
        classical_lanczos(H, SpherePolynomial({}))
