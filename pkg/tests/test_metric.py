"""Metric construction, admissibility, normalisation and curvature."""
import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

from _families import random_poly2

from kossowski.errors import (
    DivisionObstruction,
    EvaluationAtSemiDefinitePoint,
    NoJetSquareRoot,
    NotAdjusted,
    NotOrthogonal,
    NotSemiDefinite,
    OrderMismatch,
)
from kossowski.jets import Jet1, Jet2
from kossowski.metric import (
    KossowskiMetric,
    check_admissible,
    connection_coeffs,
    curvature_density,
    flat_metric,
    gaussian_curvature_regular,
    metric_from_A2_data,
    metric_from_A3_data,
    metric_from_coeffs,
    metric_with_density,
    sphere_metric,
    to_K_orthogonal,
)
from kossowski.verify import brioschi_curvature

N = 12


@pytest.fixture
def uv():
    return Jet2.var_u(N), Jet2.var_v(N)


def test_metric_from_coeffs_extracts_lambda(uv):
    u, v = uv
    m = metric_from_coeffs(u.one_like(), Jet2.zero(N), v * v)
    assert m.order == N - 1
    assert (m.lam - v.truncate(N - 1)).max_abs() < 1e-14
    assert m.form == "k_orthogonal"

    lam = u - v * v
    m = metric_from_coeffs(u.one_like(), Jet2.zero(N), lam * lam)
    assert (m.lam - lam.truncate(N - 1)).max_abs() < 1e-12


def test_metric_from_coeffs_errors(uv):
    u, v = uv
    with pytest.raises(NotOrthogonal):
        metric_from_coeffs(u.one_like(), u, v * v)
    with pytest.raises(NotAdjusted):
        metric_from_coeffs(v * v, Jet2.zero(N), u.one_like())
    with pytest.raises(OrderMismatch):
        metric_from_coeffs(Jet2.constant(1.0, 5), Jet2.zero(N), v * v)


def test_metric_with_density_rejects_wrong_lambda(uv):
    u, v = uv
    with pytest.raises(NoJetSquareRoot):
        metric_with_density(u.one_like(), Jet2.zero(N), v * v, 2.0 * v)
    m = metric_with_density(u.one_like(), Jet2.zero(N), v * v, v)
    assert m.residual() == 0.0


def test_a2_builder_closed_form(uv):
    u, v = uv
    m = metric_from_A2_data(v, Jet2.zero(N))
    assert (m.E - (2.0 * v ** 3).exp()).max_abs() < 1e-13
    assert (m.G - v * v * (-2.0 * v ** 3).exp()).max_abs() < 1e-13


def test_a3_builder_closed_form(uv):
    u, v = uv
    m = metric_from_A3_data(Jet2.zero(N), Jet2.zero(N))
    assert (m.E - 1.0).max_abs() == 0.0
    assert (m.G - (u - v * v) ** 2).max_abs() < 1e-14
    m = metric_from_A3_data(Jet2.zero(N), u)
    assert (m.lam - (u - v * v) * u.exp()).max_abs() < 1e-14
    m = metric_from_A3_data(u.one_like(), Jet2.zero(N))
    assert (m.rho - (u * v - v ** 3 / 3.0).exp()).max_abs() < 1e-13


@pytest.mark.parametrize("seed", range(6))
def test_builder_invariants(seed):
    rng = np.random.default_rng(seed)
    builder = metric_from_A2_data if seed % 2 == 0 else metric_from_A3_data
    m = builder(random_poly2(rng), random_poly2(rng))
    assert m.form == "k_orthogonal"
    # density identity, relative to the size of E G
    assert m.residual() < 1e-12 * max(1.0, (m.E * m.G).max_abs())
    assert check_admissible(m)
    assert m.is_semidefinite_at((0.0, 0.0))


def test_check_admissible_examples(uv):
    u, v = uv
    one, zero = u.one_like(), Jet2.zero(N)
    assert check_admissible((one, zero, v * v))
    assert check_admissible((one, zero, (u - v * v) ** 2))
    assert not check_admissible((one, zero, v))
    with pytest.raises(NotSemiDefinite):
        check_admissible((one, zero, one))


def test_check_admissible_rotated_null_direction(uv):
    # du^2 + v^2 dv^2 written in rotated coordinates: the null direction is no longer d/dv
    u, v = uv
    c, s = np.cos(0.4), np.sin(0.4)
    x, y = c * u - s * v, s * u + c * v
    dx = (c, -s)
    dy = (s, c)
    E = dx[0] ** 2 + y * y * dy[0] ** 2
    F = dx[0] * dx[1] + y * y * dy[0] * dy[1]
    G = dx[1] ** 2 + y * y * dy[1] ** 2
    assert check_admissible((E, F, G))


def test_to_K_orthogonal(uv):
    u, v = uv
    m = metric_from_coeffs((1.0 + u) ** 2, Jet2.zero(N), v * v)
    assert m.form == "orthogonal"
    k = to_K_orthogonal(m)
    assert k.form == "k_orthogonal"
    assert (k.E.restrict_v0() - 1.0).max_abs() < 1e-12
    # the reparametrization is u~ = u + u^2/2: phi(u~) = -1 + sqrt(1 + 2 u~)
    t = Jet1.var(k.order)
    phi = (1.0 + 2.0 * t).sqrt() - 1.0
    s = t + 0.5 * t * t
    assert (phi.compose(s) - t).max_abs() < 1e-12
    # idempotent
    kk = to_K_orthogonal(k)
    for a, b in ((k.E, kk.E), (k.G, kk.G), (k.lam, kk.lam)):
        assert (a - b).max_abs() < 1e-12
    # already normalized metrics are unchanged
    f = metric_from_coeffs(u.one_like(), Jet2.zero(N), v * v)
    assert (to_K_orthogonal(f).G - f.G).max_abs() < 1e-14
    with pytest.raises(NotOrthogonal):
        to_K_orthogonal(KossowskiMetric(u.one_like(), 0.1 * v, v * v + 0.01 * v * v, v, "general"))


def test_connection_examples(uv):
    u, v = uv
    alpha, beta = connection_coeffs(metric_from_coeffs(u.one_like(), Jet2.zero(N), v * v))
    assert alpha.max_abs() == 0.0 and beta.max_abs() == 0.0

    s = sphere_metric(N)
    alpha, beta = connection_coeffs(s)
    sin_u = Jet2.from_function_of_u(Jet1([0, 1, 0, -1 / 6, 0, 1 / 120, 0, -1 / 5040, 0,
                                          1 / 362880, 0, -1 / 39916800, 0], N))
    assert alpha.max_abs() < 1e-15
    assert (beta + sin_u.truncate(beta.order)).max_abs() < 1e-15


def test_connection_rejects_inadmissible(uv):
    u, v = uv
    m = KossowskiMetric(1.0 + u * v, Jet2.zero(N), v * v / (1.0 + u * v), v, "orthogonal")
    with pytest.raises(DivisionObstruction):
        connection_coeffs(m)


def test_curvature_density_examples(uv):
    u, v = uv
    assert curvature_density(flat_metric(N)).max_abs() == 0.0
    kc = curvature_density(sphere_metric(N))
    cos_u = sphere_metric(N).lam
    assert (kc - cos_u.truncate(kc.order)).max_abs() < 1e-15
    assert curvature_density(metric_from_coeffs(u.one_like(), Jet2.zero(N), v * v)).max_abs() == 0.0


def test_gaussian_curvature_regular():
    assert gaussian_curvature_regular(sphere_metric(N), 0.3, 0.2) == pytest.approx(1.0, abs=1e-8)
    assert gaussian_curvature_regular(flat_metric(N), 0.1, 0.4) == 0.0
    m = metric_from_A2_data(Jet2.var_v(N), Jet2.zero(N))
    with pytest.raises(EvaluationAtSemiDefinitePoint):
        gaussian_curvature_regular(m, 0.2, 0.0)
    # vectorised evaluation
    K = gaussian_curvature_regular(sphere_metric(N), np.array([0.1, 0.2]), np.array([0.0, 0.3]))
    assert np.allclose(np.asarray(K, dtype=float), 1.0)


def test_cross_cap_sign_example():
    u, v = Jet2.var_u(N), Jet2.var_v(N)
    m = metric_from_A2_data(u * v, Jet2.zero(N))
    # Kc ~ -3u near the origin and lam = v, so K has the sign of -u v
    assert gaussian_curvature_regular(m, 0.1, -0.05) > 0.0
    assert gaussian_curvature_regular(m, -0.1, -0.05) < 0.0
    assert gaussian_curvature_regular(m, 0.1, 0.05) < 0.0


def test_brioschi_oracle_exact_metrics():
    """Finite-difference Brioschi (step 1e-4) against the jet curvature where
    the polynomial metric has exact, moderate curvature."""
    rng = np.random.default_rng(11)
    for m, K in ((sphere_metric(16), 1.0), (flat_metric(16), 0.0)):
        for u, v in rng.uniform(-0.5, 0.5, (20, 2)):
            jet_K = float(gaussian_curvature_regular(m, u, v))
            assert abs(jet_K - brioschi_curvature(m, u, v)) < 1e-6
            assert abs(jet_K - K) < 1e-8


@pytest.mark.parametrize("seed", range(4))
def test_brioschi_oracle_builder_family(seed):
    """Jet curvature of random A2 builder metrics against Brioschi applied to
    the closed-form coefficients exp(2 v^2 h), v^2 exp(2k) / exp(2 v^2 h).

    Curvatures here reach |K| ~ 1e2, so the comparison is relative, the jets
    are taken at order 20 and the difference quotients are Richardson
    extrapolated (plain step-1e-4 quotients carry O(h^2) errors ~1e-5).
    """
    rng = np.random.default_rng(100 + seed)
    h, k = random_poly2(rng, 20), random_poly2(rng, 20)
    m = metric_from_A2_data(h, k)
    hc, kc = h.coeffs.astype(float), k.coeffs.astype(float)

    def E(u, v):
        return np.exp(2 * v * v * npoly.polyval2d(u, v, hc))

    def G(u, v):
        return v * v * np.exp(2 * npoly.polyval2d(u, v, kc)) / E(u, v)

    count = 0
    while count < 20:
        u, v = rng.uniform(-0.15, 0.15, 2)
        if abs(v) < 0.05:
            continue
        count += 1
        jet_K = float(gaussian_curvature_regular(m, u, v))
        ref = brioschi_curvature((E, lambda a, b: 0.0, G), u, v, h=1e-3, richardson=True)
        assert abs(jet_K - ref) < 1e-6 * max(1.0, abs(ref))


def test_metric_matrix_and_truncate():
    s = sphere_metric(N)
    mat = s.matrix_at(0.3, 0.0)
    assert mat[0, 0] == pytest.approx(1.0)
    assert mat[1, 1] == pytest.approx(np.cos(0.3) ** 2)
    assert s.truncate(6).order == 6
    with pytest.raises(OrderMismatch):
        KossowskiMetric(Jet2.zero(3), Jet2.zero(4), Jet2.zero(4), Jet2.zero(4))
