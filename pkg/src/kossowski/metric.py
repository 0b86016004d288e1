"""Kossowski metric germs.

A metric germ ``ds^2 = E du^2 + 2F du dv + G dv^2`` is stored as three
:class:`~kossowski.jets.Jet2` together with a signed area density ``lam``
satisfying ``E G - F^2 = lam^2``.  The zero set of ``lam`` is the set of
semi-definite points.

In K-orthogonal coordinates the metric reads ``(rho du)^2 + (lam dv / rho)^2``
with ``rho = sqrt(E)``, ``E(u, 0) = 1`` and ``E_v`` vanishing where ``lam``
does; the connection and curvature helpers below are written for that case
but also accept non-orthogonal (``form="general"``) metrics, which arise as
induced metrics of map germs.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import (
    DivisionObstruction,
    EvaluationAtSemiDefinitePoint,
    NoJetSquareRoot,
    NotAdjusted,
    NotOrthogonal,
    NotSemiDefinite,
    OrderMismatch,
)
from .jets import DIVISIBILITY_TOL, DTYPE, Jet1, Jet2, jet_div_exact, jet_sqrt_square

#: absolute tolerance for the admissibility conditions
ADMISSIBLE_TOL = 1e-10

FORMS = ("orthogonal", "k_orthogonal", "general")


@dataclass(frozen=True)
class KossowskiMetric:
    """First fundamental form jets plus the signed area density.

    All four jets share one order.  ``form`` is ``"k_orthogonal"``,
    ``"orthogonal"`` (``F = 0`` only) or ``"general"``.
    """

    E: Jet2
    F: Jet2
    G: Jet2
    lam: Jet2
    form: str = "orthogonal"

    def __post_init__(self):
        orders = {self.E.order, self.F.order, self.G.order, self.lam.order}
        if len(orders) != 1:
            raise OrderMismatch(f"metric jets have mixed orders {sorted(orders)}")
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")

    @property
    def order(self) -> int:
        return self.E.order

    @property
    def rho(self) -> Jet2:
        return self.E.sqrt()

    def is_semidefinite_at(self, p=(0.0, 0.0), tol: float = ADMISSIBLE_TOL) -> bool:
        return abs(float(self.lam(*p))) <= tol

    def truncate(self, order: int) -> "KossowskiMetric":
        return KossowskiMetric(self.E.truncate(order), self.F.truncate(order),
                               self.G.truncate(order), self.lam.truncate(order), self.form)

    def matrix_at(self, u: float, v: float) -> np.ndarray:
        e, f, g = (float(j(u, v)) for j in (self.E, self.F, self.G))
        return np.array([[e, f], [f, g]])

    def residual(self) -> float:
        """Largest coefficient of ``E G - F^2 - lam^2``."""
        return (self.E * self.G - self.F * self.F - self.lam * self.lam).max_abs()


def _is_k_orthogonal(E: Jet2, F: Jet2, lam: Jet2, tol: float = DIVISIBILITY_TOL) -> bool:
    if F.max_abs() > tol:
        return False
    e0 = E.coeffs[:, 0].copy()
    e0[0] -= 1.0
    if np.max(np.abs(e0)) > tol:
        return False
    if abs(lam[0, 0]) > tol:
        return True
    try:
        jet_div_exact(E.diff("v"), lam.truncate(lam.order - 1), tol)
    except DivisionObstruction:
        return False
    return True


def _assemble(E: Jet2, F: Jet2, G: Jet2, lam: Jet2) -> KossowskiMetric:
    n = min(E.order, F.order, G.order, lam.order)
    E, F, G, lam = (j.truncate(n) for j in (E, F, G, lam))
    if F.max_abs() > DIVISIBILITY_TOL:
        form = "general"
    elif _is_k_orthogonal(E, F, lam):
        form = "k_orthogonal"
    else:
        form = "orthogonal"
    return KossowskiMetric(E, F, G, lam, form)


def metric_with_density(E: Jet2, F: Jet2, G: Jet2, lam: Jet2, tol: float = 1e-10) -> KossowskiMetric:
    """Assemble a metric from jets whose area density is already known.

    Orders are brought to the lowest among the inputs; ``E G - F^2 = lam^2``
    is checked to ``tol`` relative to the size of ``E G``.
    """
    n = min(E.order, F.order, G.order, lam.order)
    E, F, G, lam = (j.truncate(n) for j in (E, F, G, lam))
    prod = E * G
    res = (prod - F * F - lam * lam).max_abs()
    if res > tol * max(1.0, prod.max_abs()):
        raise NoJetSquareRoot(f"E G - F^2 differs from lam^2 by {res:.3e}")
    if not E[0, 0] > 0.0:
        raise NotAdjusted("E(0,0) must be positive (d/du may not be a null direction)")
    return _assemble(E, F, G, lam)


def metric_from_coeffs(E: Jet2, F: Jet2, G: Jet2, *, allow_general: bool = False) -> KossowskiMetric:
    """Build a metric from its coefficient jets, extracting ``lam``.

    ``F`` must vanish unless ``allow_general`` is set.  At a semi-definite
    origin the square root costs one order, so the returned metric has
    order ``N - 1``; at a regular origin the order is kept.  The sign of
    ``lam`` is fixed so that its lowest-degree part has a positive
    ``v``-coefficient (positive ``u``-coefficient if that vanishes; positive
    constant term at a regular point).
    """
    if len({E.order, F.order, G.order}) != 1:
        raise OrderMismatch("E, F, G must share one order")
    if not allow_general and F.max_abs() > DIVISIBILITY_TOL:
        raise NotOrthogonal("F does not vanish; only orthogonal coordinates are accepted")
    if not E[0, 0] > 0.0:
        raise NotAdjusted("E(0,0) must be positive (d/du may not be a null direction)")
    lam = jet_sqrt_square(E * G - F * F)
    return _assemble(E, F, G, lam)


def metric_from_A2_data(h: Jet2, k: Jet2) -> KossowskiMetric:
    """K-orthogonal metric with an A2 point at the origin.

    ``rho = exp(v^2 h)``, ``lam = v exp(k)``; the characteristic curve is the
    ``u``-axis.
    """
    h._check(k)
    v = Jet2.var_v(h.order)
    rho = (v * v * h).exp()
    lam = v * k.exp()
    return _from_rho_lam(rho, lam)


def metric_from_A3_data(h: Jet2, k: Jet2) -> KossowskiMetric:
    """K-orthogonal metric with an A3 point at the origin.

    ``rho = exp(int_0^v (u - w^2) h(u, w) dw)``, ``lam = (u - v^2) exp(k)``;
    the semi-definite set is the parabola ``u = v^2``.
    """
    h._check(k)
    n = h.order
    u, v = Jet2.var_u(n), Jet2.var_v(n)
    rho = ((u - v * v) * h).integrate_v().exp()
    lam = (u - v * v) * k.exp()
    return _from_rho_lam(rho, lam)


def _from_rho_lam(rho: Jet2, lam: Jet2) -> KossowskiMetric:
    g = lam / rho
    return KossowskiMetric(rho * rho, Jet2.zero(rho.order), g * g, lam, "k_orthogonal")


def flat_metric(order: int = 12) -> KossowskiMetric:
    one = Jet2.constant(1.0, order)
    return KossowskiMetric(one, Jet2.zero(order), one, one, "k_orthogonal")


def sphere_metric(order: int = 12) -> KossowskiMetric:
    """``du^2 + cos^2(u) dv^2``: the unit sphere, parametrized by latitude ``u``."""
    c = np.zeros(order + 1, dtype=DTYPE)
    for i in range(0, order + 1, 2):
        c[i] = DTYPE((-1) ** (i // 2)) / DTYPE(math.factorial(i))
    cos_u = Jet2.from_function_of_u(Jet1(c))
    return KossowskiMetric(Jet2.constant(1.0, order), Jet2.zero(order), cos_u * cos_u, cos_u, "k_orthogonal")


def _fact(n: int) -> float:
    return float(np.prod(np.arange(1, n + 1))) if n else 1.0


# ---------------------------------------------------------------------------
# admissibility

def _null_frame(mat: np.ndarray, tol: float) -> np.ndarray:
    """Columns ``(t, n)``: an orthonormal pair with ``n`` spanning the kernel."""
    if abs(np.linalg.det(mat)) > tol:
        raise NotSemiDefinite("metric is positive definite at the point")
    w, vecs = np.linalg.eigh(mat)
    if np.max(np.abs(w)) <= tol:
        raise NotSemiDefinite("metric vanishes identically at the point (rank zero)")
    n = vecs[:, int(np.argmin(np.abs(w)))]
    if n[1] < 0:
        n = -n
    t = np.array([n[1], -n[0]])
    return np.column_stack([t, n])


def check_admissible(m, p=(0.0, 0.0), tol: float = ADMISSIBLE_TOL) -> bool:
    """Admissibility at a rank-one semi-definite point.

    ``m`` is a :class:`KossowskiMetric` or an ``(E, F, G)`` tuple.  After a
    linear change of coordinates that makes ``d/dv`` null at ``p``, the
    conditions are ``F = G = 0``, ``E_v = 2 F_u`` and ``G_u = G_v = 0``.
    Raises :class:`NotSemiDefinite` if ``p`` is not a rank-one semi-definite
    point.
    """
    E, F, G = (m.E, m.F, m.G) if isinstance(m, KossowskiMetric) else m
    pu, pv = p
    E, F, G = (j.shift(pu, pv) for j in (E, F, G))
    mat = np.array([[E[0, 0], F[0, 0]], [F[0, 0], G[0, 0]]], dtype=float)
    M = _null_frame(mat, tol)
    if not np.allclose(M, np.eye(2), atol=0.0):
        E, F, G = _linear_pullback(E, F, G, M)
    checks = (F[0, 0], G[0, 0], E[0, 1] - 2.0 * F[1, 0], G[1, 0], G[0, 1])
    return bool(max(abs(c) for c in checks) <= tol)


def _linear_pullback(E, F, G, M):
    """First fundamental form after the substitution ``x = M y``."""
    E, F, G = (j.compose_linear(M) for j in (E, F, G))
    (a, b), (c, d) = M
    E2 = a * a * E + 2 * a * c * F + c * c * G
    F2 = a * b * E + (a * d + b * c) * F + c * d * G
    G2 = b * b * E + 2 * b * d * F + d * d * G
    return E2, F2, G2


# ---------------------------------------------------------------------------
# normalisation and curvature

def to_K_orthogonal(m: KossowskiMetric) -> KossowskiMetric:
    """Reparametrize ``u`` by arc length along the ``u``-axis.

    With ``s(u) = int_0^u sqrt(E(t, 0)) dt`` and ``phi = s^{-1}`` the new
    coefficients are ``E(phi, v) phi'^2``, ``G(phi, v)``, ``lam(phi, v) phi'``.
    The order is preserved; the operation is idempotent.
    """
    if m.F.max_abs() > DIVISIBILITY_TOL:
        raise NotOrthogonal("to_K_orthogonal needs F = 0")
    n = m.order
    e_axis = m.E.restrict_v0()
    s = e_axis.sqrt().integrate()
    phi = s.revert()
    dphi = Jet2.from_function_of_u(e_axis.compose(phi).sqrt().reciprocal())
    E = m.E.compose_u(phi) * dphi * dphi
    G = m.G.compose_u(phi)
    lam = m.lam.compose_u(phi) * dphi
    return _assemble(E, Jet2.zero(n), G, lam)


def connection_coeffs(m: KossowskiMetric) -> tuple[Jet2, Jet2]:
    """Connection jets ``(alpha, beta)`` of the orthonormal frame.

    For ``F = 0`` these are ``alpha = -E_v / (2 lam)`` and
    ``beta = (2 E lam_u - lam E_u) / (2 E^2)``.  In general, with
    ``rho = sqrt(E)``, ``k = F / rho`` and ``h = lam / rho``,
    ``alpha = (k_u - rho_v) rho / lam`` and ``beta = (k alpha + h_u) / rho``.
    Orders: ``alpha`` has ``N - 2``, ``beta`` has ``N - 1``
    (``N - 2`` for non-orthogonal input).
    Raises :class:`DivisionObstruction` if the numerator of ``alpha`` is not
    divisible by ``lam`` (the metric is then not admissible).
    """
    n = m.order
    if m.form == "general":
        rho = m.rho
        k = m.F / rho
        h = m.lam / rho
        num = (k.diff("u") - rho.diff("v")) * rho.truncate(n - 1)
        alpha = jet_div_exact(num, m.lam.truncate(n - 1))
        beta = (k.truncate(n - 2) * alpha + h.diff("u").truncate(n - 2)) / rho.truncate(n - 2)
        return alpha, beta
    E, lam = m.E, m.lam
    alpha = jet_div_exact(E.diff("v"), lam.truncate(n - 1)) * -0.5
    E1 = E.truncate(n - 1)
    beta = (2.0 * E1 * lam.diff("u") - lam.truncate(n - 1) * E.diff("u")) / (2.0 * E1 * E1)
    return alpha, beta


def curvature_density(m: KossowskiMetric) -> Jet2:
    """``alpha_v - beta_u``, the smooth extension of ``K lam`` (order ``N - 3``)."""
    alpha, beta = connection_coeffs(m)
    n = m.order - 3
    return alpha.diff("v").truncate(n) - beta.diff("u").truncate(n)


def gaussian_curvature_regular(m: KossowskiMetric, u, v, tol: float = 1e-12, kcheck: Jet2 | None = None):
    """Gaussian curvature at regular points, ``K = (alpha_v - beta_u) / lam``.

    ``u`` and ``v`` may be arrays.  Raises
    :class:`EvaluationAtSemiDefinitePoint` when ``|lam| <= tol`` anywhere.
    """
    lam = np.asarray(m.lam(u, v))
    if np.any(np.abs(lam) <= tol):
        raise EvaluationAtSemiDefinitePoint("K is undefined where lam vanishes")
    if kcheck is None:
        kcheck = curvature_density(m)
    return kcheck(u, v) / lam
