"""Isometric realization of Kossowski metric germs as frontals.

Given a K-orthogonal metric and data along the ``u``-axis, the second
fundamental data ``(A, B, C, D)`` are found from the Cauchy-Kowalevski
system

    A_v = (lam C / E)_u - alpha D + beta C
    C_v = D_u - beta A + alpha lam C / E

with ``B = lam C / E`` and ``D = (E Kc + lam C^2) / (E A)``, solved degree
by degree in ``v``.  The orthonormal frame ``(e1, e2, nu)`` then follows from

    Phi_u = P Phi,  P = [[0, alpha, -A], [-alpha, 0, -C], [A, C, 0]]
    Phi_v = Q Phi,  Q = [[0, beta, -B], [-beta, 0, -D], [B, D, 0]]

(rows of ``Phi`` are ``e1, e2, nu``), integrated first along the ``u``-axis
from the identity frame and then extended in ``v``.  The surface is
``f_u = rho e1``, ``f_v = (lam / rho) e2`` with ``f(0) = 0``.

Order bookkeeping for a metric of order ``N``: ``alpha`` is known to
``N - 2``, ``beta`` to ``N - 1`` and ``Kc`` to ``N - 3``, which fixes
``A, B, C, D`` to ``N - 3``, the frame to ``N - 2`` and ``f`` to ``N - 1``.
Along the ``u``-axis only ``alpha(u, 0)`` and the initial data enter, so the
axis frame is kept to ``N - 1`` and the axis curve to ``N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    IncompatibleSecondData,
    NotAdjusted,
    NotKOrthogonal,
    NotOrthogonal,
    NullInitialDirection,
    PreconditionError,
    SignClash,
    ZeroInitialA,
)
from .jets import DIVISIBILITY_TOL, DTYPE, Jet1, Jet2, scaled_residual
from .metric import KossowskiMetric, connection_coeffs, curvature_density

#: relative tolerance on the structure-equation residuals before integration
SECOND_DATA_TOL = 1e-10


@dataclass(frozen=True)
class CurveSpec:
    """Prescribed log normal curvature ``omega`` and torsion ``mu`` along the ``u``-axis."""

    omega: Jet1
    mu: Jet1


@dataclass(frozen=True)
class SecondData:
    A: Jet2
    B: Jet2
    C: Jet2
    D: Jet2

    def __neg__(self) -> "SecondData":
        return SecondData(-self.A, -self.B, -self.C, -self.D)

    def components(self):
        return (self.A, self.B, self.C, self.D)

    def max_abs(self) -> float:
        return max(j.max_abs() for j in self.components())


@dataclass(frozen=True)
class FrontalGerm:
    """Realized surface germ with its frame, second data and the source metric.

    ``f``, ``nu``, ``e1hat``, ``e2hat`` are 3-tuples of :class:`Jet2`.  The
    ``axis_*`` fields hold the same objects restricted to ``v = 0`` at one
    order higher, as produced by the axis ODE.
    """

    f: tuple
    nu: tuple
    e1hat: tuple
    e2hat: tuple
    second: SecondData
    metric: KossowskiMetric
    a: Jet1
    c: Jet1
    axis_f: tuple
    axis_frame: tuple  # (e1, e2, nu), each a 3-tuple of Jet1

    @property
    def order(self) -> int:
        return self.f[0].order


@dataclass(frozen=True)
class CurveData:
    """Invariants of the ``u``-axis curve ``f(u, 0)``.

    The top-level fields come from the initial data and ``alpha``; the
    ``from_map`` dictionary holds the same quantities measured on the
    surface jets.
    """

    a: Jet1
    c: Jet1
    omega: Optional[Jet1]
    mu: Jet1
    kappa_n: Jet1
    kappa_g: Jet1
    kappa: Jet1
    torsion: Jet1
    from_map: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# initial data

def _axis(alpha: Jet2) -> tuple[Jet1, Jet1]:
    """``alpha(u, 0)`` and ``alpha_u(u, 0)``."""
    return alpha.restrict_v0(), alpha.diff("u").restrict_v0()


def initial_data(spec: CurveSpec, alpha: Jet2) -> tuple[Jet1, Jet1]:
    """``a = -exp(omega)`` and ``c = -mu + (a alpha_u - alpha a') / (a^2 + alpha^2)``.

    ``omega`` and ``mu`` are read as exact polynomials.  ``a`` is returned at
    order ``alpha.order + 2`` (the metric order) and ``c`` at
    ``alpha.order - 1``, the order to which ``alpha_u`` is known.
    """
    n_a = alpha.order + 2
    n_c = alpha.order - 1
    a = -spec.omega.as_polynomial(n_a).exp()
    al, al_u = _axis(alpha)
    ac = a.truncate(n_c)
    al_c = al.truncate(n_c)
    num = ac * al_u - al_c * a.diff().truncate(n_c)
    c = -spec.mu.as_polynomial(n_c) + num / (ac * ac + al_c * al_c)
    return a, c


def initial_data_curvature_line(omega: Jet1) -> tuple[Jet1, Jet1]:
    """``(-exp(omega), 0)``: the axis becomes a curvature line."""
    a = -omega.exp()
    return a, a.zero_like()


def omega_from_curvature(kappa: Jet1, alpha: Jet2) -> Jet1:
    """Solve ``exp(2 omega) + kappa_g^2 = kappa^2`` for ``omega`` along the axis.

    ``kappa_g = alpha(u, 0)``.  Needs ``kappa^2 - kappa_g^2`` to have a
    positive constant term.
    """
    kg = alpha.restrict_v0()
    n = min(kappa.order, kg.order)
    rhs = kappa.truncate(n) ** 2 - kg.truncate(n) ** 2
    if not rhs.constant_term > 0.0:
        raise PreconditionError("kappa^2 - kappa_g^2 must be positive at the origin")
    return 0.5 * rhs.log()


def alternate_class(a: Jet1, c: Jet1, mu: Jet1) -> tuple[Jet1, Jet1]:
    """The other admissible initial data, ``(-a, -2 mu - c)``."""
    return -a, -2.0 * mu.as_polynomial(c.order) - c


def deformation_path(data0, data1, s: float) -> tuple[Jet1, Jet1]:
    """Linear interpolation of initial data ``(a, c)``.

    Both ``a0(0)`` and ``a1(0)`` must be strictly negative; otherwise
    :class:`SignClash` is raised (flip the orientation of one endpoint
    first).
    """
    (a0, c0), (a1, c1) = data0, data1
    if not (a0.constant_term < 0.0 and a1.constant_term < 0.0):
        raise SignClash(f"a0(0) = {a0.constant_term:g}, a1(0) = {a1.constant_term:g}; both must be negative")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    na, nc = min(a0.order, a1.order), min(c0.order, c1.order)
    a = (1.0 - s) * a0.truncate(na) + s * a1.truncate(na)
    c = (1.0 - s) * c0.truncate(nc) + s * c1.truncate(nc)
    return a, c


# ---------------------------------------------------------------------------
# second fundamental data

def _require_orthogonal(m: KossowskiMetric):
    if m.form == "general" or m.F.max_abs() > DIVISIBILITY_TOL:
        raise NotOrthogonal("the realization system is written for F = 0")


def _bd(lam_e: Jet2, kc: Jet2, A: Jet2, C: Jet2) -> tuple[Jet2, Jet2]:
    """``B = lam C / E`` and ``D = Kc / A + (lam / E) C^2 / A``."""
    B = lam_e * C
    D = (kc + B * C) * A.reciprocal()
    return B, D


def solve_second_data(m: KossowskiMetric, a: Jet1, c: Jet1) -> SecondData:
    """Cauchy-Kowalevski solution for ``(A, B, C, D)`` with ``A(u,0) = a``, ``C(u,0) = c``.

    The output has order ``N - 3``.  ``a`` and ``c`` are used as polynomials.
    """
    _require_orthogonal(m)
    if a.constant_term == 0.0:
        raise ZeroInitialA("a(0) must not vanish")
    alpha, beta = connection_coeffs(m)
    kc = curvature_density(m)
    M = kc.order
    lam_e = (m.lam / m.E).truncate(M)
    al, be = alpha.truncate(M - 1), beta.truncate(M - 1)
    Acoef = np.zeros((M + 1, M + 1), dtype=DTYPE)
    Ccoef = np.zeros((M + 1, M + 1), dtype=DTYPE)
    Acoef[:, 0] = a.as_polynomial(M).coeffs
    Ccoef[:, 0] = c.as_polynomial(M).coeffs
    for n in range(M):
        A, C = Jet2(Acoef, M), Jet2(Ccoef, M)
        B, D = _bd(lam_e, kc, A, C)
        A1, B1, C1, D1 = (j.truncate(M - 1) for j in (A, B, C, D))
        rhs_a = B.diff("u") - al * D1 + be * C1
        rhs_c = D.diff("u") - be * A1 + al * B1
        rows = M - n  # i ranges over 0..M-n-1
        Acoef[:rows, n + 1] = rhs_a.coeffs[:rows, n] / (n + 1)
        Ccoef[:rows, n + 1] = rhs_c.coeffs[:rows, n] / (n + 1)
    A, C = Jet2(Acoef, M), Jet2(Ccoef, M)
    B, D = _bd(lam_e, kc, A, C)
    return SecondData(A, B, C, D)


def second_data_residuals(m: KossowskiMetric, sd: SecondData, scaled: bool = False) -> dict:
    """Structure-equation residuals (max coefficient).

    ``symm`` and ``gauss`` are compared at the order of ``sd``, the two
    Codazzi equations one order lower.  ``b_axis`` is ``max |B(u, 0)|``,
    reported when ``lam`` vanishes on the ``u``-axis.  With ``scaled`` set
    each coefficient is divided by ``max(1, sum of |terms|)`` (see
    :func:`~kossowski.jets.scaled_residual`).
    """
    alpha, beta = connection_coeffs(m)
    kc = curvature_density(m)
    M = min(sd.A.order, kc.order)
    A, B, C, D = (j.truncate(M) for j in sd.components())
    E, lam, kc = m.E.truncate(M), m.lam.truncate(M), kc.truncate(M)
    k = M - 1
    al, be = alpha.truncate(k), beta.truncate(k)
    A1, B1, C1, D1 = (j.truncate(k) for j in (A, B, C, D))
    Bu, Av, Du, Cv = B.diff("u"), A.diff("v"), D.diff("u"), C.diff("v")
    res = {
        "cod1": (Bu - Av - al * D1 + be * C1,
                 lambda: Bu.abs() + Av.abs() + al.abs() * D1.abs() + be.abs() * C1.abs()),
        "cod2": (Du - Cv - be * A1 + al * B1,
                 lambda: Du.abs() + Cv.abs() + be.abs() * A1.abs() + al.abs() * B1.abs()),
        "symm": (E * B - lam * C, lambda: E.abs() * B.abs() + lam.abs() * C.abs()),
        "gauss": (A * D - B * C - kc, lambda: A.abs() * D.abs() + B.abs() * C.abs() + kc.abs()),
    }
    out = {}
    for name, (r, mag) in res.items():
        out[name] = scaled_residual(r, mag()) if scaled else r.max_abs()
    if np.max(np.abs(m.lam.coeffs[:, 0])) <= DIVISIBILITY_TOL:
        out["b_axis"] = float(np.max(np.abs(B.coeffs[:, 0])))
    return out


# ---------------------------------------------------------------------------
# frame integration

def _frame_matrix(x, A, C):
    """``[[0, x, -A], [-x, 0, -C], [A, C, 0]]`` as a nested list of jets."""
    z = x.zero_like()
    return [[z, x, -A], [-x, z, -C], [A, C, z]]


def _matmul(P, Phi):
    return [[P[i][0] * Phi[0][j] + P[i][1] * Phi[1][j] + P[i][2] * Phi[2][j]
             for j in range(3)] for i in range(3)]


def _axis_frame(alpha_axis: Jet1, a: Jet1, c: Jet1, order: int):
    """Series solution of ``Phi' = P(u) Phi`` with ``Phi(0) = I`` to ``order``."""
    K = order - 1
    P = _frame_matrix(alpha_axis.truncate(K), a.as_polynomial(K), c.as_polynomial(K))
    Pc = np.array([[P[i][j].coeffs for j in range(3)] for i in range(3)])  # (3,3,K+1)
    Phi = np.zeros((3, 3, order + 1), dtype=DTYPE)
    Phi[:, :, 0] = np.eye(3)
    for k in range(order):
        # coefficient k of P Phi
        acc = np.zeros((3, 3), dtype=DTYPE)
        for j in range(k + 1):
            acc += Pc[:, :, j] @ Phi[:, :, k - j]
        Phi[:, :, k + 1] = acc / (k + 1)
    return [[Jet1(Phi[i, j], order) for j in range(3)] for i in range(3)]


def integrate_frame(m: KossowskiMetric, sd: SecondData, a: Jet1 | None = None,
                    c: Jet1 | None = None, *, check: bool = True) -> FrontalGerm:
    """Integrate the frame and the surface from second fundamental data.

    ``a`` and ``c`` default to ``A(u, 0)`` and ``C(u, 0)``; passing the exact
    initial data keeps one more order along the axis.  With ``check`` set,
    second data whose scaled structure-equation residuals exceed
    ``SECOND_DATA_TOL`` are refused with
    :class:`IncompatibleSecondData`.
    """
    _require_orthogonal(m)
    N = m.order
    if check:
        res = second_data_residuals(m, sd, scaled=True)
        bad = {k: v for k, v in res.items() if v > SECOND_DATA_TOL}
        if bad:
            raise IncompatibleSecondData(f"structure equations violated: {bad}")
    alpha, beta = connection_coeffs(m)
    if a is None:
        a = sd.A.restrict_v0()
    if c is None:
        c = sd.C.restrict_v0()
    # axis: frame to N - 1, curve to N
    frame_ax = _axis_frame(alpha.restrict_v0(), a, c, N - 1)
    rho = m.rho
    rho_ax = rho.restrict_v0().truncate(N - 1)
    f_ax = tuple((rho_ax * frame_ax[0][j]).as_polynomial(N).integrate() for j in range(3))
    # v-extension of the frame to L = N - 2
    L = N - 2
    Q = _frame_matrix(beta.truncate(L - 1), sd.B.truncate(L - 1), sd.D.truncate(L - 1))
    Phi = np.zeros((3, 3, L + 1, L + 1), dtype=DTYPE)
    for i in range(3):
        for j in range(3):
            Phi[i, j, :, 0] = frame_ax[i][j].truncate(L).coeffs
    for n in range(L):
        jets = [[Jet2(Phi[i, j], L).truncate(L - 1) for j in range(3)] for i in range(3)]
        rhs = _matmul(Q, jets)
        rows = L - n
        for i in range(3):
            for j in range(3):
                Phi[i, j, :rows, n + 1] = rhs[i][j].coeffs[:rows, n] / (n + 1)
    frame = [[Jet2(Phi[i, j], L) for j in range(3)] for i in range(3)]
    # surface to N - 1
    hv = (m.lam / rho).truncate(L)
    fc = np.zeros((3, N, N), dtype=DTYPE)
    for j in range(3):
        fc[j, :, 0] = f_ax[j].truncate(N - 1).coeffs
        fv = (hv * frame[1][j]).coeffs
        fc[j, :N - 1, 1:] = fv[:, :N - 1] / np.arange(1, N)[None, :]
    f = tuple(Jet2(fc[j], N - 1) for j in range(3))
    return FrontalGerm(
        f=f,
        nu=tuple(frame[2]),
        e1hat=tuple(frame[0]),
        e2hat=tuple(frame[1]),
        second=sd,
        metric=m,
        a=a,
        c=c,
        axis_f=f_ax,
        axis_frame=tuple(tuple(row) for row in frame_ax),
    )


def realize(m: KossowskiMetric, spec: CurveSpec, mode: str = "general") -> FrontalGerm:
    """Frontal germ inducing ``m`` with normal curvature ``exp(omega)`` and
    torsion ``mu`` along the ``u``-axis (``mode="general"``), or with the
    axis a curvature line (``mode="curvature_line"``, ``mu`` ignored)."""
    if m.form != "k_orthogonal":
        raise NotKOrthogonal("realize needs K-orthogonal coordinates; see to_K_orthogonal")
    alpha, _ = connection_coeffs(m)
    if mode == "general":
        a, c = initial_data(spec, alpha)
    elif mode == "curvature_line":
        a, c = initial_data_curvature_line(spec.omega.as_polynomial(m.order))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return realize_from_data(m, a, c)


def realize_from_data(m: KossowskiMetric, a: Jet1, c: Jet1) -> FrontalGerm:
    sd = solve_second_data(m, a, c)
    return integrate_frame(m, sd, a, c)


# ---------------------------------------------------------------------------
# curve invariants

def _dot(x, y):
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def _cross(x, y):
    return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])


def curve_invariants(g: FrontalGerm) -> CurveData:
    """Normal, geodesic and total curvature and torsion of ``f(u, 0)``.

    Computed from the initial data (``kappa_n = -a``, ``kappa_g = alpha``,
    ``kappa = sqrt(alpha^2 + a^2)``, ``mu = -c + (a alpha_u - alpha a') /
    kappa^2``) and, independently, from the axis jets of ``f`` and ``nu``
    (``from_map``).  Raises :class:`NullInitialDirection` if ``f_u(0, 0) = 0``.
    """
    g1 = [x.diff() for x in g.axis_f]  # order N - 1
    speed2 = _dot(g1, g1)
    if speed2.constant_term <= DIVISIBILITY_TOL:
        raise NullInitialDirection("the u-axis is not a regular curve of f")
    alpha, _ = connection_coeffs(g.metric)
    al, al_u = _axis(alpha)
    nk = al_u.order
    a = g.a.as_polynomial(nk + 1)
    c = g.c.as_polynomial(nk)
    kappa_n = -a
    kappa2 = al * al + a.truncate(al.order) * a.truncate(al.order)
    kappa = kappa2.sqrt()
    num = a.truncate(nk) * al_u - al.truncate(nk) * a.diff()
    torsion = -c + num / kappa2.truncate(nk)
    omega = kappa_n.log() if kappa_n.constant_term > 0 else None

    # measured on the map
    g2 = [x.diff() for x in g1]  # N - 2
    g3 = [x.diff() for x in g2]  # N - 3
    n2 = g2[0].order
    nu_ax = [x.truncate(n2) for x in g.axis_frame[2]]
    e2_ax = [x.truncate(n2) for x in g.axis_frame[1]]
    s2 = speed2.truncate(n2)
    kn_map = _dot(g2, nu_ax) / s2
    kg_map = _dot(g2, e2_ax) / s2
    g1t = [x.truncate(n2) for x in g1]
    cr = _cross(g1t, g2)
    cr2 = _dot(cr, cr)
    kappa_map = (cr2 / (s2 * s2 * s2)).sqrt()
    n3 = g3[0].order
    det = _dot([x.truncate(n3) for x in cr], g3)
    tors_map = det / cr2.truncate(n3)
    return CurveData(
        a=g.a, c=g.c, omega=omega, mu=torsion,
        kappa_n=kappa_n, kappa_g=al, kappa=kappa, torsion=torsion,
        from_map={"kappa_n": kn_map, "kappa_g": kg_map, "kappa": kappa_map, "torsion": tors_map},
    )


def limiting_normal_curvature(f, nu=None, tol: float = 1e-12) -> float:
    """``f_uu . nu / |f_u|^2`` at the origin in adjusted coordinates.

    ``f`` may be a :class:`FrontalGerm` (then ``nu`` is ignored) or a
    3-tuple of :class:`Jet2` with ``nu`` its unit normal.  If ``f_u`` rather
    than ``f_v`` vanishes at the origin the coordinates are swapped.  Raises
    :class:`NotAdjusted` if neither or both first derivatives vanish.
    """
    if isinstance(f, FrontalGerm):
        nu = f.nu
        f = f.f
    fu = np.array([x[1, 0] for x in f])
    fv = np.array([x[0, 1] for x in f])
    nfu, nfv = np.linalg.norm(fu), np.linalg.norm(fv)
    if nfv <= tol < nfu:
        fuu = np.array([2.0 * x[2, 0] for x in f])
        den = nfu
    elif nfu <= tol < nfv:
        fuu = np.array([2.0 * x[0, 2] for x in f])
        den = nfv
    else:
        raise NotAdjusted("exactly one of f_u(0), f_v(0) must vanish")
    n0 = np.array([x[0, 0] for x in nu])
    return float(fuu @ n0 / den ** 2)
