"""Independent checks: fixture map germs, induced metrics and residuals.

Nothing in here feeds the realization pipeline; the functions recompute
metric quantities from surface jets (or by finite differences) so that the
pipeline output can be compared against them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MetricMismatch, NoJetSquareRoot, NoNormal, DegenerateSemiDefinitePoint, DivisionObstruction
from .jets import Jet2, jet_div_exact, jet_sqrt_square, scaled_residual
from .metric import KossowskiMetric, metric_with_density
from .realization import FrontalGerm, SecondData

#: tolerance for the +/- comparison of second fundamental data
CONGRUENCE_TOL = 1e-10

FIXTURES = ("cuspidal_edge", "swallowtail", "cross_cap", "cuspidal_cross_cap", "ms_example")


@dataclass(frozen=True)
class MapGerm:
    """A map germ ``f`` with its unit normal ``nu`` (``None`` if not a frontal)."""

    f: tuple
    nu: Optional[tuple]
    name: str = ""

    @property
    def order(self) -> int:
        return self.f[0].order


def _dot(x, y):
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def _cross(x, y):
    return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])


def _det3(x, y, z):
    return _dot(_cross(x, y), z)


def _polymap(terms, order):
    return tuple(Jet2.from_terms(t, order) for t in terms)


_FIXTURE_TERMS = {
    "cuspidal_edge": ({(2, 0): 1.0}, {(3, 0): 1.0}, {(0, 1): 1.0}),
    "swallowtail": ({(4, 0): 3.0, (2, 1): 1.0}, {(3, 0): 4.0, (1, 1): 2.0}, {(0, 1): 1.0}),
    "cross_cap": ({(1, 0): 1.0}, {(1, 1): 1.0}, {(0, 2): 1.0}),
    "cuspidal_cross_cap": ({(1, 0): 1.0}, {(0, 2): 1.0}, {(1, 3): 1.0}),
    "ms_example": ({(1, 0): 1.0}, {(0, 2): 1.0}, {(3, 0): 0.5, (0, 3): 1.0 / 6.0}),
}


def unit_normal(f, order: int | None = None):
    """Unit normal ``(f_u x f_v) / lam`` with ``lam^2 = |f_u x f_v|^2``.

    ``f`` should be exact polynomials; the result is accurate to
    ``f.order - 3`` and returned at ``order`` (default: that value).
    Returns ``None`` when ``|f_u x f_v|^2`` has no jet square root, i.e.
    when ``f`` admits no smooth unit normal.
    """
    n_in = f[0].order
    fu = [x.diff("u") for x in f]
    fv = [x.diff("v") for x in f]
    cr = _cross(fu, fv)
    try:
        lam = jet_sqrt_square(_dot(cr, cr))
    except (NoJetSquareRoot, DegenerateSemiDefinitePoint):
        return None
    k = lam.order
    try:
        nu = tuple(jet_div_exact(x.truncate(k), lam) for x in cr)
    except DivisionObstruction:
        return None
    out = n_in - 3 if order is None else order
    return tuple(x.truncate(out) for x in nu)


def normal_form(kind: str, order: int = 12) -> MapGerm:
    """Polynomial fixtures: cuspidal edge, swallowtail, cross cap,
    cuspidal cross cap and a parabolic cuspidal edge (``ms_example``)."""
    if kind not in _FIXTURE_TERMS:
        raise ValueError(f"unknown fixture {kind!r}; choose from {FIXTURES}")
    f = _polymap(_FIXTURE_TERMS[kind], order)
    hi = _polymap(_FIXTURE_TERMS[kind], order + 3)
    nu = unit_normal(hi, order)
    return MapGerm(f, nu, kind)


def induced_metric(g) -> tuple[Jet2, Jet2, Jet2, Jet2]:
    """``(E, F, G, lam)`` of a :class:`MapGerm` or :class:`FrontalGerm`.

    ``lam = det(f_u, f_v, nu)``; all four jets share the lowest available order.
    """
    if g.nu is None:
        raise NoNormal("map germ has no unit normal (not a frontal)")
    fu = [x.diff("u") for x in g.f]
    fv = [x.diff("v") for x in g.f]
    n = min(fu[0].order, g.nu[0].order)
    fu = [x.truncate(n) for x in fu]
    fv = [x.truncate(n) for x in fv]
    nu = [x.truncate(n) for x in g.nu]
    return _dot(fu, fu), _dot(fu, fv), _dot(fv, fv), _det3(fu, fv, nu)


def _swap(j: Jet2) -> Jet2:
    return Jet2(j.coeffs.T, j.order)


def fixture_metric(g: MapGerm) -> KossowskiMetric:
    """Induced metric of a fixture as a :class:`KossowskiMetric`.

    If ``d/du`` is null at the origin the roles of ``u`` and ``v`` are
    exchanged first so that ``E(0, 0) > 0``.
    """
    E, F, G, lam = induced_metric(g)
    if E[0, 0] <= 0.0:
        E, F, G, lam = _swap(G), _swap(F), _swap(E), -_swap(lam)
    return metric_with_density(E, F, G, lam)


def swapped(g: MapGerm) -> MapGerm:
    """The same germ with ``u`` and ``v`` exchanged (normal flipped to keep orientation)."""
    nu = None if g.nu is None else tuple(-_swap(x) for x in g.nu)
    return MapGerm(tuple(_swap(x) for x in g.f), nu, g.name)


def map_euler_density(g) -> Jet2:
    """``(L N - M^2) / lam``, the coefficient of the Euler form for a map germ."""
    if g.nu is None:
        raise NoNormal("map germ has no unit normal (not a frontal)")
    E, F, G, lam = induced_metric(g)
    n = lam.order - 1
    fuu = [x.diff("u").diff("u") for x in g.f]
    fuv = [x.diff("u").diff("v") for x in g.f]
    fvv = [x.diff("v").diff("v") for x in g.f]
    n = min(n, fuu[0].order)
    nu = [x.truncate(n) for x in g.nu]
    L = _dot([x.truncate(n) for x in fuu], nu)
    M = _dot([x.truncate(n) for x in fuv], nu)
    N = _dot([x.truncate(n) for x in fvv], nu)
    num = L * N - M * M
    if abs(lam[0, 0]) > 1e-12:
        return num / lam.truncate(n)
    return jet_div_exact(num, lam.truncate(n))


def first_form_residual(g: FrontalGerm, order: int | None = None, scaled: bool = False) -> float:
    """Largest coefficient difference between the induced first form of
    ``g`` and ``g.metric`` at ``order`` (default ``N - 2``).

    ``lam`` is compared up to sign.  With ``scaled`` set, each coefficient
    difference is divided by ``max(1, sum of |terms|)`` of the products that
    formed it (see :func:`~kossowski.jets.scaled_residual`).
    """
    m = g.metric
    n = m.order - 2 if order is None else order
    fu = [x.diff("u") for x in g.f]
    fv = [x.diff("v") for x in g.f]
    n = min(n, fu[0].order, g.nu[0].order)
    fu = [x.truncate(n) for x in fu]
    fv = [x.truncate(n) for x in fv]
    nu = [x.truncate(n) for x in g.nu]
    E, F, G = _dot(fu, fu), _dot(fu, fv), _dot(fv, fv)
    lam = _det3(fu, fv, nu)
    mE, mF, mG, mlam = (x.truncate(n) for x in (m.E, m.F, m.G, m.lam))
    sgn = 1.0 if (lam - mlam).max_abs() <= (lam + mlam).max_abs() else -1.0
    pairs = [(E - mE, fu, fu, mE), (F - mF, fu, fv, mF), (G - mG, fv, fv, mG)]
    if not scaled:
        vals = [r.max_abs() for r, *_ in pairs] + [(lam - sgn * mlam).max_abs()]
        return float(max(vals))
    vals = []
    for r, x, y, ref in pairs:
        mag = _dot([t.abs() for t in x], [t.abs() for t in y]) + ref.abs()
        vals.append(scaled_residual(r, mag))
    afu, afv, anu = ([t.abs() for t in v] for v in (fu, fv, nu))
    mag = mlam.abs()
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (1, 0, 2), (2, 1, 0)):
        mag = mag + afu[i] * afv[j] * anu[k]
    vals.append(scaled_residual(lam - sgn * mlam, mag))
    return float(max(vals))


def frame_residuals(g: FrontalGerm) -> dict:
    """Residuals of the frame equations and orthonormality of a realized germ."""
    m, sd = g.metric, g.second
    n = sd.A.order
    e1, e2, nu = ([x.truncate(n) for x in v] for v in (g.e1hat, g.e2hat, g.nu))
    rho = m.rho.truncate(n)
    h = (m.lam / m.rho).truncate(n)
    fu = [x.diff("u").truncate(n) for x in g.f]
    fv = [x.diff("v").truncate(n) for x in g.f]
    k = n - 1
    nu_u = [x.diff("u").truncate(k) for x in g.nu]
    nu_v = [x.diff("v").truncate(k) for x in g.nu]
    A, B, C, D = (x.truncate(k) for x in sd.components())
    e1k, e2k = [x.truncate(k) for x in e1], [x.truncate(k) for x in e2]
    cr = _cross(e1, e2)
    out = {
        "f_u": max((fu[i] - rho * e1[i]).max_abs() for i in range(3)),
        "f_v": max((fv[i] - h * e2[i]).max_abs() for i in range(3)),
        "nu_cross": max((nu[i] - cr[i]).max_abs() for i in range(3)),
        "nu_u": max((nu_u[i] - A * e1k[i] - C * e2k[i]).max_abs() for i in range(3)),
        "nu_v": max((nu_v[i] - B * e1k[i] - D * e2k[i]).max_abs() for i in range(3)),
    }
    vecs = (e1, e2, nu)
    orth = 0.0
    for i in range(3):
        for j in range(i, 3):
            d = _dot(vecs[i], vecs[j]) - (1.0 if i == j else 0.0)
            orth = max(orth, d.max_abs())
    out["orthonormal"] = orth
    return out


def congruence_check(x1, x2, tol: float = CONGRUENCE_TOL) -> str:
    """``"same"`` if the second data agree up to a global sign, else ``"distinct"``.

    Accepts :class:`SecondData` or :class:`FrontalGerm`; germs must be built
    over the same metric jets (:class:`MetricMismatch` otherwise).
    """
    if isinstance(x1, FrontalGerm) and isinstance(x2, FrontalGerm):
        m1, m2 = x1.metric, x2.metric
        if m1.order != m2.order or any((a - b).max_abs() > tol for a, b in
                                       ((m1.E, m2.E), (m1.F, m2.F), (m1.G, m2.G))):
            raise MetricMismatch("germs were realized over different metrics")
        x1, x2 = x1.second, x2.second
    if not (isinstance(x1, SecondData) and isinstance(x2, SecondData)):
        raise TypeError("congruence_check compares SecondData or FrontalGerm pairs")
    if x1.A.order != x2.A.order:
        raise MetricMismatch("second data have different orders")
    plus = max((a - b).max_abs() for a, b in zip(x1.components(), x2.components()))
    minus = max((a + b).max_abs() for a, b in zip(x1.components(), x2.components()))
    return "same" if min(plus, minus) <= tol else "distinct"


def brioschi_curvature(m, u: float, v: float, h: float = 1e-4, richardson: bool = False) -> float:
    """Gaussian curvature at a regular point by the Brioschi formula with
    central differences of step ``h`` applied to the metric coefficients.

    ``m`` is a :class:`KossowskiMetric` or a triple of callables
    ``(E, F, G)`` of ``(u, v)`` (e.g. closed-form coefficients).  The plain
    estimate has an ``O(h^2)`` error proportional to fourth derivatives of
    the coefficients; ``richardson=True`` combines steps ``h`` and ``2h``
    to cancel it.
    """
    if richardson:
        return (4.0 * brioschi_curvature(m, u, v, h) - brioschi_curvature(m, u, v, 2.0 * h)) / 3.0
    if isinstance(m, KossowskiMetric):
        m = (m.E, m.F, m.G)
    fE, fF, fG = m

    def ev(j, du=0.0, dv=0.0):
        return float(j(u + du, v + dv))

    def d1(j, axis):
        if axis == "u":
            return (ev(j, h) - ev(j, -h)) / (2 * h)
        return (ev(j, 0, h) - ev(j, 0, -h)) / (2 * h)

    def d2(j, axes):
        if axes == "uu":
            return (ev(j, h) - 2 * ev(j) + ev(j, -h)) / h ** 2
        if axes == "vv":
            return (ev(j, 0, h) - 2 * ev(j) + ev(j, 0, -h)) / h ** 2
        return (ev(j, h, h) - ev(j, h, -h) - ev(j, -h, h) + ev(j, -h, -h)) / (4 * h ** 2)

    E, F, G = ev(fE), ev(fF), ev(fG)
    Eu, Ev = d1(fE, "u"), d1(fE, "v")
    Fu, Fv = d1(fF, "u"), d1(fF, "v")
    Gu, Gv = d1(fG, "u"), d1(fG, "v")
    Evv, Guu, Fuv = d2(fE, "vv"), d2(fG, "uu"), d2(fF, "uv")
    m1 = np.array([[-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
                   [Fv - 0.5 * Gu, E, F],
                   [0.5 * Gv, F, G]])
    m2 = np.array([[0.0, 0.5 * Ev, 0.5 * Gu],
                   [0.5 * Ev, E, F],
                   [0.5 * Gu, F, G]])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2)


def verification_report(g: FrontalGerm) -> dict:
    """Named residuals of a realized germ, for JSON export."""
    from .realization import curve_invariants, second_data_residuals

    report = {"first_form": first_form_residual(g),
              "first_form_scaled": first_form_residual(g, scaled=True)}
    report.update({f"structure_{k}": v for k, v in second_data_residuals(g.metric, g.second).items()})
    report.update({f"structure_{k}_scaled": v
                   for k, v in second_data_residuals(g.metric, g.second, scaled=True).items()})
    report.update({f"frame_{k}": v for k, v in frame_residuals(g).items()})
    cd = curve_invariants(g)
    n2 = cd.from_map["kappa_n"].order
    n3 = cd.from_map["torsion"].order
    report["kappa_n"] = (cd.from_map["kappa_n"] - cd.kappa_n.truncate(n2)).max_abs()
    report["torsion"] = (cd.from_map["torsion"] - cd.torsion.truncate(n3)).max_abs()
    return {k: float(v) for k, v in report.items()}
