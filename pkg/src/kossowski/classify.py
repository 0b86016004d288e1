"""Diagnosis of semi-definite points.

A semi-definite point ``p`` (where ``lam(p) = 0``) is of type A2 when the
null direction is transverse to the characteristic curve ``{lam = 0}`` and of
type A3 when it is tangent with a first-order crossing.  With the smooth
null-field extension ``eta = -F d/du + E d/dv`` these read
``lam_eta(p) != 0`` and ``lam_eta(p) = 0, lam_eta_eta(p) != 0``.

The Euler form ``Omega = Kcheck du^dv`` with ``Kcheck = alpha_v - beta_u``
distinguishes parabolic points, and its arc-length derivative along the
characteristic curve separates cuspidal cross caps from other frontals.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .errors import DegeneratePoint, NotSemiDefinite, PreconditionNotMet
from .jets import Jet1, Jet2
from .metric import KossowskiMetric, curvature_density

#: |Omega(p)| below this counts as parabolic
PARABOLIC_TOL = 1e-9
#: |lam(p)| below this counts as semi-definite
SEMIDEFINITE_TOL = 1e-10
#: gradient / eta-derivative magnitudes below this count as vanishing
DEGENERACY_TOL = 1e-9

KINDS = ("regular", "A2", "A3", "degenerate_other")
PREDICTIONS = ("immersion", "cuspidal_edge", "swallowtail", "cuspidal_cross_cap",
               "front_other", "frontal_other")


@dataclass(frozen=True)
class CharCurve:
    """Characteristic curve ``t -> p + (u(t), v(t))`` and null field ``eta(t)``."""

    u: Jet1
    v: Jet1
    eta_u: Jet1
    eta_v: Jet1
    point: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class PointClassification:
    kind: str
    null_dir: Optional[tuple]
    omega: float
    omega_prime: Optional[float]
    parabolic: bool
    prediction: str

    def to_json(self) -> dict:
        d = asdict(self)
        d["null_dir"] = None if self.null_dir is None else [float(x) for x in self.null_dir]
        return d


def predict(kind: str, parabolic: bool, omega_prime_nonzero: bool) -> str:
    """Singularity type expected of a realization with non-vanishing limiting
    normal curvature."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind == "regular":
        return "immersion"
    if not parabolic:
        if kind == "A2":
            return "cuspidal_edge"
        if kind == "A3":
            return "swallowtail"
        return "front_other"
    if kind == "A2" and omega_prime_nonzero:
        return "cuspidal_cross_cap"
    return "frontal_other"


def _shifted(m: KossowskiMetric, p) -> tuple[Jet2, Jet2, Jet2, Jet2]:
    pu, pv = p
    if pu == 0.0 and pv == 0.0:
        return m.E, m.F, m.G, m.lam
    return tuple(j.shift(pu, pv) for j in (m.E, m.F, m.G, m.lam))


def characteristic_curve(m: KossowskiMetric, p=(0.0, 0.0)) -> CharCurve:
    """Series solution of ``lam = 0`` through ``p``.

    The curve is parametrized by whichever coordinate is transverse to
    ``grad lam``; the null field along it is ``eta = (-F/E, 1)``.
    Raises :class:`NotSemiDefinite` if ``lam(p) != 0`` and
    :class:`DegeneratePoint` if ``grad lam(p) = 0``.
    """
    E, F, G, lam = _shifted(m, p)
    if abs(lam[0, 0]) > SEMIDEFINITE_TOL:
        raise NotSemiDefinite(f"lam(p) = {lam[0, 0]:.3e} is not zero")
    lu, lv = lam[1, 0], lam[0, 1]
    if max(abs(lu), abs(lv)) <= DEGENERACY_TOL:
        raise DegeneratePoint("grad lam vanishes at p")
    # p lies on the zero set up to round-off; solve through p exactly
    lam = lam - lam[0, 0]
    n = lam.order
    t = Jet1.var(n)
    g = Jet1.zero(n)
    # fixed-point iteration; each sweep fixes one more coefficient
    if abs(lv) >= abs(lu):
        for _ in range(n + 1):
            g = g - lam.along(t, g) / lv
        cu, cv = t, g
    else:
        for _ in range(n + 1):
            g = g - lam.along(g, t) / lu
        cu, cv = g, t
    eta_u = -(F / E).along(cu, cv)
    return CharCurve(cu, cv, eta_u, Jet1.constant(1.0, n), tuple(p))


def _eta_derivatives(E: Jet2, F: Jet2, lam: Jet2) -> tuple[Jet2, Jet2]:
    """``lam_eta`` and ``lam_eta_eta`` for ``eta = -F d/du + E d/dv``."""
    n = lam.order

    def d_eta(a: Jet2) -> Jet2:
        k = a.order - 1
        return -F.truncate(k) * a.diff("u") + E.truncate(k) * a.diff("v")

    l1 = d_eta(lam.truncate(n))
    return l1, d_eta(l1)


def _kind(E, F, lam) -> str:
    if abs(lam[0, 0]) > SEMIDEFINITE_TOL:
        return "regular"
    if max(abs(lam[1, 0]), abs(lam[0, 1])) <= DEGENERACY_TOL:
        raise DegeneratePoint("grad lam vanishes at a semi-definite point")
    l1, l2 = _eta_derivatives(E, F, lam)
    if abs(l1[0, 0]) > DEGENERACY_TOL:
        return "A2"
    if abs(l2[0, 0]) > DEGENERACY_TOL:
        return "A3"
    return "degenerate_other"


def omega_prime_at(m: KossowskiMetric, p=(0.0, 0.0), kcheck: Jet2 | None = None) -> float:
    """Arc-length derivative of ``Kcheck`` along the characteristic curve at ``p``."""
    if kcheck is None:
        kcheck = curvature_density(m)
    curve = characteristic_curve(m, p)
    E, F, G, _ = _shifted(m, p)
    du, dv = curve.u[1], curve.v[1]
    speed2 = E[0, 0] * du * du + 2 * F[0, 0] * du * dv + G[0, 0] * dv * dv
    if speed2 <= DEGENERACY_TOL:
        raise PreconditionNotMet("characteristic curve is null at p (not an A2 point)")
    pu, pv = p
    kp = kcheck.shift(pu, pv) if (pu or pv) else kcheck
    n = kp.order
    along = kp.along(curve.u.truncate(n), curve.v.truncate(n))
    return float(along[1] / np.sqrt(speed2))


def classify_point(m: KossowskiMetric, p=(0.0, 0.0)) -> PointClassification:
    """Type, Euler form data and predicted singularity at ``p``."""
    E, F, G, lam = _shifted(m, p)
    kind = _kind(E, F, lam)
    kcheck = curvature_density(m)
    omega = float(kcheck(*p))
    parabolic = abs(omega) < PARABOLIC_TOL
    if kind == "regular":
        return PointClassification(kind, None, omega, None, parabolic, predict(kind, parabolic, False))
    null = np.array([-F[0, 0], E[0, 0]])
    null = tuple(float(x) + 0.0 for x in null / np.linalg.norm(null))
    omega_prime = omega_prime_at(m, p, kcheck) if kind == "A2" else None
    nonzero = omega_prime is not None and abs(omega_prime) >= PARABOLIC_TOL
    return PointClassification(kind, null, omega, omega_prime, parabolic, predict(kind, parabolic, nonzero))


def euler_form_A2(h: Jet2, k: Jet2) -> Jet1:
    """``exp(-k) (2 h k_v - 3 h_v)`` on the ``u``-axis for the A2 builder."""
    h._check(k)
    n = h.order - 1
    h0 = h.restrict_v0().truncate(n)
    k0 = k.restrict_v0().truncate(n)
    hv = h.diff("v").restrict_v0()
    kv = k.diff("v").restrict_v0()
    return (-k0).exp() * (2.0 * h0 * kv - 3.0 * hv)


def euler_form_A3_origin(h: Jet2, k: Jet2) -> float:
    """``exp(-k)(-h_v + h k_v) - 2 exp(k) k_u`` at the origin for the A3 builder."""
    k00 = k[0, 0]
    return float(np.exp(-k00) * (-h[0, 1] + h[0, 0] * k[0, 1]) - 2.0 * np.exp(k00) * k[1, 0])


def euler_form_general(m: KossowskiMetric) -> Jet2:
    """Coefficient jet of ``Omega`` against ``du^dv``."""
    return curvature_density(m)


@dataclass
class SignConeResult:
    passed: bool
    khat_u: float
    delta: float
    epsilon: float
    n_samples: int
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def sign_cone_check(m: KossowskiMetric, epsilon: float = 0.1, n_radii: int = 10,
                    n_angles: int = 10) -> SignConeResult:
    """Check ``sign K = sign(u v Khat_u(0,0))`` on a thin cone around the ``u``-axis.

    Here ``lam = v lamhat`` and ``Khat = Kcheck / lamhat`` (so ``Khat = v K``).
    Writing ``Khat(u, 0) = u psi(u)`` and ``Khat = Khat(u, 0) + v phi``, the
    cone half-slope is ``delta = 0.9 m / Delta`` with ``m = min |psi|`` and
    ``Delta = max |phi|`` over the ``epsilon``-square, capped at 1.  Samples
    ``n_radii x n_angles`` points in each of the four quadrants.
    """
    cls = classify_point(m)
    if cls.kind != "A2" or not cls.parabolic or cls.omega_prime is None or abs(cls.omega_prime) < PARABOLIC_TOL:
        raise PreconditionNotMet("sign cone needs an A2 point with Omega = 0 and Omega' != 0")
    lamhat = m.lam.factor_v()
    kcheck = curvature_density(m)
    khat = kcheck / lamhat.truncate(kcheck.order)
    khat_u = khat[1, 0]
    psi = khat.restrict_v0().factor_t()
    phi = Jet2(khat.coeffs[:, 1:], khat.order - 1)
    grid = np.linspace(-epsilon, epsilon, 41)
    mm = float(np.min(np.abs(psi(grid))))
    U, V = np.meshgrid(grid, grid)
    Delta = float(np.max(np.abs(phi(U, V))))
    if mm <= 0.0:
        raise PreconditionNotMet("Khat(u,0)/u changes sign on the sampling interval")
    delta = 1.0 if Delta == 0.0 else min(1.0, 0.9 * mm / Delta)
    radii = epsilon * np.arange(1, n_radii + 1) / (n_radii + 1)
    fracs = np.arange(1, n_angles + 1) / (n_angles + 1)
    R, S = np.meshgrid(radii, fracs, indexing="ij")
    us, vs = [], []
    for su in (1.0, -1.0):
        for sv in (1.0, -1.0):
            us.append(su * R.ravel())
            vs.append(sv * delta * S.ravel() * R.ravel())
    us, vs = np.concatenate(us), np.concatenate(vs)
    K = kcheck(us, vs) / m.lam(us, vs)
    expected = np.sign(us * vs * khat_u)
    bad = np.nonzero(np.sign(K) != expected)[0]
    failures = [(float(us[i]), float(vs[i]), float(K[i])) for i in bad]
    return SignConeResult(len(failures) == 0, float(khat_u), float(delta), epsilon, int(us.size), failures)
