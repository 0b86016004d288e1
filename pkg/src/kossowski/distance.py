"""Pre-distance of a Kossowski metric on a discretized coordinate square.

The length of a path under a semi-definite metric is
``int sqrt(ds^2(gamma', gamma')) dt`` and the pre-distance is the infimum
over paths.  Here paths are restricted to an 8-neighbour grid graph whose
edge weights are the ``ds^2``-lengths of the straight chords (two-point
Gauss quadrature), and the infimum becomes a Dijkstra shortest path.  Grid
distances over-estimate the true infimum and converge under refinement.

The pre-distance is a genuine distance when every semi-definite point is a
*peak*: apart from isolated exceptions, all semi-definite points nearby are
of type A2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import NonPeakPresent, NotSemiDefinite, OutOfDomain
from .metric import KossowskiMetric

DEFAULT_DOMAIN = (-1.0, 1.0, -1.0, 1.0)
_GAUSS = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
# zero-length edges would be dropped by the sparse graph; keep them as
# edges of negligible positive length
_TINY = 1e-300
#: |sin| of the angle between grad lam and the null field below which a
#: semi-definite sample is not counted as A2
A2_ANGLE_TOL = 1e-6


def _ev(j, u, v):
    # grid work only needs double precision
    return npoly.polyval2d(u, v, j.coeffs.astype(float))


def _metric_eval(m: KossowskiMetric, u, v):
    return _ev(m.E, u, v), _ev(m.F, u, v), _ev(m.G, u, v)


class GridGraph:
    """8-neighbour grid on ``domain = (u0, u1, v0, v1)`` with ``n`` cells per side."""

    def __init__(self, m: KossowskiMetric, n: int = 200, domain=DEFAULT_DOMAIN):
        if n < 1:
            raise ValueError("resolution must be positive")
        self.metric = m
        self.n = int(n)
        self.domain = tuple(float(x) for x in domain)
        u0, u1, v0, v1 = self.domain
        self.us = np.linspace(u0, u1, self.n + 1)
        self.vs = np.linspace(v0, v1, self.n + 1)

    def node(self, p) -> int:
        """Index of the grid node nearest to ``p``; :class:`OutOfDomain` outside."""
        u0, u1, v0, v1 = self.domain
        pu, pv = float(p[0]), float(p[1])
        eps = 1e-12 * max(1.0, u1 - u0, v1 - v0)
        if not (u0 - eps <= pu <= u1 + eps and v0 - eps <= pv <= v1 + eps):
            raise OutOfDomain(f"point {p} lies outside {self.domain}")
        i = int(round((pu - u0) / (u1 - u0) * self.n))
        j = int(round((pv - v0) / (v1 - v0) * self.n))
        return i * (self.n + 1) + j

    def coords(self, idx) -> np.ndarray:
        i, j = np.divmod(np.asarray(idx), self.n + 1)
        return np.stack([self.us[i], self.vs[j]], axis=-1)

    def _edges(self):
        n = self.n
        I, J = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        src, dst = [], []
        for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
            ok = (I + di <= n) & (J + dj >= 0) & (J + dj <= n)
            a = I[ok] * (n + 1) + J[ok]
            b = (I[ok] + di) * (n + 1) + (J[ok] + dj)
            src.append(a)
            dst.append(b)
        return np.concatenate(src), np.concatenate(dst)

    def _weights(self, src, dst, euclidean: bool = False):
        x0, x1 = self.coords(src), self.coords(dst)
        d = x1 - x0
        if euclidean:
            return np.hypot(d[:, 0], d[:, 1])
        w = np.zeros(len(src))
        for t in _GAUSS:
            x = x0 + t * d
            E, F, G = _metric_eval(self.metric, x[:, 0], x[:, 1])
            q = E * d[:, 0] ** 2 + 2 * F * d[:, 0] * d[:, 1] + G * d[:, 1] ** 2
            w += 0.5 * np.sqrt(np.clip(q, 0.0, None))
        return w

    def _matrix(self, euclidean: bool):
        src, dst = self._edges()
        w = np.maximum(self._weights(src, dst, euclidean), _TINY)
        size = (self.n + 1) ** 2
        return coo_matrix((w, (src, dst)), shape=(size, size)).tocsr()

    @cached_property
    def matrix(self):
        return self._matrix(euclidean=False)

    @cached_property
    def euclidean_matrix(self):
        return self._matrix(euclidean=True)

    def distances_from(self, sources, euclidean: bool = False) -> np.ndarray:
        mat = self.euclidean_matrix if euclidean else self.matrix
        return dijkstra(mat, directed=False, indices=sources)


def pre_distance(m: KossowskiMetric, p, q, n: int = 200, domain=DEFAULT_DOMAIN,
                 graph: GridGraph | None = None) -> float:
    """Shortest grid-path length from ``p`` to ``q`` (nearest nodes)."""
    g = graph if graph is not None else GridGraph(m, n, domain)
    a, b = g.node(p), g.node(q)
    return float(g.distances_from(a)[b])


def convergence_rows(m: KossowskiMetric, p, q, resolutions, domain=DEFAULT_DOMAIN):
    """Rows ``(p, q, d, n)`` for a refinement study."""
    return [(tuple(p), tuple(q), pre_distance(m, p, q, n, domain), int(n)) for n in resolutions]


# ---------------------------------------------------------------------------
# peaks

@dataclass
class SemiDefiniteSample:
    points: np.ndarray  # (k, 2)
    is_a2: np.ndarray  # (k,) bool


def semidefinite_samples(m: KossowskiMetric, domain, n: int = 64, tol: float = 1e-12) -> SemiDefiniteSample:
    """Zeros of ``lam`` on the edges of an ``n x n`` grid, each tagged A2 or not.

    A sample is A2 when the null field ``eta = -F d/du + E d/dv`` is
    transverse to the zero set, i.e. ``|d lam(eta)| > A2_ANGLE_TOL |grad lam| |eta|``.
    """
    u0, u1, v0, v1 = domain
    us, vs = np.linspace(u0, u1, n + 1), np.linspace(v0, v1, n + 1)
    U, V = np.meshgrid(us, vs, indexing="ij")
    L = _ev(m.lam, U, V)
    pts = [np.stack([U[np.abs(L) <= tol], V[np.abs(L) <= tol]], axis=-1)]
    for axis in (0, 1):
        a = L[:-1, :] if axis == 0 else L[:, :-1]
        b = L[1:, :] if axis == 0 else L[:, 1:]
        cross = (a * b < 0) & (np.abs(a) > tol) & (np.abs(b) > tol)
        t = a[cross] / (a[cross] - b[cross])
        if axis == 0:
            pu = U[:-1, :][cross] + t * (us[1] - us[0])
            pv = V[:-1, :][cross]
        else:
            pu = U[:, :-1][cross]
            pv = V[:, :-1][cross] + t * (vs[1] - vs[0])
        pts.append(np.stack([pu, pv], axis=-1))
    P = np.concatenate(pts, axis=0) if pts else np.zeros((0, 2))
    if len(P) == 0:
        return SemiDefiniteSample(P, np.zeros(0, dtype=bool))
    lu, lv = m.lam.diff("u"), m.lam.diff("v")
    gu = _ev(lu, P[:, 0], P[:, 1])
    gv = _ev(lv, P[:, 0], P[:, 1])
    E, F, _ = _metric_eval(m, P[:, 0], P[:, 1])
    d_eta = -F * gu + E * gv
    scale = np.hypot(gu, gv) * np.hypot(F, E)
    is_a2 = np.abs(d_eta) > A2_ANGLE_TOL * scale
    is_a2 &= scale > 0
    return SemiDefiniteSample(P, is_a2)


def is_peak(m: KossowskiMetric, p=(0.0, 0.0), radius: float = 0.2, n: int = 40,
            tol: float = 1e-10) -> bool:
    """Whether all other semi-definite samples within ``radius`` of ``p`` are A2.

    Samples closer to ``p`` than one grid spacing are treated as ``p`` itself.
    """
    pu, pv = float(p[0]), float(p[1])
    if abs(float(m.lam(pu, pv))) > tol:
        raise NotSemiDefinite(f"lam{tuple(p)} does not vanish")
    h = 2 * radius / n
    # offset the grid by a fraction of a cell so p is not a node
    dom = (pu - radius + 0.37 * h, pu + radius + 0.37 * h, pv - radius + 0.41 * h, pv + radius + 0.41 * h)
    s = semidefinite_samples(m, dom, n)
    far = np.hypot(s.points[:, 0] - pu, s.points[:, 1] - pv) > 1.5 * h
    return bool(np.all(s.is_a2[far]))


# ---------------------------------------------------------------------------
# metric axioms

@dataclass
class AxiomReport:
    triples: int
    triangle_violations: int
    pairs: int
    positivity_failures: int
    symmetry_max: float
    ball_checks: int
    ball_failures: int
    m_bar: float
    non_a2_points: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.triangle_violations == 0 and self.positivity_failures == 0
                and self.ball_failures == 0 and self.symmetry_max < 1e-12)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["passed"] = self.passed
        d["non_a2_points"] = [list(map(float, x)) for x in self.non_a2_points]
        return d


def check_peaks(m: KossowskiMetric, domain=DEFAULT_DOMAIN, n: int = 60) -> list:
    """Raise :class:`NonPeakPresent` unless every non-A2 semi-definite sample is a peak.

    Returns the (isolated) non-A2 sample points.
    """
    s = semidefinite_samples(m, domain, n)
    bad = s.points[~s.is_a2]
    h = max(domain[1] - domain[0], domain[3] - domain[2]) / n
    kept: list = []
    for z in bad:
        if any(np.hypot(*(z - k)) < 3 * h for k in kept):
            continue
        kept.append(z)
        local = semidefinite_samples(m, (z[0] - 0.2, z[0] + 0.2, z[1] - 0.2, z[1] + 0.2), 40)
        far = np.hypot(local.points[:, 0] - z[0], local.points[:, 1] - z[1]) > 3 * h
        if not np.all(local.is_a2[far]):
            raise NonPeakPresent(f"semi-definite point near ({z[0]:.6g}, {z[1]:.6g}) is not a peak")
    return kept


def metric_axiom_report(m: KossowskiMetric, samples: int = 100, n: int = 200,
                        domain=DEFAULT_DOMAIN, seed: int = 0, n_nodes: int = 15) -> AxiomReport:
    """Triangle inequality, positivity, symmetry and ball nesting on the grid.

    ``samples`` random triples and pairs are drawn from ``n_nodes`` random
    grid nodes.  For ball nesting ``m_bar`` bounds ``ds^2 <= m_bar dtau^2``
    with ``dtau^2 = du^2 + dv^2`` on the domain, and the Euclidean ball of
    radius ``r / sqrt(m_bar)`` must lie inside the ``ds^2``-ball of radius
    ``r``, which in turn must stay away from the boundary.
    """
    non_a2 = check_peaks(m, domain)
    rng = np.random.default_rng(seed)
    g = GridGraph(m, n, domain)
    size = (g.n + 1) ** 2
    nodes = rng.choice(size, size=n_nodes, replace=False)
    D = g.distances_from(nodes)  # (n_nodes, size)
    Dn = D[:, nodes]
    sym = float(np.max(np.abs(Dn - Dn.T)))
    tri = rng.integers(0, n_nodes, size=(samples, 3))
    lhs = Dn[tri[:, 0], tri[:, 2]]
    rhs = Dn[tri[:, 0], tri[:, 1]] + Dn[tri[:, 1], tri[:, 2]]
    violations = int(np.sum(lhs > rhs * (1 + 1e-12) + 1e-15))
    pairs = rng.integers(0, n_nodes, size=(samples, 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pos_fail = int(np.sum(Dn[pairs[:, 0], pairs[:, 1]] <= 1e-12))
    # ball nesting
    U, V = np.meshgrid(g.us, g.vs, indexing="ij")
    E, F, G = _metric_eval(m, U.ravel(), V.ravel())
    lam_max = 0.5 * (E + G) + np.sqrt(0.25 * (E - G) ** 2 + F ** 2)
    m_bar = float(np.max(lam_max)) * 1.01
    De = g.distances_from(nodes, euclidean=True)
    boundary = np.concatenate([np.arange(g.n + 1), size - 1 - np.arange(g.n + 1),
                               np.arange(0, size, g.n + 1), np.arange(g.n, size, g.n + 1)])
    checks = fails = 0
    for k in range(n_nodes):
        r_edge = float(np.min(D[k, boundary]))
        for frac in (0.25, 0.5, 0.75):
            r = frac * r_edge
            if r <= 0:
                continue
            inner = De[k] < r / np.sqrt(m_bar)
            checks += 1
            if np.any(D[k, inner] >= r) or r >= r_edge:
                fails += 1
    return AxiomReport(samples, violations, len(pairs), pos_fail, sym, checks, fails, m_bar, non_a2)
