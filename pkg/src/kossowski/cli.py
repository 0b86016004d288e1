"""``forge`` command-line front end.

Every job is described by a single JSON config file; flags only choose the
config path, the output directory and verbosity::

    forge <classify|realize|deform|verify|distance|export> --config job.json [--out dir] [-v]

Exit codes: 0 success, 1 configuration error, 2 precondition violation,
3 residual above tolerance.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import serialize
from .classify import classify_point, sign_cone_check
from .distance import DEFAULT_DOMAIN, GridGraph, metric_axiom_report
from .errors import ForgeError, PreconditionError, ResidualError
from .jets import DEFAULT_ORDER
from .metric import connection_coeffs, to_K_orthogonal
from .realization import (
    alternate_class,
    deformation_path,
    initial_data,
    realize,
    realize_from_data,
)
from .verify import (
    FIXTURES,
    first_form_residual,
    fixture_metric,
    induced_metric,
    map_euler_density,
    normal_form,
    verification_report,
)

log = logging.getLogger("forge")

COMMANDS = ("classify", "realize", "deform", "verify", "distance", "export")
ORDER_RANGE = (4, 24)
RESOLUTION_RANGE = (16, 2048)
#: scaled first-fundamental-form residual above which a realization fails
FIRST_FORM_TOL = 1e-8

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_RESIDUAL = 0, 1, 2, 3


class ConfigError(Exception):
    """The job configuration is malformed."""


@dataclass
class JobConfig:
    command: str
    order: int = DEFAULT_ORDER
    trust_radius: float = 0.5
    resolution: int | None = None
    out: Path = Path(".")
    raw: dict = field(default_factory=dict)
    tolerance: float = FIRST_FORM_TOL

    @classmethod
    def from_dict(cls, command: str, raw: dict, out=".") -> "JobConfig":
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        order = raw.get("order", DEFAULT_ORDER)
        if not isinstance(order, int) or not ORDER_RANGE[0] <= order <= ORDER_RANGE[1]:
            raise ConfigError(f"order must be an integer in {list(ORDER_RANGE)}, got {order!r}")
        resolution = raw.get("resolution")
        if resolution is not None and (
            not isinstance(resolution, int)
            or not RESOLUTION_RANGE[0] <= resolution <= RESOLUTION_RANGE[1]
        ):
            raise ConfigError(
                f"resolution must be an integer in {list(RESOLUTION_RANGE)}, got {resolution!r}")
        radius = raw.get("trust_radius", 0.5)
        if not isinstance(radius, (int, float)) or radius <= 0:
            raise ConfigError("trust_radius must be a positive number")
        tol = raw.get("tolerance", FIRST_FORM_TOL)
        if not isinstance(tol, (int, float)) or tol <= 0:
            raise ConfigError("tolerance must be a positive number")
        return cls(command, order, float(radius), resolution, Path(out), raw, float(tol))

    def require(self, key: str):
        if key not in self.raw:
            raise ConfigError(f"{self.command}: config needs {key!r}")
        return self.raw[key]


# ---------------------------------------------------------------- outputs

def _clean(x):
    """JSON-safe plain Python values (no numpy scalars, no -0.0)."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) + 0.0
    return x


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", path)
    return path


def _fmt(x: float) -> str:
    return "%.9g" % (float(x) + 0.0)


def export_mesh(g, n: int = 32, radius: float = 0.5) -> str:
    """Wavefront OBJ text of ``g.f`` sampled on the ``(n+1)²`` uniform grid of
    ``[-radius, radius]²``; per-vertex normals are written when ``g.nu`` is set.
    """
    t = np.linspace(-radius, radius, n + 1)
    U, V = np.meshgrid(t, t, indexing="ij")

    def ev(j):
        return npoly.polyval2d(U, V, j.coeffs.astype(float)).ravel()

    P = np.stack([ev(c) for c in g.f], axis=1)
    nu = getattr(g, "nu", None)
    lines = ["# forge surface patch", f"# grid {n + 1}x{n + 1} radius {_fmt(radius)}"]
    lines += ["v " + " ".join(_fmt(x) for x in row) for row in P]
    if nu is not None:
        N = np.stack([ev(c) for c in nu], axis=1)
        lines += ["vn " + " ".join(_fmt(x) for x in row) for row in N]

    def ref(k):
        return f"{k}//{k}" if nu is not None else f"{k}"

    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j + 1
            b, c, d = a + n + 1, a + n + 2, a + 1
            lines.append(f"f {ref(a)} {ref(b)} {ref(c)}")
            lines.append(f"f {ref(a)} {ref(c)} {ref(d)}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- job pieces

def _metric(cfg: JobConfig):
    m = serialize.metric_from_json(cfg.require("metric"), cfg.order)
    if cfg.raw.get("normalize", False) and m.form == "orthogonal":
        log.info("reparametrizing to K-orthogonal form")
        m = to_K_orthogonal(m)
    return m


def _point(p, name="point"):
    try:
        u, v = (float(x) for x in p)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of numbers, got {p!r}") from None
    return (u, v)


def _germ(cfg: JobConfig):
    """Realized germ, or polynomial fixture when ``fixture`` is given."""
    if "fixture" in cfg.raw:
        name = cfg.raw["fixture"]
        if name not in FIXTURES:
            raise ConfigError(f"unknown fixture {name!r}; choose from {list(FIXTURES)}")
        return normal_form(name, cfg.order)
    m = _metric(cfg)
    spec = serialize.curve_spec_from_json(cfg.raw.get("curve", {}), cfg.order)
    mode = cfg.raw.get("mode", "general")
    if mode not in ("general", "curvature_line"):
        raise ConfigError(f"mode must be 'general' or 'curvature_line', got {mode!r}")
    return realize(m, spec, mode=mode)


def _check_report(report: dict, tol: float = FIRST_FORM_TOL):
    if report["first_form_scaled"] > tol:
        raise ResidualError(
            f"first fundamental form residual {report['first_form_scaled']:.3g} "
            f"exceeds {tol:g}")


# --------------------------------------------------------------- commands

def cmd_classify(cfg: JobConfig) -> dict:
    if "fixture" in cfg.raw:
        m = fixture_metric(_germ(cfg))
    else:
        m = _metric(cfg)
    points = cfg.raw.get("points", [cfg.raw.get("point", [0.0, 0.0])])
    rows = []
    for p in points:
        p = _point(p)
        row = {"point": list(p)}
        row.update(classify_point(m, p).to_json())
        rows.append(row)
    out = {"points": rows}
    if cfg.raw.get("sign_cone", False):
        try:
            sc = sign_cone_check(m, epsilon=float(cfg.raw.get("epsilon", 0.1)))
        except PreconditionError as exc:
            # the sign-cone statement only concerns parabolic A2 points
            out["sign_cone"] = {"applicable": False, "reason": str(exc)}
        else:
            out["sign_cone"] = {"applicable": True, "passed": sc.passed, "khat_u": sc.khat_u, "delta": sc.delta,
                                "epsilon": sc.epsilon, "n_samples": sc.n_samples,
                                "failures": len(sc.failures)}
    write_json(cfg.out / "classification.json", out)
    return out


def cmd_realize(cfg: JobConfig) -> dict:
    g = _germ(cfg)
    if "fixture" in cfg.raw:
        raise ConfigError("realize needs a metric, not a fixture")
    report = verification_report(g)
    write_json(cfg.out / "germ.json", serialize.germ_to_json(g))
    write_json(cfg.out / "report.json", report)
    if cfg.raw.get("export", False):
        path = cfg.out / "mesh.obj"
        path.write_text(export_mesh(g, cfg.resolution or 32, cfg.trust_radius))
        log.info("wrote %s", path)
    _check_report(report, cfg.tolerance)
    return report


def _endpoint(obj, m, order):
    """Initial data ``(a, c)`` given directly or through ``(omega, mu)``;
    ``"alternate": true`` selects the other admissible class."""
    if not isinstance(obj, dict):
        raise ConfigError("deformation endpoints must be objects")
    spec = serialize.curve_spec_from_json(obj, order)
    if "a" in obj:
        a, c = serialize.jet1(obj["a"], order), serialize.jet1(obj.get("c"), order - 3)
    else:
        a, c = initial_data(spec, connection_coeffs(m)[0])
    if obj.get("alternate", False):
        a, c = alternate_class(a, c, spec.mu)
    return a, c


def cmd_deform(cfg: JobConfig) -> dict:
    m = _metric(cfg)
    ends = cfg.require("endpoints")
    if not isinstance(ends, list) or len(ends) != 2:
        raise ConfigError("endpoints must be a list of two objects")
    d0, d1 = (_endpoint(e, m, cfg.order) for e in ends)
    s_values = cfg.raw.get("s")
    if s_values is None:
        k = int(cfg.raw.get("samples", 5))
        s_values = np.linspace(0.0, 1.0, k).tolist()
    s_values = [float(s) for s in s_values]
    # contract check before any work is fanned out
    deformation_path(d0, d1, s_values[0])

    def job(s):
        a, c = deformation_path(d0, d1, s)
        g = realize_from_data(m, a, c)
        return {"s": s, "a0": float(a[0]),
                "first_form": first_form_residual(g),
                "first_form_scaled": first_form_residual(g, scaled=True)}

    workers = int(cfg.raw.get("workers", 4))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(job, s_values))
    out = {"samples": rows}
    write_json(cfg.out / "deform.json", out)
    worst = max(r["first_form_scaled"] for r in rows)
    if worst > cfg.tolerance:
        raise ResidualError(f"deformation residual {worst:.3g} exceeds {cfg.tolerance:g}")
    return out


def cmd_verify(cfg: JobConfig) -> dict:
    g = _germ(cfg)
    if "fixture" in cfg.raw:
        E, F, G, lam = induced_metric(g)
        m = fixture_metric(g)
        c = classify_point(m)
        omega = map_euler_density(g)
        out = {"fixture": cfg.raw["fixture"],
               "density_residual": float((E * G - F * F - lam * lam).max_abs()),
               "classification": c.to_json(),
               "map_euler_density_0": float(omega[0, 0]),
               "map_euler_density_u": float(omega[1, 0])}
        write_json(cfg.out / "verify.json", out)
        return out
    report = verification_report(g)
    write_json(cfg.out / "verify.json", report)
    _check_report(report, cfg.tolerance)
    return report


def cmd_distance(cfg: JobConfig) -> dict:
    m = _metric(cfg)
    domain = tuple(float(x) for x in cfg.raw.get("domain", DEFAULT_DOMAIN))
    if len(domain) != 4:
        raise ConfigError("domain must be [u0, u1, v0, v1]")
    resolutions = cfg.raw.get("resolutions", [cfg.resolution or 200])
    for r in resolutions:
        if not isinstance(r, int) or not RESOLUTION_RANGE[0] <= r <= RESOLUTION_RANGE[1]:
            raise ConfigError(f"resolution must be an integer in {list(RESOLUTION_RANGE)}, got {r!r}")
    pairs = [(_point(p, "p"), _point(q, "q")) for p, q in cfg.require("pairs")]
    rows = []
    for n in resolutions:
        graph = GridGraph(m, n, domain)
        for p, q in pairs:
            d = graph.distances_from(graph.node(p))[graph.node(q)]
            rows.append([p[0], p[1], q[0], q[1], float(d), n])
    path = cfg.out / "distance.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p_u", "p_v", "q_u", "q_v", "d", "resolution"])
        for r in rows:
            w.writerow([repr(float(x)) for x in r[:5]] + [r[5]])
    log.info("wrote %s", path)
    out = {"rows": rows}
    if cfg.raw.get("axioms", False):
        rep = metric_axiom_report(m, samples=int(cfg.raw.get("samples", 100)),
                                  n=resolutions[-1], domain=domain,
                                  seed=int(cfg.raw.get("seed", 0)))
        write_json(cfg.out / "axioms.json", rep.to_json())
        out["axioms"] = rep.to_json()
    return out


def cmd_export(cfg: JobConfig) -> dict:
    g = _germ(cfg)
    n = cfg.resolution or 32
    path = cfg.out / "mesh.obj"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(export_mesh(g, n, cfg.trust_radius))
    log.info("wrote %s", path)
    return {"mesh": str(path), "vertices": (n + 1) ** 2}


_DISPATCH = {
    "classify": cmd_classify, "realize": cmd_realize, "deform": cmd_deform,
    "verify": cmd_verify, "distance": cmd_distance, "export": cmd_export,
}


def run(cfg: JobConfig) -> int:
    """Dispatch one job; returns the process exit code."""
    try:
        _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except PreconditionError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PRECONDITION
    except ResidualError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_RESIDUAL
    except ForgeError as exc:  # pragma: no cover - every library error is one of the above
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PRECONDITION
    except (ValueError, TypeError, KeyError) as exc:
        # malformed jets / metric descriptions inside the config
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, type=Path, help="job description (JSON)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        raw = json.loads(args.config.read_text())
        cfg = JobConfig.from_dict(args.command, raw, args.out)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
