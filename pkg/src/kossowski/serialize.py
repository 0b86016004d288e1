"""JSON encodings of jets, metrics and realized germs."""
from __future__ import annotations

from .jets import DEFAULT_ORDER, Jet1, Jet2
from .metric import (
    KossowskiMetric,
    flat_metric,
    metric_from_A2_data,
    metric_from_A3_data,
    metric_from_coeffs,
    sphere_metric,
)
from .realization import CurveSpec, FrontalGerm, SecondData


def jet2(obj, order: int) -> Jet2:
    """Jet from JSON (``{"order", "coeffs": [[i, j, c], ...]}`` or a number),
    read as an exact polynomial at ``order``."""
    return Jet2.from_json(obj if obj is not None else 0.0, order)


def jet1(obj, order: int) -> Jet1:
    return Jet1.from_json(obj if obj is not None else 0.0, order)


def metric_from_json(obj: dict, order: int = DEFAULT_ORDER) -> KossowskiMetric:
    """``{"E", "F", "G"}``, ``{"builder": "A2"|"A3", "h", "k"}`` or
    ``{"preset": "flat"|"sphere"}``."""
    if not isinstance(obj, dict):
        raise ValueError("metric must be a JSON object")
    if "preset" in obj:
        preset = obj["preset"]
        if preset == "flat":
            return flat_metric(order)
        if preset == "sphere":
            return sphere_metric(order)
        raise ValueError(f"unknown metric preset {preset!r}")
    if "builder" in obj:
        h, k = jet2(obj.get("h"), order), jet2(obj.get("k"), order)
        if obj["builder"] == "A2":
            return metric_from_A2_data(h, k)
        if obj["builder"] == "A3":
            return metric_from_A3_data(h, k)
        raise ValueError(f"unknown builder {obj['builder']!r}")
    missing = [key for key in ("E", "F", "G") if key not in obj]
    if missing:
        raise ValueError(f"metric is missing {missing}")
    return metric_from_coeffs(jet2(obj["E"], order), jet2(obj["F"], order), jet2(obj["G"], order))


def metric_to_json(m: KossowskiMetric) -> dict:
    return {"E": m.E.to_json(), "F": m.F.to_json(), "G": m.G.to_json(),
            "lambda": m.lam.to_json(), "form": m.form}


def curve_spec_from_json(obj: dict, order: int = DEFAULT_ORDER) -> CurveSpec:
    return CurveSpec(jet1(obj.get("omega"), order), jet1(obj.get("mu"), order))


def second_to_json(sd: SecondData) -> dict:
    return {"A": sd.A.to_json(), "B": sd.B.to_json(), "C": sd.C.to_json(), "D": sd.D.to_json()}


def germ_to_json(g: FrontalGerm) -> dict:
    def vec(v):
        return [x.to_json() for x in v]

    return {
        "order": g.order,
        "f": vec(g.f),
        "nu": vec(g.nu),
        "e1hat": vec(g.e1hat),
        "e2hat": vec(g.e2hat),
        "second": second_to_json(g.second),
        "metric": metric_to_json(g.metric),
        "a": g.a.to_json(),
        "c": g.c.to_json(),
    }
