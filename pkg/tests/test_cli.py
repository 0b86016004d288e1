"""End-to-end runs of the ``forge`` command line."""
import json

import numpy as np
import pytest

from kossowski.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_PRECONDITION,
    EXIT_RESIDUAL,
    ConfigError,
    JobConfig,
    export_mesh,
    main,
)
from kossowski.jets import Jet2
from kossowski.verify import MapGerm

A2_EDGE = {"builder": "A2", "h": {"coeffs": [[0, 1, 1.0]]}, "k": 0}


def forge(tmp_path, command, config, name="job"):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / name
    return main([command, "--config", str(cfg), "--out", str(out)]), out


def read_obj(path):
    v, vn, f = [], [], []
    for line in path.read_text().splitlines():
        tag, *rest = line.split()
        if tag == "v":
            v.append([float(x) for x in rest])
        elif tag == "vn":
            vn.append([float(x) for x in rest])
        elif tag == "f":
            f.append(rest)
    return np.array(v), np.array(vn), f


def test_classify_cuspidal_edge(tmp_path):
    code, out = forge(tmp_path, "classify", {"metric": A2_EDGE, "sign_cone": True})
    assert code == EXIT_OK
    rep = json.loads((out / "classification.json").read_text())
    assert rep["points"][0]["prediction"] == "cuspidal_edge"
    assert rep["sign_cone"]["applicable"] is False


def test_classify_sign_cone(tmp_path):
    metric = {"builder": "A2", "h": {"coeffs": [[1, 1, 1.0]]}, "k": 0}
    code, out = forge(tmp_path, "classify", {"metric": metric, "sign_cone": True})
    assert code == EXIT_OK
    rep = json.loads((out / "classification.json").read_text())
    assert rep["points"][0]["prediction"] == "cuspidal_cross_cap"
    assert rep["sign_cone"]["passed"] is True


def test_realize_flat_exports_cylinder(tmp_path):
    code, out = forge(tmp_path, "realize",
                      {"metric": {"preset": "flat"}, "curve": {"omega": 0, "mu": 0},
                       "export": True, "resolution": 16})
    assert code == EXIT_OK
    text = (out / "mesh.obj").read_text()
    assert "v 0 0 0\n" in text
    v, vn, f = read_obj(out / "mesh.obj")
    assert len(v) == 17 ** 2 and len(vn) == 17 ** 2 and len(f) == 2 * 16 ** 2
    # a cylinder of radius 1 about the v-direction
    assert np.allclose(v[:, 0] ** 2 + (v[:, 2] - 1.0) ** 2, 1.0, atol=1e-6)
    report = json.loads((out / "report.json").read_text())
    assert report["first_form"] < 1e-12
    germ = json.loads((out / "germ.json").read_text())
    # the frame integration costs one order
    assert germ["order"] == 11 and len(germ["f"]) == 3


@pytest.mark.parametrize("other", [{"a": 1.0}, {"omega": 0.3, "alternate": True}])
def test_deform_sign_clash(tmp_path, other):
    config = {"metric": A2_EDGE, "endpoints": [{"omega": 0.0}, other]}
    code, out = forge(tmp_path, "deform", config)
    assert code == EXIT_PRECONDITION
    assert not (out / "deform.json").exists()


def test_deform_family(tmp_path):
    config = {"metric": A2_EDGE,
              "endpoints": [{"omega": 0.2, "mu": 0.1}, {"omega": -0.3, "mu": -0.4}]}
    code, out = forge(tmp_path, "deform", config)
    assert code == EXIT_OK
    rows = json.loads((out / "deform.json").read_text())["samples"]
    assert [r["s"] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert all(r["a0"] < 0 and r["first_form_scaled"] < 1e-8 for r in rows)


def test_residual_exit_code(tmp_path):
    metric = {"builder": "A2", "h": {"coeffs": [[0, 1, 0.7], [1, 1, -0.4]]},
              "k": {"coeffs": [[1, 0, 0.3]]}}
    code, _ = forge(tmp_path, "realize", {"metric": metric, "curve": {"omega": 0.1},
                                          "tolerance": 1e-40})
    assert code == EXIT_RESIDUAL


@pytest.mark.parametrize("config", [
    {"metric": {"preset": "flat"}, "order": 30},
    {"metric": {"preset": "flat"}, "resolution": 8},
    {"metric": {"preset": "flat"}, "trust_radius": -1},
    {"metric": {"preset": "flat"}, "tolerance": 0},
    {"metric": {"preset": "torus"}},
    {"curve": {"omega": 0}},
    {"metric": {"preset": "flat"}, "mode": "sideways"},
])
def test_config_errors(tmp_path, config):
    code, _ = forge(tmp_path, "realize", config)
    assert code == EXIT_CONFIG


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["classify", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        JobConfig.from_dict("draw", {})


def test_precondition_exit_code(tmp_path):
    # G does not vanish to second order in v: not admissible
    metric = {"E": 1, "F": 0, "G": {"coeffs": [[0, 1, 1.0]]}}
    code, _ = forge(tmp_path, "classify", {"metric": metric})
    assert code == EXIT_PRECONDITION


def test_verify_fixture(tmp_path):
    code, out = forge(tmp_path, "verify", {"fixture": "swallowtail"})
    assert code == EXIT_OK
    rep = json.loads((out / "verify.json").read_text())
    assert rep["classification"]["kind"] == "A3"
    assert rep["density_residual"] < 1e-10
    code, out = forge(tmp_path, "verify", {"fixture": "ms_example"}, "ms")
    rep = json.loads((out / "verify.json").read_text())
    assert abs(rep["map_euler_density_0"]) < 1e-12 and abs(rep["map_euler_density_u"]) > 0.1


def test_verify_realization(tmp_path):
    code, out = forge(tmp_path, "verify", {"metric": {"preset": "sphere"}})
    assert code == EXIT_OK
    assert json.loads((out / "verify.json").read_text())["first_form"] < 1e-10


def test_distance_csv_and_rerun(tmp_path):
    config = {"metric": {"preset": "flat"}, "pairs": [[[0, 0], [0.5, 0.5]], [[0, 0], [1, 0]]],
              "resolutions": [16, 32], "axioms": True, "samples": 20}
    code, out = forge(tmp_path, "distance", config, "a")
    assert code == EXIT_OK
    lines = (out / "distance.csv").read_text().splitlines()
    assert lines[0] == "p_u,p_v,q_u,q_v,d,resolution"
    assert len(lines) == 5
    assert float(lines[1].split(",")[4]) == pytest.approx(np.sqrt(0.5))
    assert json.loads((out / "axioms.json").read_text())["passed"] is True
    _, out2 = forge(tmp_path, "distance", config, "b")
    for name in ("distance.csv", "axioms.json"):
        assert (out / name).read_bytes() == (out2 / name).read_bytes()


def test_rerun_is_byte_identical(tmp_path):
    config = {"metric": A2_EDGE, "curve": {"omega": 0.1, "mu": -0.2}, "export": True}
    _, a = forge(tmp_path, "realize", config, "a")
    _, b = forge(tmp_path, "realize", config, "b")
    for name in ("germ.json", "report.json", "mesh.obj"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_distance_out_of_domain(tmp_path):
    config = {"metric": {"preset": "flat"}, "pairs": [[[0, 0], [2, 0]]], "resolution": 16}
    code, _ = forge(tmp_path, "distance", config)
    assert code == EXIT_PRECONDITION


@pytest.mark.parametrize("fixture", ["cuspidal_edge", "swallowtail", "cross_cap"])
def test_export_fixture(tmp_path, fixture):
    code, out = forge(tmp_path, "export", {"fixture": fixture, "resolution": 16})
    assert code == EXIT_OK
    v, vn, f = read_obj(out / "mesh.obj")
    assert len(v) == 17 ** 2
    assert len(vn) == (0 if fixture == "cross_cap" else 17 ** 2)
    assert all(len(face) == 3 for face in f)


def test_export_flat_plane():
    u, v = Jet2.var_u(8), Jet2.var_v(8)
    plane = MapGerm((u, v, u.zero_like()), None, "plane")
    text = export_mesh(plane, n=8)
    z = [float(line.split()[3]) for line in text.splitlines() if line.startswith("v ")]
    assert len(z) == 81 and all(x == 0.0 for x in z)
    assert "vn" not in text
