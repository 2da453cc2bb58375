import json
import math
import os

import numpy as np
import pytest

from sympcap.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestCapacityCommand:
    def test_ball(self, capsys):
        code, out = invoke(capsys, "capacity", "--ball", "R=1", "N=3")
        assert code == 0
        obj = json.loads(out)
        assert obj == {"exact": True, "value": pytest.approx(math.pi)}

    def test_cylinder(self, capsys):
        code, out = invoke(capsys, "capacity", "--cylinder", "j=2", "R=2", "N=3")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(4 * math.pi)

    def test_ellipsoid_region(self, capsys):
        region = {"type": "ellipsoid",
                  "matrix": {"n": 1, "matrix": [1.0, 0.0, 0.0, 4.0]},
                  "energy": 1.0}
        code, out = invoke(capsys, "capacity", "--region", json.dumps(region))
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(math.pi)

    def test_nonconjugate_cylinder_exit_3(self, capsys):
        code, out = invoke(capsys, "capacity", "--cylinder", "j=1", "R=1", "N=2", "plane=qq")
        assert code == 3
        assert json.loads(out)["error"] == "UnsupportedRegion"

    def test_missing_region_exit_2(self, capsys):
        code, out = invoke(capsys, "capacity")
        assert code == 2
        assert json.loads(out)["error"] == "InvalidInput"


class TestQuantizeCommands:
    def test_harmonic_levels(self, capsys):
        code, out = invoke(capsys, "quantize-1d", "--potential", "harmonic", "omega=1",
                           "--nmax", "2", "--hbar", "1")
        assert code == 0
        energies = [e["energy"] for e in json.loads(out)["entries"]]
        assert energies == pytest.approx([0.5, 1.5, 2.5], rel=1e-10)

    def test_csv_format(self, capsys):
        code, out = invoke(capsys, "quantize-1d", "--potential", "harmonic", "omega=1",
                           "--nmax", "1", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,energy,action,maslov"
        assert len(lines) == 3

    def test_quadratic(self, capsys):
        m = {"n": 2, "matrix": [float(x) for x in np.diag([1, 3, 1, 3]).ravel()]}
        code, out = invoke(capsys, "quantize-quadratic", "--matrix", json.dumps(m),
                           "--n", "2,0")
        assert code == 0
        assert json.loads(out)["entries"][0]["energy"] == pytest.approx(4.0)

    def test_separable(self, capsys):
        pots = json.dumps([{"kind": "harmonic", "omega": 1.0},
                           {"kind": "harmonic", "omega": 1.0}])
        code, out = invoke(capsys, "quantize-separable", "--potentials", pots, "--n", "0,0")
        assert code == 0
        assert json.loads(out)["entries"][0]["energy"] == pytest.approx(1.0, rel=1e-10)

    def test_nonpd_matrix_exit_3(self, capsys):
        m = {"n": 1, "matrix": [1.0, 0.0, 0.0, -1.0]}
        code, out = invoke(capsys, "quantize-quadratic", "--matrix", json.dumps(m), "--n", "0")
        assert code == 3
        assert json.loads(out)["error"] == "NotPositiveDefinite"


class TestOtherCommands:
    def test_williamson(self, capsys):
        m = {"n": 1, "matrix": [1.0, 0.0, 0.0, 4.0]}
        code, out = invoke(capsys, "williamson", "--matrix", json.dumps(m))
        assert code == 0
        obj = json.loads(out)
        assert obj["omegas"] == pytest.approx([2.0])
        assert obj["residual"] < 1e-10

    def test_nonsqueeze(self, capsys):
        code, out = invoke(capsys, "nonsqueeze-ensemble", "--n", "2", "--count", "10",
                           "--seed", "1")
        assert code == 0
        obj = json.loads(out)
        assert obj["min_conjugate_det"] >= 1 - 1e-9
        assert obj["conjugate_bound_held"]

    def test_shadow(self, capsys):
        code, out = invoke(capsys, "shadow", "--random", "2", "--seed", "3",
                           "--plane", "conjugate:1")
        assert code == 0
        obj = json.loads(out)
        assert obj["satisfied"] and obj["area"] >= obj["bound"] * (1 - 1e-9)

    def test_dos(self, capsys):
        code, out = invoke(capsys, "dos", "--ndim", "3", "--energy", "2")
        assert code == 0
        assert json.loads(out)["g"] == pytest.approx(2.0)

    def test_blob_check(self, capsys):
        code, out = invoke(capsys, "blob-check", "--value", str(3 * math.pi))
        assert code == 0
        assert json.loads(out) == {"blob_index": 1, "is_blob": True}

    def test_bottle_demo(self, capsys):
        code, out = invoke(capsys, "bottle-demo", "--radius", "1", "--neck", "0.5")
        assert code == 0
        obj = json.loads(out)
        assert obj["capacity"]["value"] == pytest.approx(math.pi)
        assert obj["neck_loop_action"] == pytest.approx(math.pi / 4)
        assert obj["neck_action_below_capacity"]

    def test_evolve_csv(self, capsys):
        code, out = invoke(capsys, "evolve", "--potential", "harmonic", "omega=1",
                           "--times", "0,0.5", "--dt", "0.01", "--samples", "20000")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "time,plane,area,bound,satisfied"
        for line in lines[1:]:
            fields = line.split(",")
            assert fields[1] == "q1p1"
            assert abs(float(fields[2]) - math.pi) / math.pi < 0.05
            assert fields[4] == "True"

    def test_evolve_dump_points(self, capsys, tmp_path):
        prefix = str(tmp_path / "cloud")
        code, out = invoke(capsys, "evolve", "--potential", "harmonic", "omega=1",
                           "--times", "0", "--dt", "0.01", "--samples", "1000",
                           "--dump-points", prefix)
        assert code == 0
        dumped = np.loadtxt(f"{prefix}_t0.csv", delimiter=",", skiprows=1)
        assert dumped.shape == (1000, 2)


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["capacity", "--ball", "R=1.5", "N=2"],
        ["nonsqueeze-ensemble", "--n", "2", "--count", "20", "--seed", "7"],
        ["quantize-1d", "--potential", "morse", "D=10", "a=1", "--nmax", "3"],
        ["shadow", "--random", "2", "--seed", "11"],
    ])
    def test_byte_identical_reruns(self, capsys, argv):
        _, out1 = invoke(capsys, *argv)
        _, out2 = invoke(capsys, *argv)
        assert out1 == out2

    def test_results_reparse_under_schema(self, capsys):
        _, out = invoke(capsys, "capacity", "--ball", "R=1", "N=1")
        obj = json.loads(out)
        assert set(obj) == {"value", "exact"}
        assert isinstance(obj["exact"], bool)
        assert obj["value"] == "inf" or isinstance(obj["value"], float)


class TestGoldenFiles:
    GOLDEN = os.path.join(os.path.dirname(__file__), "..", "docs", "golden")

    @pytest.mark.parametrize("name,argv", [
        ("capacity.json", ["capacity", "--ball", "R=1", "N=3"]),
        ("williamson.json", ["williamson", "--matrix", '{"n":1,"matrix":[1,0,0,4]}']),
        ("shadow.json", ["shadow", "--random", "2", "--seed", "3"]),
        ("nonsqueeze-ensemble.json",
         ["nonsqueeze-ensemble", "--n", "2", "--count", "10", "--seed", "1"]),
        ("evolve.csv", ["evolve", "--potential", "harmonic", "omega=1", "--times", "0",
                        "--dt", "0.01", "--samples", "5000", "--grid-cell", "0.1"]),
        ("quantize-1d.json", ["quantize-1d", "--potential", "harmonic", "omega=1",
                              "--nmax", "2"]),
        ("quantize-quadratic.json",
         ["quantize-quadratic", "--matrix", '{"n":1,"matrix":[1,0,0,1]}', "--n", "0"]),
        ("quantize-separable.json",
         ["quantize-separable", "--potentials",
          '[{"kind":"harmonic","omega":1}]', "--n", "1"]),
        ("dos.json", ["dos", "--ndim", "3", "--energy", "2"]),
        ("blob-check.json", ["blob-check", "--value", "3.141592653589793"]),
        ("bottle-demo.json", ["bottle-demo", "--radius", "1", "--neck", "0.5"]),
    ])
    def test_matches_golden(self, capsys, name, argv):
        code, out = invoke(capsys, *argv)
        assert code == 0
        with open(os.path.join(self.GOLDEN, name)) as fh:
            assert out == fh.read()
