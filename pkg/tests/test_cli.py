import json

import numpy as np
import pytest

from mmsig.cli import main
from mmsig.spaces import named_example, read_distance_csv, write_distance_csv, write_edge_list, Graph


def run(argv):
    return main([str(a) for a in argv])


class TestAnalyze:
    def test_tripod_json(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run(["analyze", "--example", "tripod", "--output", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["inertia_S"] == [1, 0, 3]
        assert doc["verdict"] == "pseudo(1, 2)"
        assert doc["version"] and "tol_rel" in doc and "seed" in doc

    def test_simplex_csv_format(self, capsys):
        assert run(["analyze", "--example", "simplex", "--n", 5, "--format", "csv"]) == 0
        header, row = capsys.readouterr().out.strip().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert cells["inertia_S_minus"] == "1" and cells["inertia_S_plus"] == "4"
        assert cells["verdict"] == "euclidean(4)"

    def test_triangle_violation_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n0,1,5\n1,0,1\n5,1,0\n")
        assert run(["analyze", "--input", bad]) == 2
        err = capsys.readouterr().err
        assert "exceeds" in err  # witness triple reported

    def test_edge_list_input(self, tmp_path):
        g = Graph(4, frozenset({(0, 1), (1, 2), (2, 3), (3, 0)}))
        path = tmp_path / "cycle.edges"
        write_edge_list(g, path)
        assert run(["analyze", "--input", path]) == 0

    def test_missing_input_exits_2(self):
        assert run(["analyze"]) == 2
        assert run(["analyze", "--input", "/nonexistent/file.csv"]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["analyze", "--example", "sphere", "--dim", 2, "--n", 9, "--seed", 3, "--output", a])
        run(["analyze", "--example", "sphere", "--dim", 2, "--n", 9, "--seed", 3, "--output", b])
        assert a.read_bytes() == b.read_bytes()


class TestEmbed:
    def test_tripod(self, tmp_path, capsys):
        out = tmp_path / "emb.json"
        assert run(["embed", "--example", "tripod", "--output", out]) == 0
        doc = json.loads(out.read_text())
        assert (doc["n_neg"], doc["n_pos"]) == (1, 2)
        assert "max residual" in capsys.readouterr().out

    def test_unit_square_csv_input(self, tmp_path):
        from mmsig.spaces import from_euclidean_points

        sp = from_euclidean_points([[0, 0], [1, 0], [1, 1], [0, 1]])
        src = tmp_path / "square.csv"
        write_distance_csv(sp, src)
        out = tmp_path / "emb.json"
        assert run(["embed", "--input", src, "--output", out]) == 0
        doc = json.loads(out.read_text())
        assert (doc["n_neg"], doc["n_pos"]) == (0, 2)

    def test_single_point(self, tmp_path):
        src = tmp_path / "one.csv"
        src.write_text("p0\n0.0\n")
        out = tmp_path / "emb.json"
        assert run(["embed", "--input", src, "--output", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["points"] == [[]]


class TestTrajectory:
    def test_deterministic(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run(
            ["trajectory", "--example", "simplex", "--n", 8, "--sizes", "2:8", "--output", out]
        ) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[1] == "size,s_minus,s_zero,s_plus,theta"
        last = lines[-1].split(",")
        assert last[0] == "8" and last[3] == "7"

    def test_sampled(self, capsys):
        assert run(
            ["trajectory", "--example", "tripod", "--measure", "uniform", "--m-max", 80, "--seed", 2]
        ) == 0
        out = capsys.readouterr().out
        assert out.startswith("size,")

    def test_model_sampled(self, tmp_path):
        out = tmp_path / "model_traj.csv"
        assert run(
            [
                "trajectory", "--model-p", 0.5, "--model-seed", 9,
                "--measure", "geometric:0.8", "--m-max", 120, "--seed", 2,
                "--output", out,
            ]
        ) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[1] == "size,s_minus,s_zero,s_plus,theta"
        assert len(lines) > 3


class TestConstruct:
    def test_prescribed_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "space.csv"
        assert run(
            ["construct", "prescribed", "--n", 2, "--p", 2, "--seed", 6, "--output", out]
        ) == 0
        assert "centered inertia (2, 1, 2)" in capsys.readouterr().out
        sp = read_distance_csv(out)
        assert sp.n == 5

    def test_perturb(self, tmp_path):
        from mmsig.spaces import from_euclidean_points

        rng = np.random.default_rng(3)
        pts = rng.normal(size=(5, 2))
        src = tmp_path / "in.csv"
        write_distance_csv(from_euclidean_points(pts), src)
        out = tmp_path / "out.csv"
        assert run(["construct", "perturb", "--input", src, "--seed", 1, "--output", out]) == 0

    def test_union(self, tmp_path):
        a = tmp_path / "a.csv"
        write_distance_csv(named_example("tripod"), a)
        out = tmp_path / "u.csv"
        assert run(
            ["construct", "union", "--inputs", a, a, "--h", 1.0, "--output", out]
        ) == 0
        assert read_distance_csv(out).n == 8

    def test_union_diameter_guard_exits_2(self, tmp_path):
        a = tmp_path / "a.csv"
        write_distance_csv(named_example("tripod"), a)
        assert run(
            ["construct", "union", "--inputs", a, a, "--h", 0.5, "--output", tmp_path / "u.csv"]
        ) == 2


class TestRado:
    def test_spectral_run(self, tmp_path, capsys):
        prefix = tmp_path / "run"
        assert run(["rado", "--p", 0.5, "--N", 120, "--seed", 7, "--output-prefix", prefix]) == 0
        doc = json.loads((tmp_path / "run_summary.json").read_text())
        assert doc["N"] == 120 and 0 < doc["ks_to_semicircle"] < 1
        esd_lines = (tmp_path / "run_esd.csv").read_text().strip().splitlines()
        assert len(esd_lines) == 2 + 120
        out = capsys.readouterr().out
        assert "KS to semicircle" in out

    def test_bad_probability_exits_2(self):
        assert run(["rado", "--p", 1.5, "--N", 10]) == 2

    def test_ratio_run(self, tmp_path):
        prefix = tmp_path / "ratio"
        assert run(
            [
                "rado", "--ratio", "--p", 0.5, "--measure", "geometric:0.8",
                "--m-max", 128, "--trials", 3, "--seed", 5,
                "--model-seed", 99, "--output-prefix", prefix,
            ]
        ) == 0
        doc = json.loads((tmp_path / "ratio_summary.json").read_text())
        assert doc["trials"] == 3
        assert doc["measure"] == {"type": "geometric", "q": 0.8}
        lines = (tmp_path / "ratio_ratio.csv").read_text().strip().splitlines()
        assert lines[1].startswith("trial,m,")

    def test_ratio_with_clique_rule(self, tmp_path):
        prefix = tmp_path / "cls"
        assert run(
            [
                "rado", "--ratio", "--p", 0.5, "--measure", "class_biased:4:0.7",
                "--clique-rule", "modular:5", "--m-max", 200, "--trials", 2,
                "--seed", 3, "--output-prefix", prefix,
            ]
        ) == 0
        doc = json.loads((tmp_path / "cls_summary.json").read_text())
        assert doc["final_delta_quantiles"]["q000"] >= 1.0

    def test_unknown_measure_exits_2(self):
        assert run(["rado", "--ratio", "--p", 0.5, "--measure", "zeta:2", "--m-max", 10]) == 2

    def test_ratio_threshold_verdict(self, tmp_path):
        prefix = tmp_path / "thr"
        assert run(
            [
                "rado", "--ratio", "--p", 0.5, "--measure", "geometric:0.8",
                "--m-max", 256, "--trials", 4, "--seed", 5,
                "--delta-threshold", 0.5, "--min-fraction", 0.5,
                "--output-prefix", prefix,
            ]
        ) == 0
        doc = json.loads((tmp_path / "thr_summary.json").read_text())
        assert doc["delta_threshold"] == 0.5
        assert doc["fraction_reaching"] == 1.0
        assert doc["pass"] is True


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["--version"])
    assert exc.value.code == 0
    assert "mmsig" in capsys.readouterr().out
