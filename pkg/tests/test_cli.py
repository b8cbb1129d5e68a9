import json
import time
from pathlib import Path

import pytest

from erkirchhoff.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    return dict(line.split(None, 1) for line in out.strip().splitlines())


@pytest.fixture
def path3(tmp_path):
    f = tmp_path / "p3.txt"
    f.write_text("n=3\n0 1\n1 2\n")
    return f


@pytest.fixture
def two_components(tmp_path):
    f = tmp_path / "two.txt"
    f.write_text("# two edges\nn=4\n0 1\n\n2 3\n")
    return f


@pytest.fixture
def k4(tmp_path):
    f = tmp_path / "k4.txt"
    f.write_text("n=4\n" + "".join(f"{i} {j}\n" for i in range(4) for j in range(i + 1, 4)))
    return f


class TestGraph:
    def test_deterministic(self, capsys):
        a = run(capsys, "graph", "--er", 100, 0.5, 42)
        b = run(capsys, "graph", "--er", 100, 0.5, 42)
        assert a[0] == 0 and a[1] == b[1]
        t = table(a[1])
        assert t["n"] == "100" and t["connected"] == "true"
        assert t["event_en"] == "true"

    def test_config_echo(self, capsys):
        _, _, err = run(capsys, "graph", "--er", 10, 0.5, 3)
        cfg = json.loads(err.splitlines()[0])
        assert cfg["er"] == {"n": 10, "p": 0.5, "seed": 3}

    def test_path3_wiener(self, capsys, path3):
        code, out, _ = run(capsys, "graph", "--input", path3)
        assert code == 0 and table(out)["wiener"] == "4"

    def test_json(self, capsys, two_components):
        code, out, _ = run(capsys, "graph", "--input", two_components, "--json")
        d = json.loads(out)
        assert code == 0 and d["connected"] is False and d["edges"] == 2 and d["wiener"] is None

    def test_needs_one_source(self, capsys, path3):
        assert run(capsys, "graph")[0] == 1
        assert run(capsys, "graph", "--er", 5, 0.5, "--input", path3)[0] == 1

    def test_bad_probability(self, capsys):
        assert run(capsys, "graph", "--er", 10, 1.5)[0] == 1

    def test_malformed_edgelist(self, capsys, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("n=3\n0 1\n2 x\n")
        code, _, err = run(capsys, "graph", "--input", f)
        assert code == 1 and "3" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "graph", "--input", tmp_path / "nope.txt")[0] == 2


class TestKirchhoff:
    def test_path3(self, capsys, path3):
        code, out, _ = run(capsys, "kirchhoff", "--input", path3)
        t = table(out)
        assert code == 0
        assert float(t["trace_pinv"]) == pytest.approx(4 / 3, rel=1e-11)
        assert float(t["kirchhoff"]) == pytest.approx(4, rel=1e-11)

    def test_disconnected(self, capsys, two_components):
        code, out, _ = run(capsys, "kirchhoff", "--input", two_components)
        assert code == 0 and table(out)["kirchhoff"] == "inf"
        code, out, _ = run(capsys, "kirchhoff", "--input", two_components, "--json")
        assert json.loads(out)["kirchhoff"] is None

    def test_pairs_k4(self, capsys, k4):
        code, out, _ = run(capsys, "kirchhoff", "--input", k4, "--pairs")
        lines = out.strip().splitlines()
        assert code == 0 and lines[0] == "i,j,resistance" and len(lines) == 7
        assert all(float(l.split(",")[2]) == pytest.approx(0.5, rel=1e-12) for l in lines[1:])

    def test_pairs_across_components(self, capsys, two_components):
        _, out, _ = run(capsys, "kirchhoff", "--input", two_components, "--pairs")
        rows = {tuple(l.split(",")[:2]): l.split(",")[2] for l in out.strip().splitlines()[1:]}
        assert rows[("0", "2")] == "inf" and float(rows[("2", "3")]) == pytest.approx(1)

    def test_er_xn(self, capsys):
        _, out, _ = run(capsys, "kirchhoff", "--er", 50, 0.5, 1, "--json")
        d = json.loads(out)
        assert d["xn"] == pytest.approx(0.5 * d["trace_pinv"])


class TestTheory:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "theory", 100, 0.5)
        t = table(out)
        assert code == 0 and t["expected_xn"] == "1.01" and t["expected_kirchhoff"] == "202"

    def test_json_and_epsilon(self, capsys):
        code, out, _ = run(capsys, "theory", 100, 0.1, "--epsilon", 0.5, "--json")
        d = json.loads(out)
        assert code == 0 and d["fluctuation_bound"] == pytest.approx(0.168176, rel=1e-5)
        assert d["expected_xn"] == pytest.approx(1.17)

    def test_vanishing(self, capsys):
        _, out, _ = run(capsys, "theory", 100, "--gamma", 1, "--alpha", 0.5, "--json")
        d = json.loads(out)
        assert d["p"] == pytest.approx(0.1) and d["expected_xn_vanishing"] == pytest.approx(1.17)

    @pytest.mark.parametrize("argv", [
        ("100", "--gamma", "1", "--alpha", "1.5"),
        ("100", "--alpha", "0.5"),
        ("100",),
        ("1", "0.5"),
        ("100", "0.5", "--epsilon", "0.9"),
        ("100", "abc"),
    ])
    def test_invalid(self, capsys, argv):
        code, _, err = run(capsys, "theory", *argv)
        assert code == 1
        if "1.5" in argv:
            assert "--alpha" in err


class TestExperiment:
    SMOKE = ("--scenario", "power_law:1:0.5", "--scenario", "constant:0.3", "--n-grid", 12, 20,
             "--replicates", 3, "--seed", 42, "--quiet")

    def test_smoke_fast_and_identical(self, capsys, tmp_path):
        t0 = time.perf_counter()
        code, out, _ = run(capsys, "experiment", *self.SMOKE, "--output", tmp_path / "a")
        assert code == 0 and time.perf_counter() - t0 < 5
        assert run(capsys, "experiment", *self.SMOKE, "--output", tmp_path / "b", "--threads", 8)[0] == 0
        for suffix in (".records.csv", ".summary.csv"):
            assert Path(f"{tmp_path}/a{suffix}").read_bytes() == Path(f"{tmp_path}/b{suffix}").read_bytes()
        golden = Path(__file__).parent / "data" / "golden_smoke.records.csv"
        assert len(Path(f"{tmp_path}/a.records.csv").read_text().splitlines()) == len(golden.read_text().splitlines())

    def test_manifest_full(self, capsys, tmp_path):
        code, _, err = run(capsys, "experiment", "--full", "--n-grid", 10, "--replicates", 1, "--quiet",
                           "--output", tmp_path / "f")
        assert code == 0
        m = json.loads(Path(f"{tmp_path}/f.manifest.json").read_text())
        assert m["grid"] == [10] and m["full"] is True and m["seed"] == 0
        assert json.loads(err.splitlines()[0])["full"] is True

    def test_config_file_with_override(self, capsys, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text('replicates = 2\nn_grid = [10]\n[[scenario]]\nkind = "constant"\np = 0.5\n')
        code, _, _ = run(capsys, "experiment", "--config", cfg, "--replicates", 1, "--quiet",
                         "--output", tmp_path / "o")
        assert code == 0
        assert len(Path(f"{tmp_path}/o.records.csv").read_text().splitlines()) == 2

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, _ = run(capsys, "experiment", *self.SMOKE, "--output", tmp_path / "missing" / "x")
        assert code == 2

    def test_bad_scenario(self, capsys, tmp_path):
        assert run(capsys, "experiment", "--scenario", "power_law:1", "--output", tmp_path / "x")[0] == 1
        assert run(capsys, "experiment", "--replicates", 0, "--output", tmp_path / "x")[0] == 1


class TestSync:
    def test_noiseless(self, capsys):
        code, out, _ = run(capsys, "sync", "--n", 20, "--p", 0.5, "--sigma2", 0, "--trials", 10)
        d = json.loads(out)
        assert code == 0 and d["ratio"] == 1

    def test_default_graph_ratio(self, capsys):
        code, out, err = run(capsys, "sync", "--n", 50, "--p", 0.5, "--d", 1, "--sigma2", 1, "--trials", 20000)
        d = json.loads(out)
        assert code == 0 and 0.95 <= d["ratio"] <= 1.05
        assert set(d) == {"n", "d", "p_or_graphfile", "sigma2", "trials", "empirical_mse", "crb",
                          "ratio", "seed", "resamples"}
        assert json.loads(err.splitlines()[0])["seed"] == 0

    def test_input_graph(self, capsys, path3):
        _, out, _ = run(capsys, "sync", "--input", path3, "--trials", 10)
        d = json.loads(out)
        assert d["crb"] == pytest.approx(4 / 3) and d["p_or_graphfile"] == str(path3)

    def test_disconnected_input(self, capsys, two_components):
        assert run(capsys, "sync", "--input", two_components)[0] == 1

    @pytest.mark.parametrize("argv", [("--p", 1.2), ("--n", 1), ("--sigma2", -1), ("--trials", 0), ("--d", 0)])
    def test_invalid(self, capsys, argv):
        assert run(capsys, "sync", *argv)[0] == 1


def test_no_command(capsys):
    assert run(capsys)[0] == 1


def test_unknown_flag(capsys):
    assert run(capsys, "theory", 100, 0.5, "--bogus")[0] == 1
    assert run(capsys, "--version")[0] == 0
