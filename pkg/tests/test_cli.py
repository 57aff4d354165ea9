import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mzsim.cli import main
from mzsim.datafiles import (
    MalformedFile,
    RunManifest,
    format_counts,
    read_counts,
    read_records,
)
from mzsim.svgplot import Axes
from mzsim.trials import CountsTable, ExperimentPlan, Mode, aggregate

SVG_NS = "{http://www.w3.org/2000/svg}"


def simulate(out, *extra):
    return main(["simulate", "--out-dir", str(out), *extra])


@pytest.fixture(scope="module")
def randomized_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("rand")
    code = main(
        ["simulate", "--mode", "randomized", "--phi-start", "0", "--phi-step", "0.1963",
         "--settings", "33", "--trials", "1000", "--seed", "7", "--out-dir", str(out)]
    )
    assert code == 0
    return out


class TestSimulate:
    def test_ideal_counts_follow_cosine(self, tmp_path):
        assert simulate(tmp_path, "--mode", "ideal", "--phi-step", "0.1963", "--settings", "33",
                        "--trials", "1000", "--seed", "7") == 0
        counts = read_counts(tmp_path / "counts.csv")
        want = 0.5 * (1 + np.cos(counts.phis()))
        assert np.all(np.abs(counts.fractions_L() - want) <= 0.063)
        assert not (tmp_path / "coins.txt").exists()

    def test_randomized_flat(self, randomized_run):
        counts = read_counts(randomized_run / "counts.csv")
        assert np.all(np.abs(counts.n_L() - 500) <= 63)
        assert np.all(np.abs(counts.n_R() - 500) <= 63)

    def test_outputs_and_schema(self, randomized_run):
        header = (randomized_run / "records.csv").read_text().splitlines()[0]
        assert header == "setting_index,trial_index,phi_nominal,phi_realized,coin,outcome"
        assert (randomized_run / "counts.csv").read_text().splitlines()[0] == "phi_nominal,n_L,n_R"
        coins = (randomized_run / "coins.txt").read_text()
        assert coins.endswith("\n") and len(coins.strip()) == 33_000
        manifest = RunManifest.read(randomized_run / "manifest.txt")
        assert manifest.plan.seed == 7 and manifest.plan.mode is Mode.RANDOMIZED
        assert manifest.outputs["coins_file"] == "coins.txt"

    def test_zero_trials_is_usage_error(self, tmp_path, capsys):
        assert simulate(tmp_path, "--mode", "ideal", "--trials", "0") == 2
        assert "usage" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "flags",
        [
            ["--mode", "ideal", "--settings", "-3"],
            ["--mode", "ideal", "--phi-step", "abc"],
            ["--mode", "ideal", "--seed", "-1"],
            ["--mode", "noisy", "--sigma", "-0.1"],
            ["--mode", "ideal", "--sigma", "0.5"],
            ["--mode", "bogus"],
            [],
        ],
    )
    def test_invalid_flags(self, tmp_path, flags):
        assert simulate(tmp_path, *flags) == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["simulate", "--mode", "ideal", "--settings", "1", "--trials", "5",
                     "--out-dir", str(blocker / "sub")]) == 1

    def test_records_roundtrip_to_counts(self, randomized_run):
        records = read_records(randomized_run / "records.csv")
        assert format_counts(aggregate(records)) == (randomized_run / "counts.csv").read_text()

    def test_manifest_replay_is_byte_identical(self, randomized_run, tmp_path):
        code = main(["simulate", "--manifest", str(randomized_run / "manifest.txt"),
                     "--workers", "3", "--out-dir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "records.csv").read_bytes() == (randomized_run / "records.csv").read_bytes()

    def test_manifest_conflicts_with_plan_flags(self, randomized_run, tmp_path):
        assert main(["simulate", "--manifest", str(randomized_run / "manifest.txt"),
                     "--seed", "3", "--out-dir", str(tmp_path)]) == 2

    def test_missing_manifest(self, tmp_path):
        assert main(["simulate", "--manifest", str(tmp_path / "nope.txt")]) == 1

    def test_noisy_mode(self, tmp_path):
        assert simulate(tmp_path, "--mode", "randomized-noisy", "--sigma", "0.3", "--settings", "3",
                        "--trials", "20") == 0
        records = read_records(tmp_path / "records.csv")
        assert any(r.phi_realized != r.phi_nominal for r in records)


class TestDecrypt:
    def test_recovers_fringes(self, randomized_run, tmp_path):
        assert main(["decrypt", "--records", str(randomized_run / "records.csv"),
                     "--coins", str(randomized_run / "coins.txt"), "--out-dir", str(tmp_path)]) == 0
        heads = read_counts(tmp_path / "heads_counts.csv")
        tails = read_counts(tmp_path / "tails_counts.csv")
        phis = heads.phis()
        assert np.all(np.abs(heads.fractions_L() - 0.5 * (1 + np.cos(phis))) <= 0.09)
        assert np.all(np.abs(tails.fractions_L() - 0.5 * (1 - np.cos(phis))) <= 0.09)
        total = read_counts(randomized_run / "counts.csv")
        assert np.array_equal(heads.n_L() + tails.n_L(), total.n_L())
        assert np.array_equal(heads.n_R() + tails.n_R(), total.n_R())

    def test_wrong_length(self, randomized_run, tmp_path):
        coins = tmp_path / "short.txt"
        coins.write_text("HTH\n")
        assert main(["decrypt", "--records", str(randomized_run / "records.csv"),
                     "--coins", str(coins), "--out-dir", str(tmp_path)]) == 3

    def test_ideal_records(self, tmp_path):
        simulate(tmp_path, "--mode", "ideal", "--settings", "2", "--trials", "4")
        coins = tmp_path / "coins.txt"
        coins.write_text("H" * 8 + "\n")
        assert main(["decrypt", "--records", str(tmp_path / "records.csv"),
                     "--coins", str(coins), "--out-dir", str(tmp_path)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["decrypt", "--records", str(tmp_path / "x.csv"), "--coins",
                     str(tmp_path / "y.txt")]) == 1


class TestEntropy:
    def run(self, capsys, *args):
        assert main(["entropy", *args]) == 0
        lines = capsys.readouterr().out.splitlines()
        return lines[0].split(","), [list(map(float, l.split(","))) for l in lines[1:]]

    def test_coin_zero(self, capsys):
        header, rows = self.run(capsys, "--model", "coin", "--phi", "0")
        assert header == ["phi", "lambda_plus", "lambda_minus", "entropy_bits"]
        assert rows == [[0.0, 0.5, 0.5, 1.0]]

    def test_coin_quarter(self, capsys):
        _, rows = self.run(capsys, "--model", "coin", "--phi", "1.5707963")
        assert rows[0][3] == pytest.approx(0.0, abs=1e-9)

    def test_coin_sweep(self, capsys):
        _, rows = self.run(capsys, "--model", "coin", "--phi-step", "0.5", "--settings", "5")
        assert [r[0] for r in rows] == [0.0, 0.5, 1.0, 1.5, 2.0]

    def test_gaussian(self, capsys):
        header, rows = self.run(capsys, "--model", "gaussian", "--mu", "0", "--sigma", "1")
        assert header == ["mu", "sigma", "contrast", "entropy_bits"]
        assert rows[0][2] == pytest.approx(0.606531, abs=1e-6)
        # eigenvalues (1 +- e^-1/2)/2; entropy from mpmath
        assert rows[0][3] == pytest.approx(0.715349166710721734, abs=1e-12)

    def test_gaussian_grid(self, capsys):
        _, rows = self.run(capsys, "--model", "gaussian", "--mu", "0", "1", "--sigma", "0", "2")
        assert len(rows) == 4

    def test_to_file(self, tmp_path):
        out = tmp_path / "e.csv"
        assert main(["entropy", "--model", "coin", "--phi", "0", "--out", str(out)]) == 0
        assert out.read_text().startswith("phi,")

    @pytest.mark.parametrize(
        "args",
        [
            ["--model", "gaussian"],
            ["--model", "gaussian", "--sigma", "-1"],
            ["--model", "coin", "--sigma", "1"],
            ["--model", "gaussian", "--sigma", "1", "--phi", "0"],
            ["--model", "nope"],
        ],
    )
    def test_invalid(self, args):
        assert main(["entropy", *args]) == 2


def _series(svg_text):
    root = ET.fromstring(svg_text)
    ax = Axes(*(float(root.get(f"data-{k}")) for k in ("x-min", "x-max", "y-min", "y-max")))
    out = {}
    for pl in root.iter(f"{SVG_NS}polyline"):
        pts = [tuple(map(float, p.split(","))) for p in pl.get("points").split()]
        out[(pl.get("class"), pl.get("data-series"))] = [(ax.data_x(x), ax.data_y(y)) for x, y in pts]
    return root, out


class TestPlot:
    def test_ideal_plot(self, tmp_path):
        simulate(tmp_path, "--mode", "ideal", "--settings", "33", "--trials", "200", "--seed", "1")
        svg = tmp_path / "p.svg"
        assert main(["plot", "--counts", str(tmp_path / "counts.csv"), "--out", str(svg),
                     "--overlay", "heads", "--title", "ideal <sweep>"]) == 0
        root, series = _series(svg.read_text())
        assert root.get("width") == "800" and root.get("height") == "500"
        counts = read_counts(tmp_path / "counts.csv")
        got = np.array(series[("series", "D_L")])
        assert np.allclose(got[:, 0], counts.phis(), atol=1e-2)
        assert np.allclose(got[:, 1], counts.n_L(), atol=0.05)
        expected = np.array(series[("expected", "D_L")])
        assert np.allclose(expected[:, 1], 100 * (1 + np.cos(counts.phis())), atol=0.05)
        texts = [t.text for t in root.iter(f"{SVG_NS}text")]
        assert "phi (rad)" in texts and "detector counts" in texts and "ideal <sweep>" in texts

    def test_randomized_plot_is_flat(self, randomized_run, tmp_path):
        svg = tmp_path / "r.svg"
        assert main(["plot", "--counts", str(randomized_run / "counts.csv"), "--out", str(svg),
                     "--overlay", "flat"]) == 0
        _, series = _series(svg.read_text())
        ys = np.array(series[("series", "D_R")])[:, 1]
        assert np.all(np.abs(ys - 500) <= 63.1)

    def test_empty_counts(self, tmp_path):
        empty = tmp_path / "c.csv"
        empty.write_text("phi_nominal,n_L,n_R\n")
        assert main(["plot", "--counts", str(empty), "--out", str(tmp_path / "x.svg")]) == 2
        empty.write_text("")
        assert main(["plot", "--counts", str(empty), "--out", str(tmp_path / "x.svg")]) == 2

    def test_malformed_counts(self, tmp_path):
        bad = tmp_path / "c.csv"
        bad.write_text("phi_nominal,n_L,n_R\n0.1,abc,3\n")
        assert main(["plot", "--counts", str(bad), "--out", str(tmp_path / "x.svg")]) == 2

    def test_missing_counts(self, tmp_path):
        assert main(["plot", "--counts", str(tmp_path / "none.csv"), "--out", str(tmp_path / "x.svg")]) == 1


class TestFiles:
    def test_manifest_roundtrip(self):
        plan = ExperimentPlan(Mode.NOISY, phi_start=0.1, phi_step=math.pi / 7, n_settings=9,
                              trials_per_setting=12, sigma=0.3333333333333333, seed=2**64 - 1)
        m = RunManifest(plan, "0.1.0", "2026-01-01T00:00:00+00:00", {"records_csv": "r.csv"})
        back = RunManifest.from_text(m.to_text())
        assert back.plan == plan and back.outputs == {"records_csv": "r.csv"}
        assert back.to_text() == m.to_text()

    def test_manifest_missing_key(self):
        with pytest.raises(MalformedFile):
            RunManifest.from_text("mode=ideal\n")

    def test_counts_header_checked(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("a,b,c\n")
        with pytest.raises(MalformedFile):
            read_counts(p)

    def test_counts_roundtrip(self, tmp_path):
        from mzsim.datafiles import write_counts
        from mzsim.trials import CountsRow

        table = CountsTable((CountsRow(0.1, 3, 4), CountsRow(1 / 3, 0, 7)))
        write_counts(tmp_path / "c.csv", table)
        assert read_counts(tmp_path / "c.csv") == table


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "mzsim", "entropy", "--model", "coin", "--phi", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "0.0,0.5,0.5,1.0"
