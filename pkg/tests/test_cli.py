import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantest import cli
from quantest.cli import main, parse_delta_grid
from quantest.errors import InputError, ParseError, TooFewGroups, TooFewObservations
from quantest.report import GroupSummary, RunReport, format_float, parse_samples


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def normal_files(tmp_path):
    r = np.random.default_rng(0)
    a = _write(tmp_path / "a.csv", "value\n" + "\n".join(map(str, r.standard_normal(200).tolist())) + "\n")
    b = _write(tmp_path / "b.csv", "\n".join(map(str, (0.5 + r.standard_normal(150)).tolist())) + "\n")
    return a, b


class TestParse:
    def test_two_files(self, tmp_path):
        a = _write(tmp_path / "x.csv", "1\n2\n3")
        b = _write(tmp_path / "y.csv", "4\n5\n6\n")
        s = parse_samples(paths=[a, b])
        assert [g.values.tolist() for g in s] == [[1, 2, 3], [4, 5, 6]]
        assert [g.label for g in s] == ["x", "y"]

    def test_header_and_blank_lines(self, tmp_path):
        a = _write(tmp_path / "a.csv", "time\n\n3.5\n 1e-2 \n\n-4\n")
        (s,) = parse_samples(paths=[a, a])[:1]
        assert s.values.tolist() == [-4.0, 0.01, 3.5]

    def test_grouped_order_and_too_few(self, tmp_path):
        g = _write(tmp_path / "g.csv", "a,1\nb,2\na,3\n")
        with pytest.raises(TooFewObservations, match="'b'"):
            parse_samples(grouped=g)

    def test_grouped(self, tmp_path):
        g = _write(tmp_path / "g.csv", "group,value\nz,1\na,2\nz,3\na,4\nm,5\nm,6\n")
        s = parse_samples(grouped=g)
        assert [x.label for x in s] == ["z", "a", "m"]
        assert s[0].values.tolist() == [1.0, 3.0]

    def test_non_numeric_cell(self, tmp_path):
        a = _write(tmp_path / "a.csv", "1\n2\nabc\n4\n")
        with pytest.raises(ParseError) as exc:
            parse_samples(paths=[a, a])
        assert exc.value.row == 3 and exc.value.column == 1
        assert "row 3, column 1" in str(exc.value)

    def test_grouped_non_numeric(self, tmp_path):
        g = _write(tmp_path / "g.csv", "a,1\nb,2\na,x\n")
        with pytest.raises(ParseError, match="row 3, column 2"):
            parse_samples(grouped=g)

    def test_extra_columns(self, tmp_path):
        a = _write(tmp_path / "a.csv", "1,2\n")
        with pytest.raises(ParseError):
            parse_samples(paths=[a, a])

    def test_one_group(self, tmp_path):
        g = _write(tmp_path / "g.csv", "a,1\na,2\n")
        with pytest.raises(TooFewGroups):
            parse_samples(grouped=g)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_samples(paths=[str(tmp_path / "nope.csv"), str(tmp_path / "nope.csv")])


class TestDeltaGrid:
    def test_examples(self):
        assert parse_delta_grid("0:0.5:0.25") == (0.0, 0.25, 0.5)
        assert parse_delta_grid("0:0.5:0.025")[-1] == 0.5
        assert len(parse_delta_grid("0:0.5:0.025")) == 21
        assert parse_delta_grid("0.1:0.3:0.1") == (0.1, 0.2, 0.3)
        assert parse_delta_grid("0:0.3:0.25") == (0.0, 0.25)
        assert parse_delta_grid("0.35:0.35:1") == (0.35,)

    @pytest.mark.parametrize("text", ["0:1", "a:1:0.1", "0:1:0", "0:1:-1", "1:0:0.1", "-1:0:0.5", "0:inf:1"])
    def test_invalid(self, text):
        with pytest.raises(InputError):
            parse_delta_grid(text)


class TestReport:
    def test_float_format(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(0.0) == "0.0"
        assert format_float(1e300) == "1.0000000000000001e+300"
        assert float(format_float(1 / 3)) == 1 / 3

    @given(
        st.floats(0, 1e6),
        st.floats(0, 1),
        st.booleans(),
        st.lists(st.tuples(st.text(max_size=8), st.integers(2, 10**6), st.floats(-1e9, 1e9), st.floats(1e-9, 1e3)), min_size=2, max_size=5),
        st.lists(st.text(max_size=20), max_size=3),
    )
    def test_round_trip(self, stat, p, rej, groups, warnings):
        rep = RunReport(
            config={"alpha": 0.05, "kernel": "gaussian", "quantile": 0.5},
            statistic=stat,
            df=len(groups) - 1,
            p_value=p,
            reject=rej,
            groups=tuple(GroupSummary(lab, n, m, b, 1 / b) for lab, n, m, b in groups),
            warnings=tuple(warnings),
        )
        assert RunReport.from_json(rep.to_json()) == rep


class TestCmdTest:
    def test_identical_file_twice(self, tmp_path, capsys):
        a = _write(tmp_path / "a.csv", "\n".join(str(v) for v in range(1, 61)))
        assert main(["test", "--input", a, a]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["statistic"] == 0.0
        assert rep["p_value"] == 1.0
        assert rep["reject"] is False
        assert set(rep) == {"schema_version", "config", "statistic", "df", "p_value", "reject", "groups", "warnings"}
        assert set(rep["groups"][0]) == {"label", "n", "median", "bandwidth", "density_at_median"}

    def test_json_report(self, normal_files, capsys):
        assert main(["test", "--input", *normal_files]) == 0
        out = capsys.readouterr().out
        rep = RunReport.from_json(out)
        assert rep.df == 1
        assert [g.n for g in rep.groups] == [200, 150]
        assert rep.config["alpha"] == 0.05
        assert rep.to_json() == out

    def test_text_format(self, normal_files, capsys):
        assert main(["test", "--input", *normal_files, "--format", "text", "--kernel", "epanechnikov"]) == 0
        out = capsys.readouterr().out
        assert "statistic" in out and "p-value" in out and "decision" in out
        assert "a " in out and "b " in out

    def test_single_input(self, normal_files, capsys):
        assert main(["test", "--input", normal_files[0]]) == 2
        assert "TooFewGroups" in capsys.readouterr().err

    @pytest.mark.parametrize("flags", [["--alpha", "1.5"], ["--quantile", "0"], ["--bandwidth-const", "-1"], ["--kernel", "box"]])
    def test_bad_flags(self, normal_files, flags):
        assert main(["test", "--input", *normal_files, *flags]) == 2

    def test_missing_source(self):
        assert main(["test"]) == 2

    def test_missing_file(self, tmp_path, capsys):
        assert main(["test", "--input", str(tmp_path / "x.csv"), str(tmp_path / "y.csv")]) == 2

    def test_parse_error(self, tmp_path, capsys):
        a = _write(tmp_path / "a.csv", "1\n2\nfoo\n")
        assert main(["test", "--input", a, a]) == 2
        assert "row 3" in capsys.readouterr().err

    def test_constant_sample_is_numeric_error(self, tmp_path, capsys):
        a = _write(tmp_path / "a.csv", "1\n1\n1\n")
        b = _write(tmp_path / "b.csv", "1\n2\n3\n")
        assert main(["test", "--input", a, b]) == 3
        assert "ZeroDispersion" in capsys.readouterr().err

    def test_degenerate_density_exit(self, tmp_path, capsys):
        vals = [-1000 + i * 0.1 for i in range(5)] + [1000 + i * 0.1 for i in range(5)]
        a = _write(tmp_path / "a.csv", "\n".join(map(str, vals)))
        assert main(["test", "--input", a, a, "--kernel", "epanechnikov"]) == 3
        assert "DegenerateDensity" in capsys.readouterr().err

    def test_grouped(self, tmp_path, capsys):
        r = np.random.default_rng(1)
        rows = [f"g{i % 3},{v!r}" for i, v in enumerate(r.standard_normal(300).tolist())]
        g = _write(tmp_path / "g.csv", "group,value\n" + "\n".join(rows))
        assert main(["test", "--grouped", g]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["df"] == 2
        assert [x["label"] for x in rep["groups"]] == ["g0", "g1", "g2"]


class TestCmdPower:
    def test_rows(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["power", "--deltas", "0:0.5:0.25", "--reps", "20", "--n", "100", "--out", str(out), "--workers", "1"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delta,power,mc_stderr,errors"
        assert [ln.split(",")[0] for ln in lines[1:]] == ["0.0", "0.25", "0.5"]

    def test_byte_identical(self, tmp_path):
        flags = ["power", "--deltas", "0:0.2:0.1", "--reps", "50", "--n", "300", "--seed", "99", "--family", "cauchy"]
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        assert main(flags + ["--out", str(a), "--workers", "1"]) == 0
        assert main(flags + ["--out", str(b), "--workers", "1"]) == 0
        assert main(flags + ["--out", str(c), "--workers", "2"]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()

    def test_stdout_and_svg(self, tmp_path, capsys):
        svg = tmp_path / "p.svg"
        assert main(["power", "--deltas", "0:0.3:0.1", "--reps", "30", "--n", "200", "--svg", str(svg), "--workers", "1"]) == 0
        assert capsys.readouterr().out.startswith("delta,power,mc_stderr,errors\n")
        root = ET.fromstring(svg.read_text())
        assert root.tag.endswith("svg")
        text = svg.read_text()
        assert "power" in text and "alpha = 0.05" in text and "<polyline" in text

    def test_row_at_035_has_full_power(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["power", "--deltas", "0.35:0.35:0.1", "--reps", "1000", "--seed", "3", "--out", str(out)]) == 0
        _, row = out.read_text().splitlines()
        assert float(row.split(",")[1]) >= 0.99

    @pytest.mark.parametrize(
        "flags",
        [["--deltas", "0:1"], ["--reps", "0"], ["--n", "1"], ["--family", "gamma"], ["--k", "1"], ["--alpha", "0"], ["--seed", "-3"], ["--n", "x"]],
    )
    def test_flag_errors(self, tmp_path, flags):
        out = tmp_path / "p.csv"
        assert main(["power", "--reps", "5", "--out", str(out), *flags]) == 2
        assert not out.exists()

    def test_failure_leaves_existing_output(self, tmp_path, monkeypatch):
        out = tmp_path / "p.csv"
        out.write_text("old\n")

        def boom(*a, **k):
            raise RuntimeError("worker died")

        monkeypatch.setattr(cli, "power_curve", boom)
        assert main(["power", "--reps", "5", "--out", str(out)]) == 3
        assert out.read_text() == "old\n"
        assert list(tmp_path.iterdir()) == [out]


def test_console_entry_point(tmp_path):
    a = _write(tmp_path / "a.csv", "\n".join(str(v) for v in range(1, 31)))
    proc = subprocess.run([sys.executable, "-m", "quantest", "test", "--input", a, a], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["statistic"] == 0.0
    proc = subprocess.run([sys.executable, "-m", "quantest", "test", "--input", a], capture_output=True, text=True)
    assert proc.returncode == 2
