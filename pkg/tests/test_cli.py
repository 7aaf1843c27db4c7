import csv
import json
import math

import pytest

from semrd import BinarySourceSpec, closed_form_rate, threshold_a
from semrd.cli import main

Q09 = BinarySourceSpec.symmetric(0.9)


def run(args):
    return main(args)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestClosedFormCommand:
    def test_single_cell(self, tmp_path):
        out = tmp_path / "cf.csv"
        assert run(["closed-form", "--q", "0.9", "--dp", "0.2", "--do", "1.0", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["d_p", "d_o", "rate_bits"]
        assert rows == [["0.200000", "1.000000", "0.399124"]]
        manifest = json.loads((tmp_path / "cf.csv.manifest.json").read_text())
        assert manifest["command"] == "closed-form"
        assert manifest["flags"]["q"] == 0.9

    def test_grid_surface(self, tmp_path):
        out = tmp_path / "grid.csv"
        assert run(["closed-form", "--q", "0.9", "--dp-grid", "0:1:41", "--do-grid", "0:1:41", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert len(rows) == 41 * 41
        # flat region: for fixed d_o, all rates at d_p > a(d_o) must agree
        by_do = {}
        for dp_s, do_s, r_s in rows:
            by_do.setdefault(float(do_s), []).append((float(dp_s), float(r_s)))
        for do_v, cells in by_do.items():
            flat = [r for dp, r in cells if dp > threshold_a(Q09, do_v) + 1e-9]
            if len(flat) > 1:
                assert max(flat) - min(flat) < 1e-9

    def test_nats_unit(self, tmp_path):
        out = tmp_path / "nats.csv"
        assert run(["closed-form", "--q", "0.9", "--dp", "0.0", "--do", "0.0", "--unit", "nats", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["d_p", "d_o", "rate_nats"]
        assert float(rows[0][2]) == pytest.approx(math.log(2.0), abs=1e-6)

    def test_q_required(self, tmp_path):
        assert run(["closed-form", "--dp", "0.1", "--do", "0.1", "--out", str(tmp_path / "x.csv")]) == 2

    def test_asymmetric_rho_fails_at_runtime(self, tmp_path):
        code = run(["closed-form", "--q", "0.9", "--rho", "0.3", "--dp", "0.1", "--do", "0.1", "--out", str(tmp_path / "x.csv")])
        assert code == 1


class TestSolveCommand:
    def test_matches_closed_form(self, tmp_path):
        out = tmp_path / "solve.csv"
        assert run(["solve", "--q", "0.9", "--dp", "0.2", "--do", "1.0", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["d_p", "d_o", "rate_bits", "achieved_dp", "achieved_do", "status", "seed"]
        assert len(rows) == 1
        assert float(rows[0][2]) == pytest.approx(closed_form_rate(Q09, 0.2, 1.0), abs=5e-3)
        assert rows[0][5] == "converged"
        assert rows[0][6] == "0"

    def test_source_file(self, tmp_path):
        src = tmp_path / "src.json"
        src.write_text(json.dumps({"joint": [[0.45, 0.05], [0.05, 0.45]]}))
        out = tmp_path / "s.csv"
        assert run(["solve", "--source", str(src), "--dp", "1.0", "--do", "0.11", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert float(rows[0][2]) == pytest.approx(closed_form_rate(Q09, 1.0, 0.11), abs=5e-3)

    def test_infeasible_exit_code(self, tmp_path):
        out = tmp_path / "inf.csv"
        assert run(["solve", "--q", "0.9", "--dp", "1.0", "--do", "0.0", "--ysize", "1", "--out", str(out)]) == 1
        _, rows = read_csv(out)
        assert rows[0][5] == "infeasible"

    def test_missing_bounds(self, tmp_path):
        assert run(["solve", "--q", "0.9", "--dp", "0.2", "--out", str(tmp_path / "x.csv")]) == 2


class TestSweepCommand:
    def test_axis_with_fixed_do(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(["sweep", "--q", "0.9", "--dp-grid", "0:1:6", "--do", "1.0", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert len(rows) == 6
        for dp_s, do_s, r_s, *_ in rows:
            assert float(r_s) == pytest.approx(closed_form_rate(Q09, float(dp_s), float(do_s)), abs=5e-3)

    def test_empty_grid_is_usage_error(self, tmp_path):
        assert run(["sweep", "--q", "0.9", "--dp-grid", "0:1:0", "--do", "1.0", "--out", str(tmp_path / "x.csv")]) == 2

    def test_bad_grid_syntax(self, tmp_path):
        assert run(["sweep", "--q", "0.9", "--dp-grid", "zero-one", "--do", "1.0", "--out", str(tmp_path / "x.csv")]) == 2


class TestPfrSimCommand:
    def test_report_schema_and_bound_gap(self, tmp_path):
        out = tmp_path / "rep.json"
        code = run(["pfr-sim", "--q", "0.9", "--dp", "0.2", "--do", "1.0", "--n", "4", "--trials", "500", "--seed", "7", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        for key in ("n", "trials", "seed", "empirical_rate", "bound_rhs", "seq_do_mean", "seq_dp_mean", "tv_joint", "truncated_fraction"):
            assert key in doc
        assert doc["n"] == 4 and doc["trials"] == 500 and doc["seed"] == 7
        assert doc["empirical_rate"] <= doc["bound_rhs"]
        # gap between the bound and the exact rate is (log2(4 I + 1) + 4) / 4
        assert doc["bound_gap_vs_closed_form"] == pytest.approx(1.344141480337618, abs=1e-9)

    def test_single_trial_low_sample(self, tmp_path):
        out = tmp_path / "one.json"
        assert run(["pfr-sim", "--q", "0.9", "--dp", "0.2", "--do", "1.0", "--n", "2", "--trials", "1", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["low_sample"] is True
        assert doc["empirical_rate"] == 0.0

    def test_channel_from_source_file(self, tmp_path):
        src = tmp_path / "src.json"
        src.write_text(json.dumps({"joint": [[0.45, 0.05], [0.05, 0.45]], "channel": [[0.9, 0.1], [0.1, 0.9]]}))
        out = tmp_path / "rep.json"
        assert run(["pfr-sim", "--source", str(src), "--n", "2", "--trials", "100", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["mutual_information"] == pytest.approx(0.5310044064107188, abs=1e-9)

    def test_requires_channel_or_bounds(self, tmp_path):
        src = tmp_path / "src.json"
        src.write_text(json.dumps({"joint": [[0.45, 0.05], [0.05, 0.45]]}))
        assert run(["pfr-sim", "--source", str(src), "--n", "2", "--trials", "10", "--out", str(tmp_path / "x.json")]) == 2


class TestUsageAndDeterminism:
    def test_unknown_flag(self, tmp_path):
        assert run(["solve", "--q", "0.9", "--dp", "0.1", "--do", "0.1", "--frobnicate", "--out", str(tmp_path / "x.csv")]) == 2

    def test_unknown_command(self):
        assert run(["transmogrify"]) == 2

    @pytest.mark.parametrize(
        "args",
        [
            ["closed-form", "--q", "0.9", "--dp-grid", "0:1:9", "--do-grid", "0:1:5"],
            ["sweep", "--q", "0.75", "--dp-grid", "0:1:4", "--do-grid", "0:1:3", "--seed", "11"],
            ["pfr-sim", "--q", "0.9", "--dp", "0.2", "--do", "1.0", "--n", "3", "--trials", "200", "--seed", "5"],
        ],
        ids=["closed-form", "sweep", "pfr-sim"],
    )
    def test_byte_identical_reruns(self, tmp_path, args):
        out_a, out_b = tmp_path / "a.out", tmp_path / "b.out"
        assert run(args + ["--out", str(out_a)]) == 0
        assert run(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
