import numpy as np
import pytest

from conftest import DATA_DIR
from mixselect.bench import amdahl_speedup
from mixselect.cli import build_parser, main, parse_g_range
from mixselect.gmm import FitOptions
from mixselect.selection import SearchOptions


class TestParseG:
    def test_colon_range(self):
        assert parse_g_range("1:5") == (1, 2, 3, 4, 5)

    def test_comma_list(self):
        assert parse_g_range("2,3,7") == (2, 3, 7)


class TestDefaultsTable:
    def test_cli_defaults_equal_library_defaults(self):
        parser = build_parser()
        args = parser.parse_args(["select", "whatever.csv"])
        lib = SearchOptions()
        fit = FitOptions()
        assert parse_g_range(args.g) == lib.g_range
        assert tuple(args.em_models1.split(",")) == lib.em_models_1
        assert tuple(args.em_models2.split(",")) == lib.em_models_2
        assert args.search == lib.search
        assert args.direction == lib.direction
        assert args.bic_diff == lib.bic_diff_threshold
        assert args.bic_upper == lib.bic_upper
        assert args.bic_lower == lib.bic_lower
        assert args.itermax == lib.itermax
        assert args.forcetwo == lib.forcetwo
        assert args.regression_mode == lib.regression_mode
        assert args.parallel is None and lib.parallel is None
        assert args.samp == fit.samp
        assert args.hc_model == fit.hc_model
        assert args.allow_eee == fit.allow_eee
        assert args.tol == fit.tol
        assert args.max_iter == fit.max_iter

    def test_documented_front_end_defaults(self):
        # The documented defaults: G=1:9, greedy forward search, thresholds
        # 0 / 0 / -10, itermax 100, sampling off, forcetwo on.
        lib = SearchOptions()
        assert lib.g_range == tuple(range(1, 10))
        assert lib.search == "greedy" and lib.direction == "forward"
        assert lib.bic_diff_threshold == 0.0
        assert lib.bic_upper == 0.0
        assert lib.bic_lower == -10.0
        assert lib.itermax == 100
        assert lib.forcetwo is True
        assert FitOptions().samp is False
        assert FitOptions().hc_model == "VVV"
        assert FitOptions().allow_eee is True
        assert lib.em_models_1 == ("E", "V")
        assert len(lib.em_models_2) == 10


class TestGenCommand:
    def test_deterministic_outputs(self, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        argv = ["gen", "--scenario", "maugis1", "--n", "50", "--seed", "7"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_text() == out2.read_text()
        assert (tmp_path / "a.csv.labels.csv").read_text() \
            == (tmp_path / "b.csv.labels.csv").read_text()

    def test_truth_file_lists_names(self, tmp_path):
        out = tmp_path / "wt.csv"
        assert main(["gen", "--scenario", "wt", "--n", "5", "--seed", "1",
                     "--out", str(out)]) == 0
        truth = (tmp_path / "wt.csv.truth.txt").read_text().split()
        assert truth == ["X1", "X2", "X3", "X4", "X5"]


class TestMetricsCommand:
    def test_identical_labels(self, tmp_path, capsys):
        labs = tmp_path / "labs.csv"
        labs.write_text("label\n1\n1\n2\n2\n")
        assert main(["metrics", "--a", str(labs), "--b", str(labs)]) == 0
        out = capsys.readouterr().out
        assert "ARI = 1.000000" in out
        assert "CER = 0.000000" in out

    def test_vser_output(self, tmp_path, capsys):
        labs = tmp_path / "labs.csv"
        labs.write_text("label\n1\n2\n")
        assert main(["metrics", "--a", str(labs), "--b", str(labs),
                     "--selected", "0,1,2", "--truth-set", "0,1",
                     "--d", "10"]) == 0
        assert "VSER = 0.100000" in capsys.readouterr().out


class TestBenchCommand:
    def test_amdahl_fit_from_csv(self, tmp_path, capsys):
        path = tmp_path / "speed.csv"
        rows = ["P,t"] + [f"{p},{100.0 / amdahl_speedup(0.13, p):.6f}"
                          for p in range(1, 11)]
        path.write_text("\n".join(rows) + "\n")
        assert main(["bench", "--amdahl", str(path)]) == 0
        out = capsys.readouterr().out
        assert "f = 0.13" in out
        smax = float(out.split("s_max =")[1].split()[0])
        assert smax == pytest.approx(7.7, abs=0.1)

    def test_bench_requires_input(self, capsys):
        assert main(["bench"]) == 1


class TestFitCommand:
    def test_fit_summary_and_truth(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(0, 1, (40, 2)), rng.normal(8, 1, (40, 2))])
        data_path = tmp_path / "blobs.csv"
        with open(data_path, "w") as fh:
            fh.write("u,v\n")
            for row in X:
                fh.write(f"{row[0]},{row[1]}\n")
        truth_path = tmp_path / "truth.csv"
        truth_path.write_text("\n".join(["a"] * 40 + ["b"] * 40) + "\n")
        assert main(["fit", str(data_path), "--g", "1:3",
                     "--truth", str(truth_path)]) == 0
        out = capsys.readouterr().out
        assert "2 components" in out
        assert "ARI = 1.000000" in out

    def test_truth_file_with_header_row(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(0, 1, (30, 2)), rng.normal(9, 1, (30, 2))])
        data_path = tmp_path / "blobs.csv"
        with open(data_path, "w") as fh:
            fh.write("u,v\n")
            for row in X:
                fh.write(f"{row[0]},{row[1]}\n")
        truth_path = tmp_path / "truth.csv"
        truth_path.write_text("label\n" + "\n".join(["1"] * 30 + ["2"] * 30) + "\n")
        assert main(["fit", str(data_path), "--g", "1:3",
                     "--truth", str(truth_path)]) == 0
        assert "ARI = 1.000000" in capsys.readouterr().out

    def test_unknown_subset_column(self, tmp_path, capsys):
        data_path = tmp_path / "d.csv"
        data_path.write_text("a,b\n1,2\n2,3\n3,4\n")
        assert main(["fit", str(data_path), "--subset", "a,zzz"]) == 1


class TestCrabsFixtureCli:
    DATA = str(DATA_DIR / "crabs.csv")

    def test_fit_reports_four_component_eev(self, capsys):
        assert main(["fit", self.DATA, "--g", "1:5"]) == 0
        out = capsys.readouterr().out
        assert "EEV" in out
        assert "4 components" in out
        assert "df = 68" in out

    def test_select_ends_with_subset_line(self, capsys):
        assert main(["select", self.DATA, "--g", "1:5"]) == 0
        last = [l for l in capsys.readouterr().out.strip().splitlines()
                if l][-1]
        assert last.startswith("Selected subset: ")
        names = {s.strip() for s in last.split(":", 1)[1].split(",")}
        assert names == {"CW", "RW", "FL", "BD"}


class TestSelectCommand:
    def test_headlong_backward_usage_error(self, tmp_path, capsys):
        data_path = tmp_path / "d.csv"
        data_path.write_text("a,b\n1,2\n2,3\n3,4\n")
        code = main(["select", str(data_path), "--search", "headlong",
                     "--direction", "backward"])
        assert code == 1

    def test_missing_file_is_validation_error(self):
        assert main(["select", "no-such-file.csv"]) in (1, 2)

    def test_select_prints_subset_line(self, tmp_path, capsys):
        from mixselect.datagen import gen_twovar
        from mixselect.dataio import write_csv

        data, labels, truth = gen_twovar("five", 200, seed=3)
        path = tmp_path / "tv.csv"
        write_csv(data, path)
        out_path = tmp_path / "trace.jsonl"
        assert main(["select", str(path), "--g", "1:3",
                     "--out", str(out_path)]) == 0
        out = capsys.readouterr().out
        last = [l for l in out.strip().splitlines() if l][-1]
        assert last.startswith("Selected subset: ")
        assert out_path.exists()

    def test_parallel_flag_matches_sequential(self, tmp_path, capsys):
        from mixselect.datagen import gen_twovar
        from mixselect.dataio import write_csv

        data, labels, truth = gen_twovar("five", 150, seed=6)
        path = tmp_path / "tv.csv"
        write_csv(data, path)
        assert main(["select", str(path), "--g", "1:3", "--parallel", "1"]) == 0
        seq = capsys.readouterr().out
        assert main(["select", str(path), "--g", "1:3", "--parallel", "2"]) == 0
        par = capsys.readouterr().out
        assert seq == par
