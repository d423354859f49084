"""Unit tests for plot emission, live rendering, and the command line."""

import numpy as np
import pytest

from sqpkit import (
    IndexOutOfRange,
    LiveRenderer,
    SaveConfig,
    SolverOptions,
    UnknownSeries,
    VizConfig,
    live_update,
    load_history,
    optimize,
    render_series,
)
from sqpkit.cli import cli_main
from sqpkit.plotting import build_figure, extract_series
from conftest import example2d_spec


@pytest.fixture
def example_run(tmp_path):
    cfg = SaveConfig(path=str(tmp_path / "run.slsqp.jsonl"), save_itr="major")
    res = optimize(example2d_spec(), SolverOptions(summary_path="", save=cfg))
    return cfg.path, res, load_history(cfg.path)


class TestRenderSeries:
    def test_two_panel_render(self, tmp_path, example_run):
        path, res, history = example_run
        out = tmp_path / "plots.png"
        viz = VizConfig(vars=("objective", "x[0]"), out_path=str(out))
        render_series(history, viz)
        assert out.exists() and out.stat().st_size > 0
        fig = build_figure(history.major_records, viz.vars)
        assert len(fig.axes) == 2

    def test_series_length_equals_record_count(self, example_run):
        _, res, history = example_run
        series = extract_series(history.major_records, ("feasibility",))
        iters, values = series["feasibility"]
        assert len(values) == res.num_majiter
        assert np.isfinite(values).all()

    def test_index_out_of_range(self, example_run):
        _, _, history = example_run
        with pytest.raises(IndexOutOfRange):
            render_series(history, VizConfig(vars=("x[5]",), out_path="x.png"))

    def test_unknown_series(self, example_run):
        _, _, history = example_run
        with pytest.raises(UnknownSeries):
            render_series(history, VizConfig(vars=("entropy",), out_path="x.png"))

    def test_unsaved_series_rejected(self, tmp_path):
        cfg = SaveConfig(path=str(tmp_path / "thin.jsonl"), save_vars=("majiter", "objective"))
        optimize(example2d_spec(), SolverOptions(summary_path="", save=cfg))
        history = load_history(cfg.path)
        with pytest.raises(UnknownSeries):
            render_series(history, VizConfig(vars=("feasibility",), out_path=str(tmp_path / "o.png")))

    def test_render_is_deterministic(self, tmp_path, example_run):
        _, _, history = example_run
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render_series(history, VizConfig(vars=("objective", "optimality"), out_path=str(a)))
        render_series(history, VizConfig(vars=("objective", "optimality"), out_path=str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_value_leaves_gap(self):
        records = [
            {"majiter": 0, "objective": 1.0},
            {"majiter": 1},  # objective absent for this iterate
            {"majiter": 2, "objective": 0.25},
        ]
        series = extract_series(records, ("objective",))
        _, values = series["objective"]
        assert np.isnan(values[1]) and values[0] == 1.0 and values[2] == 0.25


class TestLiveRenderer:
    def _records(self, k):
        return [{"majiter": i, "objective": float(10 - i), "x": [float(i), 0.0]} for i in range(k)]

    def test_every_major_rerenders_and_final_image_is_complete(self, tmp_path):
        out = tmp_path / "live.png"
        renderer = LiveRenderer(VizConfig(vars=("objective", "x[0]"), out_path=str(out)), n=2, m=2)
        for rec in self._records(5):
            live_update(renderer, rec)
        renderer.close()
        assert renderer.render_count >= 1
        assert out.exists() and out.stat().st_size > 0
        fig = build_figure(self._records(5), ("objective", "x[0]"))
        line = fig.axes[0].lines[0]
        assert len(line.get_xdata()) == 5

    def test_final_refresh_renders_once(self, tmp_path):
        out = tmp_path / "final.png"
        renderer = LiveRenderer(VizConfig(vars=("objective",), out_path=str(out), refresh="final"), n=2, m=2)
        for rec in self._records(4):
            live_update(renderer, rec)
        assert renderer.render_count == 0
        renderer.close()
        assert renderer.render_count == 1
        assert out.exists()

    def test_selector_validated_upfront(self, tmp_path):
        with pytest.raises(IndexOutOfRange):
            LiveRenderer(VizConfig(vars=("x[7]",), out_path=str(tmp_path / "x.png")), n=2, m=2)

    def test_slow_renders_coalesce_without_blocking(self, tmp_path, monkeypatch):
        import time

        import sqpkit.plotting as plotting

        slow_build = plotting.build_figure

        def sluggish(records, selectors):
            time.sleep(0.05)
            return slow_build(records, selectors)

        monkeypatch.setattr(plotting, "build_figure", sluggish)
        out = tmp_path / "slow.png"
        renderer = LiveRenderer(VizConfig(vars=("objective",), out_path=str(out)), n=2, m=0)
        start = time.perf_counter()
        for rec in self._records(12):
            live_update(renderer, rec)  # returns immediately
        handoff = time.perf_counter() - start
        renderer.close()
        assert handoff < 0.05  # hand-off never waited on a render
        assert renderer.render_count < 12  # bursts coalesced
        final = build_figure(self._records(12), ("objective",))
        assert len(final.axes[0].lines[0].get_xdata()) == 12
        assert out.exists()

    def test_live_render_during_solve(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        out = tmp_path / "progress.png"
        viz = VizConfig(vars=("objective", "feasibility"), out_path=str(out))
        res = optimize(example2d_spec(), SolverOptions(summary_path="", visualize=viz))
        assert out.exists() and out.stat().st_size > 0


class TestCli:
    def test_solve_example_converges(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        code = cli_main(["solve", "--problem", "example2d"])
        out = capsys.readouterr().out
        assert code == 0
        assert "Converged" in out
        assert "0.5" in out

    def test_solve_exit_code_on_maxiter(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert cli_main(["solve", "--problem", "example2d", "--maxiter", "1"]) == 2

    def test_solve_with_scalers_and_files(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        code = cli_main([
            "solve", "--problem", "example2d",
            "--fd-abs", "1e-6",
            "--x-scaler", "10", "--obj-scaler", "2", "--con-scaler", "1,0.5",
            "--save-file", "run.slsqp.jsonl", "--save-itr", "major",
            "--save-vars", "majiter,x,objective",
            "--summary-file", "summary.out",
        ])
        assert code == 0
        assert (tmp_path / "run.slsqp.jsonl").exists()
        assert (tmp_path / "summary.out").exists()
        history = load_history(str(tmp_path / "run.slsqp.jsonl"))
        assert history.header["save_vars"] == ["majiter", "x", "objective"]

    def test_plot_subcommand(self, tmp_path, monkeypatch, example_run):
        monkeypatch.chdir(tmp_path)
        path, _, _ = example_run
        code = cli_main(["plot", "--file", path, "--vars", "objective", "--out", "o.png"])
        assert code == 0
        assert (tmp_path / "o.png").exists()

    def test_inspect_row_count(self, capsys, example_run):
        path, res, history = example_run
        assert cli_main(["inspect", "--file", path]) == 0
        out = capsys.readouterr().out
        table_rows = [ln for ln in out.splitlines() if ln.strip() and ln.lstrip()[0].isdigit()]
        assert len(table_rows) == len(history.major_records)

    def test_list_problems(self, capsys):
        assert cli_main(["list-problems"]) == 0
        out = capsys.readouterr().out
        for name in ("example2d", "rosenbrock2d-con", "dblint-20"):
            assert name in out

    def test_unknown_problem_is_usage_error(self, capsys):
        assert cli_main(["solve", "--problem", "nope"]) == 1
        assert "error" in capsys.readouterr().err

    def test_bad_flag_is_usage_error(self, capsys):
        assert cli_main(["solve", "--no-such-flag"]) == 1

    def test_missing_file_is_io_error(self, capsys, tmp_path):
        assert cli_main(["inspect", "--file", str(tmp_path / "absent.jsonl")]) == 1

    def test_visualize_flag_defaults(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = cli_main(["solve", "--problem", "example2d", "--visualize", "--viz-out", "viz.png"])
        assert code == 0
        assert (tmp_path / "viz.png").exists()

    def test_warm_start_through_cli(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert cli_main(["solve", "--problem", "example2d", "--save-file", "r.jsonl"]) == 0
        assert cli_main(["solve", "--problem", "example2d", "--warm-start", "r.jsonl"]) == 0
