import json

import numpy as np
import pytest

from memsgd.cli import (
    RateQuantity,
    cmd_compare,
    cmd_ratefit,
    cmd_run,
    cmd_stagewise,
    load_config,
    parse_config,
    read_metrics_csv,
    write_metrics_csv,
)
from memsgd.cli.csv_io import write_json
from memsgd.cli.main import EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERICAL, EXIT_OK, main
from memsgd.compress import CompressorKind
from memsgd.config.run_config import Variant
from memsgd.config.settings import settings
from memsgd.core import MetricsRow
from memsgd.exceptions import ConfigurationError, InputFileError
from memsgd.testing import make_config_text


def _small(tmp_path, **sections):
    merged = {"problem": {"d": 10, "n": 50}, "engine": {"T": 100}, "output": {"dir": str(tmp_path)}}
    for name, values in sections.items():
        merged.setdefault(name, {}).update(values)
    return make_config_text(merged)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestConfigParser:
    def test_defaults(self):
        config = parse_config(make_config_text())
        assert config.engine.p == 4
        assert config.engine.b == 8
        assert config.engine.variant == Variant.MDSGD
        assert config.schedule.beta == 0.9
        assert config.compressor.kind == CompressorKind.TOP_K
        assert config.effective_q() == 1
        assert config.diagnostics.n_diag == 10
        assert config.to_run_config().compressor.q == 1

    def test_comments_and_case_sensitive_keys(self):
        text = "# experiment\n[problem]\nname = quadratic  # inline\nd = 6\nmu = 0.5\nL = 4\n\n[engine]\nT = 10\n"
        config = parse_config(text)
        assert config.problem.L == 4.0
        assert config.problem.mu == 0.5
        assert config.engine.T == 10

    def test_beta_out_of_range(self):
        with pytest.raises(ConfigurationError, match=r"beta must be in \[0,1\)"):
            parse_config(make_config_text({"schedule": {"beta": 1.0}}))

    @pytest.mark.parametrize("q", [0, 21])
    def test_q_out_of_range(self, q):
        with pytest.raises(ConfigurationError, match="q"):
            parse_config(make_config_text({"compressor": {"q": q}}))

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match=r"unknown key \[engine\] bogus"):
            parse_config(make_config_text({"engine": {"bogus": 1}}))

    def test_unknown_section(self):
        with pytest.raises(ConfigurationError, match=r"unknown section \[extra\]"):
            parse_config(make_config_text({"extra": {"x": 1}}))

    def test_missing_required_key(self):
        with pytest.raises(ConfigurationError, match=r"missing required key \[problem\] d"):
            parse_config("[problem]\nname = quadratic\n[engine]\nT = 10\n")

    def test_key_outside_section(self):
        with pytest.raises(ConfigurationError, match="outside any"):
            parse_config("T = 10\n[problem]\nname = quadratic\nd = 3\n")

    def test_memory_scaled_needs_zero_beta(self):
        with pytest.raises(ConfigurationError, match="memory_scaled"):
            parse_config(make_config_text({"engine": {"variant": "memory_scaled"}}))
        config = parse_config(make_config_text({"engine": {"variant": "memory_scaled"}, "schedule": {"beta": 0.0}}))
        assert config.to_run_config().variant == Variant.MEMORY_SCALED

    def test_power_needs_alpha(self):
        with pytest.raises(ConfigurationError, match="alpha"):
            parse_config(make_config_text({"schedule": {"family": "power"}}))

    def test_engine_overrides(self):
        config = parse_config(make_config_text()).with_engine_overrides(run_seed=7, threads=None)
        assert config.engine.run_seed == 7

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            load_config(tmp_path / "absent.ini")


class TestRunCommand:
    def test_outputs(self, tmp_path):
        config = parse_config(_small(tmp_path))
        paths = cmd_run(config)
        rows = read_metrics_csv(paths["metrics"])
        assert len(rows) == 11
        assert [r.t for r in rows] == list(range(0, 101, 10))
        assert paths["final_w"].read_text().splitlines()[0] == "index,value"
        summary = json.loads(paths["summary"].read_text())
        assert summary["d"] == 10
        assert summary["q"] == 1
        assert summary["mem_bound_ok"] is True
        assert summary["total_sent"] == sum(r.sent_nnz for r in rows)
        assert summary["counters"] == {}
        assert summary["tail_suboptimality"] > 0.0

    def test_threads_do_not_change_outputs(self, tmp_path):
        config = parse_config(_small(tmp_path))
        single = cmd_run(config.with_engine_overrides(threads=1), tmp_path / "one")
        pooled = cmd_run(config.with_engine_overrides(threads=4), tmp_path / "four")
        for role in ("metrics", "final_w", "summary"):
            assert single[role].read_bytes() == pooled[role].read_bytes()

    def test_seed_changes_outputs(self, tmp_path):
        config = parse_config(_small(tmp_path))
        first = cmd_run(config, tmp_path / "a")
        second = cmd_run(config.with_engine_overrides(run_seed=1), tmp_path / "b")
        assert first["metrics"].read_bytes() != second["metrics"].read_bytes()


class TestStagewiseCommand:
    def test_outputs(self, tmp_path):
        text = _small(tmp_path, stagewise={"S": 2, "eta0": 0.1})
        paths = cmd_stagewise(parse_config(text))
        lines = paths["stages"].read_text().splitlines()
        assert len(lines) == 3
        summary = json.loads(paths["summary"].read_text())
        assert summary["S"] == 2
        assert summary["gamma"] == 1.0


class TestCompareCommand:
    def test_identical_runs(self, tmp_path):
        config = parse_config(_small(tmp_path))
        result = cmd_compare([("a", config), ("b", config)], tmp_path, threads=2)
        assert result.identical
        lines = result.path.read_text().splitlines()
        assert lines[0].startswith("config,variant,compressor,q,final_F")
        assert lines[1].endswith(",true")

    def test_dense_versus_top_k(self, tmp_path):
        top_k = parse_config(_small(tmp_path))
        dense = parse_config(_small(tmp_path, compressor={"kind": "dense"}))
        result = cmd_compare([("top_k", top_k), ("dense", dense)], tmp_path)
        assert not result.identical
        assert result.records[1]["mem_bound"] == 0.0
        assert result.records[1]["max_mem_norm"] == 0.0
        assert result.records[0]["total_sent"] < result.records[1]["total_sent"]

    def test_dimension_mismatch(self, tmp_path):
        small = parse_config(_small(tmp_path))
        large = parse_config(_small(tmp_path, problem={"d": 12}))
        with pytest.raises(ConfigurationError, match="dimension"):
            cmd_compare([("small", small), ("large", large)], tmp_path)

    def test_needs_configs(self, tmp_path):
        with pytest.raises(ConfigurationError):
            cmd_compare([], tmp_path)


def _synthetic_metrics(path, T, f_star=1.0):
    rows = []
    for t in (0, T // 2, T):
        F = f_star + 5.0 if t == 0 else f_star + 2.0 / np.sqrt(T)
        grad_norm = 1.0 if t == 0 else T ** -0.25
        rows.append(MetricsRow(t, F, grad_norm, 0.0, 0.0, 0.0, 0.1, 0.0, 0.1, 4 * t))
    return write_metrics_csv(path, rows)


class TestRateFit:
    def _files(self, tmp_path):
        return [_synthetic_metrics(tmp_path / f"T{T}" / "metrics.csv", T) for T in (100, 400, 1600)]

    def test_suboptimality_slope(self, tmp_path):
        fit = cmd_ratefit(self._files(tmp_path), RateQuantity.SUBOPTIMALITY, f_star=1.0)
        assert fit.slope == pytest.approx(-0.5, abs=1e-9)
        assert [T for T, _ in fit.points] == [100, 400, 1600]

    def test_grad_norm_slope(self, tmp_path):
        fit = cmd_ratefit(self._files(tmp_path), RateQuantity.GRAD_NORM_SQ)
        assert fit.slope == pytest.approx(-0.5, abs=1e-9)

    def test_f_star_from_summary(self, tmp_path):
        paths = self._files(tmp_path)
        for path in paths:
            write_json(path.parent / "summary.json", {"F_star": 1.0})
        fit = cmd_ratefit(paths, RateQuantity.SUBOPTIMALITY, out_dir=tmp_path)
        assert fit.slope == pytest.approx(-0.5, abs=1e-9)
        saved = json.loads((tmp_path / "ratefit.json").read_text())
        assert saved["slope"] == pytest.approx(fit.slope)
        assert len(saved["points"]) == 3

    def test_f_star_unknown(self, tmp_path):
        with pytest.raises(InputFileError, match="F_star"):
            cmd_ratefit(self._files(tmp_path), RateQuantity.SUBOPTIMALITY)

    def test_needs_two_horizons(self, tmp_path):
        paths = [_synthetic_metrics(tmp_path / name / "metrics.csv", 100) for name in ("a", "b")]
        with pytest.raises(InputFileError, match="two different T"):
            cmd_ratefit(paths, RateQuantity.GRAD_NORM_SQ)

    def test_non_positive_suboptimality(self, tmp_path):
        with pytest.raises(InputFileError, match="positive"):
            cmd_ratefit(self._files(tmp_path), RateQuantity.SUBOPTIMALITY, f_star=10.0)

    def test_bad_header(self, tmp_path):
        path = _write(tmp_path, "metrics.csv", "a,b\n1,2\n")
        with pytest.raises(InputFileError, match="header"):
            read_metrics_csv(path)

    def test_unknown_quantity(self, tmp_path):
        with pytest.raises(ConfigurationError):
            cmd_ratefit(self._files(tmp_path), "loss")


class TestMetricsFile:
    def test_round_trip_is_exact(self, tmp_path):
        rows = [MetricsRow(0, 1.0 / 3.0, np.pi, 0.1, 0.2, 1e-17, 0.01, -0.09, 0.1, 0)]
        path = write_metrics_csv(tmp_path / "m.csv", rows)
        assert read_metrics_csv(path) == rows
        assert path.read_text().splitlines()[0] == "t,F,grad_norm,mem_norm,zw_dist,transform_residual,eta,rho,gamma,sent_nnz"


class TestMain:
    def test_run_exit_ok(self, tmp_path, capsys):
        path = _write(tmp_path, "run.ini", _small(tmp_path))
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
        assert (tmp_path / "out" / "metrics.csv").exists()
        assert "metrics.csv" in capsys.readouterr().out

    def test_compare_prints_identical(self, tmp_path, capsys):
        path = _write(tmp_path, "run.ini", _small(tmp_path))
        assert main(["compare", str(path), str(path), "--out", str(tmp_path)]) == EXIT_OK
        assert "identical=true" in capsys.readouterr().out

    def test_bad_config_exit(self, tmp_path):
        path = _write(tmp_path, "bad.ini", make_config_text({"schedule": {"beta": 1.0}}))
        assert main(["run", str(path)]) == EXIT_CONFIG

    def test_missing_file_exit(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.ini")]) == EXIT_CONFIG

    def test_bad_threads_exit(self, tmp_path):
        path = _write(tmp_path, "run.ini", _small(tmp_path))
        assert main(["run", str(path), "--threads", "0"]) == EXIT_CONFIG

    def test_divergence_exit(self, tmp_path):
        text = _small(
            tmp_path,
            engine={"T": 500, "variant": "dense_dsgd"},
            schedule={"family": "stage_constant", "eta0": 1000.0, "beta": 0.0},
        )
        path = _write(tmp_path, "diverge.ini", text)
        with np.errstate(over="ignore", invalid="ignore"):
            assert main(["run", str(path)]) == EXIT_NUMERICAL

    def test_invariant_exit(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "RESIDUAL_TOL", -1.0)
        path = _write(tmp_path, "check.ini", _small(tmp_path, diagnostics={"check_invariants": "true"}))
        assert main(["run", str(path)]) == EXIT_INVARIANT
