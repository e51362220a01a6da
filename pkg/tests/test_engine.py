import numpy as np
import pytest

from memsgd.compress import CompressorSpec
from memsgd.config.run_config import ProblemSpec, RunConfig, Variant
from memsgd.config.settings import settings
from memsgd.core import Schedule, ScheduleFamily, SparseMask, WorkerState
from memsgd.diagnose import TransformRecord, trajectories_identical
from memsgd.diagnose.reference import TRAJECTORY_COLUMNS
from memsgd.engine import Engine, eta_at, run, worker_step
from memsgd.exceptions import ConfigurationError, InvariantViolationError, NonFiniteError
from memsgd.core.state import CSV_COLUMNS
from memsgd.observability import InMemoryMetricsCollector
from memsgd.testing import identity_quadratic, make_run_config


def _state(momentum, memory=None):
    momentum = np.array(momentum, dtype=np.float64)
    memory = np.zeros_like(momentum) if memory is None else np.array(memory, dtype=np.float64)
    return WorkerState(momentum, memory, 0)


class TestWorkerStep:
    def test_sends_are_scaled_by_worker_count(self):
        dense = SparseMask.dense(1)
        sends = [
            worker_step(_state([0.0]), np.array([g]), dense, Variant.MDSGD, 0.0, 0.1, 0.1, 2).send
            for g in (2.0, 4.0)
        ]
        assert [s.tolist() for s in sends] == [[1.0], [2.0]]
        assert (sends[0] + sends[1]).tolist() == [3.0]

    def test_momentum_recursion(self):
        out = worker_step(_state([2.0]), np.array([2.0]), SparseMask.dense(1), Variant.MDSGD, 0.5, 0.1, 0.1, 2)
        assert out.send.tolist() == [2.0]
        assert out.state.memory.tolist() == [0.0]
        assert out.state.momentum.tolist() == [2.0]

    def test_unsent_part_goes_to_memory(self):
        out = worker_step(
            _state([0.0, 0.0], [0.5, 0.0]), np.array([1.0, -3.0]), SparseMask(np.array([1]), 2),
            Variant.MDSGD, 0.0, 0.1, 0.1, 1,
        )
        assert out.send.tolist() == [0.0, -3.0]
        assert out.state.memory.tolist() == [1.5, 0.0]
        assert out.nnz == 1

    def test_factor_masking_clears_sent_momentum(self):
        out = worker_step(
            _state([1.0, 1.0]), np.array([1.0, 2.0]), SparseMask.dense(2), Variant.FACTOR_MASKING, 0.9, 0.1, 0.1, 1
        )
        assert not out.state.momentum.any()
        partial = worker_step(
            _state([1.0, 1.0]), np.array([1.0, 2.0]), SparseMask(np.array([0]), 2),
            Variant.FACTOR_MASKING, 0.5, 0.1, 0.1, 1,
        )
        assert partial.state.momentum.tolist() == [0.0, 2.5]

    def test_dense_dsgd_keeps_memory_zero(self):
        out = worker_step(
            _state([1.0, 1.0]), np.array([1.0, 2.0]), SparseMask(np.array([0]), 2), Variant.DENSE_DSGD, 0.5, 0.1, 0.1, 1
        )
        assert out.send.tolist() == [1.5, 2.5]
        assert not out.state.memory.any()

    def test_memory_scaled_rescales_residual(self):
        out = worker_step(
            _state([0.0, 0.0]), np.array([2.0, 4.0]), SparseMask(np.array([0]), 2),
            Variant.MEMORY_SCALED, 0.0, 0.2, 0.1, 1,
        )
        assert out.send.tolist() == [2.0, 0.0]
        assert out.state.memory.tolist() == [0.0, 8.0]

    def test_memory_scaled_needs_zero_beta(self):
        with pytest.raises(ConfigurationError):
            worker_step(_state([0.0]), np.array([1.0]), SparseMask.dense(1), Variant.MEMORY_SCALED, 0.5, 0.1, 0.1, 1)


class TestRun:
    def test_zero_iterations(self):
        config = make_run_config(T=0, family=ScheduleFamily.POWER)
        result = run(config)
        assert [row.t for row in result.rows] == [0]
        assert np.array_equal(result.final_w, result.oracle.initial_point())

    def test_diagnostic_cadence(self):
        result = run(make_run_config(T=100, n_diag=10))
        assert [row.t for row in result.rows] == list(range(0, 101, 10))
        result = run(make_run_config(T=25, n_diag=10))
        assert [row.t for row in result.rows] == [0, 10, 20, 25]

    def test_full_batch_step_is_gradient_descent(self):
        oracle = identity_quadratic(np.random.default_rng(0).standard_normal((10, 2)))
        config = RunConfig(
            problem=ProblemSpec(name="quadratic", d=2, n=10),
            schedule=Schedule(ScheduleFamily.STAGE_CONSTANT, beta=0.0, eta0=0.1),
            p=1,
            b=10,
            variant=Variant.DENSE_DSGD,
            T=1,
        )
        engine = Engine(config, oracle=oracle)
        w0 = engine.state.w.copy()
        engine.step()
        assert np.allclose(engine.state.w, w0 - 0.1 * oracle.full_gradient(w0), rtol=1e-14, atol=1e-15)

    def test_step_record_carries_the_transform(self):
        config = make_run_config(T=3, family=ScheduleFamily.CONSTANT, beta=0.5, eta0=0.1)
        engine = Engine(config)
        record = engine.step()
        assert isinstance(record.transform, TransformRecord)
        assert record.t == 0
        assert record.transform.gamma_t == pytest.approx(eta_at(config.schedule, 0) / (1.0 - 0.5), rel=1e-14)
        assert record.transform.alpha_t == 0.0
        assert record.transform_ratio <= settings.RESIDUAL_TOL
        assert np.array_equal(record.u_tilde_next, engine.state.u_tilde)

    def test_full_batch_contraction(self):
        oracle = identity_quadratic(np.random.default_rng(1).standard_normal((10, 2)))
        config = RunConfig(
            problem=ProblemSpec(name="quadratic", d=2, n=10),
            schedule=Schedule(ScheduleFamily.STAGE_CONSTANT, beta=0.0, eta0=0.1),
            p=1,
            b=10,
            variant=Variant.DENSE_DSGD,
            T=200,
        )
        result = run(config, oracle=oracle)
        start = np.linalg.norm(oracle.initial_point() - oracle.w_star)
        assert np.linalg.norm(result.final_w - oracle.w_star) <= 0.9 ** 200 * start + 1e-12

    @pytest.mark.parametrize("problem", ["quadratic", "logistic", "phaseret"])
    @pytest.mark.parametrize("beta", [0.0, 0.9])
    def test_dense_mask_matches_dense_dsgd(self, problem, beta):
        mdsgd = make_run_config(problem=problem, T=200, beta=beta, compressor=CompressorSpec.dense())
        dense = mdsgd.with_overrides(variant=Variant.DENSE_DSGD)
        first, second = run(mdsgd), run(dense)
        assert trajectories_identical(first.rows, second.rows)
        assert np.array_equal(first.final_w, second.final_w)

    def test_top_d_matches_dense(self):
        top = make_run_config(T=100, compressor=CompressorSpec.top_k(10))
        dense = top.with_overrides(variant=Variant.DENSE_DSGD)
        assert trajectories_identical(run(top).rows, run(dense).rows)

    @pytest.mark.parametrize("compressor", [CompressorSpec.top_k(3), CompressorSpec.random_k(3)])
    def test_memory_scaled_constant_step_matches_mdsgd(self, compressor):
        base = make_run_config(T=150, beta=0.0, compressor=compressor)
        first = run(base)
        second = run(base.with_overrides(variant=Variant.MEMORY_SCALED))
        assert trajectories_identical(first.rows, second.rows, columns=CSV_COLUMNS)
        assert np.array_equal(first.final_w, second.final_w)

    @pytest.mark.parametrize("compressor", [CompressorSpec.top_k(2), CompressorSpec.random_k(2)])
    def test_thread_count_does_not_change_results(self, compressor):
        config = make_run_config(T=120, p=4, compressor=compressor)
        first = run(config)
        second = run(config.with_overrides(threads=4))
        assert trajectories_identical(first.rows, second.rows, columns=CSV_COLUMNS)
        assert np.array_equal(first.final_w, second.final_w)

    @pytest.mark.parametrize(
        "family",
        [ScheduleFamily.CONSTANT, ScheduleFamily.POWER, ScheduleFamily.STRONG_CONVEX, ScheduleFamily.CONVEX_SQRT],
    )
    @pytest.mark.parametrize("beta", [0.0, 0.5, 0.9])
    @pytest.mark.parametrize("compressor", [CompressorSpec.dense(), CompressorSpec.top_k(2), CompressorSpec.random_k(2)])
    def test_identities_hold(self, family, beta, compressor):
        config = make_run_config(T=200, family=family, beta=beta, compressor=compressor, check_invariants=True)
        stats = run(config).stats
        assert stats.transform_violations == 0
        assert stats.eq5_violations == 0
        assert stats.max_transform_ratio <= settings.RESIDUAL_TOL
        assert stats.max_eq5_ratio <= settings.IDENTITY_TOL

    def test_memory_scaled_decaying_step_identities(self):
        config = make_run_config(
            T=200, family=ScheduleFamily.POWER, beta=0.0, variant=Variant.MEMORY_SCALED, check_invariants=True
        )
        stats = run(config).stats
        assert stats.transform_violations == 0
        assert stats.eq5_violations == 0

    def test_memory_scaled_reports_stored_memory(self):
        config = make_run_config(T=50, n_diag=50, family=ScheduleFamily.POWER, beta=0.0, variant=Variant.MEMORY_SCALED)
        result = run(config)
        stored = sum(worker.memory for worker in result.state.workers)
        assert result.rows[-1].mem_norm == pytest.approx(np.linalg.norm(stored), rel=1e-12)
        assert eta_at(config.schedule, 50) < eta_at(config.schedule, 49)

    def test_factor_masking_runs_with_checks_enabled(self):
        config = make_run_config(T=100, variant=Variant.FACTOR_MASKING, check_invariants=True)
        result = run(config)
        assert len(result.rows) == 11

    def test_invariant_violation_raises(self, monkeypatch):
        monkeypatch.setattr(settings, "RESIDUAL_TOL", -1.0)
        with pytest.raises(InvariantViolationError):
            run(make_run_config(T=5, check_invariants=True))

    def test_invariant_violation_is_counted_without_checks(self, monkeypatch):
        monkeypatch.setattr(settings, "RESIDUAL_TOL", -1.0)
        stats = run(make_run_config(T=5)).stats
        assert stats.transform_violations == 5

    def test_violations_reach_the_collector(self, monkeypatch):
        monkeypatch.setattr(settings, "RESIDUAL_TOL", -1.0)
        collector = InMemoryMetricsCollector()
        run(make_run_config(T=5), metrics_collector=collector)
        assert collector.counters() == {"transform_violations": 5}

    def test_collector_records_run_errors(self):
        collector = InMemoryMetricsCollector()
        config = make_run_config(
            T=500, family=ScheduleFamily.STAGE_CONSTANT, eta0=1e3, beta=0.0, variant=Variant.DENSE_DSGD
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(NonFiniteError):
                run(config, metrics_collector=collector)
        errors = collector.errors("engine.run")
        assert len(errors) == 1
        assert isinstance(errors[0], NonFiniteError)

    def test_divergence_reports_non_finite(self):
        config = make_run_config(
            T=500, family=ScheduleFamily.STAGE_CONSTANT, eta0=1e3, beta=0.0, variant=Variant.DENSE_DSGD
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(NonFiniteError):
                run(config)

    def test_memory_aggregate_matches_workers(self):
        result = run(make_run_config(T=50))
        state = result.state
        assert np.allclose(state.u_tilde, state.recompute_u_tilde(), rtol=1e-12, atol=1e-15)

    def test_dense_dsgd_never_builds_memory(self):
        result = run(make_run_config(T=50, variant=Variant.DENSE_DSGD))
        assert all(not worker.memory.any() for worker in result.state.workers)
        assert result.stats.max_mem_norm == 0.0

    def test_momentum_norm_bound(self):
        result = run(make_run_config(T=200, beta=0.9))
        assert result.stats.max_momentum_norm <= result.gradient_bound / (1.0 - 0.9) * (1 + 1e-12)

    def test_collector_counts_sent_coordinates(self):
        collector = InMemoryMetricsCollector()
        config = make_run_config(T=30, p=3, compressor=CompressorSpec.top_k(2))
        result = run(config, metrics_collector=collector)
        summary = collector.get_metrics_summary()
        assert collector.total_sent() == 30 * 3 * 2
        assert result.stats.total_sent == 30 * 3 * 2
        assert summary["latencies"]["engine.step"]["count"] == 30
        assert sum(row.sent_nnz for row in result.rows) == 30 * 3 * 2

    def test_iterate_average_and_tail_suboptimality(self):
        result = run(make_run_config(T=10, n_diag=1), track_tail=True)
        assert result.iterate_average.shape == (10,)
        assert result.tail_suboptimality is not None
        assert result.tail_suboptimality > 0.0

    def test_tail_is_skipped_by_default(self):
        assert run(make_run_config(T=10, n_diag=1)).tail_suboptimality is None

    def test_trajectory_columns_exclude_send_counts(self):
        assert "sent_nnz" not in TRAJECTORY_COLUMNS
