"""
Memory-based distributed SGD simulator.

p workers are simulated in one process. Each worker draws its batch and, for
random-K, its mask from a counter-based stream keyed on (run_seed, worker, t),
so results do not depend on how many threads evaluate the workers. The
reduction over workers and the iterate update run serially in worker order.
"""
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

import numpy as np
from joblib import Parallel, delayed

from ..compress.compressors import Compressor, make_compressor
from ..compress.spec import CompressorSpec
from ..config.logging_config import logger
from ..config.run_config import RunConfig, Variant
from ..config.settings import settings
from ..core.rng import worker_rng_stream
from ..core.state import MetricsRow, WorkerState
from ..core.vectors import ParamVector, as_param_vector, ensure_finite, inf_norm, norm, zeros
from ..diagnose.transform import TransformRecord, build_z, transform_record
from ..exceptions import InvariantViolationError, MemSGDException
from ..observability.metrics import MetricsCollector
from ..problems.oracle import ProblemOracle
from ..problems.registry import make_problem
from .schedules import eta_at, rho_prev, schedule_eval
from .worker import WorkerOutput, worker_step


@dataclass
class EngineState:
    """
    Simulator state at the start of iteration t.

    Attributes:
        t: Iteration index
        w: Current iterate w_t
        workers: One WorkerState per worker, in worker order
        g_tilde_prev: Aggregated momentum of the previous iteration
        u_tilde: Aggregated memory at t
    """
    t: int
    w: ParamVector
    workers: List[WorkerState]
    g_tilde_prev: ParamVector
    u_tilde: ParamVector

    def recompute_u_tilde(self) -> ParamVector:
        """Sum of the worker memories in worker order."""
        total = np.zeros_like(self.w)
        for worker in self.workers:
            total = total + worker.memory
        return total


@dataclass(frozen=True)
class StepRecord:
    """
    Bookkeeping for one iteration.

    Attributes:
        transform: Terms and residual of the transformation equation
        g_tilde: Aggregated momentum
        eq5_ratio: Scale-relative residual of the memory identity
        sent_nnz: Coordinates sent by all workers
    """
    transform: TransformRecord
    g_tilde: ParamVector
    eq5_ratio: float
    sent_nnz: int

    @property
    def t(self) -> int:
        return self.transform.t

    @property
    def d_t(self) -> ParamVector:
        return self.transform.d_t

    @property
    def u_tilde_next(self) -> ParamVector:
        return self.transform.e_t

    @property
    def transform_residual(self) -> float:
        return self.transform.residual

    @property
    def transform_ratio(self) -> float:
        return self.transform.relative_residual()


@dataclass
class RunStats:
    """
    Run-wide maxima and counters.

    Attributes:
        max_transform_residual: Largest raw transformation residual
        max_transform_ratio: Largest residual / (1 + ||z_t||_inf)
        max_eq5_ratio: Largest scale-relative residual of the memory identity
        transform_violations: Steps whose transformation residual exceeded tolerance
        eq5_violations: Steps whose memory identity exceeded tolerance
        max_mem_norm: Largest ||u_t||
        max_momentum_norm: Largest ||g_t||
        max_grad_norm: Largest ||d_t||
        max_zw_over_gamma_sq: Largest ||z_t - w_t||^2 / gamma_t^2
        max_z_dist_to_opt: Largest ||z_t - w_star|| (0 when w_star is unknown)
        total_sent: Coordinates sent by all workers
        min_grad_norm_sq: Smallest ||grad F(w_t)||^2 over diagnostic rows
    """
    max_transform_residual: float = 0.0
    max_transform_ratio: float = 0.0
    max_eq5_ratio: float = 0.0
    transform_violations: int = 0
    eq5_violations: int = 0
    max_mem_norm: float = 0.0
    max_momentum_norm: float = 0.0
    max_grad_norm: float = 0.0
    max_zw_over_gamma_sq: float = 0.0
    max_z_dist_to_opt: float = 0.0
    total_sent: int = 0
    min_grad_norm_sq: float = math.inf

    def to_dict(self) -> dict:
        return {
            "max_transform_residual": self.max_transform_residual,
            "max_transform_ratio": self.max_transform_ratio,
            "max_eq5_ratio": self.max_eq5_ratio,
            "transform_violations": self.transform_violations,
            "eq5_violations": self.eq5_violations,
            "max_mem_norm": self.max_mem_norm,
            "max_momentum_norm": self.max_momentum_norm,
            "max_grad_norm": self.max_grad_norm,
            "max_zw_over_gamma_sq": self.max_zw_over_gamma_sq,
            "max_z_dist_to_opt": self.max_z_dist_to_opt,
            "total_sent": self.total_sent,
            "min_grad_norm_sq": self.min_grad_norm_sq,
        }


@dataclass
class RunResult:
    """
    Output of ``Engine.run``.

    Attributes:
        config: Run configuration
        oracle: Problem the run used
        rows: Diagnostics rows, t = 0, N_diag, 2 N_diag, ..., T
        state: Final engine state
        iterate_average: Uniform average of w_0..w_{T-1} (w_0 when T = 0)
        stats: Run-wide maxima and counters
        tail_suboptimality: Mean of F(w_t) - F_star over the last ceil(T/2) iterates,
            when tracked and F_star is known
    """
    config: RunConfig
    oracle: ProblemOracle
    rows: List[MetricsRow]
    state: EngineState
    iterate_average: ParamVector
    stats: RunStats = field(default_factory=RunStats)
    tail_suboptimality: Optional[float] = None

    @property
    def final_w(self) -> ParamVector:
        return self.state.w

    @property
    def gradient_bound(self) -> float:
        """max(G_est, largest aggregated gradient norm seen during the run)."""
        return max(self.oracle.G_est, self.stats.max_grad_norm)

    @property
    def memory_bound(self) -> float:
        """U_est: largest ||u_t|| observed."""
        return self.stats.max_mem_norm


class Engine:
    """
    Drives one run of the simulator.

    Args:
        config: Run configuration
        oracle: Problem to optimize; built from ``config.problem`` when None
        metrics_collector: Optional collector for latency and send counts
    """

    def __init__(
        self,
        config: RunConfig,
        oracle: Optional[ProblemOracle] = None,
        metrics_collector: Optional[MetricsCollector] = None,
    ):
        self.config = config
        self.oracle = oracle if oracle is not None else make_problem(config.problem)
        self.metrics = metrics_collector
        self.schedule = config.schedule
        self.variant = config.variant
        d = self.oracle.d

        spec = CompressorSpec.dense() if self.variant == Variant.DENSE_DSGD else config.compressor
        self.compressor: Compressor = make_compressor(spec, d)

        if config.w0 is None:
            w0 = self.oracle.initial_point()
        else:
            w0 = as_param_vector(config.w0, d)
        self.state = EngineState(
            t=0,
            w=w0,
            workers=[WorkerState.zeros(d, k) for k in range(config.p)],
            g_tilde_prev=zeros(d),
            u_tilde=zeros(d),
        )
        self.stats = RunStats()
        self._z = self._z_at(self.state)
        self._iterate_sum = zeros(d)
        self._parallel: Optional[Parallel] = None

    # --- transformation sequence -------------------------------------------------

    @property
    def _memory_scaled(self) -> bool:
        return self.variant == Variant.MEMORY_SCALED

    @property
    def z(self) -> ParamVector:
        """Auxiliary point z_t for the current state."""
        return self._z

    def _z_at(self, state: EngineState) -> ParamVector:
        eta_t = eta_at(self.schedule, state.t)
        rho = 0.0 if self._memory_scaled else rho_prev(self.schedule, state.t)
        return build_z(state.w, state.g_tilde_prev, state.u_tilde, rho, eta_t)

    # --- workers -----------------------------------------------------------------

    def _draw_batch(self, stream: np.random.Generator) -> np.ndarray:
        n, b = self.oracle.n, self.config.b
        if b >= n:
            return np.arange(n, dtype=np.int64)
        return stream.integers(0, n, size=b, dtype=np.int64)

    def _worker_phase(self, k: int, w: ParamVector, t: int, eta_t: float, eta_next: float) -> WorkerOutput:
        config = self.config
        state = self.state.workers[k]
        stream = worker_rng_stream(config.run_seed, k, t)
        batch = self._draw_batch(stream)
        grad = self.oracle.stochastic_gradient(w, batch)
        ensure_finite(grad, "worker gradient", iteration=t, worker_id=k)

        if self.compressor.needs_vector:
            scaled = grad / config.p
            if self._memory_scaled:
                candidate = scaled + state.memory
            else:
                candidate = config.beta * state.momentum + scaled + state.memory
        else:
            candidate = None
        mask = self.compressor.mask(candidate, stream)

        output = worker_step(
            state, grad, mask, self.variant, config.beta, eta_t, eta_next, config.p
        )
        ensure_finite(output.send, "worker send", iteration=t, worker_id=k)
        ensure_finite(output.state.memory, "worker memory", iteration=t, worker_id=k)
        return output

    def _run_workers(self, t: int, eta_t: float, eta_next: float) -> List[WorkerOutput]:
        w = self.state.w
        p = self.config.p
        if self._parallel is not None:
            return self._parallel(
                delayed(self._worker_phase)(k, w, t, eta_t, eta_next) for k in range(p)
            )
        if self.config.threads > 1 and p > 1:
            with Parallel(n_jobs=min(self.config.threads, p), backend="threading") as parallel:
                return parallel(
                    delayed(self._worker_phase)(k, w, t, eta_t, eta_next) for k in range(p)
                )
        return [self._worker_phase(k, w, t, eta_t, eta_next) for k in range(p)]

    @contextmanager
    def _worker_pool(self) -> Iterator[None]:
        threads = min(self.config.threads, self.config.p)
        if threads <= 1:
            yield
            return
        with Parallel(n_jobs=threads, backend="threading") as parallel:
            self._parallel = parallel
            try:
                yield
            finally:
                self._parallel = None

    # --- iteration ---------------------------------------------------------------

    def step(self) -> StepRecord:
        """
        Run one iteration.

        Returns:
            StepRecord with the aggregated quantities and identity residuals

        Raises:
            NonFiniteError: If a gradient, send or iterate is not finite
            InvariantViolationError: If check_invariants is set and the
                transformation identity fails
        """
        started = time.perf_counter()
        state = self.state
        t = state.t
        d = self.oracle.d
        eta_t, rho_t, gamma_t = schedule_eval(self.schedule, t)
        eta_next = eta_at(self.schedule, t + 1)

        outputs = self._run_workers(t, eta_t, eta_next)

        aggregate = zeros(d)
        d_t = zeros(d)
        g_tilde = zeros(d)
        u_next = zeros(d)
        sent = 0
        for out in outputs:
            aggregate = aggregate + out.send
            d_t = d_t + out.scaled_grad
            g_tilde = g_tilde + out.momentum
            u_next = u_next + out.state.memory
            sent += out.nnz
            if self.metrics is not None:
                self.metrics.record_sent(out.state.worker_id, out.nnz)

        w_next = state.w - eta_t * aggregate
        ensure_finite(w_next, "iterate", iteration=t)

        zw_sq = float(np.sum((self._z - state.w) ** 2))
        self.stats.max_zw_over_gamma_sq = max(self.stats.max_zw_over_gamma_sq, zw_sq / gamma_t ** 2)
        if self.oracle.w_star is not None:
            self.stats.max_z_dist_to_opt = max(self.stats.max_z_dist_to_opt, norm(self._z - self.oracle.w_star))
        self._iterate_sum = self._iterate_sum + state.w

        new_state = EngineState(t + 1, w_next, [out.state for out in outputs], g_tilde, u_next)
        z_next = self._z_at(new_state)
        if self._memory_scaled:
            transform = transform_record(t, self._z, z_next, d_t, u_next, eta_t, eta_t, 0.0)
            eta_u = eta_next
        else:
            transform = transform_record(t, self._z, z_next, d_t, u_next, eta_t, eta_next, rho_t)
            eta_u = eta_t
        raw = transform.residual
        ratio = transform.relative_residual()

        carried = g_tilde + state.u_tilde
        gap = (w_next - eta_u * u_next) - (state.w - eta_t * carried)
        scale = 1.0 + inf_norm(state.w) + eta_t * inf_norm(carried) + eta_u * inf_norm(u_next)
        eq5_ratio = inf_norm(gap) / scale

        self._check_identities(t, ratio, eq5_ratio)
        self._update_stats(raw, ratio, eq5_ratio, d_t, g_tilde, u_next, sent)

        self.state = new_state
        self._z = z_next
        if self.metrics is not None:
            self.metrics.record_latency("engine.step", time.perf_counter() - started)
        return StepRecord(transform, g_tilde, eq5_ratio, sent)

    def _check_identities(self, t: int, ratio: float, eq5_ratio: float) -> None:
        # Momentum factor masking alters g between steps, so its identity residual is reported only
        if self.variant == Variant.FACTOR_MASKING:
            return
        if ratio > settings.RESIDUAL_TOL:
            self.stats.transform_violations += 1
            self._count("transform_violations")
            message = f"Transformation identity violated at t={t}: relative residual {ratio:.3e}"
            logger.warning(message)
            if self.config.check_invariants:
                raise InvariantViolationError(message)
        if eq5_ratio > settings.IDENTITY_TOL:
            self.stats.eq5_violations += 1
            self._count("eq5_violations")
            message = f"Memory identity violated at t={t}: relative residual {eq5_ratio:.3e}"
            logger.warning(message)
            if self.config.check_invariants:
                raise InvariantViolationError(message)

    def _count(self, name: str) -> None:
        if self.metrics is not None:
            self.metrics.increment_counter(name)

    def _update_stats(self, raw, ratio, eq5_ratio, d_t, g_tilde, u_next, sent) -> None:
        stats = self.stats
        stats.max_transform_residual = max(stats.max_transform_residual, raw)
        stats.max_transform_ratio = max(stats.max_transform_ratio, ratio)
        stats.max_eq5_ratio = max(stats.max_eq5_ratio, eq5_ratio)
        stats.max_grad_norm = max(stats.max_grad_norm, norm(d_t))
        stats.max_momentum_norm = max(stats.max_momentum_norm, norm(g_tilde))
        stats.max_mem_norm = max(stats.max_mem_norm, norm(u_next))
        stats.total_sent += sent

    # --- diagnostics -------------------------------------------------------------

    def diagnostics_row(self, window_residual: float, window_sent: int) -> MetricsRow:
        """Full-batch diagnostics at the current state."""
        state = self.state
        eta, rho, gamma = schedule_eval(self.schedule, state.t)
        F = self.oracle.full_objective(state.w)
        grad_norm = norm(self.oracle.full_gradient(state.w))
        ensure_finite(np.array([F, grad_norm]), "diagnostics", iteration=state.t)
        self.stats.min_grad_norm_sq = min(self.stats.min_grad_norm_sq, grad_norm ** 2)
        row = MetricsRow(
            t=state.t,
            F=F,
            grad_norm=grad_norm,
            mem_norm=norm(state.u_tilde),
            zw_dist=norm(self._z - state.w),
            transform_residual=window_residual,
            eta=eta,
            rho=rho,
            gamma=gamma,
            sent_nnz=window_sent,
        )
        logger.debug(f"t={row.t} F={row.F:.6e} grad_norm={row.grad_norm:.3e} mem_norm={row.mem_norm:.3e}")
        return row

    def run(self, track_tail: bool = False) -> RunResult:
        """
        Execute T iterations from the current state and collect diagnostics.

        Args:
            track_tail: Also average F(w_t) - F_star over the last ceil(T/2) iterates;
                ignored when F_star is unknown

        Returns:
            RunResult

        Raises:
            NonFiniteError, InvariantViolationError: As raised by ``step``; the
                error is also recorded on the metrics collector
        """
        config = self.config
        T = config.T
        logger.info(
            f"Starting run: problem={self.oracle.name} d={self.oracle.d} p={config.p} b={config.b} "
            f"variant={self.variant.value} compressor={self.compressor.__class__.__name__} "
            f"q={self.compressor.q} beta={config.beta} T={T} seed={config.run_seed}"
        )
        start_t = self.state.t
        rows = [self.diagnostics_row(0.0, 0)]
        tracking = track_tail and self.oracle.F_star is not None
        if track_tail and not tracking:
            logger.info(f"Problem {self.oracle.name} has no known F_star; tail suboptimality not tracked")
        tail_start = start_t + T - math.ceil(T / 2)
        tail_sum = 0.0
        window_residual = 0.0
        window_sent = 0

        try:
            with self._worker_pool():
                for _ in range(T):
                    if tracking and self.state.t >= tail_start:
                        tail_sum += self.oracle.suboptimality(self.state.w)
                    record = self.step()
                    window_residual = max(window_residual, record.transform_residual)
                    window_sent += record.sent_nnz
                    elapsed = self.state.t - start_t
                    if elapsed % config.n_diag == 0 or elapsed == T:
                        rows.append(self.diagnostics_row(window_residual, window_sent))
                        window_residual = 0.0
                        window_sent = 0
        except MemSGDException as exc:
            if self.metrics is not None:
                self.metrics.record_error("engine.run", exc)
            raise

        if T > 0:
            iterate_average = self._iterate_sum / T
        else:
            iterate_average = self.state.w.copy()
        tail = tail_sum / math.ceil(T / 2) if tracking and T > 0 else None

        logger.info(
            f"Finished run: F={rows[-1].F:.6e} grad_norm={rows[-1].grad_norm:.3e} "
            f"max_transform_ratio={self.stats.max_transform_ratio:.3e} "
            f"violations={self.stats.transform_violations} sent={self.stats.total_sent}"
        )
        return RunResult(
            config=config,
            oracle=self.oracle,
            rows=rows,
            state=self.state,
            iterate_average=iterate_average,
            stats=self.stats,
            tail_suboptimality=tail,
        )


def run(
    config: RunConfig,
    oracle: Optional[ProblemOracle] = None,
    metrics_collector: Optional[MetricsCollector] = None,
    track_tail: bool = False,
) -> RunResult:
    """
    Build an Engine for ``config`` and run it to completion.

    Args:
        config: Run configuration
        oracle: Problem to optimize; built from ``config.problem`` when None
        metrics_collector: Optional collector
        track_tail: Also average F - F_star over the last half of the iterates

    Returns:
        RunResult
    """
    engine = Engine(config, oracle=oracle, metrics_collector=metrics_collector)
    return engine.run(track_tail=track_tail)
