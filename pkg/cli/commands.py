"""
CLI commands. Each command takes validated configs, runs the simulator and
writes its result files under an output directory.
"""
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import linregress

from ..compress.masks import memory_norm_bound
from ..config.logging_config import logger
from ..diagnose.checks import lemma6_check
from ..diagnose.reference import trajectories_identical
from ..engine.engine import RunResult, run
from ..exceptions import ConfigurationError, InputFileError
from ..observability.metrics import InMemoryMetricsCollector
from ..stagewise.driver import stagewise_run
from ..validation.validators import ExperimentConfig
from .csv_io import (
    read_json,
    read_metrics_csv,
    write_compare_csv,
    write_json,
    write_metrics_csv,
    write_stages_csv,
    write_vector_csv,
)


class RateQuantity:
    """Quantities ``ratefit`` can regress against T."""
    SUBOPTIMALITY = "suboptimality"
    GRAD_NORM_SQ = "grad_norm_sq"

    ALL = (SUBOPTIMALITY, GRAD_NORM_SQ)


def _memory_bound(result: RunResult) -> Tuple[float, bool]:
    """sqrt of the memory-norm bound for this run, and whether it held."""
    config = result.config
    d = result.oracle.d
    q = config.compressor.effective_q(d)
    G = result.gradient_bound
    if G <= 0.0:
        return 0.0, result.stats.max_mem_norm == 0.0
    report = lemma6_check(result.rows, d, q, G, config.beta, observed_max=result.stats.max_mem_norm)
    return math.sqrt(memory_norm_bound(d, q, G, config.beta)), report.ok


def _run_summary(result: RunResult, sent: int, counters: Dict[str, int]) -> Dict[str, Any]:
    mem_bound, mem_ok = _memory_bound(result)
    config = result.config
    return {
        "problem": result.oracle.name,
        "d": result.oracle.d,
        "variant": config.variant.value,
        "compressor": config.compressor.kind.value,
        "q": config.compressor.effective_q(result.oracle.d),
        "T": config.T,
        "run_seed": config.run_seed,
        "F_star": result.oracle.F_star,
        "G_est": result.oracle.G_est,
        "gradient_bound": result.gradient_bound,
        "memory_bound": result.memory_bound,
        "mem_bound": mem_bound,
        "mem_bound_ok": mem_ok,
        "tail_suboptimality": result.tail_suboptimality,
        "total_sent": sent,
        "counters": counters,
        "stats": result.stats.to_dict(),
    }


def _execute(config: ExperimentConfig) -> Tuple[RunResult, int, Dict[str, int]]:
    collector = InMemoryMetricsCollector()
    result = run(config.to_run_config(), metrics_collector=collector, track_tail=True)
    return result, collector.total_sent(), collector.counters()


def cmd_run(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Dict[str, Path]:
    """
    Run one experiment.

    Writes ``metrics.csv``, ``final_w.csv`` and ``summary.json``.

    Returns:
        Mapping of file role to path
    """
    out = Path(out_dir if out_dir is not None else config.output.dir)
    logger.info(f"run: problem={config.problem.name} d={config.problem.d} T={config.engine.T} -> {out}")
    result, sent, counters = _execute(config)
    paths = {
        "metrics": write_metrics_csv(out / "metrics.csv", result.rows),
        "final_w": write_vector_csv(out / "final_w.csv", result.final_w),
        "summary": write_json(out / "summary.json", _run_summary(result, sent, counters)),
    }
    logger.info(f"run finished: F={result.rows[-1].F:.6e} rows={len(result.rows)}")
    return paths


def cmd_stagewise(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Dict[str, Path]:
    """
    Run the stagewise driver.

    Writes ``stages.csv``, ``final_w.csv`` and ``summary.json``.
    """
    out = Path(out_dir if out_dir is not None else config.output.dir)
    logger.info(f"stagewise: problem={config.problem.name} S={config.stagewise.S} -> {out}")
    collector = InMemoryMetricsCollector()
    result = stagewise_run(config.to_stage_config(), metrics_collector=collector)
    summary = {
        "problem": config.problem.name,
        "S": config.stagewise.S,
        "gamma": result.gamma,
        "max_F": result.max_F,
        "initial_moreau_grad_sq": result.initial_moreau_grad_sq,
        "final_moreau_grad_sq": result.final_moreau_grad_sq,
        "final_prox_converged": result.final_moreau.converged,
        "theorem6_rhs": result.theorem6_rhs,
        "counters": collector.counters(),
    }
    paths = {
        "stages": write_stages_csv(out / "stages.csv", result.reports),
        "final_w": write_vector_csv(out / "final_w.csv", result.final_w),
        "summary": write_json(out / "summary.json", summary),
    }
    logger.info(
        f"stagewise finished: moreau_grad_sq {result.initial_moreau_grad_sq:.4e} -> "
        f"{result.final_moreau_grad_sq:.4e}"
    )
    return paths


@dataclass
class CompareResult:
    """Rows of compare.csv plus the overall identical flag."""
    records: List[Dict[str, Any]]
    identical: bool
    path: Optional[Path] = None


def cmd_compare(
    configs: Sequence[Tuple[str, ExperimentConfig]],
    out_dir: Optional[Path] = None,
    threads: int = 1,
) -> CompareResult:
    """
    Run several configs on the same problem and tabulate them.

    Args:
        configs: (label, config) pairs; the first is the reference for ``identical``
        out_dir: Where compare.csv goes (first config's [output] dir when None)
        threads: Configs run concurrently on this many threads

    Raises:
        ConfigurationError: If no configs are given or their dimensions differ
    """
    if not configs:
        raise ConfigurationError("compare needs at least one config")
    dims = {cfg.problem.d for _, cfg in configs}
    if len(dims) > 1:
        labels = ", ".join(f"{label} (d={cfg.problem.d})" for label, cfg in configs)
        raise ConfigurationError(f"compared configs have different dimensions: {labels}")

    out = Path(out_dir if out_dir is not None else configs[0][1].output.dir)
    logger.info(f"compare: {len(configs)} configs, threads={threads} -> {out}")
    outcomes = Parallel(n_jobs=max(1, threads), backend="threading")(
        delayed(_execute)(cfg) for _, cfg in configs
    )

    reference_rows = outcomes[0][0].rows
    records = []
    for (label, _), (result, sent, _counters) in zip(configs, outcomes):
        final = result.rows[-1]
        mem_bound, _ = _memory_bound(result)
        records.append(
            {
                "config": label,
                "variant": result.config.variant.value,
                "compressor": result.config.compressor.kind.value,
                "q": result.config.compressor.effective_q(result.oracle.d),
                "final_F": final.F,
                "final_grad_norm": final.grad_norm,
                "max_transform_residual": result.stats.max_transform_residual,
                "max_mem_norm": result.stats.max_mem_norm,
                "mem_bound": mem_bound,
                "total_sent": sent,
                "identical": trajectories_identical(reference_rows, result.rows),
            }
        )
    identical = all(r["identical"] for r in records)
    path = write_compare_csv(out / "compare.csv", records)
    logger.info(f"compare finished: identical={identical}")
    return CompareResult(records=records, identical=identical, path=path)


@dataclass
class RateFit:
    """
    Least-squares fit of log(value) against log(T).

    Attributes:
        quantity: suboptimality | grad_norm_sq
        points: (T, value) per input file
        slope: Fitted exponent
        stderr: Standard error of the slope (0 for two points)
        intercept: Fitted log-scale intercept
    """
    quantity: str
    points: List[Tuple[int, float]]
    slope: float
    stderr: float
    intercept: float
    paths: List[Path] = field(default_factory=list)


def _sibling_f_star(path: Path) -> Optional[float]:
    summary_path = path.parent / "summary.json"
    if not summary_path.exists():
        return None
    value = read_json(summary_path).get("F_star")
    return None if value is None else float(value)


def _rate_value(path: Path, quantity: str, f_star: Optional[float]) -> Tuple[int, float]:
    rows = read_metrics_csv(path)
    T = rows[-1].t
    if T < 1:
        raise InputFileError(f"'{path}': last row has t={T}, need a run with T >= 1")
    if quantity == RateQuantity.GRAD_NORM_SQ:
        value = min(row.grad_norm ** 2 for row in rows)
    else:
        star = f_star if f_star is not None else _sibling_f_star(path)
        if star is None:
            raise InputFileError(f"'{path}': F_star unknown; pass --f-star or keep summary.json beside it")
        tail = [row.F - star for row in rows if 2 * row.t >= T]
        value = float(np.mean(tail))
    if not value > 0.0 or not math.isfinite(value):
        raise InputFileError(f"'{path}': {quantity} must be positive to take logs, got {value}")
    return T, value


def cmd_ratefit(
    paths: Sequence[Path],
    quantity: str = RateQuantity.SUBOPTIMALITY,
    f_star: Optional[float] = None,
    out_dir: Optional[Path] = None,
) -> RateFit:
    """
    Fit the convergence exponent across runs of different length.

    Args:
        paths: metrics.csv files, one per T
        quantity: Value regressed against T
        f_star: Optimal value; read from each file's sibling summary.json when None
        out_dir: Where ratefit.json goes (nothing is written when None)

    Raises:
        ConfigurationError: On an unknown quantity
        InputFileError: On unreadable files, non-positive values or fewer than
            two distinct horizons
    """
    if quantity not in RateQuantity.ALL:
        raise ConfigurationError(f"quantity must be one of {list(RateQuantity.ALL)}, got '{quantity}'")
    paths = [Path(p) for p in paths]
    points = [_rate_value(p, quantity, f_star) for p in paths]
    if len({T for T, _ in points}) < 2:
        raise InputFileError("ratefit needs metrics files from at least two different T")

    x = np.log([T for T, _ in points])
    y = np.log([value for _, value in points])
    fit = linregress(x, y)
    stderr = float(fit.stderr) if len(points) > 2 else 0.0
    result = RateFit(
        quantity=quantity,
        points=points,
        slope=float(fit.slope),
        stderr=stderr,
        intercept=float(fit.intercept),
        paths=paths,
    )
    logger.info(f"ratefit: {quantity} slope={result.slope:.4f} stderr={result.stderr:.4f} over {len(points)} runs")
    if out_dir is not None:
        write_json(
            Path(out_dir) / "ratefit.json",
            {
                "quantity": quantity,
                "slope": result.slope,
                "stderr": result.stderr,
                "intercept": result.intercept,
                "points": [{"path": str(p), "T": T, "value": v} for p, (T, v) in zip(paths, points)],
            },
        )
    return result
