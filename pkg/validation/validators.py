"""
Pydantic models for experiment config files.

One model per config section. Unknown keys are rejected and range checks name
the offending key and its bound.
"""
import math
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..compress.spec import CompressorKind, CompressorSpec
from ..config.run_config import ProblemSpec, RunConfig, Variant
from ..config.settings import settings
from ..core.schedule import Schedule, ScheduleFamily
from ..exceptions import ConfigurationError
from ..stagewise.driver import StageConfig

SECTIONS = ("problem", "engine", "schedule", "compressor", "diagnostics", "stagewise", "output")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProblemSection(_Section):
    """[problem]"""
    name: str = Field(..., min_length=1)
    d: int = Field(..., ge=1)
    n: int = Field(200, ge=1)
    data_seed: int = Field(0, ge=0)
    noise: Optional[float] = Field(None, ge=0.0)
    mu: float = Field(1.0, gt=0.0)
    L: float = Field(1.0, gt=0.0)
    reg: float = Field(0.1, gt=0.0)

    @model_validator(mode="after")
    def check_curvature(self):
        if self.mu > self.L:
            raise ValueError(f"mu must not exceed L, got mu={self.mu}, L={self.L}")
        return self


class EngineSection(_Section):
    """[engine]"""
    T: int = Field(1000, ge=1)
    p: int = Field(4, ge=1)
    b: int = Field(8, ge=1)
    variant: Variant = Variant.MDSGD
    run_seed: int = Field(0, ge=0)
    threads: int = Field(default_factory=lambda: max(1, settings.THREADS), ge=1)


class ScheduleSection(_Section):
    """[schedule]"""
    family: ScheduleFamily = ScheduleFamily.CONSTANT
    beta: float = 0.9
    eta0: float = Field(1.0, gt=0.0)
    alpha: Optional[float] = None
    mu: Optional[float] = Field(None, gt=0.0)

    @field_validator("beta")
    @classmethod
    def check_beta(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError("beta must be in [0,1)")
        return v

    @field_validator("alpha")
    @classmethod
    def check_alpha(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.5 <= v <= 1.0:
            raise ValueError("alpha must be in [0.5, 1]")
        return v

    @model_validator(mode="after")
    def check_family_parameters(self):
        if self.family == ScheduleFamily.POWER and self.alpha is None:
            raise ValueError("power schedule needs alpha")
        return self


class CompressorSection(_Section):
    """[compressor]"""
    kind: CompressorKind = CompressorKind.TOP_K
    q: Optional[int] = Field(None, ge=1)


class DiagnosticsSection(_Section):
    """[diagnostics]"""
    n_diag: int = Field(10, ge=1)
    check_invariants: bool = False


class StagewiseSection(_Section):
    """[stagewise]"""
    S: int = Field(8, ge=1)
    eta0: float = Field(0.01, gt=0.0)
    gamma: Optional[float] = Field(None, gt=0.0)
    prox_tol: Optional[float] = Field(None, gt=0.0)
    prox_max_iter: int = Field(20000, ge=1)


class OutputSection(_Section):
    """[output]"""
    dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR, min_length=1)


class ExperimentConfig(_Section):
    """A fully validated experiment config."""
    problem: ProblemSection
    engine: EngineSection
    schedule: ScheduleSection = Field(default_factory=ScheduleSection)
    compressor: CompressorSection = Field(default_factory=CompressorSection)
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    stagewise: StagewiseSection = Field(default_factory=StagewiseSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def check_cross_section(self):
        q = self.compressor.q
        if q is not None and q > self.problem.d:
            raise ValueError(f"compressor q must be in [1, d={self.problem.d}], got {q}")
        if self.engine.variant == Variant.MEMORY_SCALED and self.schedule.beta != 0.0:
            raise ValueError("memory_scaled requires beta = 0")
        return self

    def effective_q(self) -> int:
        """q, defaulting to ceil(d / 20)."""
        if self.compressor.q is not None:
            return self.compressor.q
        return max(1, math.ceil(self.problem.d / 20))

    def compressor_spec(self) -> CompressorSpec:
        if self.compressor.kind == CompressorKind.DENSE:
            return CompressorSpec.dense()
        return CompressorSpec(self.compressor.kind, self.effective_q())

    def problem_spec(self) -> ProblemSpec:
        p = self.problem
        return ProblemSpec(
            name=p.name, d=p.d, n=p.n, data_seed=p.data_seed, noise=p.noise, mu=p.mu, L=p.L, reg=p.reg
        )

    def schedule_obj(self) -> Schedule:
        s = self.schedule
        mu = s.mu
        if s.family == ScheduleFamily.STRONG_CONVEX and mu is None:
            mu = self.problem.mu
        horizon = self.engine.T if s.family == ScheduleFamily.CONSTANT else None
        return Schedule(family=s.family, beta=s.beta, eta0=s.eta0, alpha=s.alpha, mu=mu, horizon=horizon)

    def to_run_config(self) -> RunConfig:
        """Build the RunConfig this experiment describes."""
        e = self.engine
        return RunConfig(
            problem=self.problem_spec(),
            schedule=self.schedule_obj(),
            p=e.p,
            b=e.b,
            compressor=self.compressor_spec(),
            variant=e.variant,
            T=e.T,
            run_seed=e.run_seed,
            n_diag=self.diagnostics.n_diag,
            threads=e.threads,
            check_invariants=self.diagnostics.check_invariants,
        )

    def to_stage_config(self) -> StageConfig:
        """Build the StageConfig for a stagewise run."""
        sw = self.stagewise
        return StageConfig(
            base=self.to_run_config(),
            S=sw.S,
            eta0=sw.eta0,
            beta=self.schedule.beta,
            gamma=sw.gamma,
            prox_tol=sw.prox_tol,
            prox_max_iter=sw.prox_max_iter,
        )

    def with_engine_overrides(self, **changes: Any) -> "ExperimentConfig":
        """Copy with some [engine] keys replaced (CLI --seed / --threads)."""
        changes = {k: v for k, v in changes.items() if v is not None}
        if not changes:
            return self
        engine = self.engine.model_copy(update=changes)
        return self.model_copy(update={"engine": engine})


def _describe_error(error: Dict[str, Any]) -> str:
    loc = [str(part) for part in error.get("loc", ())]
    where = f"[{loc[0]}] {'.'.join(loc[1:])}" if len(loc) > 1 else (f"[{loc[0]}]" if loc else "config")
    kind = error.get("type", "")
    message = error.get("msg", "")
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    if kind == "missing":
        return f"missing required key {where}"
    if kind == "extra_forbidden":
        return f"unknown key {where}"
    return f"{where}: {message}".strip()


def validate_experiment_config(data: Dict[str, Dict[str, Any]]) -> ExperimentConfig:
    """
    Validate raw section dictionaries.

    Args:
        data: Mapping of section name to key/value strings

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigurationError: Naming the offending section and key
    """
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"unknown section [{unknown[0]}]; allowed sections: {list(SECTIONS)}")
    try:
        return ExperimentConfig(**data)
    except PydanticValidationError as e:
        problems = "; ".join(_describe_error(err) for err in e.errors())
        raise ConfigurationError(f"Invalid config: {problems}") from e
