"""
Registry and factory for problem oracles.
"""
from threading import Lock
from typing import Callable, Dict, List, Optional

from ..config.logging_config import logger
from ..config.run_config import ProblemSpec
from ..exceptions import ProblemError, UnknownProblemError
from .logistic import LogisticProblem
from .oracle import ProblemOracle
from .phaseret import PhaseRetrievalProblem
from .quadratic import QuadraticProblem

ProblemBuilder = Callable[[ProblemSpec], ProblemOracle]


class ProblemRegistry:
    """
    Registry of problem builders keyed by name.
    Provides thread-safe access to registered builders.
    """

    def __init__(self):
        self._builders: Dict[str, ProblemBuilder] = {}
        self._lock = Lock()

    def register(self, name: str, builder: ProblemBuilder) -> None:
        """
        Register a problem builder.

        Args:
            name: Problem name used in configs
            builder: Callable taking a ProblemSpec and returning an oracle
        """
        with self._lock:
            if name in self._builders:
                logger.warning(f"Problem '{name}' already registered, overwriting")
            self._builders[name] = builder
            logger.debug(f"Registered problem: {name}")

    def get(self, name: str) -> ProblemBuilder:
        """
        Get a builder by name.

        Raises:
            UnknownProblemError: If the name is not registered
        """
        with self._lock:
            if name not in self._builders:
                available = sorted(self._builders.keys())
                raise UnknownProblemError(
                    f"Unknown problem '{name}'. Available problems: {available}"
                )
            return self._builders[name]

    def list_problems(self) -> List[str]:
        """List registered problem names."""
        with self._lock:
            return sorted(self._builders.keys())


def _build_quadratic(spec: ProblemSpec) -> ProblemOracle:
    noise = 1.0 if spec.noise is None else spec.noise
    return QuadraticProblem.generate(spec.d, spec.n, spec.data_seed, mu=spec.mu, L=spec.L, noise=noise)


def _build_logistic(spec: ProblemSpec) -> ProblemOracle:
    noise = 0.1 if spec.noise is None else spec.noise
    return LogisticProblem.generate(spec.d, spec.n, spec.data_seed, reg=spec.reg, noise=noise)


def _build_phaseret(spec: ProblemSpec) -> ProblemOracle:
    noise = 0.0 if spec.noise is None else spec.noise
    return PhaseRetrievalProblem.generate(spec.d, spec.n, spec.data_seed, noise=noise)


def default_registry() -> ProblemRegistry:
    """Registry holding the built-in problems."""
    registry = ProblemRegistry()
    registry.register("quadratic", _build_quadratic)
    registry.register("logistic", _build_logistic)
    registry.register("phaseret", _build_phaseret)
    return registry


_default_registry: Optional[ProblemRegistry] = None


def get_problem_registry() -> ProblemRegistry:
    """Process-wide registry, created on first use."""
    global _default_registry
    if _default_registry is None:
        _default_registry = default_registry()
    return _default_registry


def make_problem(spec: ProblemSpec, registry: Optional[ProblemRegistry] = None) -> ProblemOracle:
    """
    Instantiate the oracle described by ``spec``.

    Args:
        spec: Problem description
        registry: Registry to consult (process default when None)

    Returns:
        ProblemOracle with metadata, w_star and F_star filled in where known

    Raises:
        UnknownProblemError: If the name is not registered
        ProblemError: If d or n < 1 or parameters are out of range
    """
    if spec.d < 1 or spec.n < 1:
        raise ProblemError(f"d and n must be at least 1, got d={spec.d}, n={spec.n}")
    builder = (registry or get_problem_registry()).get(spec.name)
    oracle = builder(spec)
    logger.info(f"Built problem {oracle.describe()}")
    return oracle
