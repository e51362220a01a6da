"""
Validation of experiment config files.
"""

from .validators import (
    SECTIONS,
    ProblemSection,
    EngineSection,
    ScheduleSection,
    CompressorSection,
    DiagnosticsSection,
    StagewiseSection,
    OutputSection,
    ExperimentConfig,
    validate_experiment_config,
)

__all__ = [
    "SECTIONS",
    "ProblemSection",
    "EngineSection",
    "ScheduleSection",
    "CompressorSection",
    "DiagnosticsSection",
    "StagewiseSection",
    "OutputSection",
    "ExperimentConfig",
    "validate_experiment_config",
]
