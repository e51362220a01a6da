"""
Experiment config files: bracketed sections of ``key = value`` lines, UTF-8,
``#`` comments.
"""
import configparser
from pathlib import Path
from typing import Dict, Union

from ..exceptions import ConfigurationError, InputFileError
from ..validation.validators import ExperimentConfig, validate_experiment_config


def _sections(text: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        empty_lines_in_values=False,
    )
    # Keys are case-sensitive (L, T, S)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigurationError(f"key outside any [section] at line {e.lineno}") from e
    except configparser.Error as e:
        raise ConfigurationError(f"Malformed config: {e}") from e
    data: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        values = {key: value.strip() for key, value in parser.items(section)}
        # Empty values mean "use the default"
        data[section] = {key: value for key, value in values.items() if value != ""}
    return data


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse and validate an experiment config.

    Args:
        text: Config document

    Returns:
        ExperimentConfig with defaults filled in

    Raises:
        ConfigurationError: On malformed text, a missing or unknown key, or a
            range violation (the message names the key)
    """
    return validate_experiment_config(_sections(text))


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and parse a config file.

    Raises:
        InputFileError: If the file cannot be read
        ConfigurationError: If it does not validate
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputFileError(f"Cannot read config '{path}': {e}") from e
    return parse_config(text)
