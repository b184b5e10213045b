import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields, replace
from importlib import import_module
from pathlib import Path

from yaml import YAMLError, safe_load

from ..errors import ConfigurationError
from ..types import *


__all__ = ["EngineOptions", "BenchOptions", "Configuration", "load_configuration"]

DEFAULT_CONFIGURATION = "standard"


@dataclass(frozen=True, kw_only=True)
class EngineOptions:
    """ Engine defaults, plus the defaults of the commands built on top of the engine """
    window_size: int | None = None
    forecast_horizon: int = 1
    similarity_methods: tuple[str, ...] = ("cosine", "euclidean", "dtw")
    dynamic_window: bool = True
    multi_level: bool = True
    dynamic_threshold: bool = True
    splits: int = 3
    k: int = 5
    percentile: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "similarity_methods", tuple(self.similarity_methods))

    def state_options(self) -> dict:
        """ Keyword arguments for C{init_state} apart from the horizon and the seed """
        return {
            "window_size": self.window_size,
            "similarity_methods": self.similarity_methods,
            "dynamic_window": self.dynamic_window,
            "multi_level": self.multi_level,
            "dynamic_threshold": self.dynamic_threshold,
        }

    def dump(self) -> dict:
        return {field.name: getattr(self, field.name) for field in fields(self)}


@dataclass(frozen=True, kw_only=True)
class BenchOptions:
    horizon: int = 5
    seed: int = 0
    workers: int = 1
    algorithms: tuple[str, ...] = ("spinex", "naive", "sma", "ses", "holt_winters", "theta")
    functions: tuple[str, ...] = ("linear", "sine", "sawtooth", "composite_sines", "ar1")
    t_max_values: tuple[float, ...] = (10,)
    n_points_values: tuple[int, ...] = (200,)
    complexity_sizes: tuple[int, ...] = (50, 500, 5000)
    repeats: int = 3

    def __post_init__(self):
        for name in ("algorithms", "functions", "t_max_values", "n_points_values", "complexity_sizes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def dump(self) -> dict:
        return {field.name: getattr(self, field.name) for field in fields(self)}


class Configuration(ABC):
    """
    The Configuration bundles the defaults of the engine, the reference forecasters and the benchmark harness. Users
    create their own defaults by adding a module with a Configuration subclass to this package. The Configuration is
    determined at runtime using the "SPINEX_CONFIGURATION" environment variable; a YAML file can override single
    values on top of it.
    """
    def __init__(self, logger: logging.Logger | None = None):
        self._logger = logger or logging.getLogger(__name__)
        self._overrides = {"engine": {}, "baselines": {}, "bench": {}}

    @property
    def log(self) -> logging.Logger:
        """ Logger property """
        return self._logger

    @property
    def name(self) -> str:
        return type(self).__module__.rsplit(".", 1)[-1]

    @abstractmethod
    def engine_options(self) -> EngineOptions:
        """
        Defaults of the similarity engine and of the commands that run it.

        @return: The engine defaults before any file overrides
        """
        pass

    @abstractmethod
    def baseline_specs(self) -> list[BaselineSpec]:
        """
        The reference forecasters available to the benchmark, with their default parameters.
        """
        pass

    def bench_options(self) -> BenchOptions:
        return BenchOptions()

    ########################################################
    #
    #   Overrides
    #
    ########################################################

    def apply_overrides(self, document: dict | None):
        """
        Merge a configuration document into this configuration. The document may hold three mappings:

        - engine: Fields of L{EngineOptions}
        - baselines: Parameters per baseline kind, e.g. C{{"sma": {"n": 10}}}
        - bench: Fields of L{BenchOptions}

        @raise ConfigurationError: For unknown sections or fields
        """
        if document is None:
            return
        if not isinstance(document, dict):
            raise ConfigurationError(f"Configuration document must be a mapping, got {type(document).__name__}")

        unknown = set(document) - set(self._overrides)
        if unknown:
            raise ConfigurationError(f"Unknown configuration sections: {', '.join(sorted(unknown))}")

        allowed = {
            "engine": {field.name for field in fields(EngineOptions)},
            "bench": {field.name for field in fields(BenchOptions)},
            "baselines": {spec.kind for spec in self.baseline_specs()},
        }
        for section, values in document.items():
            values = values or {}
            if not isinstance(values, dict):
                raise ConfigurationError(f"Section {section!r} must be a mapping")
            unknown = set(values) - allowed[section]
            if unknown:
                raise ConfigurationError(f"Unknown keys in section {section!r}: {', '.join(sorted(unknown))}")
            if section == "baselines" and not all(isinstance(v, dict) for v in values.values()):
                raise ConfigurationError("Baseline overrides must map each kind to its parameters")
            self._overrides[section].update(values)

        self.log.info(f"Applied configuration overrides {document!r}")

    def load_file(self, path: str | Path):
        path = Path(path)
        self.log.info(f"Loading configuration file {str(path.resolve())!r}")
        try:
            document = safe_load(path.read_text())
        except OSError as e:
            raise ConfigurationError(f"Cannot read configuration file {str(path)!r}: {e}") from e
        except YAMLError as e:
            raise ConfigurationError(f"Invalid configuration file {str(path)!r}: {e}") from e
        self.apply_overrides(document)

    ########################################################
    #
    #   Effective values
    #
    ########################################################

    @property
    def engine(self) -> EngineOptions:
        try:
            return replace(self.engine_options(), **self._overrides["engine"])
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid engine configuration: {e}") from e

    @property
    def bench(self) -> BenchOptions:
        try:
            return replace(self.bench_options(), **self._overrides["bench"])
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid bench configuration: {e}") from e

    @property
    def baselines(self) -> dict[str, BaselineSpec]:
        specs = {}
        for spec in self.baseline_specs():
            parameters = {**spec.parameters, **self._overrides["baselines"].get(spec.kind, {})}
            specs[spec.kind] = BaselineSpec(kind=spec.kind, parameters=parameters)
        return specs

    def dump(self) -> dict:
        return {
            "name": self.name,
            "engine": self.engine.dump(),
            "baselines": {kind: dict(spec.parameters) for kind, spec in self.baselines.items()},
            "bench": self.bench.dump(),
        }


def load_configuration(
    name: str | None = None, logger: logging.Logger | None = None, config_file: str | Path | None = None
) -> Configuration:
    """
    Instantiate the Configuration class of the module C{spinex_timeseries.configurations.<name>}.

    @param name: Module name, defaults to $SPINEX_CONFIGURATION or "standard"
    @param config_file: YAML overrides, defaults to $SPINEX_CONFIG_FILE when set
    """
    logger = logger or logging.getLogger(__name__)
    name = name or os.getenv("SPINEX_CONFIGURATION") or DEFAULT_CONFIGURATION

    try:
        module = import_module(f"{__name__}.{name}")
    except ModuleNotFoundError as e:
        raise ConfigurationError(f"Unknown configuration {name!r}") from e

    classes = [
        cls for cls in module.__dict__.values()
        if isinstance(cls, type) and issubclass(cls, Configuration) and cls != Configuration
    ]
    if not classes:
        raise ConfigurationError(f"Module {module.__name__!r} does not define a Configuration class")
    cls = classes[0]
    logger.info(f"Found Configuration class {cls.__name__!r}")

    configuration = cls(logger)
    config_file = config_file or os.getenv("SPINEX_CONFIG_FILE")
    if config_file:
        configuration.load_file(config_file)
    return configuration
