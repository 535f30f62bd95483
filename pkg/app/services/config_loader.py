import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple, Union

from core.interpolator import DEFAULT_SCHEDULE
from models.density import SpectralDensity, density_from_dict
from models.errors import InterpolationError, InvalidConfig
from models.grid import DEFAULT_GRID
from models.pattern import FunctionalWeights, ObservationPattern
from models.uncertainty import DensityClass, class_from_dict


@dataclass(frozen=True)
class RunOptions:
    grid: int = DEFAULT_GRID
    half_length: int = 256
    truncation: Tuple[int, ...] = DEFAULT_SCHEDULE
    seed: int = 0
    windows: Tuple[int, ...] = (50, 100, 200, 500)
    replicates: int = 10000
    window: int = 20
    samples: int = 100
    optimizer_grid: int = 512
    positivity_floor: float = 1e-3
    starts: int = 4
    max_iter: int = 10000

    def __post_init__(self):
        if self.grid < 16 or self.grid & (self.grid - 1):
            raise InvalidConfig(f"grid must be a power of two >= 16, got {self.grid}")
        if self.optimizer_grid < 16 or self.optimizer_grid & (self.optimizer_grid - 1):
            raise InvalidConfig(f"optimizer_grid must be a power of two >= 16, got {self.optimizer_grid}")
        for name in ("replicates", "window", "samples", "starts", "max_iter"):
            if getattr(self, name) < 1:
                raise InvalidConfig(f"{name} must be positive")
        if not self.windows or any(w < 1 for w in self.windows):
            raise InvalidConfig("windows must be positive")
        if not 0 < self.positivity_floor < 1:
            raise InvalidConfig("positivity_floor must lie in (0, 1)")

    @classmethod
    def from_dict(cls, data: dict) -> "RunOptions":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"Unknown options: {sorted(unknown)}")
        values = dict(data)
        for name in ("truncation", "windows"):
            if name in values:
                values[name] = tuple(int(x) for x in values[name])
        return cls(**values)

    def override(self, grid: Optional[int] = None, truncation: Optional[List[int]] = None,
                 seed: Optional[int] = None) -> "RunOptions":
        """Apply command-line flags on top of the file options"""
        changes = {}
        if grid is not None:
            changes["grid"] = grid
        if truncation is not None:
            changes["truncation"] = tuple(truncation)
        if seed is not None:
            changes["seed"] = seed
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "truncation": list(self.truncation),
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    pattern: ObservationPattern
    weights: FunctionalWeights
    density: Optional[SpectralDensity] = None
    density_class: Optional[DensityClass] = None
    options: RunOptions = field(default_factory=RunOptions)

    def require_density(self) -> SpectralDensity:
        if self.density is None:
            raise InvalidConfig("This command needs a 'density' entry")
        return self.density

    def require_class(self) -> DensityClass:
        if self.density_class is None:
            raise InvalidConfig("This command needs a 'class' entry")
        return self.density_class


class ConfigLoader:
    """Loads and validates experiment configs from JSON"""

    def load_config(self, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise InvalidConfig("Config must be a JSON object")
        try:
            pattern = ObservationPattern.from_dict(data["pattern"])
            weights = FunctionalWeights.from_dict(data["weights"])
            density = density_from_dict(data["density"]) if "density" in data else None
            density_class = class_from_dict(data["class"]) if "class" in data else None
            options = RunOptions.from_dict(data.get("options", {}))
        except InterpolationError:
            raise
        except KeyError as exc:
            raise InvalidConfig(f"Missing config entry: {exc.args[0]}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"Invalid config value: {exc}") from exc

        # fail fast on weights that do not fit the pattern
        weights.weight_vector(pattern)
        return ExperimentConfig(pattern, weights, density, density_class, options)

    def load_file(self, path: Union[str, Path]) -> ExperimentConfig:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise InvalidConfig(f"Cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"Config {path} is not valid JSON: {exc.msg}") from exc
        return self.load_config(data)
