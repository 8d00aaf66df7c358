from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Union
from ..utils.errors import ArtifactError, ConfigurationError


@dataclass(frozen=True)
class PlantParams:
    """Delayed internal feedback plant P = R/(1 + e^{-hs}R), R = k(s-a)/(s+b)."""
    k: float
    a: float
    b: float
    h: float

    def __post_init__(self) -> None:
        """Validate the standing assumptions k > 1, a > b > 0, h > 0."""
        problems = []
        if not self.k > 1:
            problems.append(f"k>1 required (got k={self.k})")
        if not self.b > 0:
            problems.append(f"b>0 required (got b={self.b})")
        if not self.a > self.b:
            problems.append(f"a>b required (got a={self.a}, b={self.b})")
        if not self.h > 0:
            problems.append(f"h>0 required (got h={self.h})")
        if problems:
            raise ConfigurationError(
                "invalid_plant_params",
                "; ".join(problems),
                {"k": self.k, "a": self.a, "b": self.b, "h": self.h},
            )


@dataclass(frozen=True)
class WeightConfig:
    """Mixed sensitivity weights W1 = rho and W2 = (1 + alpha s)/(beta + s)."""
    rho: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        """Validate rho > 0, alpha > 0, beta > 0 and alpha*beta < 1."""
        problems = [
            f"{name}>0 required (got {name}={value})"
            for name, value in (("rho", self.rho), ("alpha", self.alpha), ("beta", self.beta))
            if not value > 0
        ]
        if not problems and not self.alpha * self.beta < 1:
            problems.append(f"alpha*beta<1 required (got {self.alpha * self.beta})")
        if problems:
            raise ConfigurationError(
                "invalid_weights",
                "; ".join(problems),
                {"rho": self.rho, "alpha": self.alpha, "beta": self.beta},
            )


@dataclass(frozen=True)
class GridConfig:
    """Frequency grid used for norm evaluation."""
    omega_min: float = 1e-3
    omega_max: float = 1e4
    points: int = 2000
    refine_factor: int = 10
    max_peaks: int = 16

    def __post_init__(self) -> None:
        if not 0 < self.omega_min < self.omega_max:
            raise ConfigurationError(
                "invalid_grid",
                f"0 < omega_min < omega_max required (got {self.omega_min}, {self.omega_max})",
            )
        if self.points < 2 or self.refine_factor < 1 or self.max_peaks < 0:
            raise ConfigurationError(
                "invalid_grid",
                "points >= 2, refine_factor >= 1 and max_peaks >= 0 required",
                {"points": self.points, "refine_factor": self.refine_factor,
                 "max_peaks": self.max_peaks},
            )


@dataclass(frozen=True)
class SearchConfig:
    """Gamma scan and refinement settings."""
    points: int = 4000
    margin: float = 1e-6
    xtol: float = 1e-12
    accept: float = 1e-8

    def __post_init__(self) -> None:
        if self.points < 3 or not 0 <= self.margin < 0.5 or self.xtol <= 0 or self.accept <= 0:
            raise ConfigurationError(
                "invalid_config",
                "Invalid gamma search settings",
                {"points": self.points, "margin": self.margin,
                 "xtol": self.xtol, "accept": self.accept},
            )


# Flat config-file keys and the section each one belongs to.
_PLANT_KEYS = ("k", "a", "b", "h")
_WEIGHT_KEYS = ("rho", "alpha", "beta")
_GRID_KEYS = {"omega_min": float, "omega_max": float, "grid_points": int}
_RUN_KEYS = {"output_dir": str, "norm_tolerance": float, "threads": int, "scan_points": int}
KNOWN_KEYS = frozenset(_PLANT_KEYS + _WEIGHT_KEYS) | set(_GRID_KEYS) | set(_RUN_KEYS)


@dataclass(frozen=True)
class RunConfig:
    """Everything one synthesize/verify run needs."""
    plant: PlantParams
    weights: WeightConfig
    grid: GridConfig = field(default_factory=GridConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    output_dir: Path = Path(".")
    norm_tolerance: float = 0.01
    threads: int = 1

    def __post_init__(self) -> None:
        if not self.norm_tolerance > 0:
            raise ConfigurationError("invalid_config", f"norm_tolerance must be positive (got {self.norm_tolerance})")
        if self.threads < 1:
            raise ConfigurationError("invalid_config", f"threads must be >= 1 (got {self.threads})")

    @classmethod
    def example(cls, **overrides: Any) -> 'RunConfig':
        """The example design: k=2, a=3, b=1, h=0.5, rho=0.5, alpha=0.1, beta=0.4."""
        return cls.from_mapping(overrides)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> 'RunConfig':
        """Build a config from flat ``key -> value`` pairs on top of the example defaults.

        Values may be strings (config file) or already typed (CLI flags);
        ``None`` values are ignored so unset flags fall through.
        """
        merged: Dict[str, Any] = dict(DEFAULTS)
        unknown = sorted(set(values) - KNOWN_KEYS)
        if unknown:
            raise ConfigurationError("invalid_config", f"Unknown configuration keys: {', '.join(unknown)}")
        merged.update({key: value for key, value in values.items() if value is not None})

        try:
            plant = PlantParams(**{key: float(merged[key]) for key in _PLANT_KEYS})
            weights = WeightConfig(**{key: float(merged[key]) for key in _WEIGHT_KEYS})
            grid = GridConfig(
                omega_min=float(merged["omega_min"]),
                omega_max=float(merged["omega_max"]),
                points=int(merged["grid_points"]),
            )
            search = SearchConfig(points=int(merged["scan_points"]))
            return cls(
                plant=plant,
                weights=weights,
                grid=grid,
                search=search,
                output_dir=Path(str(merged["output_dir"])),
                norm_tolerance=float(merged["norm_tolerance"]),
                threads=int(merged["threads"]),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError("invalid_config", f"Cannot parse configuration value: {e}")

    def to_mapping(self) -> Dict[str, Any]:
        """Flat view in config-file keys."""
        return {
            **{f.name: getattr(self.plant, f.name) for f in fields(self.plant)},
            **{f.name: getattr(self.weights, f.name) for f in fields(self.weights)},
            "omega_min": self.grid.omega_min,
            "omega_max": self.grid.omega_max,
            "grid_points": self.grid.points,
            "scan_points": self.search.points,
            "output_dir": str(self.output_dir),
            "norm_tolerance": self.norm_tolerance,
            "threads": self.threads,
        }


DEFAULTS: Dict[str, Any] = {
    "k": 2.0, "a": 3.0, "b": 1.0, "h": 0.5,
    "rho": 0.5, "alpha": 0.1, "beta": 0.4,
    "omega_min": GridConfig.omega_min,
    "omega_max": GridConfig.omega_max,
    "grid_points": GridConfig.points,
    "scan_points": SearchConfig.points,
    "output_dir": ".",
    "norm_tolerance": 0.01,
    "threads": 1,
}


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ArtifactError("read_failed", f"Cannot read config file {path}: {e}")

    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError("invalid_config", f"{path}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigurationError("invalid_config", f"{path}:{number}: unknown key '{key}'")
        values[key] = value
    return values
