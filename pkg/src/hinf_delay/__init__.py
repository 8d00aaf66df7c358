__version__ = "0.1.0"

from .core.config import GridConfig, PlantParams, RunConfig, SearchConfig, WeightConfig
from .session import DesignSession

__all__ = [
    'DesignSession',
    'GridConfig',
    'PlantParams',
    'RunConfig',
    'SearchConfig',
    'WeightConfig',
]
