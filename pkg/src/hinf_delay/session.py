"""Main entry point tying the synthesis steps together for one design run."""

import io
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from rich.console import Console
from rich.table import Table

from .core.config import RunConfig
from .core.lti import FrequencyGrid
from .synthesis.controller_assembly import Controller, synthesize
from .synthesis.fir_analysis import ImpulseExpansion, expand, finite_support_residual, sample_trace
from .synthesis.hinf_synthesis import GammaSearchResult, find_gamma_opt
from .synthesis.plant_factory import PlantFactorization, factor_plant
from .synthesis.stabilization import BezoutPair, solve_bezout
from .synthesis.verification import ClosedLoopReport, stacked_magnitude, verify_closed_loop
from .utils import artifacts
from .utils.errors import ArtifactError, ConfigurationError

logger = logging.getLogger(__name__)

# Gauge for the K1 numerator leading coefficient k*l21 used in written controllers.
DEFAULT_K1_LEAD = 2.0

CONTROLLER_FILE = "controller.json"
GAMMA_SCAN_FILE = "gamma_scan.csv"
SUMMARY_FILE = "summary.txt"
REPORT_FILE = "report.json"
STACKED_FILE = "stacked_magnitude.csv"
IMPULSE_FILE = "impulse.csv"


class DesignSession:
    """One plant/weight configuration and everything derived from it.

    Each stage is computed on first access and cached, so a session that is
    only asked for the factorization never runs the gamma search.

    Example:
        ```python
        session = DesignSession(RunConfig.example())
        print(session.gamma_search.gamma_opt)
        report = session.report
        ```
    """

    def __init__(self, config: RunConfig, k1_lead: Optional[float] = DEFAULT_K1_LEAD) -> None:
        self.config = config
        self.k1_lead = k1_lead

        # Lazily computed stages
        self._factorization: Optional[PlantFactorization] = None
        self._bezout: Optional[BezoutPair] = None
        self._grid: Optional[FrequencyGrid] = None
        self._gamma_search: Optional[GammaSearchResult] = None
        self._controller: Optional[Controller] = None
        self._expansion: Optional[ImpulseExpansion] = None
        self._report: Optional[ClosedLoopReport] = None

    @classmethod
    def from_controller(cls, controller: Controller, config: RunConfig) -> 'DesignSession':
        """Session around an already synthesized controller (verify and impulse runs)."""
        if abs(controller.h - config.plant.h) > 1e-12 * max(1.0, config.plant.h):
            raise ConfigurationError(
                "invalid_config",
                f"Controller delay h={controller.h} does not match plant delay h={config.plant.h}",
            )
        session = cls(config)
        session._controller = controller
        return session

    @property
    def factorization(self) -> PlantFactorization:
        """N_i, N_o and M of the configured plant."""
        if not self._factorization:
            self._factorization = factor_plant(self.config.plant)
        return self._factorization

    @property
    def bezout(self) -> BezoutPair:
        if not self._bezout:
            self._bezout = solve_bezout(self.factorization)
        return self._bezout

    @property
    def grid(self) -> FrequencyGrid:
        if self._grid is None:
            self._grid = FrequencyGrid.from_config(self.config.grid)
        return self._grid

    @property
    def gamma_search(self) -> GammaSearchResult:
        """Result of the gamma scan and refinement."""
        if not self._gamma_search:
            self._gamma_search = find_gamma_opt(
                self.factorization, self.config.weights, self.config.search, workers=self.config.threads,
            )
        return self._gamma_search

    @property
    def controller(self) -> Controller:
        if not self._controller:
            self._controller = synthesize(
                self.factorization, self.config.weights, self.gamma_search, k1_lead=self.k1_lead,
            )
        return self._controller

    @property
    def expansion(self) -> ImpulseExpansion:
        """Residue expansion of the FIR block."""
        if not self._expansion:
            self._expansion = expand(self.controller)
        return self._expansion

    @property
    def report(self) -> ClosedLoopReport:
        """Closed-loop check of the controller against the raw plant."""
        if not self._report:
            grid = self.config.grid
            self._report = verify_closed_loop(
                self.factorization,
                self.bezout,
                self.controller,
                self.config.weights,
                self.grid,
                tolerance=self.config.norm_tolerance,
                refine_factor=grid.refine_factor,
                max_peaks=grid.max_peaks,
            )
        return self._report

    def controller_document(self) -> Dict[str, Any]:
        """Controller JSON plus the plant and weights it was designed for."""
        plant, weights = self.config.plant, self.config.weights
        return {
            **self.controller.to_dict(),
            "plant": {"k": plant.k, "a": plant.a, "b": plant.b, "h": plant.h},
            "weights": {"rho": weights.rho, "alpha": weights.alpha, "beta": weights.beta},
        }

    def summary_text(self) -> str:
        """Plain text summary: gamma_opt, k_f and the coefficient table."""
        c = self.controller
        console = Console(record=True, width=100, file=io.StringIO())
        console.print(f"gamma_opt = {c.gamma_opt:.4f}")
        console.print(f"k_f = {c.k_f:.4f}")
        console.print(f"h = {c.h:g}")

        table = Table(title="Controller coefficients (ascending powers of s)")
        table.add_column("block")
        table.add_column("part")
        table.add_column("coefficients")
        for name, tf in (("K1", c.K1), ("A", c.A), ("B", c.B)):
            table.add_row(name, "num", _format_coefficients(tf.num.coef))
            table.add_row(name, "den", _format_coefficients(tf.den.coef))
        console.print(table)
        return console.export_text()

    def write_synthesis(self, output_dir: Union[str, Path, None] = None) -> Dict[str, Path]:
        """Write controller JSON, gamma scan CSV and summary; returns the paths."""
        output_dir = Path(output_dir or self.config.output_dir)
        paths = {
            "controller": artifacts.write_json(output_dir / CONTROLLER_FILE, self.controller_document()),
            "gamma_scan": artifacts.write_csv(
                output_dir / GAMMA_SCAN_FILE, ("gamma", "sigma_ratio"), self.gamma_search.curve,
            ),
        }
        summary = output_dir / SUMMARY_FILE
        try:
            summary.write_text(self.summary_text())
        except OSError as e:
            raise ArtifactError("write_failed", f"Cannot write {summary}: {e}")
        paths["summary"] = summary
        return paths

    def write_verification(self, output_dir: Union[str, Path, None] = None) -> Dict[str, Path]:
        """Write the report JSON and the stacked magnitude CSV on the base grid."""
        output_dir = Path(output_dir or self.config.output_dir)
        omegas = self.grid.points
        magnitude = stacked_magnitude(self.factorization, self.controller, self.config.weights, omegas)
        return {
            "report": artifacts.write_json(output_dir / REPORT_FILE, self.report.to_dict()),
            "stacked_magnitude": artifacts.write_csv(
                output_dir / STACKED_FILE, ("omega", "magnitude"), zip(omegas, magnitude),
            ),
        }

    def impulse_trace(self, t_max: float, dt: float) -> Tuple[np.ndarray, np.ndarray, List[Tuple[float, float]]]:
        if not dt > 0:
            raise ConfigurationError("invalid_time_window", f"dt must be positive (got {dt})")
        if not t_max >= 0:
            raise ConfigurationError("invalid_time_window", f"t_max must be non-negative (got {t_max})")
        if t_max < self.controller.h:
            logger.warning("t_max=%g is shorter than the delay h=%g; the delta atom lies outside the window",
                           t_max, self.controller.h)
        return sample_trace(self.expansion, t_max, dt)

    def write_impulse(self, t_max: float, dt: float, output_dir: Union[str, Path, None] = None) -> Path:
        """Impulse CSV with one '# delta,...' comment per atom inside the window."""
        output_dir = Path(output_dir or self.config.output_dir)
        t, values, atoms = self.impulse_trace(t_max, dt)
        return artifacts.write_csv(
            output_dir / IMPULSE_FILE,
            ("t", "value"),
            zip(t, values),
            comments=[artifacts.delta_comment(time, weight) for time, weight in atoms],
        )

    @property
    def finite_support_residual(self) -> float:
        return finite_support_residual(self.expansion)


def _format_coefficients(coefficients) -> str:
    return ", ".join(f"{float(value):.4f}" for value in coefficients)


def load_controller(path: Union[str, Path]) -> Tuple[Controller, Dict[str, Any]]:
    """(controller, flat plant/weight values stored alongside it)."""
    document = artifacts.read_json(path)
    if not isinstance(document, dict):
        raise ArtifactError("parse_failed", f"{path} does not hold a controller document")
    stored: Dict[str, Any] = {}
    for section in ("plant", "weights"):
        values = document.get(section) or {}
        if not isinstance(values, Mapping):
            raise ArtifactError("parse_failed", f"'{section}' in {path} must be an object")
        stored.update(values)
    return Controller.from_dict(document), stored
