"""Independent closed-loop check of the synthesized controller.

The plant is evaluated directly as R/(1 + e^{-hs}R) and closed with C_opt; the
stacked magnitude sqrt(|W1 S|^2 + |W2 T|^2) is compared against gamma_opt.
The reduction identities linking S and T to Y, N_i, M and Q1 are checked
pointwise on the same grid. Stability evidence is the bound on the recovered
Q1 over the grid together with its removable singularity at the plant zero.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np

from .controller_assembly import Controller
from .plant_factory import PlantFactorization
from .stabilization import BezoutPair, q1_removable_residual, recover_Q1, sensitivity
from ..core.config import WeightConfig
from ..core.lti import Evaluatable, FrequencyGrid, RationalTF, grid_peak, magnitude_on_grid, poly
from ..utils.errors import VerificationError

logger = logging.getLogger(__name__)


def weight_functions(w: WeightConfig):
    """(W1, W2) as transfer functions."""
    return RationalTF.constant(w.rho), RationalTF(poly(1.0, w.alpha), poly(w.beta, 1.0))


@dataclass(frozen=True)
class ClosedLoopReport:
    achieved_norm: float
    gamma_opt: float
    omega_peak: float
    flatness_deviation: float
    identity_residuals: Dict[str, float]
    q1_bound: float
    q1_removable_residual: float
    reduced_norm: float
    tolerance: float
    grid_points: int

    @property
    def relative_error(self) -> float:
        return abs(self.achieved_norm - self.gamma_opt) / self.gamma_opt

    @property
    def within_tolerance(self) -> bool:
        return self.relative_error <= self.tolerance

    def to_dict(self) -> Dict[str, object]:
        return {**asdict(self), "relative_error": self.relative_error, "within_tolerance": self.within_tolerance}


def stacked_blocks(fact: PlantFactorization, C: Evaluatable, w: WeightConfig):
    """[W1 S, W2 T] with S, T built from the raw plant and C."""
    W1, W2 = weight_functions(w)
    S = sensitivity(fact, C)

    def weighted_S(s):
        return W1(s) * S(s)

    def weighted_T(s):
        return W2(s) * (1.0 - S(s))

    return [weighted_S, weighted_T]


def mixed_sensitivity_norm(fact: PlantFactorization, c: Evaluatable, w: WeightConfig, grid: FrequencyGrid,
                           refine_factor: int = 10, max_peaks: Optional[int] = 16) -> float:
    """sup over the refined grid of sqrt(|W1 S|^2 + |W2 T|^2)."""
    return grid_peak(stacked_blocks(fact, c, w), grid, refine_factor, max_peaks)[1]


def reduced_blocks(fact: PlantFactorization, bez: BezoutPair, c: Evaluatable, w: WeightConfig):
    """[W1 (Y - N_i Q1), W2 (1 - M (Y - N_i Q1))] with Q1 recovered from c."""
    W1, W2 = weight_functions(w)
    Q1 = recover_Q1(fact, bez, c)

    def inner(s):
        return bez.Y(s) - fact.N_i(s) * Q1(s)

    return [lambda s: W1(s) * inner(s), lambda s: W2(s) * (1.0 - fact.M(s) * inner(s))]


def reduction_identities(fact: PlantFactorization, bez: BezoutPair, c: Evaluatable, grid: FrequencyGrid,
                         weights: Optional[WeightConfig] = None) -> Dict[str, float]:
    """Max residuals of the chained closed-loop identities over the grid."""
    s = grid.s
    S = sensitivity(fact, c)(s)
    T = 1.0 - S
    Q1 = recover_Q1(fact, bez, c)(s)
    Y, N_i, M = bez.Y(s), fact.N_i(s), fact.M(s)
    via_Q1 = M * (Y - N_i * Q1)
    # N (X + M Q) with Q = N_o^{-1} Q1
    via_X = fact.N(s) * (bez.X(s) + M * Q1 / fact.N_o(s))
    residuals = {
        "sensitivity": float(np.max(np.abs(S - via_Q1))),
        "complementary": float(np.max(np.abs(T - via_X))),
        "complementary_reduced": float(np.max(np.abs(T - (1.0 - via_Q1)))),
    }
    if weights is not None:
        _, W2 = weight_functions(weights)
        w2 = W2(s)
        residuals["weighted_complementary"] = float(np.max(np.abs(w2 * T - w2 * (1.0 - via_Q1))))
    return residuals


def verify_closed_loop(
    fact: PlantFactorization,
    bez: BezoutPair,
    c: Controller,
    w: WeightConfig,
    grid: FrequencyGrid,
    tolerance: float = 0.01,
    refine_factor: int = 10,
    max_peaks: Optional[int] = 16,
) -> ClosedLoopReport:
    """Evaluate the achieved norm, identities and stability evidence for ``c``."""
    omega_peak, achieved, refined, values = grid_peak(stacked_blocks(fact, c, w), grid, refine_factor, max_peaks)
    reduced = float(np.max(magnitude_on_grid(reduced_blocks(fact, bez, c, w), refined.points)))
    q1_bound = float(np.max(np.abs(recover_Q1(fact, bez, c)(refined.s))))
    report = ClosedLoopReport(
        achieved_norm=achieved,
        gamma_opt=c.gamma_opt,
        omega_peak=omega_peak,
        flatness_deviation=float(np.max(np.abs(values - c.gamma_opt)) / c.gamma_opt),
        identity_residuals=reduction_identities(fact, bez, c, refined, weights=w),
        q1_bound=q1_bound,
        q1_removable_residual=q1_removable_residual(fact, bez, c),
        reduced_norm=reduced,
        tolerance=tolerance,
        grid_points=len(refined),
    )
    logger.info("Achieved norm %.6f vs gamma_opt %.6f (relative error %.2e)",
                achieved, c.gamma_opt, report.relative_error)
    return report


def require_within_tolerance(report: ClosedLoopReport) -> ClosedLoopReport:
    """Raise when the achieved norm misses gamma_opt by more than the tolerance."""
    if not report.within_tolerance:
        raise VerificationError(
            "tolerance_exceeded",
            f"Achieved norm {report.achieved_norm:.6f} differs from gamma_opt "
            f"{report.gamma_opt:.6f} by {report.relative_error:.2%} (tolerance {report.tolerance:.2%})",
            {"achieved_norm": report.achieved_norm, "gamma_opt": report.gamma_opt},
        )
    return report


def stacked_magnitude(fact: PlantFactorization, c: Evaluatable, w: WeightConfig, omegas) -> np.ndarray:
    """Stacked magnitude at the given frequencies (for CSV export)."""
    return magnitude_on_grid(stacked_blocks(fact, c, w), omegas)
