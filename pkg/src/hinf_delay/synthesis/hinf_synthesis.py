"""Gamma iteration for the two-block problem of the delayed feedback plant.

For a candidate cost gamma the weights W1 = rho, W2 = (1 + alpha s)/(beta + s)
define

    F_gamma(s) = gamma (beta - s)/(a_gamma + b_gamma s)
    omega_gamma = sqrt((1 - gamma^2 beta^2)/(gamma^2 - alpha^2))

and a 4x4 interpolation matrix M_gamma built from M(j omega_gamma),
F_gamma(j omega_gamma), M(a) and F_gamma(a). The optimal cost is the largest
gamma in the admissible interval at which M_gamma is singular; its null
vector l = (l10, l11, l20, l21) parameterizes the optimal controller.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .plant_factory import PlantFactorization
from ..core.config import SearchConfig, WeightConfig
from ..core.lti import RationalTF, poly
from ..utils.errors import SynthesisError

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-6
RADICAND_ROUNDOFF = 1e-14


@dataclass(frozen=True)
class GammaScalars:
    gamma: float
    a_gamma: float
    b_gamma: float
    omega_gamma: float
    F_gamma: RationalTF


@dataclass(frozen=True, eq=False)
class GammaSearchResult:
    """Outcome of the gamma scan.

    ``curve`` holds the scanned (gamma, sigma_min/sigma_max) samples,
    ``candidates`` every refined singular gamma that passed the acceptance
    threshold, ``imag_residue`` the largest imaginary part dropped from the
    null vector after phase normalization.
    """
    gamma_opt: float
    curve: List[Tuple[float, float]] = field(repr=False)
    l: np.ndarray
    ratio_at_opt: float
    candidates: List[float] = field(default_factory=list)
    imag_residue: float = 0.0

    def scaled(self, factor: float) -> 'GammaSearchResult':
        """Same result with l multiplied by a nonzero real ``factor``."""
        return GammaSearchResult(
            gamma_opt=self.gamma_opt,
            curve=self.curve,
            l=self.l * factor,
            ratio_at_opt=self.ratio_at_opt,
            candidates=self.candidates,
            imag_residue=self.imag_residue,
        )


def admissible_interval(w: WeightConfig) -> Tuple[float, float]:
    """(max{alpha, rho/sqrt(1 + rho^2 beta^2)}, 1/beta)."""
    lower = max(w.alpha, w.rho / math.sqrt(1.0 + w.rho ** 2 * w.beta ** 2))
    return lower, 1.0 / w.beta


def gamma_scalars(w: WeightConfig, gamma: float) -> GammaScalars:
    """a_gamma, b_gamma, omega_gamma and F_gamma for one candidate gamma."""
    rho2, alpha2, beta2 = w.rho ** 2, w.alpha ** 2, w.beta ** 2
    if gamma <= 0:
        raise SynthesisError("out_of_interval", f"gamma must be positive (got {gamma})")
    a_radicand = 1.0 + rho2 * beta2 - rho2 / gamma ** 2
    b_radicand = (1.0 - rho2 / gamma ** 2) * alpha2 + rho2
    omega_den = gamma ** 2 - alpha2
    omega_num = 1.0 - gamma ** 2 * beta2
    if abs(omega_num) <= RADICAND_ROUNDOFF:
        # gamma = 1/beta up to rounding
        omega_num = 0.0
    if a_radicand <= 0 or b_radicand <= 0 or omega_den <= 0 or omega_num < 0:
        raise SynthesisError(
            "out_of_interval",
            f"gamma={gamma} lies outside the admissible interval {admissible_interval(w)}",
            {"a_radicand": a_radicand, "b_radicand": b_radicand,
             "omega_numerator": omega_num, "omega_denominator": omega_den},
        )
    a_gamma = math.sqrt(a_radicand)
    b_gamma = math.sqrt(b_radicand)
    return GammaScalars(
        gamma=gamma,
        a_gamma=a_gamma,
        b_gamma=b_gamma,
        omega_gamma=math.sqrt(omega_num / omega_den),
        F_gamma=RationalTF(poly(gamma * w.beta, -gamma), poly(a_gamma, b_gamma)),
    )


def build_M_gamma(fact: PlantFactorization, w: WeightConfig, g: GammaScalars) -> np.ndarray:
    """The 4x4 interpolation matrix at j omega_gamma and at the plant zero a."""
    a = fact.params.a
    jw = 1j * g.omega_gamma
    mu_w = complex(fact.M(jw) * g.F_gamma(jw))
    mu_a = complex(fact.M(a) * g.F_gamma(a))
    return np.array([
        [1.0, jw, mu_w, jw * mu_w],
        [1.0, a, mu_a, a * mu_a],
        [mu_w, -jw * mu_w, 1.0, -jw],
        [mu_a, -a * mu_a, 1.0, -a],
    ], dtype=complex)


def sigma_min_ratio(Mg: np.ndarray) -> float:
    """sigma_min/sigma_max from a dense SVD."""
    singular = np.linalg.svd(np.asarray(Mg, dtype=complex), compute_uv=False)
    if singular[0] == 0:
        return 0.0
    return float(singular[-1] / singular[0])


def null_vector(Mg: np.ndarray) -> Tuple[np.ndarray, float]:
    """Real unit null direction of a (near) singular M_gamma.

    The right singular vector of sigma_min is rotated so its largest entry is
    real positive; the imaginary parts left over are returned as a diagnostic.
    """
    _, _, vh = np.linalg.svd(Mg)
    v = vh[-1].conj()
    pivot = v[np.argmax(np.abs(v))]
    v = v * (abs(pivot) / pivot)
    imag_residue = float(np.max(np.abs(v.imag)) / np.linalg.norm(v))
    l = v.real
    return l / np.linalg.norm(l), imag_residue


def _ratio_at(fact: PlantFactorization, w: WeightConfig, gamma: float) -> float:
    return sigma_min_ratio(build_M_gamma(fact, w, gamma_scalars(w, gamma)))


def scan_gamma(
    fact: PlantFactorization,
    w: WeightConfig,
    search: SearchConfig = SearchConfig(),
    workers: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    """sigma_min ratio on a uniform grid over the shrunk admissible interval."""
    lower, upper = admissible_interval(w)
    gammas = np.linspace(lower * (1.0 + search.margin), upper * (1.0 - search.margin), search.points)

    def chunk(part: np.ndarray) -> List[float]:
        return [_ratio_at(fact, w, float(gamma)) for gamma in part]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(chunk, np.array_split(gammas, workers))
            ratios = np.concatenate([np.asarray(part) for part in parts])
    else:
        ratios = np.asarray(chunk(gammas))
    return gammas, ratios


def _refine(fact: PlantFactorization, w: WeightConfig, bracket: Tuple[float, float, float], xtol: float) -> Tuple[float, float]:
    objective = lambda gamma: _ratio_at(fact, w, gamma)
    lo, mid, hi = bracket
    try:
        found = minimize_scalar(objective, bracket=bracket, method="golden", tol=xtol)
    except ValueError:
        # flat neighbours do not form a strict bracket
        found = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
    gamma = float(np.clip(found.x, lo, hi))
    return gamma, objective(gamma)


def find_gamma_opt(
    fact: PlantFactorization,
    w: WeightConfig,
    search: SearchConfig = SearchConfig(),
    workers: int = 1,
) -> GammaSearchResult:
    """Largest gamma in the admissible interval at which M_gamma is singular."""
    gammas, ratios = scan_gamma(fact, w, search, workers)
    interior = np.flatnonzero((ratios[1:-1] <= ratios[:-2]) & (ratios[1:-1] <= ratios[2:])) + 1
    logger.debug("Gamma scan: %d points, %d local minima", gammas.size, interior.size)

    candidates = []
    for i in interior:
        gamma, ratio = _refine(fact, w, (gammas[i - 1], gammas[i], gammas[i + 1]), search.xtol)
        logger.debug("Local minimum near gamma=%.8f refined to %.12f (ratio %.3e)", gammas[i], gamma, ratio)
        if ratio < search.accept:
            candidates.append((gamma, ratio))

    if not candidates:
        raise SynthesisError(
            "no_singular_gamma",
            f"M_gamma is not singular anywhere in {admissible_interval(w)} "
            f"(smallest ratio {float(np.min(ratios)):.3e})",
            {"threshold": search.accept},
        )

    gamma_opt, ratio_opt = max(candidates)
    l, imag_residue = null_vector(build_M_gamma(fact, w, gamma_scalars(w, gamma_opt)))
    if imag_residue > IMAGINARY_TOLERANCE:
        logger.warning("Null vector at gamma_opt=%.6f is not real: imaginary residue %.3e", gamma_opt, imag_residue)
    logger.info("gamma_opt = %.10f (sigma ratio %.3e, %d singular candidates)", gamma_opt, ratio_opt, len(candidates))
    return GammaSearchResult(
        gamma_opt=gamma_opt,
        curve=list(zip(gammas.tolist(), ratios.tolist())),
        l=l,
        ratio_at_opt=ratio_opt,
        candidates=sorted(gamma for gamma, _ in candidates),
        imag_residue=imag_residue,
    )
