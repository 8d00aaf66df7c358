"""Inner-outer factorization of the delayed internal feedback plant.

P(s) = R(s) / (1 + e^{-hs} R(s)),  R(s) = k (s-a)/(s+b),  k > 1, a > b > 0, h > 0

factors as P = (N_i / M) N_o with

    N_i(s) = (s-a)/(s+a)                                      (finite dimensional inner)
    N_o(s) = k(s+a) / (k(s+a) + (s-b) e^{-hs})                (outer, invertible)
    M(s)   = ((s+b) + k(s-a) e^{-hs}) / ((s-b) e^{-hs} + k(s+a))   (infinite dimensional inner)

M carries the infinitely many right half plane poles of P.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import newton

from ..core.config import PlantParams, WeightConfig
from ..core.lti import (
    DelayRationalTF, Evaluatable, FrequencyGrid, RationalTF, magnitude_on_grid, poly,
)
from ..utils.errors import SynthesisError

logger = logging.getLogger(__name__)

INNER_SAMPLES = 20


@dataclass(frozen=True)
class PlantFactorization:
    """P = (N_i / M) N_o together with the raw plant parameters."""
    params: PlantParams
    N_i: RationalTF
    N_o: DelayRationalTF
    M: DelayRationalTF

    @property
    def zeros(self) -> List[float]:
        """Right half plane zeros of N_i (the single zero s = a for this family)."""
        return [self.params.a]

    @property
    def plant(self) -> DelayRationalTF:
        """P evaluated directly from R, independent of the factors."""
        return plant_tf(self.params)

    def N(self, s):
        """N = N_i N_o."""
        return self.N_i(s) * self.N_o(s)

    def reconstructed(self, s):
        """(N_i / M) N_o evaluated from the factors."""
        return self.N_i(s) / self.M(s) * self.N_o(s)


def plant_tf(params: PlantParams) -> DelayRationalTF:
    """P = k(s-a) / ((s+b) + k(s-a) e^{-hs})."""
    k, a, b, h = params.k, params.a, params.b, params.h
    return DelayRationalTF(
        num0=poly(-k * a, k),
        num1=poly(0.0),
        den0=poly(b, 1.0),
        den1=poly(-k * a, k),
        h=h,
    )


def factor_plant(params: PlantParams) -> PlantFactorization:
    """Build N_i, N_o and M for a validated parameter set."""
    k, a, b, h = params.k, params.a, params.b, params.h
    N_i = RationalTF(poly(-a, 1.0), poly(a, 1.0))
    N_o = DelayRationalTF(
        num0=poly(k * a, k),
        num1=poly(0.0),
        den0=poly(k * a, k),
        den1=poly(-b, 1.0),
        h=h,
    )
    M = DelayRationalTF(
        num0=poly(b, 1.0),
        num1=poly(-k * a, k),
        den0=poly(k * a, k),
        den1=poly(-b, 1.0),
        h=h,
    )
    logger.debug("Factored plant k=%g a=%g b=%g h=%g", k, a, b, h)
    return PlantFactorization(params=params, N_i=N_i, N_o=N_o, M=M)


def check_inner(
    f: Evaluatable,
    grid: FrequencyGrid,
    tol: float,
    samples: int = INNER_SAMPLES,
    seed: Optional[int] = 0,
) -> bool:
    """True iff |f(jw)| = 1 on the grid and f(s)f(-s) = 1 off the axis, within ``tol``."""
    if np.max(np.abs(magnitude_on_grid(f, grid.points) - 1.0)) > tol:
        return False
    rng = np.random.default_rng(seed)
    s = rng.uniform(-1.0, 1.0, samples) + 1j * rng.uniform(-10.0, 10.0, samples)
    return bool(np.max(np.abs(f(s) * f(-s) - 1.0)) <= tol)


def outer_gain_bound(params: PlantParams, grid: FrequencyGrid) -> float:
    """sup over the grid of |(jw-b)/(k(jw+a))|; N_o is invertible when this is < 1."""
    ratio = RationalTF(poly(-params.b, 1.0), poly(params.k * params.a, params.k))
    return float(np.max(magnitude_on_grid(ratio, grid.points)))


def inner_decomposition(params: PlantParams) -> Tuple[DelayRationalTF, RationalTF]:
    """The pair (m, f) with M = (m + f) / (1 + m f(-s)).

    m(s) = ((s-a)/(s+a)) e^{-hs} is inner and f(s) = (s+b)/(k(s+a)).
    """
    k, a, b, h = params.k, params.a, params.b, params.h
    m = DelayRationalTF(poly(0.0), poly(-a, 1.0), poly(a, 1.0), poly(0.0), h)
    f = RationalTF(poly(b, 1.0), poly(k * a, k))
    return m, f


def check_decomposition(fact: PlantFactorization, s) -> float:
    """max |M - (m + f)/(1 + m f(-s))| over the points ``s``."""
    m, f = inner_decomposition(fact.params)
    s = np.asarray(s, dtype=complex)
    rebuilt = (m(s) + f(s)) / (1.0 + m(s) * f(-s))
    return float(np.max(np.abs(fact.M(s) - rebuilt)))


def dual_problem_data(fact: PlantFactorization, weights: WeightConfig) -> Dict[str, object]:
    """Variables of the dual problem with finitely many unstable poles.

    The two-block problem for this plant is the dual of the weighted
    sensitivity problem for plants M_n/M_d N_o; swapping the roles gives
    W1' = W2, W2' = W1, M_d' = N_i, M_n' = M and N_o' = N_o^{-1}.
    """
    W1 = RationalTF.constant(weights.rho)
    W2 = RationalTF(poly(1.0, weights.alpha), poly(weights.beta, 1.0))
    return {
        "W1": W2,
        "W2": W1,
        "M_d": fact.N_i,
        "M_n": fact.M,
        "N_o": fact.N_o.inverse(),
    }


def delay_poles(params: PlantParams, count: int = 5, start: int = 1, iterations: int = 20) -> List[complex]:
    """Upper half plane zeros of (s+b) + k(s-a)e^{-hs}, i.e. unstable poles of P.

    Each root is refined by Newton's method from the asymptote
    s_n ~ ln(k)/h + j(2n+1)pi/h; the real parts approach ln(k)/h as n grows.
    """
    k, a, b, h = params.k, params.a, params.b, params.h

    def characteristic(s):
        return (s + b) + k * (s - a) * np.exp(-h * s)

    def slope(s):
        return 1.0 + k * np.exp(-h * s) * (1.0 - h * (s - a))

    roots = []
    for n in range(start, start + count):
        guess = complex(math.log(k) / h, (2 * n + 1) * math.pi / h)
        try:
            root = newton(characteristic, guess, fprime=slope, maxiter=iterations, tol=1e-13)
        except RuntimeError as e:
            raise SynthesisError("root_refinement_failed", f"Newton refinement failed for n={n}: {e}")
        roots.append(complex(root))
    return roots
