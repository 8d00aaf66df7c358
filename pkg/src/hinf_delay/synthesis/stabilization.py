"""Bezout identity N X + M Y = 1 and the parameterization of stabilizing controllers.

With P = N/M, N = N_i N_o, every stabilizing controller is

    C = (X + M Q) / (Y - N Q),   Q in H-infinity,  Y - N Q != 0,

and substituting Q1 = N_o Q gives the closed-loop maps

    (1 + PC)^{-1}      = M (Y - N_i Q1)
    PC (1 + PC)^{-1}   = N (X + M Q) = 1 - M (Y - N_i Q1).

Y is finite dimensional (interpolation at the zeros of N_i); X is only ever
evaluated pointwise from X = ((1 - M Y)/N_i) N_o^{-1}.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import lagrange

from .plant_factory import PlantFactorization
from ..core.lti import REMOVABLE_RADIUS, Evaluatable, RationalTF, SLike, evaluate_removable, poly
from ..utils.errors import EvaluationError, SynthesisError

logger = logging.getLogger(__name__)

DEGENERATE_TOLERANCE = 1e-12


def interpolate_bezout(zeros: Sequence[complex], m_values: Sequence[complex]) -> RationalTF:
    """Proper stable Y with Y(z_i) = 1/M(z_i) at distinct zeros z_i.

    One zero gives the constant 1/M(z_1). For n zeros Y = p(s)/(s+1)^{n-1}
    where p has degree n-1 and interpolates p(z_i) = (z_i+1)^{n-1}/M(z_i).
    """
    zeros = np.asarray(zeros, dtype=complex)
    m_values = np.asarray(m_values, dtype=complex)
    n = zeros.size
    if n == 0:
        raise SynthesisError("repeated_zeros", "At least one right half plane zero is required")

    scale = max(1.0, float(np.max(np.abs(zeros))))
    gaps = np.where(np.eye(n, dtype=bool), np.inf, np.abs(zeros[:, None] - zeros[None, :]))
    if np.min(gaps) < DEGENERATE_TOLERANCE * scale:
        raise SynthesisError("repeated_zeros", "Zeros of N_i must be distinct", {"zeros": zeros.tolist()})
    small = np.abs(m_values) < DEGENERATE_TOLERANCE
    if np.any(small):
        raise SynthesisError(
            "degenerate_m",
            "M vanishes at a zero of N_i; the interpolation condition Y = 1/M has no solution",
            {"zeros": zeros[small].tolist()},
        )

    targets = (zeros + 1.0) ** (n - 1) / m_values
    if n == 1:
        numerator = poly(_realify(targets)[0])
    else:
        # lagrange returns a poly1d with descending coefficients
        numerator = poly(*_realify(lagrange(zeros, targets).coef[::-1]))
    denominator = poly(1.0, 1.0) ** (n - 1) if n > 1 else poly(1.0)
    return RationalTF(numerator, denominator)


def _realify(values: np.ndarray) -> np.ndarray:
    """Drop imaginary parts that are pure round-off (conjugate-symmetric data)."""
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if np.all(np.abs(values.imag) <= 1e-12 * max(1.0, float(np.max(np.abs(values))))):
        return values.real
    return values


@dataclass(frozen=True)
class BezoutPair:
    """Y finite dimensional, X evaluated pointwise, with N X + M Y = 1."""
    fact: PlantFactorization
    Y: RationalTF

    def X(self, s: SLike) -> SLike:
        """X = ((1 - M Y)/N_i) N_o^{-1}; removable at the zeros of N_i."""
        fact = self.fact

        def raw(points):
            return (1.0 - fact.M(points) * self.Y(points)) / fact.N_i(points) / fact.N_o(points)

        return evaluate_removable(raw, s, fact.zeros)

    def residual(self, s: SLike) -> SLike:
        """|N X + M Y - 1| pointwise."""
        return np.abs(self.fact.N(s) * self.X(s) + self.fact.M(s) * self.Y(s) - 1.0)


def solve_bezout(fact: PlantFactorization) -> BezoutPair:
    """Solve N X + M Y = 1 by interpolation at the right half plane zeros of N_i."""
    zeros = fact.zeros
    m_values = [complex(fact.M(z)) for z in zeros]
    Y = interpolate_bezout(zeros, m_values)
    logger.debug("Bezout interpolant Y = %r", Y)
    return BezoutPair(fact=fact, Y=Y)


def controller_from_Q(fact: PlantFactorization, bez: BezoutPair, Q1: Evaluatable) -> Callable[[SLike], SLike]:
    """C = (X + M Q)/(Y - N Q) with Q = N_o^{-1} Q1, evaluated pointwise."""

    def controller(s: SLike) -> SLike:
        s = np.asarray(s, dtype=complex)
        q1 = np.asarray(Q1(s))
        denominator = bez.Y(s) - fact.N_i(s) * q1
        small = np.abs(denominator) < DEGENERATE_TOLERANCE
        if np.any(small):
            raise EvaluationError(
                "degenerate_denominator",
                "Y - N Q vanishes; the parameter Q does not define a controller here",
                {"s": str(complex(np.asarray(s).ravel()[np.flatnonzero(small.ravel())[0]]))},
            )
        numerator = bez.X(s) + fact.M(s) * q1 / fact.N_o(s)
        return numerator / denominator

    return controller


def sensitivity(fact: PlantFactorization, C: Evaluatable) -> Callable[[SLike], SLike]:
    """S = (1 + P C)^{-1} from the raw plant, not from the factors."""
    plant = fact.plant

    def S(s: SLike) -> SLike:
        loop = 1.0 + plant(s) * C(s)
        if np.any(np.abs(loop) < DEGENERATE_TOLERANCE):
            raise EvaluationError("pole_hit", "1 + PC vanishes: closed-loop pole on the evaluation set")
        return 1.0 / loop

    return S


def recover_Q1(fact: PlantFactorization, bez: BezoutPair, C: Evaluatable) -> Callable[[SLike], SLike]:
    """Q1 = (Y - S/M)/N_i with S = (1 + PC)^{-1}; removable at s = a."""
    S = sensitivity(fact, C)

    def raw(s):
        return (bez.Y(s) - S(s) / fact.M(s)) / fact.N_i(s)

    def Q1(s: SLike) -> SLike:
        return evaluate_removable(raw, s, fact.zeros)

    return Q1


def q1_removable_residual(fact: PlantFactorization, bez: BezoutPair, C: Evaluatable,
                          radius: float = REMOVABLE_RADIUS) -> float:
    """max over the zeros a of |Y(a) - S(a)/M(a)|, read off at a -/+ radius.

    Q1 is bounded at a only if this numerator vanishes there; a pole of C at
    a leaves it finite and nonzero. The two one-sided samples are averaged,
    which is the linear extrapolation to s = a.
    """
    S = sensitivity(fact, C)

    def numerator(s):
        return bez.Y(s) - S(s) / fact.M(s)

    residual = 0.0
    for z in fact.zeros:
        sides = numerator(np.array([z - radius, z + radius], dtype=complex))
        residual = max(residual, float(abs(np.mean(sides))))
    return residual
