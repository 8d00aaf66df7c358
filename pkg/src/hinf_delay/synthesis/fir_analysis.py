"""Impulse response of K_2FIR(s) = A(s) + B(s) e^{-hs} by residues.

A is strictly proper and B is biproper over the shared denominator D with
simple roots p. Then

    L^{-1}{A}(t)            = sum_p res_A(p) e^{pt}
    L^{-1}{B e^{-hs}}(t)    = direct_B delta(t-h) + sum_p res_B(p) e^{p(t-h)}  (t >= h)

and the response vanishes for t > h exactly when
res_A(p) + res_B(p) e^{-hp} = 0 at every pole.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .controller_assembly import Controller
from ..core.lti import SLike
from ..utils.errors import SynthesisError

logger = logging.getLogger(__name__)

REPEATED_ROOT_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class ImpulseExpansion:
    poles: np.ndarray
    residues_A: np.ndarray
    residues_B: np.ndarray
    direct_B: float
    h: float

    @property
    def delta_atom(self) -> Tuple[float, float]:
        """(time, weight) of the delta(t-h) term."""
        return self.h, self.direct_B

    def frequency_response(self, s: SLike) -> SLike:
        """Partial fraction form sum res/(s-p) + (direct_B + sum res_B/(s-p)) e^{-hs}."""
        s = np.asarray(s, dtype=complex)
        shape = s.shape
        s = s.reshape(-1, 1)
        delay = np.exp(-self.h * s[:, 0])
        a_part = np.sum(self.residues_A / (s - self.poles), axis=1)
        b_part = self.direct_B + np.sum(self.residues_B / (s - self.poles), axis=1)
        values = (a_part + b_part * delay).reshape(shape)
        return values[()] if values.ndim == 0 else values


def expand(c: Controller) -> ImpulseExpansion:
    """Residues of A and B at the simple roots of their shared denominator."""
    if c.A.den != c.B.den:
        raise SynthesisError("repeated_denominator_roots", "A and B must share one denominator")
    den = c.A.den
    poles = den.roots()
    if poles.size > 1:
        gaps = np.where(np.eye(poles.size, dtype=bool), np.inf, np.abs(poles[:, None] - poles[None, :]))
        if np.min(gaps) < REPEATED_ROOT_TOLERANCE:
            raise SynthesisError(
                "repeated_denominator_roots",
                "Shared denominator has repeated roots; confluent expansion is not supported",
                {"poles": [str(p) for p in poles]},
            )

    slope = den.deriv()(poles)
    direct_B = c.B.limit_at_infinity()
    residues_A = c.A.num(poles) / slope
    residues_B = (c.B.num(poles) - direct_B * den(poles)) / slope
    logger.debug("Impulse expansion poles=%s direct_B=%.6g", poles, direct_B)
    return ImpulseExpansion(
        poles=poles.astype(complex),
        residues_A=np.asarray(residues_A, dtype=complex),
        residues_B=np.asarray(residues_B, dtype=complex),
        direct_B=float(direct_B),
        h=c.h,
    )


def impulse_response(e: ImpulseExpansion, t) -> SLike:
    """Regular part of L^{-1}{K_2FIR}(t) for t >= 0; the delta atom is not included."""
    t = np.asarray(t, dtype=float)
    flat = t.reshape(-1, 1)
    after = flat >= e.h
    weights = np.where(after, e.residues_A + e.residues_B * np.exp(-e.poles * e.h), e.residues_A)
    values = np.sum(weights * np.exp(e.poles * flat), axis=1).real.reshape(t.shape)
    return values[()] if values.ndim == 0 else values


def finite_support_residual(e: ImpulseExpansion) -> float:
    """max_p |res_A(p) + res_B(p) e^{-hp}| / max_p |res_A(p)|; 0 when A vanishes."""
    scale = float(np.max(np.abs(e.residues_A))) if e.residues_A.size else 0.0
    if scale == 0:
        return 0.0
    tail = np.abs(e.residues_A + e.residues_B * np.exp(-e.poles * e.h))
    return float(np.max(tail) / scale)


def sample_trace(e: ImpulseExpansion, t_max: float, dt: float) -> Tuple[np.ndarray, np.ndarray, List[Tuple[float, float]]]:
    """Samples on [0, t_max] plus the delta atoms that fall inside the window."""
    t = np.arange(0.0, t_max + dt / 2, dt)
    atoms = [e.delta_atom] if e.h <= t_max else []
    return t, impulse_response(e, t), atoms
