"""Closed form optimal controller C_opt = (k_f + K_2FIR(s)) / K_1(s).

    K_1(s)       = k (l21 s + l20) / (gamma (beta + s))
    k_f          = (k b_gamma l11 - gamma l21) / (gamma^2 - alpha^2)
    K_2FIR(s)    = A(s) + B(s) e^{-hs}

A and B share the denominator D(s) = ((1 - gamma^2 beta^2) + (gamma^2 - alpha^2) s^2)(s - a);
its roots a and +-j omega_gamma are cancelled inside K_2FIR, so they are
removable singularities of C_opt.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .hinf_synthesis import GammaSearchResult, gamma_scalars
from .plant_factory import PlantFactorization
from ..core.config import WeightConfig
from ..core.lti import RationalTF, SLike, evaluate_removable, poly
from ..utils.errors import ArtifactError, SynthesisError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Controller:
    """C_opt = (k_f + A(s) + B(s) e^{-hs}) / K1(s)."""
    k_f: float
    K1: RationalTF
    A: RationalTF
    B: RationalTF
    h: float
    gamma_opt: float

    @property
    def removable_points(self) -> List[complex]:
        """Roots of the shared denominator of A and B."""
        return [complex(root) for root in self.A.den.roots()]

    def k2_fir(self, s: SLike) -> SLike:
        """A(s) + B(s) e^{-hs}, evaluated through the removable singularities."""
        raw = lambda points: self.A(points) + self.B(points) * np.exp(-self.h * points)
        return evaluate_removable(raw, s, self.removable_points)

    def __call__(self, s: SLike) -> SLike:
        return eval_controller(self, s)

    def to_dict(self) -> Dict[str, Any]:
        """JSON document: fixed field order, ascending coefficients."""
        coefficients = lambda p: [float(c) for c in p.coef]
        return {
            "gamma_opt": float(self.gamma_opt),
            "k_f": float(self.k_f),
            "h": float(self.h),
            "K1": {"num": coefficients(self.K1.num), "den": coefficients(self.K1.den)},
            "A": {"num": coefficients(self.A.num), "den": coefficients(self.A.den)},
            "B": {"num": coefficients(self.B.num), "den": coefficients(self.B.den)},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Controller':
        try:
            ratio = lambda key: RationalTF(poly(*data[key]["num"]), poly(*data[key]["den"]))
            return cls(
                k_f=float(data["k_f"]),
                K1=ratio("K1"),
                A=ratio("A"),
                B=ratio("B"),
                h=float(data["h"]),
                gamma_opt=float(data["gamma_opt"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ArtifactError("parse_failed", f"Invalid controller document: {e!r}")


def eval_controller(c: Controller, s: SLike) -> SLike:
    """(k_f + A(s) + B(s)e^{-hs}) / K1(s); PoleHit where K1 vanishes."""
    s = np.asarray(s, dtype=complex)
    inverse_K1 = c.K1.inverse()(s)
    return (c.k_f + c.k2_fir(s)) * inverse_K1


def synthesize(
    fact: PlantFactorization,
    w: WeightConfig,
    result: GammaSearchResult,
    k1_lead: Optional[float] = None,
) -> Controller:
    """Assemble C_opt from gamma_opt and the null vector l.

    ``k1_lead`` fixes the free scale of l so that the leading coefficient of
    the K1 numerator, k*l21, equals it; the controller itself is unchanged.
    """
    k, a, b, h = fact.params.k, fact.params.a, fact.params.b, fact.params.h
    gamma = result.gamma_opt
    l = np.asarray(result.l, dtype=float)
    if k1_lead is not None:
        if l[3] == 0:
            raise SynthesisError("degenerate_l", "l21 = 0: the K1 gauge cannot be fixed")
        l = l * (k1_lead / (k * l[3]))
    l10, l11, l20, l21 = l
    if l20 == 0 and l21 == 0:
        raise SynthesisError("degenerate_l", "l20 = l21 = 0 makes K1 identically zero", {"l": l.tolist()})

    g = gamma_scalars(w, gamma)
    alpha, beta = w.alpha, w.beta
    l1 = poly(l10, l11)
    l2 = poly(l20, l21)
    Fnum = poly(g.a_gamma, g.b_gamma)
    weight = gamma * poly(beta, -1.0)

    K1 = RationalTF(k * l2, gamma * poly(beta, 1.0))
    k_f = (k * g.b_gamma * l11 - gamma * l21) / (gamma ** 2 - alpha ** 2)
    D = poly(1.0 - gamma ** 2 * beta ** 2, 0.0, gamma ** 2 - alpha ** 2) * poly(-a, 1.0)

    kf_plus_A = k * poly(a, 1.0) * Fnum * l1 + weight * l2 * poly(b, 1.0)
    # k_f cancels the cubic term exactly; keep A strictly proper
    A_num = Polynomial((kf_plus_A - k_f * D).coef[:3])
    B_num = poly(-b, 1.0) * Fnum * l1 + k * weight * l2 * poly(-a, 1.0)

    controller = Controller(
        k_f=float(k_f),
        K1=K1,
        A=RationalTF(A_num, D),
        B=RationalTF(B_num, D),
        h=h,
        gamma_opt=gamma,
    )
    logger.info("Controller assembled: k_f=%.6g, K1=%r", controller.k_f, controller.K1)
    return controller
