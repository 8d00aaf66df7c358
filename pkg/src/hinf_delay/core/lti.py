"""Exact-evaluation transfer functions and grid based H-infinity norms.

Two representations cover everything the synthesis needs:

- ``RationalTF``: num(s)/den(s) with real coefficients.
- ``DelayRationalTF``: (num0(s) + num1(s)e^{-hs}) / (den0(s) + den1(s)e^{-hs}).

Both are immutable, evaluate elementwise on scalars or numpy arrays, and raise
``EvaluationError("pole_hit")`` when the denominator vanishes at a requested
point. Polynomials are ``numpy.polynomial.Polynomial`` (ascending coefficients,
Horner evaluation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial

from .config import GridConfig
from ..utils.errors import ConfigurationError, EvaluationError, pole_hit

SLike = Union[complex, float, np.ndarray]
PolyLike = Union[Polynomial, Sequence[float], float]

POLE_TOLERANCE = 1e-12
REMOVABLE_RADIUS = 1e-4


class Evaluatable(Protocol):
    """Anything that maps complex frequencies to complex values."""

    def __call__(self, s: SLike) -> SLike: ...


def poly(*coeffs: complex) -> Polynomial:
    """Polynomial from ascending coefficients with trailing zeros trimmed."""
    return as_poly(list(coeffs))


def as_poly(value: PolyLike) -> Polynomial:
    """Coerce ``value`` to a trimmed ``Polynomial``."""
    if isinstance(value, Polynomial):
        coef = value.coef
    else:
        coef = np.atleast_1d(np.asarray(value))
    if coef.size == 0:
        coef = np.zeros(1)
    if np.iscomplexobj(coef) and np.all(coef.imag == 0):
        coef = coef.real
    return Polynomial(coef.astype(np.result_type(coef, float))).trim()


def is_zero(p: Polynomial) -> bool:
    return not np.any(p.coef)


def _as_complex(s: SLike) -> np.ndarray:
    return np.asarray(s, dtype=complex)


def _scalar_or_array(values: np.ndarray) -> SLike:
    return values[()] if values.ndim == 0 else values


def _check_denominator(where: str, s: np.ndarray, den: np.ndarray, degree: int) -> None:
    """Degree-scaled test |den(s)| < 1e-12 (1 + |s|^deg)."""
    bad = np.abs(den) < POLE_TOLERANCE * (1.0 + np.abs(s) ** degree)
    if np.any(bad):
        index = np.flatnonzero(bad.ravel())[0]
        raise pole_hit(where, complex(s.ravel()[index]), abs(den.ravel()[index]))


@dataclass(frozen=True)
class RationalTF:
    """Ratio of two real-coefficient polynomials."""
    num: Polynomial
    den: Polynomial

    def __post_init__(self) -> None:
        object.__setattr__(self, "num", as_poly(self.num))
        object.__setattr__(self, "den", as_poly(self.den))
        if is_zero(self.den):
            raise EvaluationError("degenerate_denominator", "RationalTF denominator is the zero polynomial")

    @classmethod
    def constant(cls, value: float) -> 'RationalTF':
        return cls(poly(value), poly(1.0))

    @property
    def degree(self) -> Tuple[int, int]:
        """(numerator degree, denominator degree)."""
        return self.num.degree(), self.den.degree()

    def limit_at_infinity(self) -> float:
        """Value of f(s) as |s| -> infinity; raises for improper functions."""
        num_deg, den_deg = self.degree
        if is_zero(self.num) or num_deg < den_deg:
            return 0.0
        if num_deg > den_deg:
            raise EvaluationError("pole_hit", "Improper transfer function is unbounded at infinity")
        return self.num.coef[-1] / self.den.coef[-1]

    def inverse(self) -> 'RationalTF':
        return RationalTF(self.den, self.num)

    def mirrored(self) -> 'RationalTF':
        """f(-s)."""
        flip = lambda p: Polynomial(p.coef * (-1.0) ** np.arange(p.coef.size))
        return RationalTF(flip(self.num), flip(self.den))

    def __call__(self, s: SLike) -> SLike:
        return eval_rational(self, s)

    def __neg__(self) -> 'RationalTF':
        return RationalTF(-self.num, self.den)

    def __add__(self, other: Union['RationalTF', float]) -> 'RationalTF':
        other = _as_rational(other)
        if self.den == other.den:
            return RationalTF(self.num + other.num, self.den)
        return RationalTF(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: Union['RationalTF', float]) -> 'RationalTF':
        return self + (-_as_rational(other))

    def __rsub__(self, other: Union['RationalTF', float]) -> 'RationalTF':
        return _as_rational(other) - self

    def __mul__(self, other: Union['RationalTF', float]) -> 'RationalTF':
        other = _as_rational(other)
        return RationalTF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Union['RationalTF', float]) -> 'RationalTF':
        return self * _as_rational(other).inverse()

    def __repr__(self) -> str:
        return f"RationalTF(num={list(self.num.coef)}, den={list(self.den.coef)})"


def _as_rational(value: Union[RationalTF, float]) -> RationalTF:
    return value if isinstance(value, RationalTF) else RationalTF.constant(value)


@dataclass(frozen=True)
class DelayRationalTF:
    """(num0 + num1 e^{-hs}) / (den0 + den1 e^{-hs}) with a single delay h >= 0."""
    num0: Polynomial
    num1: Polynomial
    den0: Polynomial
    den1: Polynomial
    h: float

    def __post_init__(self) -> None:
        for name in ("num0", "num1", "den0", "den1"):
            object.__setattr__(self, name, as_poly(getattr(self, name)))
        if not (np.isfinite(self.h) and self.h >= 0):
            raise ConfigurationError("invalid_plant_params", f"Delay must satisfy h >= 0 (got h={self.h})")
        if is_zero(self.den0) and is_zero(self.den1):
            raise EvaluationError("degenerate_denominator", "Quasi-polynomial denominator is identically zero")

    @classmethod
    def from_rational(cls, f: RationalTF) -> 'DelayRationalTF':
        return cls(f.num, poly(0.0), f.den, poly(0.0), 0.0)

    @property
    def denominator_degree(self) -> int:
        return max(self.den0.degree(), self.den1.degree())

    def inverse(self) -> 'DelayRationalTF':
        return DelayRationalTF(self.den0, self.den1, self.num0, self.num1, self.h)

    def numerator(self, s: SLike) -> SLike:
        s = _as_complex(s)
        return _scalar_or_array(self.num0(s) + self.num1(s) * np.exp(-self.h * s))

    def denominator(self, s: SLike) -> SLike:
        s = _as_complex(s)
        return _scalar_or_array(self.den0(s) + self.den1(s) * np.exp(-self.h * s))

    def __call__(self, s: SLike) -> SLike:
        return eval_delay(self, s)

    def __repr__(self) -> str:
        return (f"DelayRationalTF(num0={list(self.num0.coef)}, num1={list(self.num1.coef)}, "
                f"den0={list(self.den0.coef)}, den1={list(self.den1.coef)}, h={self.h})")


def eval_rational(f: RationalTF, s: SLike) -> SLike:
    """num(s)/den(s) by Horner evaluation."""
    s = _as_complex(s)
    den = f.den(s)
    _check_denominator("rational transfer function", s, np.asarray(den), f.den.degree())
    return _scalar_or_array(np.asarray(f.num(s) / den))


def eval_delay(f: DelayRationalTF, s: SLike) -> SLike:
    """(num0(s) + num1(s)e^{-hs}) / (den0(s) + den1(s)e^{-hs})."""
    s = _as_complex(s)
    delay = np.exp(-f.h * s)
    den = f.den0(s) + f.den1(s) * delay
    _check_denominator("delay transfer function", s, np.asarray(den), f.denominator_degree)
    return _scalar_or_array(np.asarray((f.num0(s) + f.num1(s) * delay) / den))


def evaluate_removable(
    raw: Callable[[np.ndarray], np.ndarray],
    s: SLike,
    singularities: Iterable[complex],
    radius: float = REMOVABLE_RADIUS,
) -> SLike:
    """Evaluate ``raw`` away from removable singularities.

    Points closer than ``radius`` to a listed singularity p are replaced by
    linear interpolation between raw(p - radius*u) and raw(p + radius*u), u
    being the direction from p to the point (1 when the point is p itself).
    """
    s = _as_complex(s)
    flat = s.ravel()
    anchors = np.full(flat.shape, np.nan + 0j)
    for p in singularities:
        hit = np.isnan(anchors) & (np.abs(flat - p) < radius)
        anchors[hit] = p

    near = ~np.isnan(anchors)
    out = np.empty(flat.shape, dtype=complex)
    if np.any(~near):
        out[~near] = raw(flat[~near])
    if np.any(near):
        offset = flat[near] - anchors[near]
        distance = np.abs(offset)
        direction = np.where(distance > 0, offset / np.where(distance > 0, distance, 1.0), 1.0)
        below = raw(anchors[near] - radius * direction)
        above = raw(anchors[near] + radius * direction)
        out[near] = below + (above - below) * (distance / radius + 1.0) / 2.0
    return _scalar_or_array(out.reshape(s.shape))


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing, finite, non-negative angular frequencies (rad/s)."""
    points: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float).ravel()
        if points.size == 0:
            raise ConfigurationError("invalid_grid", "Frequency grid is empty")
        if not np.all(np.isfinite(points)) or np.any(points < 0):
            raise ConfigurationError("invalid_grid", "Frequency grid must be finite and non-negative")
        if np.any(np.diff(points) <= 0):
            raise ConfigurationError("invalid_grid", "Frequency grid must be strictly increasing")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def log_spaced(cls, omega_min: float = 1e-3, omega_max: float = 1e4, points: int = 2000) -> 'FrequencyGrid':
        GridConfig(omega_min=omega_min, omega_max=omega_max, points=points)
        return cls(np.geomspace(omega_min, omega_max, points))

    @classmethod
    def from_config(cls, config: GridConfig) -> 'FrequencyGrid':
        return cls.log_spaced(config.omega_min, config.omega_max, config.points)

    @property
    def s(self) -> np.ndarray:
        """The grid on the imaginary axis, j*omega."""
        return 1j * self.points

    def __len__(self) -> int:
        return self.points.size

    def refined(self, indices: Iterable[int], factor: int = 10) -> 'FrequencyGrid':
        """Add ``factor`` times the local density around each index; keeps all old points."""
        pts = self.points
        extra = [pts]
        for i in indices:
            lo, hi = pts[max(i - 1, 0)], pts[min(i + 1, pts.size - 1)]
            if hi > lo:
                span = 2 if 0 < i < pts.size - 1 else 1
                extra.append(np.linspace(lo, hi, span * factor + 1))
        return FrequencyGrid(np.unique(np.concatenate(extra)))

    def __repr__(self) -> str:
        return f"FrequencyGrid({len(self)} points, {self.points[0]:g}..{self.points[-1]:g} rad/s)"


def magnitude_on_grid(f: Union[Evaluatable, Sequence[Evaluatable]], omegas: np.ndarray) -> np.ndarray:
    """|f(jw)|, or sqrt(sum |f_i(jw)|^2) for a stacked sequence of functions."""
    s = 1j * np.asarray(omegas, dtype=float)
    blocks = f if isinstance(f, (list, tuple)) else [f]
    squared = sum(np.abs(np.broadcast_to(block(s), s.shape)) ** 2 for block in blocks)
    return np.sqrt(squared)


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices i with values[i] >= both neighbours (one neighbour at the ends)."""
    values = np.asarray(values)
    if values.size < 2:
        return np.arange(values.size)
    left = np.concatenate(([True], values[1:] >= values[:-1]))
    right = np.concatenate((values[:-1] >= values[1:], [True]))
    return np.flatnonzero(left & right)


def grid_peak(
    f: Union[Evaluatable, Sequence[Evaluatable]],
    grid: FrequencyGrid,
    refine_factor: int = 10,
    max_peaks: Optional[int] = 16,
) -> Tuple[float, float, FrequencyGrid, np.ndarray]:
    """Supremum search on a grid refined around its largest local maxima.

    Returns (omega_peak, peak_value, evaluated_grid, values_on_that_grid).
    """
    values = magnitude_on_grid(f, grid.points)
    if refine_factor > 1 and max_peaks != 0:
        peaks = local_maxima(values)
        if max_peaks is not None:
            peaks = peaks[np.argsort(values[peaks])[::-1][:max_peaks]]
        if peaks.size:
            grid = grid.refined(peaks, refine_factor)
            values = magnitude_on_grid(f, grid.points)
    index = int(np.argmax(values))
    return float(grid.points[index]), float(values[index]), grid, values


def hinf_norm_on_grid(
    f: Union[Evaluatable, Sequence[Evaluatable]],
    grid: FrequencyGrid,
    refine_factor: int = 10,
    max_peaks: Optional[int] = 16,
) -> float:
    """max over the (refined) grid of |f(jw)|, stacked blocks combined in 2-norm."""
    return grid_peak(f, grid, refine_factor, max_peaks)[1]
