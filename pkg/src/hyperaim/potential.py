"""The hyperbolic potential V(r) = [V0 + V1 tanh^2(lr) + V2 tanh^4(lr)] / sinh^2(lr).

Evaluation in the radial coordinate r and in x = 2 tanh^2(lr) - 1, the closed-form
Poschl-Teller spectrum of the V2 = 0 case, and a shape classification used to
seed the energy window of the eigenvalue search.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import optimize

from .errors import ConfigError, DomainError, UnsupportedParams
from .precision import Real

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PotentialParams:
    V0: float
    V1: float
    V2: float = 0.0
    lam: float = 1.0
    ell: int = 0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigError(f"lambda: must be positive, got {self.lam}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise ConfigError(f"ell: must be a non-negative integer, got {self.ell}")
        if not self.hbar > 0:
            raise ConfigError(f"hbar: must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise ConfigError(f"mass: must be positive, got {self.mass}")
        if self.V0 < 0:
            warnings.warn(f"V0 = {self.V0} < 0: the 1/r^2 wall is attractive", stacklevel=3)

    @property
    def kinetic(self):
        """hbar^2 / 2m."""
        return mpmath.mpf(self.hbar) ** 2 / (2 * mpmath.mpf(self.mass))

    def with_ell(self, ell: int) -> "PotentialParams":
        return PotentialParams(self.V0, self.V1, self.V2, self.lam, ell, self.hbar, self.mass)


def _mp(v):
    return v if isinstance(v, mpmath.mpf) else mpmath.mpf(v)


def v_of_r(r, p: PotentialParams) -> Real:
    r = _mp(r)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    z = _mp(p.lam) * r
    t2 = mpmath.tanh(z) ** 2
    return (p.V0 + p.V1 * t2 + p.V2 * t2 * t2) / mpmath.sinh(z) ** 2


def x_of_r(r, lam) -> Real:
    r = _mp(r)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    return 2 * mpmath.tanh(_mp(lam) * r) ** 2 - 1


def r_of_x(x, lam) -> Real:
    x = _mp(x)
    if not -1 < x < 1:
        raise DomainError(f"x must lie in (-1, 1), got {x}")
    return mpmath.atanh(mpmath.sqrt((x + 1) / 2)) / _mp(lam)


def v_of_x(x, p: PotentialParams) -> Real:
    x = _mp(x)
    if not -1 < x < 1:
        raise DomainError(f"x must lie in (-1, 1), got {x}")
    omega = x + 1
    phi = x - 1
    return -(phi / omega) * (p.V0 + p.V1 * omega / 2 + p.V2 * omega**2 / 4)


def pt_level_count(p: PotentialParams) -> int:
    """Highest level index N of the V2 = 0 spectrum; negative when nothing is bound."""
    a, b = _pt_roots(p)
    return math.floor((b - a - 1) / 2)


def _pt_roots(p: PotentialParams):
    if p.V2 != 0:
        raise UnsupportedParams("closed-form spectrum needs V2 = 0")
    if p.ell != 0:
        raise UnsupportedParams("closed-form spectrum needs ell = 0")
    scale = 2 * _mp(p.mass) / (_mp(p.hbar) ** 2 * _mp(p.lam) ** 2)
    g0 = mpmath.mpf(1) / 4 + scale * p.V0
    g1 = mpmath.mpf(1) / 4 - scale * p.V1
    if g0 < 0 or g1 < 0:
        raise UnsupportedParams("square-root arguments of the spectrum formula are negative")
    return mpmath.sqrt(g0), mpmath.sqrt(g1)


def pt_exact_spectrum(p: PotentialParams) -> list[Real]:
    """Closed-form bound-state energies E_0 < E_1 < ... of the V2 = 0, ell = 0 case."""
    a, b = _pt_roots(p)
    N = math.floor((b - a - 1) / 2)
    unit = _mp(p.hbar) ** 2 * _mp(p.lam) ** 2 / (2 * _mp(p.mass))
    return [-unit * (2 * n + 1 + a - b) ** 2 for n in range(N + 1)]


class Shape(enum.Enum):
    TwoExtrema = "TwoExtrema"
    InflectionOrMonotone = "InflectionOrMonotone"
    SingleMinimum = "SingleMinimum"


@dataclass(frozen=True)
class PotentialShape:
    classification: Shape
    extrema: list = field(default_factory=list)
    v_min: float | None = None
    # lowest value of V over the scan window, used as the energy floor when
    # there is no interior minimum (e.g. a finite well at the origin)
    v_floor: float = 0.0

    @property
    def floor(self) -> float:
        return self.v_min if self.v_min is not None else self.v_floor


def _v_np(r: np.ndarray, p: PotentialParams) -> np.ndarray:
    z = p.lam * r
    t2 = np.tanh(z) ** 2
    return (p.V0 + p.V1 * t2 + p.V2 * t2 * t2) / np.sinh(z) ** 2


def classify_potential(p: PotentialParams, points: int = 4000) -> PotentialShape:
    """Locate the extrema of V(r) on a log-spaced scan over (1e-4, 30)/lambda."""
    lo, hi = 1e-4 / p.lam, 30.0 / p.lam
    r = np.geomspace(lo, hi, points)
    V = lambda s: float(_v_np(np.asarray(s, dtype=float), p))

    def dV(s):
        h = 1e-6 * s
        return (V(s + h) - V(s - h)) / (2 * h)

    d = np.array([dV(s) for s in r])
    extrema = []
    kinds = []
    for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
        a, b = r[i], r[i + 1]
        rx = optimize.bisect(dV, a, b, xtol=1e-14 * b, rtol=1e-12)
        if d[i] < 0:
            # minimum: refine by golden section on V itself
            rx = optimize.golden(V, brack=(a, rx, b) if V(rx) < min(V(a), V(b)) else (a, b), tol=1e-12)
            kinds.append("min")
        else:
            kinds.append("max")
        extrema.append((float(rx), V(rx)))
    minima = [e for e, k in zip(extrema, kinds) if k == "min"]
    v_min = min(v for _, v in minima) if minima else None
    vals = _v_np(r, p)
    v_floor = float(min(vals.min(), v_min if v_min is not None else np.inf))
    if len(extrema) >= 2:
        shape = Shape.TwoExtrema
    elif minima:
        shape = Shape.SingleMinimum
    else:
        shape = Shape.InflectionOrMonotone
    log.debug("classified %s: %s extrema %s", p, shape.value, extrema)
    return PotentialShape(shape, extrema, v_min, v_floor)
