"""Asymptotic iteration method for the hyperbolic potential.

With x = 2 tanh^2(lr) - 1 the radial equation becomes y'' = lam0(x) y' + s0(x) y.
The recurrence

    lam_k = lam_{k-1}' + s_{k-1} + lam0 lam_{k-1}
    s_k   = s_{k-1}'   + s0 lam_{k-1}

is run on Taylor jets at x0, and eigenvalues are the energy roots of the
termination determinant delta_k = lam_k s_{k-1} - lam_{k-1} s_k at x0.

s0 is affine in E and lam0 does not depend on E, so lam_k and s_k are
polynomials in E. The default search carries that polynomial through the
recurrence (a parameter-width jet in t = (E - center)/scale), which yields
delta_k(E) for every k from a single pass. The per-energy evaluation is kept as
``delta_k`` and as the ``pointwise`` search method.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ConfigError, DomainError, NoRootsFound, OrderExhausted
from .jet import GUARD_BITS, Jet, _shift
from .potential import PotentialParams, classify_potential
from .precision import Real, default_digits, digits_to_bits, from_man_exp, man_exp, to_real

log = logging.getLogger(__name__)

SERIES_GUARD = 4


@dataclass(frozen=True)
class AimSettings:
    x0: float = 0.0
    k_max: int = 120
    precision_digits: int = field(default_factory=default_digits)
    e_min: float | None = None  # None: 1.05 times the potential minimum
    e_max: float = -1e-6
    scan_points: int = 400
    root_tol: float = 1e-12
    conv_tol: float = 1e-8
    k_stride: int = 10
    series_order: int | None = None  # None: k_max + 4
    method: str = "family"  # or "pointwise"

    def __post_init__(self):
        if not -1 < self.x0 < 1:
            raise ConfigError(f"x0: must lie in (-1, 1), got {self.x0}")
        if self.k_stride < 1:
            raise ConfigError(f"k_stride: must be positive, got {self.k_stride}")
        if self.k_max < 2 * self.k_stride:
            raise ConfigError(f"k_max: must be at least 2*k_stride = {2 * self.k_stride}, got {self.k_max}")
        if self.precision_digits < 20:
            raise ConfigError(f"precision_digits: must be at least 20, got {self.precision_digits}")
        if not self.e_max < 0:
            raise ConfigError(f"e_max: must be negative, got {self.e_max}")
        if self.e_min is not None and not self.e_min < self.e_max:
            raise ConfigError(f"e_min: must be below e_max = {self.e_max}, got {self.e_min}")
        if self.scan_points < 10:
            raise ConfigError(f"scan_points: must be at least 10, got {self.scan_points}")
        if not self.root_tol > 0:
            raise ConfigError(f"root_tol: must be positive, got {self.root_tol}")
        if not self.conv_tol > 0:
            raise ConfigError(f"conv_tol: must be positive, got {self.conv_tol}")
        if self.series_order is not None and self.k_max > self.series_order - 2:
            raise ConfigError(f"series_order: must be at least k_max + 2 = {self.k_max + 2}, got {self.series_order}")
        if self.method not in ("family", "pointwise"):
            raise ConfigError(f"method: must be 'family' or 'pointwise', got {self.method!r}")

    @property
    def order(self) -> int:
        return self.series_order if self.series_order is not None else self.k_max + SERIES_GUARD

    @property
    def prec_bits(self) -> int:
        return digits_to_bits(self.precision_digits) + GUARD_BITS

    def strides(self) -> list[int]:
        ks = list(range(self.k_stride, self.k_max + 1, self.k_stride))
        if ks[-1] != self.k_max:
            ks.append(self.k_max)
        return ks


@dataclass(frozen=True)
class AimState:
    lam: Jet
    s: Jet
    lam_prev: Jet | None
    s_prev: Jet | None
    k: int


class Status(enum.Enum):
    Converged = "Converged"
    MaxIterations = "MaxIterations"
    LostRoot = "LostRoot"


@dataclass(frozen=True)
class EigenResult:
    n: int  # -1 for a LostRoot entry
    energy: Real
    k_converged: int | None
    residual: float
    status: Status
    history: tuple = ()  # (k, E) along the tracked root


# coefficient functions


def _component_jets(x0, order: int, prec: int):
    omega = Jet.affine(1, 1, order, x0, prec)
    phi = Jet.affine(1, -1, order, x0, prec)
    chi = Jet.affine(3, 1, order, x0, prec)
    eta = Jet.affine(0.5, 0.5, order, x0, prec).sqrt().arctanh().square()
    return omega, phi, chi, eta


@functools.lru_cache(maxsize=32)
def _coefficient_parts(p: PotentialParams, x0: float, order: int, prec: int, reduced: bool = False):
    """(lam0, A, B) jets with s0 = A + E*B.

    ``reduced`` uses the ell = 0 form with the eta factors cancelled by hand.
    """
    if not -1 < x0 < 1:
        raise DomainError(f"x0 must lie in (-1, 1), got {x0}")
    bits = prec + GUARD_BITS
    with mpmath.workprec(bits):
        m, hbar, lam = (to_real(v, bits) for v in (p.mass, p.hbar, p.lam))
        V0, V1, V2 = (to_real(v, bits) for v in (p.V0, p.V1, p.V2))
        cent = 2 * hbar**2 / m * lam**2 * p.ell * (p.ell + 1)
        pre = -2 * m / (8 * hbar**2 * lam**2)
        red = m / (hbar**2 * lam**2)
    omega, phi, chi, eta = _component_jets(x0, order, prec)
    lam0 = -chi / (2 * (phi * omega))
    if reduced:
        if p.ell:
            raise ValueError("the reduced form needs ell = 0")
        # s0 = m/(hbar^2 lam^2 phi^2 omega) [V(x) - E], V = -(phi/omega)[V0 + V1 omega/2 + V2 omega^2/4]
        base = (phi * phi * omega).__rtruediv__(red)
        inner = omega * (V1 / 2) + (omega * omega) * (V2 / 4) + V0
        vx = -(phi / omega) * inner
        return lam0, base * vx, -base
    den = phi * phi * (omega * omega) * eta
    pref = den.__rtruediv__(pre)
    brA = (phi * eta) * (4 * V0) + (phi * omega * eta) * (2 * V1) + (phi * omega * omega * eta) * V2 - omega * cent
    brB = (omega * eta) * 4
    return lam0, pref * brA, pref * brB


def build_coefficients(p: PotentialParams, settings: AimSettings, E) -> tuple[Jet, Jet]:
    """lam0 and s0 jets at settings.x0 with the energy substituted."""
    lam0, A, B = _coefficient_parts(p, float(settings.x0), settings.order, settings.prec_bits)
    return lam0, A + B * E


# recurrence


def initial_state(lam0: Jet, s0: Jet) -> AimState:
    return AimState(lam0, s0, None, None, 0)


def aim_iterate(state: AimState, lam0: Jet, s0: Jet) -> AimState:
    n = state.lam.order
    if n < 1:
        raise OrderExhausted(f"series order spent at k = {state.k}; raise the order or lower k_max")
    lam, s = state.lam.truncate(n - 1), state.s.truncate(n - 1)
    l0 = lam0.truncate(n - 1)
    new_lam = state.lam.derivative() + s + l0 * lam
    new_s = state.s.derivative() + s0.truncate(n - 1) * lam
    return AimState(new_lam, new_s, state.lam, state.s, state.k + 1)


def _delta_const(state: AimState) -> Real:
    with mpmath.workprec(state.lam.prec * 2):
        return state.lam.value() * state.s_prev.value() - state.lam_prev.value() * state.s.value()


def _check_k(k: int, settings: AimSettings):
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > settings.order:
        raise OrderExhausted(f"k = {k} exceeds the series order {settings.order}")


def delta_k(p: PotentialParams, settings: AimSettings, E, k: int) -> Real:
    """Termination determinant at x0 after k iterations, energy substituted numerically."""
    return delta_sequence(p, settings, E, [k])[k]


def delta_sequence(p: PotentialParams, settings: AimSettings, E, ks: Sequence[int]) -> dict[int, Real]:
    """delta_k(E) for every k in ``ks`` from one pass of the recurrence."""
    ks = sorted(set(ks))
    for k in ks:
        _check_k(k, settings)
    lam0, s0 = build_coefficients(p, settings, E)
    state = initial_state(lam0, s0)
    out = {}
    for k in range(1, ks[-1] + 1):
        state = aim_iterate(state, lam0, s0)
        if k in ks:
            out[k] = _delta_const(state)
    return out


# energy-polynomial family


def _dyadic_window(lo: float, hi: float) -> tuple[Real, Real]:
    """Dyadic center c and power-of-two scale w with [lo, hi] inside [c - w, c + w]."""
    half = (hi - lo) / 2
    w = 2.0 ** math.ceil(math.log2(half * 1.01))
    c = round((lo + hi) / 2 * 2**30) / 2**30
    return mpmath.mpf(c), mpmath.mpf(w)


@dataclass(frozen=True)
class DeltaPolynomial:
    """delta_k(E) = 2**exp * sum_i coeffs[i] t**i with t = (E - center)/scale."""

    k: int
    coeffs: tuple
    exp: int
    center: Real
    scale: Real

    def _t(self, E) -> tuple[int, int]:
        # t = M / 2**q exactly; E, center, scale are all dyadic
        mE, eE = man_exp(E, 4096) if not isinstance(E, mpmath.mpf) else man_exp(E, 0)
        mc, ec = man_exp(self.center, 0)
        _, es = man_exp(self.scale, 0)  # scale = 2**es (mantissa 1)
        q0 = min(eE, ec) if mc else eE
        num = (mE << (eE - q0)) - ((mc << (ec - q0)) if mc else 0)
        s = q0 - es
        if s >= 0:
            return num << s, 0
        return num, -s

    def _scaled(self, M: int, q: int) -> int:
        c = self.coeffs
        deg = len(c) - 1
        acc = int(c[deg])
        for i in range(deg - 1, -1, -1):
            acc = acc * M + (int(c[i]) << (q * (deg - i)))
        return acc

    def sign(self, E) -> int:
        M, q = self._t(E)
        v = self._scaled(M, q)
        return (v > 0) - (v < 0)

    def __call__(self, E) -> Real:
        M, q = self._t(E)
        deg = len(self.coeffs) - 1
        return from_man_exp(self._scaled(M, q), self.exp - q * deg)

    def signs(self, Ms: np.ndarray, q: int) -> np.ndarray:
        """Signs at t = Ms / 2**q for an object array of integers."""
        c = self.coeffs
        deg = len(c) - 1
        acc = np.full(Ms.shape, int(c[deg]), dtype=object)
        for i in range(deg - 1, -1, -1):
            acc = acc * Ms + (int(c[i]) << (q * (deg - i)))
        return np.array([(v > 0) - (v < 0) for v in acc], dtype=int)


def _poly_product(a: Jet, b: Jet) -> tuple[np.ndarray, int]:
    return np.convolve(a.mantissas[0], b.mantissas[0]), a.exponent + b.exponent


def _delta_polynomial(state: AimState, center: Real, scale: Real) -> DeltaPolynomial:
    t1, e1 = _poly_product(state.lam, state.s_prev)
    t2, e2 = _poly_product(state.lam_prev, state.s)
    n = max(len(t1), len(t2))
    t1 = np.concatenate([t1, np.zeros(n - len(t1), dtype=object)])
    t2 = np.concatenate([t2, np.zeros(n - len(t2), dtype=object)])
    e = min(e1, e2)
    c = (t1 << (e1 - e)) - (t2 << (e2 - e))
    bits = max(int(abs(v)).bit_length() for v in c)
    keep = 2 * state.lam.prec
    if bits > keep:
        c = _shift(c, keep - bits)
        e += bits - keep
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    return DeltaPolynomial(state.k, tuple(int(v) for v in c), int(e), center, scale)


def energy_family(p: PotentialParams, settings: AimSettings, e_lo: float, e_hi: float,
                  ks: Sequence[int] | None = None) -> dict[int, DeltaPolynomial]:
    """delta_k as exact-evaluable polynomials in E, valid on [e_lo, e_hi]."""
    ks = set(ks) if ks is not None else set(range(1, settings.k_max + 1))
    top = max(ks)
    _check_k(top, settings)
    center, scale = _dyadic_window(e_lo, e_hi)
    lam0, A, B = _coefficient_parts(p, float(settings.x0), settings.order, settings.prec_bits)
    # s0 = A + (center + scale t) B as a width-2 jet in t
    s0 = (A + B * center) + _widen(B * scale)
    state = initial_state(lam0, s0)
    out = {}
    for k in range(1, top + 1):
        state = aim_iterate(state, lam0, s0)
        if k in ks:
            out[k] = _delta_polynomial(state, center, scale)
    return out


def _widen(a: Jet) -> Jet:
    """Move a width-1 jet into column 1 (multiply by t)."""
    mant = np.zeros((a.order + 1, 2), dtype=object)
    mant[:, 1] = a.mantissas[:, 0]
    return Jet(mant, a.exponent, a.x0, a.prec)


# spectrum search


def _energy_window(p: PotentialParams, settings: AimSettings) -> tuple[float, float, float]:
    shape = classify_potential(p)
    floor = shape.floor
    if settings.e_min is not None:
        lo = settings.e_min
    else:
        if floor >= 0:
            raise NoRootsFound(f"potential has no negative region (minimum {floor:.6g}); no bound states")
        lo = 1.05 * floor
    if not lo < settings.e_max:
        raise ConfigError(f"e_min: must be below e_max = {settings.e_max}, got {lo}")
    return lo, settings.e_max, floor


class _FamilySource:
    def __init__(self, p, settings, lo, hi):
        self.polys = energy_family(p, settings, lo, hi, settings.strides())
        self.q = 48
        c = self.polys[settings.k_max]
        self.center, self.scale = c.center, c.scale

    def grid(self, lo: float, hi: float, count: int):
        # scan energies snapped to a dyadic t-grid so one integer Horner pass covers all
        E = np.linspace(lo, hi, count)
        t = (E - float(self.center)) / float(self.scale)
        Ms = np.array([int(round(v * 2**self.q)) for v in t], dtype=object)
        with mpmath.workprec(256):
            energies = [self.center + self.scale * from_man_exp(int(M), -self.q) for M in Ms]
        return Ms, energies

    def scan(self, k: int, lo, hi, count):
        Ms, energies = self.grid(lo, hi, count)
        return energies, self.polys[k].signs(Ms, self.q)

    def sign(self, k: int, E) -> int:
        return self.polys[k].sign(E)


class _PointwiseSource:
    def __init__(self, p, settings, lo, hi):
        self.p, self.settings = p, settings
        self.ks = settings.strides()
        self.cache = {}

    def _grid_values(self, lo, hi, count):
        key = (lo, hi, count)
        if key not in self.cache:
            with mpmath.workprec(128):
                energies = [mpmath.mpf(float(E)) for E in np.linspace(lo, hi, count)]
            vals = [delta_sequence(self.p, self.settings, E, self.ks) for E in energies]
            self.cache[key] = energies, vals
        return self.cache[key]

    def scan(self, k, lo, hi, count):
        energies, vals = self._grid_values(lo, hi, count)
        return energies, np.array([int(mpmath.sign(v[k])) for v in vals], dtype=int)

    def sign(self, k, E) -> int:
        return int(mpmath.sign(delta_k(self.p, self.settings, E, k)))


def _bisect(sign: Callable, a, b, sa: int, tol: float) -> Real:
    with mpmath.workprec(160):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        while b - a > tol:
            m = (a + b) / 2
            sm = sign(m)
            if sm == 0:
                return m
            if sm == sa:
                a = m
            else:
                b = m
        return (a + b) / 2


def _roots_at(source, k: int, lo: float, hi: float, settings: AimSettings) -> list[Real]:
    energies, signs = source.scan(k, lo, hi, settings.scan_points)
    roots = []
    for i in range(len(energies) - 1):
        sa, sb = signs[i], signs[i + 1]
        if sa == 0:
            roots.append(energies[i])
        elif sa * sb < 0:
            roots.append(_bisect(lambda E: source.sign(k, E), energies[i], energies[i + 1], sa, settings.root_tol))
    if signs[-1] == 0:
        roots.append(energies[-1])
    return roots


@dataclass
class _Track:
    points: list  # (k, E)
    alive: bool = True

    @property
    def last(self):
        return self.points[-1][1]


def _match(tracks: list[_Track], roots: list[Real], k: int) -> list[_Track]:
    """Greedy nearest-neighbour matching within 3x the local root spacing."""
    live = [t for t in tracks if t.alive]
    prev = sorted(float(t.last) for t in live)
    pairs = []
    for ti, t in enumerate(live):
        x = float(t.last)
        gaps = [abs(x - y) for y in prev if y != x]
        spacing = min(gaps) if gaps else math.inf
        window = 3 * spacing
        for ri, r in enumerate(roots):
            d = abs(float(r) - x)
            if d <= window:
                pairs.append((d, ti, ri))
    pairs.sort()
    used_t, used_r = set(), set()
    for d, ti, ri in pairs:
        if ti in used_t or ri in used_r:
            continue
        used_t.add(ti)
        used_r.add(ri)
        live[ti].points.append((k, roots[ri]))
    for ti, t in enumerate(live):
        if ti not in used_t:
            t.alive = False
    fresh = [_Track([(k, r)]) for ri, r in enumerate(roots) if ri not in used_r]
    return tracks + fresh


def find_spectrum(p: PotentialParams, settings: AimSettings | None = None) -> list[EigenResult]:
    """Bound-state energies from the roots of delta_k, tracked over k = stride, 2*stride, ..., k_max.

    Returns the levels at k_max sorted by energy with n = 0, 1, ..., followed by
    any roots that were present one stride earlier but vanished at k_max
    (status LostRoot, n = -1).
    """
    settings = settings or AimSettings()
    lo, hi, floor = _energy_window(p, settings)
    source = (_FamilySource if settings.method == "family" else _PointwiseSource)(p, settings, lo, hi)
    tracks: list[_Track] = []
    seen_any = False
    ks = settings.strides()
    for k in ks:
        roots = [r for r in _roots_at(source, k, lo, hi, settings) if r > floor]
        seen_any = seen_any or bool(roots)
        log.debug("k=%d roots %s", k, [mpmath.nstr(r, 12) for r in roots])
        lost_before = {id(t) for t in tracks if not t.alive}
        tracks = _match(tracks, roots, k)
        if k == ks[-1]:
            lost = [t for t in tracks if not t.alive and id(t) not in lost_before]
    if not seen_any:
        raise NoRootsFound(f"no sign change of delta_k in [{lo:.6g}, {hi:.6g}] for k <= {settings.k_max}")
    final = sorted((t for t in tracks if t.alive), key=lambda t: t.last)
    if not final:
        raise NoRootsFound(f"no root of delta_k survives to k = {settings.k_max}")
    results = [_result(n, t, settings) for n, t in enumerate(final)]
    results += [_result(-1, t, settings, lost=True) for t in sorted(lost, key=lambda t: t.last)]
    return results


def _result(n: int, t: _Track, settings: AimSettings, lost: bool = False) -> EigenResult:
    pts = t.points
    drifts = [abs(float(pts[i][1] - pts[i - 1][1])) for i in range(1, len(pts))]
    residual = drifts[-1] if drifts else math.inf
    k_conv = None
    # first stride after which every later drift stays below conv_tol
    for i in range(len(drifts)):
        if all(d < settings.conv_tol for d in drifts[i:]):
            k_conv = pts[i + 1][0]
            break
    if lost:
        status = Status.LostRoot
    elif residual < settings.conv_tol and pts[-1][0] == settings.k_max:
        status = Status.Converged
    else:
        status = Status.MaxIterations
    return EigenResult(n, t.last, k_conv if status is Status.Converged else None, residual, status, tuple(pts))


def bound_levels(results: Sequence[EigenResult]) -> list[EigenResult]:
    """Drop LostRoot entries."""
    return [r for r in results if r.status is not Status.LostRoot]
