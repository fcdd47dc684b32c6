import random

import mpmath
import pytest
import sympy as sp

from hyperaim.aim import (AimSettings, AimState, Status, _coefficient_parts, aim_iterate, bound_levels,
                          build_coefficients, delta_k, delta_sequence, energy_family, find_spectrum, initial_state)
from hyperaim.errors import ConfigError, NoRootsFound, OrderExhausted
from hyperaim.jet import Jet
from hyperaim.potential import PotentialParams, classify_potential, pt_exact_spectrum, v_of_x
from hyperaim.report import cached_levels

T1 = PotentialParams(1, -50, 2)
T2 = PotentialParams(1, -50, 0)
SET = AimSettings()


@pytest.fixture
def dps60():
    with mpmath.workdps(60):
        yield


# closed-form coefficient functions for the symbolic oracle
X, E = sp.symbols("x E")


def sym_coefficients(p: PotentialParams):
    # exact binary value of each float
    V0, V1, V2, lam, ell, hb, m = (sp.Rational(v) for v in (p.V0, p.V1, p.V2, p.lam, p.ell, p.hbar, p.mass))
    w, f, c = X + 1, X - 1, 3 * X + 1
    eta = sp.atanh(sp.sqrt(2 * X + 2) / 2) ** 2
    lam0 = -c / (2 * f * w)
    s0 = (-2 * m / (8 * hb**2 * lam**2 * f**2 * w**2 * eta)) * (
        4 * f * eta * V0 + 2 * f * w * eta * V1 + f * w**2 * eta * V2 + 4 * w * eta * E
        - 2 * hb**2 / m * lam**2 * ell * (ell + 1) * w)
    return lam0, s0


def test_settings_validation():
    with pytest.raises(ConfigError, match="e_min"):
        AimSettings(e_min=-1, e_max=-2)
    with pytest.raises(ConfigError, match="x0"):
        AimSettings(x0=1.0)
    with pytest.raises(ConfigError, match="k_max"):
        AimSettings(k_max=15, k_stride=10)
    with pytest.raises(ConfigError, match="scan_points"):
        AimSettings(scan_points=5)
    with pytest.raises(ConfigError, match="series_order"):
        AimSettings(k_max=100, series_order=101)
    assert AimSettings(k_max=50).order == 54


def test_precision_env_override(monkeypatch):
    monkeypatch.setenv("HYPERAIM_PRECISION_DIGITS", "60")
    assert AimSettings().precision_digits == 60
    monkeypatch.delenv("HYPERAIM_PRECISION_DIGITS")
    assert AimSettings().precision_digits == 100


def test_lambda0_constant_term():
    lam0, _ = build_coefficients(T1, SET, -20)
    assert lam0.coeffs[0] == mpmath.mpf("0.5")


def test_s0_matches_reduced_form(dps60):
    # ell = 0: s0 = m/(hbar^2 lam^2 phi^2 omega) [V(x) - E], evaluated directly
    rng = random.Random(11)
    for _ in range(20):
        p = PotentialParams(rng.uniform(0, 3), rng.uniform(-80, -1), rng.uniform(-5, 50), rng.uniform(0.5, 2), 0,
                            rng.uniform(0.5, 2), rng.uniform(0.5, 2))
        x0 = round(rng.uniform(-0.9, 0.9), 6)
        En = mpmath.mpf(rng.uniform(-60, -0.1))
        st = AimSettings(x0=x0, k_max=20)
        _, s0 = build_coefficients(p, st, En)
        x = mpmath.mpf(x0)
        phi, omega = x - 1, x + 1
        m, hb, lam = (mpmath.mpf(v) for v in (p.mass, p.hbar, p.lam))
        want = m / (hb**2 * lam**2 * phi**2 * omega) * (v_of_x(x, p) - En)
        assert abs(s0.coeffs[0] - want) <= abs(want) * mpmath.mpf(10) ** -30


def test_s0_table1_hand_value():
    _, s0 = build_coefficients(T1, SET, mpmath.mpf("-27.878950"))
    assert s0.coeffs[0] == pytest.approx(4.378950, abs=1e-12)


def test_s0_centrifugal_term_matches_symbolic(dps60):
    p = PotentialParams(2, -80, 120, 1.3, 2, 1.1, 0.8)
    lam0_s, s0_s = sym_coefficients(p)
    st = AimSettings(x0=0.2, k_max=20)
    for En in (-30, -1.5):
        _, s0 = build_coefficients(p, st, En)
        for j in range(4):
            want = sp.diff(s0_s.subs(E, sp.Rational(En)), X, j).subs(X, sp.Rational(0.2)) / sp.factorial(j)
            want = mpmath.mpf(sp.N(want, 50))
            assert abs(s0.coeffs[j] - want) <= abs(want) * mpmath.mpf(10) ** -40


def test_first_two_iterations_match_symbolic(dps60):
    p = T1
    lam0_s, s0_s = sym_coefficients(p)
    En = sp.Rational(-27, 1)
    s0_e = s0_s.subs(E, En)
    lam1 = sp.diff(lam0_s, X) + s0_e + lam0_s**2
    s1 = sp.diff(s0_e, X) + s0_e * lam0_s
    lam2 = sp.diff(lam1, X) + s1 + lam0_s * lam1
    s2 = sp.diff(s1, X) + s0_e * lam1
    lam0, s0 = build_coefficients(p, SET, -27)
    st = aim_iterate(initial_state(lam0, s0), lam0, s0)
    st2 = aim_iterate(st, lam0, s0)
    for jet, expr in ((st.lam, lam1), (st.s, s1), (st2.lam, lam2), (st2.s, s2)):
        want = mpmath.mpf(sp.N(expr.subs(X, 0), 50))
        assert abs(jet.coeffs[0] - want) <= abs(want) * mpmath.mpf(10) ** -40


def test_constant_jets():
    a, b = mpmath.mpf("0.75"), mpmath.mpf("-2.5")
    lam0, s0 = Jet.constant(a, 6), Jet.constant(b, 6)
    st1 = aim_iterate(initial_state(lam0, s0), lam0, s0)
    assert st1.lam.coeffs[0] == b + a**2 and st1.s.coeffs[0] == a * b
    st2 = aim_iterate(st1, lam0, s0)
    assert st2.lam.coeffs[0] == st1.s.coeffs[0] + a * st1.lam.coeffs[0]
    assert st2.s.coeffs[0] == b * st1.lam.coeffs[0]
    assert st2.k == 2 and st2.lam.order == 4 and st2.lam_prev.order == 5


def test_order_exhausted():
    lam0, s0 = Jet.constant(1, 1), Jet.constant(1, 1)
    st = aim_iterate(initial_state(lam0, s0), lam0, s0)
    with pytest.raises(OrderExhausted):
        aim_iterate(st, lam0, s0)
    with pytest.raises(OrderExhausted):
        delta_k(T2, AimSettings(k_max=20), -10, 30)


def test_delta_sign_change_brackets_ground_state():
    st = AimSettings(k_max=60)
    lo, hi = delta_k(T2, st, mpmath.mpf("-28.3"), 60), delta_k(T2, st, mpmath.mpf("-28.1"), 60)
    assert mpmath.sign(lo) * mpmath.sign(hi) < 0


def test_delta1_closed_form(dps60):
    rng = random.Random(12)
    lam0_s, s0_s = sym_coefficients(T1)
    for _ in range(10):
        En = sp.Rational(rng.randint(-38000, -1), 1000)
        s0_e = s0_s.subs(E, En)
        d1 = (sp.diff(lam0_s, X) + s0_e + lam0_s**2) * s0_e - lam0_s * (sp.diff(s0_e, X) + s0_e * lam0_s)
        want = mpmath.mpf(sp.N(d1.subs(X, 0), 50))
        got = delta_k(T1, SET, mpmath.mpf(En.p) / En.q, 1)
        assert abs(got - want) <= abs(want) * mpmath.mpf(10) ** -40


def test_family_matches_pointwise():
    st = AimSettings(k_max=40)
    fam = energy_family(T1, st, -38.0, -1e-6, [10, 25, 40])
    for En in ("-30.5", "-14.8", "-2.25"):
        En = mpmath.mpf(En)
        direct = delta_sequence(T1, st, En, [10, 25, 40])
        for k, v in direct.items():
            assert abs(fam[k](En) - v) <= abs(v) * mpmath.mpf(10) ** -40
            assert fam[k].sign(En) == mpmath.sign(v)


def test_reduced_and_full_forms_agree():
    full = _coefficient_parts(T2, 0.0, 34, SET.prec_bits)
    red = _coefficient_parts(T2, 0.0, 34, SET.prec_bits, reduced=True)
    for En in (-25, -3):
        vals = []
        for lam0, A, B in (full, red):
            s0 = A + B * En
            st = initial_state(lam0, s0)
            for _ in range(30):
                st = aim_iterate(st, lam0, s0)
            vals.append(st.lam.coeffs[0] * st.s_prev.coeffs[0] - st.lam_prev.coeffs[0] * st.s.coeffs[0])
        assert abs(vals[0] - vals[1]) <= abs(vals[0]) * mpmath.mpf(10) ** -80


@pytest.fixture(scope="module")
def pt120():
    return find_spectrum(T2, AimSettings())


def test_pt_ground_state_at_default_k(pt120):
    exact = pt_exact_spectrum(T2)
    e0 = pt120[0].energy
    assert abs(e0 - exact[0]) / abs(exact[0]) < 5e-9  # >= 8 significant digits
    assert pt120[0].status is Status.Converged


def test_pt_every_root_approaches_exact(pt120):
    exact = pt_exact_spectrum(T2)
    levels = bound_levels(pt120)
    assert len(levels) == len(exact)
    for r, ex in zip(levels, exact):
        errs = [abs(E - ex) for k, E in r.history[-4:]]
        assert all(a > b for a, b in zip(errs, errs[1:])), r.n
        assert errs[-1] < 0.05


def test_monotone_ground_state_drift(pt120):
    r = pt120[0]
    ks = [k for k, _ in r.history]
    drifts = [abs(float(r.history[i][1] - r.history[i - 1][1])) for i in range(1, len(ks))]
    stop = ks.index(r.k_converged)
    last3 = drifts[max(0, stop - 4):stop]
    assert all(a >= b for a, b in zip(last3, last3[1:]))


def test_ordering_and_window(pt120):
    levels = bound_levels(pt120)
    vmin = classify_potential(T2).v_min
    energies = [r.energy for r in levels]
    assert energies == sorted(energies) and len(set(energies)) == len(energies)
    assert all(vmin < e < 0 for e in energies)
    assert [r.n for r in levels] == list(range(len(levels)))


def test_converged_implies_small_residual(pt120):
    for r in pt120:
        if r.status is Status.Converged:
            assert r.residual < SET.conv_tol and r.k_converged is not None


def test_table3_ell3_single_level():
    levels = cached_levels(PotentialParams(2, -80, 120, 1.0, 3), AimSettings())
    assert len(levels) == 1
    assert -1.4486 - 1e-3 < levels[0].energy < -1.4470 + 1e-3


def test_no_bound_states():
    with pytest.raises(NoRootsFound):
        find_spectrum(PotentialParams(1, -1, 0))
    # negative region but empty closed-form spectrum
    with pytest.raises(NoRootsFound):
        find_spectrum(PotentialParams(1, -2, 0))


def test_pointwise_method_agrees_with_family():
    base = dict(k_max=20, k_stride=10, scan_points=40, e_min=-38.0, root_tol=1e-10)
    fam = find_spectrum(T2, AimSettings(**base))
    pw = find_spectrum(T2, AimSettings(method="pointwise", **base))
    assert len(fam) == len(pw)
    for a, b in zip(fam, pw):
        assert abs(a.energy - b.energy) < 1e-9
