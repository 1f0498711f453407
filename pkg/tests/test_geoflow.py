import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from charfan.errors import FieldDomainError
from charfan.geoflow import (ConformalMetric, CubicIntegralState, F_eval, PhaseState, build_system22,
                             critical_angles_mod_pi, drift_study, fan_match, fibre_critical_points,
                             fibre_values, integrate_geodesic, invariant_jacobian, is_regular_change,
                             riemann_invariants, system22_residual, transport_residual, verify_P_vs_Fphi)
from charfan.pencil import classify_state, pencil_at

SIN3 = CubicIntegralState.from_strings(0, 1, "0", "0", "1")
LIOUVILLE = CubicIntegralState.from_strings(0, 0, "0", "1", "2 + sin(2*pi*x)")
PERTURBED = CubicIntegralState.from_strings(0, 0, "0", "1 + 0.1*y", "2 + sin(2*pi*x)")
FLAT = CubicIntegralState.from_strings(0, 1, "0.3", "-0.2", "1")
AB = ((0, 1), (1, 0), (1, 1))


def random_strict_states(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = AB[rng.integers(3)]
        u, v, L = (float(w) for w in rng.uniform((-2, -2, 0.5), (2, 2, 2)))
        if classify_state(build_system22(a, b), (u, v, L)) == "strict":
            out.append(CubicIntegralState.from_strings(a, b, repr(u), repr(v), repr(L)))
    return out


def test_fibre_is_sin3phi():
    phi = np.linspace(0, 2 * math.pi, 721)
    F, Fp, Fpp = fibre_values(SIN3, 0.2, 0.4, phi)
    assert np.max(np.abs(F - np.sin(3 * phi))) <= 1e-12
    assert np.max(np.abs(Fp - 3 * np.cos(3 * phi))) <= 1e-12
    assert np.max(np.abs(Fpp + 9 * np.sin(3 * phi))) <= 1e-12


def test_fibre_matches_cubic_eval():
    st_ = random_strict_states(1, seed=5)[0]
    L = st_.U(0, 0)[2]
    for phi in np.linspace(0, 6, 13):
        p = math.sqrt(L) * np.array([math.cos(phi), math.sin(phi)])
        assert fibre_values(st_, 0, 0, phi)[0] == pytest.approx(F_eval(st_, 0, 0, *p), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_F_odd_in_momentum(p1, p2, x, y):
    assert F_eval(LIOUVILLE, x, y, -p1, -p2) == -F_eval(LIOUVILLE, x, y, p1, p2)
    assert F_eval(LIOUVILLE, x, y, 0.0, 0.0) == 0.0


def test_critical_points_sin3phi():
    pts = fibre_critical_points(SIN3, 0, 0)
    assert len(pts) == 6
    for k, p in enumerate(pts):
        assert p.phi == pytest.approx(math.pi / 6 + k * math.pi / 3, abs=1e-12)
        assert p.value == pytest.approx((-1) ** k, abs=1e-12)
        assert not p.degenerate
    assert fan_match(SIN3, 0, 0) <= 1e-10
    assert np.allclose(critical_angles_mod_pi(pts), [math.pi / 6, math.pi / 2, 5 * math.pi / 6], atol=1e-12)


def test_critical_values_scale_with_metric():
    # u = v = 0: F on the fibre is L^(3/2) sin 3phi
    st_ = CubicIntegralState.from_strings(0, 1, "0", "0", "4")
    assert [p.value for p in fibre_critical_points(st_, 0, 0)] == pytest.approx([8, -8] * 3, abs=1e-12)


def test_P_is_multiple_of_Fphi():
    c, res = verify_P_vs_Fphi(SIN3, 0, 0)
    assert c == pytest.approx(1.0, abs=1e-13) and res <= 1e-12
    st_ = CubicIntegralState.from_strings(1, 1, "0.4", "-0.3", "2.25")
    c, res = verify_P_vs_Fphi(st_, 0, 0)
    assert c == pytest.approx(1 / 1.5, rel=1e-12)


def test_reducible_state_fibre():
    # a = b = 0, u = 0, v = 1: F = p2 (p1^2 + p2^2) / L, on the fibre sqrt(L) sin(phi)
    phi = np.linspace(0, 2 * math.pi, 50)
    F = fibre_values(LIOUVILLE, 0.3, 0.1, phi)[0]
    L = 2 + math.sin(2 * math.pi * 0.3)
    assert np.allclose(F, math.sqrt(L) * np.sin(phi), atol=1e-12)
    assert classify_state(LIOUVILLE.system, LIOUVILLE.U(0.3, 0.1)) != "strict"
    assert len(fibre_critical_points(LIOUVILLE, 0.3, 0.1)) == 2


def test_random_strict_states():
    for st_ in random_strict_states(20):
        assert len(fibre_critical_points(st_, 0, 0)) == 6
        assert fan_match(st_, 0, 0) <= 1e-8
        c, res = verify_P_vs_Fphi(st_, 0, 0)
        Fp = fibre_values(st_, 0, 0, np.linspace(0, 2 * math.pi, 360))[1]
        assert res <= 1e-8 * np.max(np.abs(Fp))
        assert c == pytest.approx(1 / math.sqrt(st_.U(0, 0)[2]), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(AB), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2))
def test_six_critical_points_iff_strict(ab, u, v, L):
    st_ = CubicIntegralState.from_strings(*ab, repr(u), repr(v), repr(L))
    cls = classify_state(st_.system, (u, v, L))
    pts = fibre_critical_points(st_, 0, 0)
    if any(p.degenerate for p in pts) or cls not in ("strict", "non-strict"):
        return
    assert len(pts) % 2 == 0
    assert (len(pts) == 6) == (cls == "strict")


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3))
def test_detA(a, b, u, v, L):
    A, _ = build_system22(a, b).matrices((u, v, L))
    assert np.linalg.det(A) == pytest.approx(u - 3 * a * L, abs=1e-10 * (1 + abs(a) * L + abs(u)))


def test_pencil_closed_form():
    for st_ in random_strict_states(10, seed=2):
        u, v, L = st_.U(0, 0)
        a, b = st_.a, st_.b
        want = [v + 3 * b * L, -u - 9 * a * L, v - 9 * b * L, -u + 3 * a * L]
        P = pencil_at(st_.system, (u, v, L))
        assert np.allclose(P.coeffs, want, rtol=1e-10, atol=1e-12)


def test_invariant_jacobian():
    U = (0.3, -0.4, 1.2)
    J, det = invariant_jacobian(1, 1, U)
    J2, det2 = invariant_jacobian(1, 1, U, h=1e-4)
    assert np.allclose(J, J2, atol=1e-6)
    assert abs(det) > 1e-3 and is_regular_change(1, 1, U)
    assert len(riemann_invariants(1, 1, U)) == 3


def test_flat_metric_drift():
    tr = integrate_geodesic(FLAT.metric, PhaseState(0.1, 0.2, 0.6, 0.8), 10.0, 1e-3, FLAT)
    for q in ("H", "F", "p1", "p2"):
        assert tr.drift(q) <= 1e-12
    assert tr.x[-1] == pytest.approx(0.1 + 6.0, abs=1e-10)


def test_liouville_drift_and_reference():
    start = PhaseState(0.0, 0.0, 1.0, 0.5)
    tr = integrate_geodesic(LIOUVILLE.metric, start, 10.0, 1e-3, LIOUVILLE, every=10)
    for q in ("H", "p2", "F"):
        assert tr.drift(q) <= 1e-8
    met = LIOUVILLE.metric

    def rhs(t, z):
        lam, (lx, ly) = met.value_and_gradient(z[0], z[1])
        k = (z[2] ** 2 + z[3] ** 2) / (2 * lam * lam)
        return [z[2] / lam, z[3] / lam, k * lx, k * ly]

    ref = solve_ivp(rhs, (0, 10), [0, 0, 1, 0.5], method="DOP853", rtol=1e-12, atol=1e-12)
    assert np.allclose([tr.x[-1], tr.y[-1], tr.p1[-1], tr.p2[-1]], ref.y[:, -1], atol=1e-7)


def test_liouville_step_halving():
    study = drift_study(LIOUVILLE.metric, PhaseState(0.0, 0.0, 1.0, 0.5), 10.0,
                        [0.01, 0.005, 0.0025], LIOUVILLE, ("H", "F"))
    for q in ("H", "F"):
        assert all(12 <= r <= 20 for r in study["ratio"][q]), study


def test_metric_domain():
    met = ConformalMetric.from_string("x")
    with pytest.raises(FieldDomainError):
        met.value(-1.0, 0.0)
    with pytest.raises(FieldDomainError):
        integrate_geodesic(met, PhaseState(0.5, 0, -1, 0), 5.0, 0.01)
    assert LIOUVILLE.periodicity_defect() <= 1e-12
    assert PERTURBED.periodicity_defect() > 0.05


def test_transport_exact_vs_perturbed():
    grid = [(x, y, phi) for x in (0.1, 0.45) for y in (0.2, 0.8) for phi in (0.3, 1.7, 4.0)]
    for st_ in (LIOUVILLE, FLAT, SIN3):
        assert max(abs(transport_residual(st_, *g)) for g in grid) <= 1e-12
        assert np.max(np.abs(system22_residual(st_, 0.3, 0.6))) <= 1e-12
    assert max(abs(transport_residual(PERTURBED, *g)) for g in grid) > 1e-2
    assert np.max(np.abs(system22_residual(PERTURBED, 0.3, 0.6))) > 1e-2


def test_trajectory_csv(tmp_path):
    tr = integrate_geodesic(LIOUVILLE.metric, PhaseState(0.9, 0.0, 1.0, 0.5), 1.0, 0.01, LIOUVILLE)
    tr.to_csv(tmp_path / "t.csv")
    with open(tmp_path / "t.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "p1", "p2", "H", "F"]
    assert len(rows) == 102
    assert all(0 <= float(r[1]) < 1 for r in rows[1:])
