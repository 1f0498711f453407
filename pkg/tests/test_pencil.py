import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charfan.errors import DegeneratePencilError
from charfan.geoflow import build_system22
from charfan.pencil import (PencilPolynomial, QuasiLinearSystem, characteristic_fan, classify_state,
                            hyperbolicity_scan, is_nonzero_pencil, pencil_at, rotate_coordinates)

from oracles import fan_scan, pencil_lstsq


def diag_system(lams):
    n = len(lams)
    names = tuple(f"u{m}" for m in range(n))
    A = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
    B = [[repr(float(lams[i])) if i == j else "0" for j in range(n)] for i in range(n)]
    return QuasiLinearSystem.from_strings(names, A, B)


def closed_form22(a, b, u, v, L):
    return np.array([v + 3 * b * L, -u - 9 * a * L, v - 9 * b * L, -u + 3 * a * L])


def test_diagonal_pencil():
    P = pencil_at(diag_system([0, 1]), (0, 0))
    assert np.allclose(P.coeffs, (0, -1, 1), atol=1e-14)


def test_system22_examples():
    P = pencil_at(build_system22(0, 1), (0, 0, 1))
    assert np.allclose(P.coeffs, (3, 0, -9, 0), atol=1e-13)
    P = pencil_at(build_system22(0, 0), (1, 2, 1))
    assert np.allclose(P.coeffs, (2, -1, 2, -1), atol=1e-13)


def test_interpolation_matches_lstsq_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        A, B = rng.normal(size=(2, 4, 4))
        names = ("a", "b", "c", "d")
        sys_ = QuasiLinearSystem.from_strings(names, [[repr(float(x)) for x in r] for r in A],
                                              [[repr(float(x)) for x in r] for r in B])
        P = pencil_at(sys_, (0, 0, 0, 0))
        assert np.allclose(P.coeffs, pencil_lstsq(A, B), rtol=1e-10, atol=1e-10)


def test_nonzero_pencil():
    assert is_nonzero_pencil(PencilPolynomial((3, 0, -9, 0)))
    assert not is_nonzero_pencil(PencilPolynomial((0, 0, 0, 0)))
    for L in (0.5, 1.0, 3.0):
        assert not is_nonzero_pencil(pencil_at(build_system22(0, 0), (0, 0, L)))


def test_fan_examples():
    fan = characteristic_fan(PencilPolynomial((3, 0, -9, 0)))
    assert fan.strict
    assert np.allclose(fan.angles, [math.pi / 6, math.pi / 2, 5 * math.pi / 6], atol=1e-12)
    fan = characteristic_fan(pencil_at(diag_system([0, 1]), (0, 0)))
    assert fan.strict and np.allclose(fan.angles, [0, math.pi / 4], atol=1e-12)
    fan = characteristic_fan(pencil_at(build_system22(0, 0), (0, 1, 1)))
    assert not fan.strict
    assert np.allclose(fan.angles, [math.pi / 2], atol=1e-12)


def test_fan_degenerate_raises():
    with pytest.raises(DegeneratePencilError):
        characteristic_fan(PencilPolynomial((0.0, 0.0, 0.0)))


def test_double_root_at_infinity():
    # P = alpha * beta^0 ... : c = (1, 0, 0) means P = alpha^2, root pi/2 twice
    fan = characteristic_fan(PencilPolynomial((1.0, 0.0, 0.0)))
    assert fan.angles == [math.pi / 2, math.pi / 2]
    assert not fan.strict


def test_fan_matches_scan_oracle():
    rng = np.random.default_rng(2)
    sys_ = build_system22(1, 1)
    hits = 0
    for _ in range(30):
        u = (rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 2))
        P = pencil_at(sys_, u)
        fan = characteristic_fan(P)
        roots = fan_scan(lambda p: float(P.on_circle(p)))
        if fan.strict:
            hits += 1
            assert np.allclose(fan.angles, roots, atol=1e-9)
        for a, r in zip(fan.angles, fan.residuals):
            assert r <= 1e-8 * P.norm()
    assert hits >= 10


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.1, 5))
def test_homogeneity(u, v, L, al, be, s):
    P = pencil_at(build_system22(1, 0), (u, v, L))
    lhs = P(s * al, s * be)
    rhs = s ** 3 * P(al, be)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs) + s ** 3 * P.norm() * (abs(al) + abs(be)) ** 3)


def test_closed_form_random_states():
    rng = np.random.default_rng(0)
    for m in range(100):
        a, b = [(0, 1), (1, 0), (1, 1)][m % 3]
        u, v = rng.uniform(-2, 2, 2)
        L = rng.uniform(0.5, 2)
        P = pencil_at(build_system22(a, b), (u, v, L))
        ref = closed_form22(a, b, u, v, L)
        assert np.all(np.abs(np.array(P.coeffs) - ref) <= 1e-10 * np.max(np.abs(ref)))


def _angle_dist(p, q):
    d = abs(p - q) % math.pi
    return min(d, math.pi - d)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.1, 2.0, 3.0])
def test_rotation_covariance(theta):
    sys_ = build_system22(0, 1)
    u = (0.1, -0.2, 1.3)
    fan0 = characteristic_fan(pencil_at(sys_, u))
    fan1 = characteristic_fan(pencil_at(rotate_coordinates(sys_, theta), u))
    assert fan0.strict and fan1.strict
    shifted = sorted((a + theta) % math.pi for a in fan0.angles)
    for p in fan1.angles:
        assert min(_angle_dist(p, q) for q in shifted) <= 1e-9


def test_rotation_examples():
    sys_ = diag_system([0, 1])
    assert characteristic_fan(pencil_at(rotate_coordinates(sys_, 0.0), (0, 0))).angles == \
        characteristic_fan(pencil_at(sys_, (0, 0))).angles
    fan = characteristic_fan(pencil_at(rotate_coordinates(sys_, math.pi / 4), (0, 0)))
    assert np.allclose(fan.angles, [math.pi / 4, math.pi / 2], atol=1e-12)


def test_scan():
    rep = hyperbolicity_scan(build_system22(0, 1), (-0.2, -0.2, 0.8), (0.2, 0.2, 1.2), 5)
    assert rep.counts["strict"] == 125
    rep = hyperbolicity_scan(diag_system([0.0, 1.0, 2.0]), (0, 0, 0), (1, 1, 1), 3)
    assert rep.counts["strict"] == 27
    rep = hyperbolicity_scan(build_system22(0, 0), (-1, -1, 0.5), (1, 1, 2), 5)
    degenerate = [p for p, lab in rep.nodes if lab == "pencil-degenerate"]
    assert degenerate and all(p[0] == 0 and p[1] == 0 for p in degenerate)


def test_classify_domain_error():
    sys_ = QuasiLinearSystem.from_strings(("p",), [["1/p"]], [["1"]])
    assert classify_state(sys_, (0.0,)) == "domain-error"


def test_shape_validation():
    with pytest.raises(ValueError):
        QuasiLinearSystem.from_strings(("p", "q"), [["1", "0"]], [["1", "0"], ["0", "1"]])
