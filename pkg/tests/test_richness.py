import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charfan.errors import CoincidentAnglesError, InfiniteSlopeError, NotRichError
from charfan.library import (PERTURBED_GOLDEN, constant_system, epsilon_system, non_rich_library,
                             perturbed_epsilon, rich_library, two_component_system)
from charfan.richness import (DiagonalSystem, G_spread, a_coeff, b_coeff, check_richness,
                              reconstruct_G, residual_Phi, residual_R, rotate_fan, verify_cocycle_identity)

from oracles import residual_Phi_fd, richardson

# residual_Phi at each library golden point, frozen from AD and confirmed by the
# fourth-order difference oracle (agreement ~1e-7 relative)
GOLDEN_PHI = {
    "epsilon-perturbed": -319.0657553550697,
    "product-speed": -0.15251490207457427,
    "quadratic-sum": -8.235294117648152,
    "angle-coupled": -0.3916419734410004,
    "decoupled-perturbed": 0.1466687426612271,
    "epsilon-n4-coupled": 0.6249999999999878,
}


def as_callables(sys_):
    return [lambda x, e=e: e(tuple(x)) for e in sys_.phi]


def test_a_coeff_examples():
    swap = DiagonalSystem.from_speeds(("r1", "r2"), ["r2", "r1"])
    assert a_coeff(swap, 0, 1, (0.0, 1.0)) == pytest.approx(1.0, rel=1e-14)
    assert a_coeff(epsilon_system(), 0, 1, (0, 1, 2)) == pytest.approx(-1.0, rel=1e-14)
    dec = DiagonalSystem.from_speeds(("r1", "r2"), ["r1", "2 + r2^2"])
    assert a_coeff(dec, 0, 1, (0.3, 0.4)) == 0.0


def test_b_coeff_examples():
    assert b_coeff(constant_system(), 0, 1, (0.1, 0.2, 0.3)) == 0.0
    assert b_coeff(epsilon_system(), 0, 1, (0, 1, 2)) == pytest.approx(-13 / 17, rel=1e-13)


def test_b_from_a_conversion():
    for sys_ in (epsilon_system(), perturbed_epsilon(), non_rich_library()[1].system):
        for r in sys_.sample(50, 1):
            for i, j in itertools.permutations(range(3), 2):
                li, lj = (math.tan(sys_.phi[m](r)) for m in (i, j))
                conv = a_coeff(sys_, i, j, r) * (1 + li * lj) / (1 + lj ** 2)
                assert b_coeff(sys_, i, j, r) == pytest.approx(conv, rel=1e-10, abs=1e-12)


def test_coincident_and_infinite():
    sys_ = DiagonalSystem.from_angles(("r1", "r2", "r3"), ["r1", "r2", "1.5707963267948966"])
    with pytest.raises(CoincidentAnglesError):
        b_coeff(sys_, 0, 1, (0.5, 0.5, 0.0))
    with pytest.raises(InfiniteSlopeError):
        a_coeff(sys_, 0, 2, (0.5, 0.1, 0.0))


def test_epsilon_residuals_vanish():
    e = epsilon_system()
    r = (0.2, 0.9, 1.7)
    assert abs(residual_R(e, 0, 1, 2, r)) <= 1e-12
    assert abs(residual_Phi(e, 0, 1, 2, r)) <= 1e-9
    sym, quad = verify_cocycle_identity(e, 0, 1, 2, r)
    assert abs(sym) <= 1e-9 and abs(quad) <= 1e-9


def test_constant_residuals_zero():
    c = constant_system()
    assert residual_R(c, 0, 1, 2, (0.1, 0.2, 0.3)) == 0.0
    assert residual_Phi(c, 0, 1, 2, (0.1, 0.2, 0.3)) == 0.0
    assert verify_cocycle_identity(c, 0, 1, 2, (0.1, 0.2, 0.3)) == (0.0, 0.0)


@pytest.mark.parametrize("entry", non_rich_library(), ids=lambda e: e.name)
def test_golden_points(entry):
    (i, j, k), p = entry.golden
    ad = residual_Phi(entry.system, i, j, k, p)
    assert ad == pytest.approx(GOLDEN_PHI[entry.name], rel=1e-12)
    assert ad == pytest.approx(residual_Phi_fd(as_callables(entry.system), i, j, k, p), rel=1e-6)
    assert abs(residual_R(entry.system, i, j, k, p)) > 1e-3
    assert abs(ad) > 1e-3


def test_perturbed_identity15_fails():
    (i, j, k), p = PERTURBED_GOLDEN
    sym, quad = verify_cocycle_identity(perturbed_epsilon(), i, j, k, p)
    assert abs(quad) > 1.0


def test_check_richness_verdicts():
    e = epsilon_system()
    rep = check_richness(e, e.sample(100, 0))
    assert rep.verdict_R == rep.verdict_Phi == "rich"
    assert rep.max_Phi <= 1e-8 and rep.max_R <= 1e-8
    p = perturbed_epsilon()
    assert check_richness(p, p.sample(20, 0)).verdict_Phi == "not rich"
    two = two_component_system()
    rep = check_richness(two, two.sample(10, 0))
    assert rep.verdict_Phi == "vacuous" and rep.entries == []


def test_non_strict_points_skipped():
    sys_ = DiagonalSystem.from_angles(("r1", "r2", "r3"), ["r1", "r2", "r3"])
    rep = check_richness(sys_, [(0.1, 0.1, 0.5), (0.1, 0.4, 0.9)])
    assert rep.skipped == [(0.1, 0.1, 0.5)]
    assert len(rep.entries) == 6


@pytest.mark.parametrize("entry", rich_library(), ids=lambda e: e.name)
def test_rich_library(entry):
    sys_ = entry.system
    pts = sys_.sample(100, 2)
    rep = check_richness(sys_, pts, 1e-6)
    assert rep.verdict_Phi == "rich"
    assert rep.verdict_R in ("rich", "undetermined")
    assert rep.max_Phi <= 1e-8
    for r in pts[:10]:
        for t in itertools.permutations(range(sys_.n), 3):
            try:
                sym, quad = verify_cocycle_identity(sys_, *t, r)
            except InfiniteSlopeError:
                continue
            assert abs(sym) <= 1e-9 and abs(quad) <= 1e-9


@pytest.mark.parametrize("entry", non_rich_library(), ids=lambda e: e.name)
def test_non_rich_library(entry):
    sys_ = entry.system
    rep = check_richness(sys_, sys_.sample(20, 2) + [entry.golden[1]], 1e-6)
    assert rep.verdict_Phi == rep.verdict_R == "not rich"


def test_G_examples():
    e = epsilon_system()
    vals, spread = G_spread(e, 0, (0, 1, 2), (0.5, 1.5, 2.5))
    assert spread <= 1e-8
    assert reconstruct_G(e, 1, (0.1, 1.0, 1.7), (0.1, 1.0, 1.7)) == 0.0
    assert reconstruct_G(constant_system(), 2, (0, 0, 0), (0.5, -0.3, 0.8)) == 0.0


def test_G_gradient_matches_b():
    e = epsilon_system()
    base = (0.1, 0.9, 1.7)
    r = (0.3, 1.1, 1.9)
    for j in range(3):
        for i in range(3):
            if i == j:
                continue
            d = richardson(lambda x: reconstruct_G(e, j, base, tuple(x)), r, i, 1e-2)
            assert d == pytest.approx(b_coeff(e, i, j, r), rel=1e-7, abs=1e-9)


def test_G_closedness_detector():
    p = perturbed_epsilon()
    spreads = [G_spread(p, j, (0.1, 0.9, 1.7), (0.45, 1.25, 2.05))[1] for j in range(3)]
    assert max(spreads) > 1e-3
    with pytest.raises(NotRichError):
        reconstruct_G(p, int(np.argmax(spreads)), (0.1, 0.9, 1.7), (0.45, 1.25, 2.05), check=True)


@pytest.mark.parametrize("theta", np.linspace(0, math.pi, 10, endpoint=False))
def test_rotation_invariance(theta):
    for sys_ in (epsilon_system(), perturbed_epsilon()):
        rot = rotate_fan(sys_, float(theta))
        for r in sys_.sample(5, 3) + [PERTURBED_GOLDEN[1]]:
            for t in itertools.permutations(range(3), 3):
                a, b = residual_Phi(sys_, *t, r), residual_Phi(rot, *t, r)
                assert abs(a - b) <= 1e-9 * (1 + abs(a))


def test_rotation_by_pi():
    p = perturbed_epsilon()
    (i, j, k), r = PERTURBED_GOLDEN
    assert residual_Phi(rotate_fan(p, math.pi), i, j, k, r) == pytest.approx(residual_Phi(p, i, j, k, r), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.8, 1.3), st.floats(1.6, 2.1), st.floats(0.05, 2.0))
def test_epsilon_family_rich(r1, r2, r3, eps):
    sys_ = epsilon_system(eps)
    for t in itertools.permutations(range(3), 3):
        assert abs(residual_Phi(sys_, *t, (r1, r2, r3))) <= 1e-8
