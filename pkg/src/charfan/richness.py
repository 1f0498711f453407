"""Diagonal systems in Riemann invariants and the richness conditions.

For a diagonal system cos(phi_i) (r_i)_x + sin(phi_i) (r_i)_y = 0 with angle
fields phi_i(r) we evaluate

* a_ij = d_i lambda_j / (lambda_i - lambda_j) with lambda = tan(phi),
* b_ij = d_i phi_j / tan(phi_i - phi_j),

and the cross-derivative residuals d_k a_ij - d_i a_kj (condition R) and
d_k b_ij - d_i b_kj (condition Phi). Every derivative is taken by forward
mode AD: the quotient itself is differentiated, never a hand-expanded form.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from . import dual
from .dual import Dual
from .errors import CoincidentAnglesError, DomainError, InfiniteSlopeError, NotRichError
from .expr import Expression, constant, parse_expression
from .parallel import parallel_map

COINCIDENCE_TOL = 1e-7
SLOPE_TOL = 1e-7


@dataclass(frozen=True)
class DiagonalSystem:
    names: tuple
    phi: tuple  # Expression per family
    lower: tuple | None = None
    upper: tuple | None = None
    label: str = ""

    def __post_init__(self):
        if len(self.phi) != len(self.names):
            raise ValueError("one angle field per Riemann invariant is required")
        for e in self.phi:
            if e.variables != tuple(self.names):
                raise ValueError("angle fields must be expressions in the invariants")

    @property
    def n(self) -> int:
        return len(self.names)

    @classmethod
    def from_angles(cls, names: Sequence[str], phi: Sequence[str], **kw) -> "DiagonalSystem":
        names = tuple(names)
        return cls(names, tuple(parse_expression(p, names) for p in phi), **_box(kw))

    @classmethod
    def from_speeds(cls, names: Sequence[str], lam: Sequence[str], **kw) -> "DiagonalSystem":
        names = tuple(names)
        phi = tuple(parse_expression(s, names).apply("atan") for s in lam)
        return cls(names, phi, **_box(kw))

    def angles(self, r) -> list:
        return [e.eval(r) for e in self.phi]

    def sample(self, count: int, seed: int = 0) -> list:
        if self.lower is None or self.upper is None:
            raise ValueError(f"system {self.label!r} declares no sampling box")
        rng = np.random.default_rng(seed)
        pts = rng.uniform(self.lower, self.upper, size=(count, self.n))
        return [tuple(float(x) for x in p) for p in pts]


def _box(kw: dict) -> dict:
    out = dict(kw)
    for key in ("lower", "upper"):
        if out.get(key) is not None:
            out[key] = tuple(float(x) for x in out[key])
    return out


def angle_gap(a: float, b: float) -> float:
    """Distance between two angles modulo pi."""
    d = math.fmod(abs(a - b), math.pi)
    return min(d, math.pi - d)


def is_strict_at(sys: DiagonalSystem, r, tol: float = COINCIDENCE_TOL) -> bool:
    try:
        ang = sys.angles(r)
    except DomainError:
        return False
    return all(angle_gap(a, b) > tol for a, b in itertools.combinations(ang, 2))


# -- generic (dual-aware) building blocks -----------------------------------

def _value_and_partial(e: Expression, r, i: int):
    out = e.evaluate(tuple(Dual(x, 1.0 if m == i else 0.0) for m, x in enumerate(r)))
    if isinstance(out, Dual):
        return out.re, out.eps
    return out, 0.0


def _b(sys: DiagonalSystem, i: int, j: int, r):
    phi_j, dphi = _value_and_partial(sys.phi[j], r, i)
    d = sys.phi[i].evaluate(r) - phi_j
    s = dual.sin(d)
    if abs(dual.primal(s)) <= COINCIDENCE_TOL:
        raise CoincidentAnglesError(f"phi_{i} and phi_{j} coincide mod pi")
    # cot form stays finite where the angles differ by pi/2
    return dphi * dual.cos(d) / s


def _speed(sys: DiagonalSystem, j: int, r):
    phi = sys.phi[j].evaluate(r)
    if abs(math.cos(dual.primal(phi))) <= SLOPE_TOL:
        raise InfiniteSlopeError(f"lambda_{j} is infinite (phi = pi/2 mod pi)")
    return dual.tan(phi)


def _a(sys: DiagonalSystem, i: int, j: int, r):
    lam_i = _speed(sys, i, r)
    inner = tuple(Dual(x, 1.0 if m == i else 0.0) for m, x in enumerate(r))
    lam_j = _speed(sys, j, inner)
    if isinstance(lam_j, Dual):
        lam_j, dlam = lam_j.re, lam_j.eps
    else:
        dlam = 0.0
    diff = lam_i - lam_j
    if abs(dual.primal(diff)) <= COINCIDENCE_TOL:
        raise CoincidentAnglesError(f"lambda_{i} and lambda_{j} coincide")
    return dlam / diff


def _d(fn, r, k: int):
    """Partial derivative along r_k of a dual-aware function of the point."""
    out = fn(dual.seed(r, k))
    return float(dual.tangent(out))


def _distinct(*idx):
    if len(set(idx)) != len(idx):
        raise ValueError(f"indices {idx} must be pairwise distinct")


# -- public operations ------------------------------------------------------

def a_coeff(sys: DiagonalSystem, i: int, j: int, r) -> float:
    _distinct(i, j)
    return float(_a(sys, i, j, tuple(map(float, r))))


def b_coeff(sys: DiagonalSystem, i: int, j: int, r) -> float:
    _distinct(i, j)
    return float(_b(sys, i, j, tuple(map(float, r))))


def _terms_R(sys, i, j, k, r):
    lhs = _d(lambda p: _a(sys, i, j, p), r, k)
    rhs = _d(lambda p: _a(sys, k, j, p), r, i)
    return lhs, rhs


def _terms_Phi(sys, i, j, k, r):
    lhs = _d(lambda p: _b(sys, i, j, p), r, k)
    rhs = _d(lambda p: _b(sys, k, j, p), r, i)
    return lhs, rhs


def residual_R(sys: DiagonalSystem, i: int, j: int, k: int, r) -> float:
    """d_k a_ij - d_i a_kj."""
    _distinct(i, j, k)
    lhs, rhs = _terms_R(sys, i, j, k, tuple(map(float, r)))
    return lhs - rhs


def residual_Phi(sys: DiagonalSystem, i: int, j: int, k: int, r) -> float:
    """d_k b_ij - d_i b_kj."""
    _distinct(i, j, k)
    lhs, rhs = _terms_Phi(sys, i, j, k, tuple(map(float, r)))
    return lhs - rhs


def verify_cocycle_identity(sys: DiagonalSystem, i: int, j: int, k: int, r) -> tuple:
    """Residuals of d_i a_kj = d_k a_ij = a_ki a_ij + a_ik a_kj - a_kj a_ij."""
    _distinct(i, j, k)
    r = tuple(map(float, r))
    dk_aij = _d(lambda p: _a(sys, i, j, p), r, k)
    di_akj = _d(lambda p: _a(sys, k, j, p), r, i)
    a = lambda p, q: float(_a(sys, p, q, r))
    quad = a(k, i) * a(i, j) + a(i, k) * a(k, j) - a(k, j) * a(i, j)
    return di_akj - dk_aij, dk_aij - quad


@dataclass
class ResidualEntry:
    triple: tuple
    point: tuple
    residual_R: float | None
    residual_Phi: float
    normalized_R: float | None
    normalized_Phi: float


@dataclass
class RichnessReport:
    n: int
    entries: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    max_R: float | None = None
    max_Phi: float | None = None
    max_normalized_R: float | None = None
    max_normalized_Phi: float | None = None
    verdict_R: str = "vacuous"
    verdict_Phi: str = "vacuous"
    tol: float = 1e-8

    @property
    def verdict(self) -> str:
        return self.verdict_Phi

    def worst(self, condition: str = "Phi") -> ResidualEntry | None:
        key = "normalized_Phi" if condition == "Phi" else "normalized_R"
        cands = [e for e in self.entries if getattr(e, key) is not None]
        return max(cands, key=lambda e: abs(getattr(e, key)), default=None)

    def to_dict(self) -> dict:
        worst = self.worst()
        return {
            "n": self.n,
            "verdict_Phi": self.verdict_Phi,
            "verdict_R": self.verdict_R,
            "tol": self.tol,
            "max_residual_Phi": self.max_Phi,
            "max_residual_R": self.max_R,
            "max_normalized_Phi": self.max_normalized_Phi,
            "max_normalized_R": self.max_normalized_R,
            "evaluations": len(self.entries),
            "skipped_points": [list(p) for p in self.skipped],
            "worst": None if worst is None else {
                "triple": list(worst.triple),
                "point": list(worst.point),
                "residual_Phi": worst.residual_Phi,
                "residual_R": worst.residual_R,
            },
        }


def _normalized(lhs: float, rhs: float) -> float:
    return (lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


def _point_entries(sys: DiagonalSystem, r: tuple) -> list:
    out = []
    for i, j, k in itertools.permutations(range(sys.n), 3):
        lp, rp = _terms_Phi(sys, i, j, k, r)
        try:
            lr, rr = _terms_R(sys, i, j, k, r)
            res_r, norm_r = lr - rr, _normalized(lr, rr)
        except InfiniteSlopeError:
            res_r = norm_r = None
        out.append(ResidualEntry((i, j, k), r, res_r, lp - rp, norm_r, _normalized(lp, rp)))
    return out


def check_richness(sys: DiagonalSystem, points, tol: float = 1e-8) -> RichnessReport:
    """Evaluate both residuals for all ordered distinct triples at every point.

    Verdicts compare the normalized residual (lhs - rhs) / (1 + max(|lhs|, |rhs|))
    against ``tol``; the raw maxima are reported alongside.
    """
    report = RichnessReport(sys.n, tol=tol)
    if sys.n < 3:
        return report
    points = [tuple(map(float, p)) for p in points]
    good = []
    for p in points:
        (good if is_strict_at(sys, p) else report.skipped).append(p)

    def work(p):
        try:
            return _point_entries(sys, p)
        except (CoincidentAnglesError, DomainError):
            return None

    for p, entries in zip(good, parallel_map(work, good)):
        if entries is None:
            report.skipped.append(p)
        else:
            report.entries.extend(entries)
    if not report.entries:
        report.verdict_R = report.verdict_Phi = "undetermined"
        return report
    report.max_Phi = max(abs(e.residual_Phi) for e in report.entries)
    report.max_normalized_Phi = max(abs(e.normalized_Phi) for e in report.entries)
    report.verdict_Phi = "rich" if report.max_normalized_Phi <= tol else "not rich"
    finite = [e for e in report.entries if e.residual_R is not None]
    if finite:
        report.max_R = max(abs(e.residual_R) for e in finite)
        report.max_normalized_R = max(abs(e.normalized_R) for e in finite)
        report.verdict_R = "rich" if report.max_normalized_R <= tol else "not rich"
    else:
        report.verdict_R = "undetermined"
    return report


# -- integrating potentials G_j ---------------------------------------------

def _G_along(sys: DiagonalSystem, j: int, base, target, order) -> float:
    r = list(map(float, base))
    # gauge: G_j vanishes on the r_j-line through the base point
    r[j] = float(target[j])
    total = 0.0
    for i in order:
        a, b = r[i], float(target[i])
        if a != b:
            def f(t, i=i):
                p = list(r)
                p[i] = t
                return float(_b(sys, i, j, tuple(p)))

            val, _ = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)
            total += val
        r[i] = b
    return total


def staircase_orders(n: int, j: int) -> list:
    return list(itertools.permutations([i for i in range(n) if i != j]))


def G_spread(sys: DiagonalSystem, j: int, base, target) -> tuple:
    """Values of G_j(target) for every staircase order, and their spread."""
    vals = [_G_along(sys, j, base, target, o) for o in staircase_orders(sys.n, j)]
    return vals, max(vals) - min(vals)


def reconstruct_G(sys: DiagonalSystem, j: int, base, target, order=None,
                  check: bool = False, tol: float = 1e-8) -> float:
    """G_j(target) with G_j = 0 on the r_j-line through ``base``.

    Integrates sum_{i != j} b_ij dr_i along an axis-parallel staircase: the
    r_j leg comes first (zero contribution by the gauge), then the remaining
    coordinates in ``order`` (ascending index by default). With ``check`` every
    ordering is computed and a spread above ``tol`` raises NotRichError.
    """
    if order is None:
        order = tuple(i for i in range(sys.n) if i != j)
    if sorted(order) != [i for i in range(sys.n) if i != j]:
        raise ValueError("order must permute the indices other than j")
    if check:
        vals, spread = G_spread(sys, j, base, target)
        if spread > tol:
            raise NotRichError(f"G_{j} is path dependent (spread {spread:.3e}): not rich on region")
    return _G_along(sys, j, base, target, order)


def rotate_fan(sys: DiagonalSystem, theta: float) -> DiagonalSystem:
    phi = tuple(e + constant(theta, sys.names) for e in sys.phi)
    return DiagonalSystem(sys.names, phi, sys.lower, sys.upper, sys.label)


def diagonal_matrices(sys: DiagonalSystem):
    """A = diag(cos phi_i), B = diag(sin phi_i) as expression matrices."""
    zero = constant(0.0, sys.names)
    n = sys.n
    A = tuple(tuple(sys.phi[i].apply("cos") if i == m else zero for m in range(n)) for i in range(n))
    B = tuple(tuple(sys.phi[i].apply("sin") if i == m else zero for m in range(n)) for i in range(n))
    return A, B
