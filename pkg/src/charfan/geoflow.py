"""Cubic integrals of a conformal geodesic flow ds^2 = L (dx^2 + dy^2).

The coefficients of F = a0 p1^3 + a1 p1^2 p2 + a2 p1 p2^2 + a3 p2^3 are
a0 = a + u/L, a1 = 3b + v/L, a2 = -3a + u/L, a3 = -b + v/L, and F is an
integral exactly when (u, v, L) solves the 3x3 quasi-linear system built by
``build_system22``. On the energy level (p1^2 + p2^2)/L = 1 the momenta are
p = sqrt(L) (cos phi, sin phi).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import dual
from .dual import Dual
from .errors import DomainError, FieldDomainError
from .expr import Expression, parse_expression
from .pencil import QuasiLinearSystem, characteristic_fan, pencil_at

XY = ("x", "y")
UVL = ("u", "v", "L")


def build_system22(a: float, b: float) -> QuasiLinearSystem:
    a, b = float(a), float(b)
    A = [["1", "0", f"3*{a!r}"], ["0", "1", f"3*{b!r}"], ["L", "0", "u"]]
    B = [["0", "-1", f"3*{b!r}"], ["1", "0", f"-3*{a!r}"], ["0", "L", "v"]]
    return QuasiLinearSystem.from_strings(UVL, A, B)


@dataclass(frozen=True)
class ConformalMetric:
    L: Expression

    @classmethod
    def from_string(cls, text: str) -> "ConformalMetric":
        return cls(parse_expression(text, XY))

    def value(self, x: float, y: float) -> float:
        lam = self.L.eval((x, y))
        if lam <= 0.0:
            raise FieldDomainError(f"metric factor {lam} <= 0 at ({x}, {y})")
        return lam

    def value_and_gradient(self, x: float, y: float) -> tuple:
        lam = self.value(x, y)
        return lam, self.L.gradient((x, y))

    def periodicity_defect(self, samples: int = 33) -> float:
        """Max mismatch across the unit-square identifications x ~ x+1, y ~ y+1."""
        t = np.linspace(0.0, 1.0, samples)
        d = 0.0
        for s in t:
            d = max(d, abs(self.L.eval((0.0, s)) - self.L.eval((1.0, s))),
                    abs(self.L.eval((s, 0.0)) - self.L.eval((s, 1.0))))
        return d


@dataclass(frozen=True)
class CubicIntegralState:
    a: float
    b: float
    u: Expression
    v: Expression
    L: Expression

    @classmethod
    def from_strings(cls, a: float, b: float, u: str, v: str, L: str) -> "CubicIntegralState":
        return cls(float(a), float(b), parse_expression(u, XY), parse_expression(v, XY),
                   parse_expression(L, XY))

    @property
    def metric(self) -> ConformalMetric:
        return ConformalMetric(self.L)

    @property
    def system(self) -> QuasiLinearSystem:
        return build_system22(self.a, self.b)

    def fields(self, X):
        """(u, v, L) at X, which may hold duals."""
        u, v, lam = self.u.evaluate(X), self.v.evaluate(X), self.L.evaluate(X)
        if dual.primal(lam) <= 0.0:
            raise FieldDomainError(f"metric factor {dual.primal(lam)} <= 0")
        return u, v, lam

    def U(self, x: float, y: float) -> tuple:
        return tuple(float(w) for w in self.fields((float(x), float(y))))

    def coefficients(self, X) -> tuple:
        u, v, lam = self.fields(X)
        a, b = self.a, self.b
        return (a + u / lam, 3 * b + v / lam, -3 * a + u / lam, -b + v / lam), lam

    def periodicity_defect(self, samples: int = 33) -> float:
        return max(ConformalMetric(e).periodicity_defect(samples) for e in (self.u, self.v, self.L))


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    p1: float
    p2: float

    def energy(self, metric: ConformalMetric) -> float:
        return (self.p1 ** 2 + self.p2 ** 2) / (2.0 * metric.value(self.x, self.y))


def _cubic(c, p1, p2):
    return c[0] * p1 ** 3 + c[1] * p1 ** 2 * p2 + c[2] * p1 * p2 ** 2 + c[3] * p2 ** 3


def F_eval(state: CubicIntegralState, x: float, y: float, p1: float, p2: float) -> float:
    c, _ = state.coefficients((float(x), float(y)))
    return float(_cubic(c, p1, p2))


def _fibre_F(state: CubicIntegralState, X, phi):
    c, lam = state.coefficients(X)
    root = dual.sqrt(lam)
    return _cubic(c, root * dual.cos(phi), root * dual.sin(phi))


# ---- geodesic flow ---------------------------------------------------------

@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    H: np.ndarray
    F: np.ndarray | None = None

    def drift(self, name: str) -> float:
        arr = getattr(self, name)
        return float(np.max(np.abs(arr - arr[0])))

    def to_csv(self, path) -> None:
        F = self.F if self.F is not None else np.full_like(self.t, np.nan)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "x", "y", "p1", "p2", "H", "F"])
            for m in range(len(self.t)):
                # positions reported on the unit-square torus chart
                row = (self.t[m], self.x[m] % 1.0, self.y[m] % 1.0, self.p1[m], self.p2[m],
                       self.H[m], F[m])
                wr.writerow([repr(float(v)) for v in row])


def _hamilton_rhs(metric: ConformalMetric, z: np.ndarray) -> np.ndarray:
    x, y, p1, p2 = z
    lam, (lx, ly) = metric.value_and_gradient(x, y)
    pp = p1 * p1 + p2 * p2
    k = pp / (2.0 * lam * lam)
    return np.array([p1 / lam, p2 / lam, k * lx, k * ly])


def integrate_geodesic(metric: ConformalMetric, start: PhaseState, T: float, dt: float,
                       state: CubicIntegralState | None = None, every: int = 1) -> Trajectory:
    """Classical RK4 on Hamilton's equations for H = (p1^2 + p2^2) / (2L).

    Every ``every``-th step is recorded. With ``state`` given, F is recorded too.
    """
    nsteps = int(round(T / dt))
    if nsteps <= 0:
        raise ValueError("need T > 0 and dt > 0")
    z = np.array([start.x, start.y, start.p1, start.p2], dtype=float)
    rows = [(0.0, z.copy())]
    try:
        for m in range(1, nsteps + 1):
            k1 = _hamilton_rhs(metric, z)
            k2 = _hamilton_rhs(metric, z + 0.5 * dt * k1)
            k3 = _hamilton_rhs(metric, z + 0.5 * dt * k2)
            k4 = _hamilton_rhs(metric, z + dt * k3)
            z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if m % every == 0 or m == nsteps:
                rows.append((m * dt, z.copy()))
    except DomainError as exc:
        raise FieldDomainError(f"geodesic left the metric domain: {exc}") from None
    t = np.array([r[0] for r in rows])
    Z = np.array([r[1] for r in rows])
    H = np.array([(p1 * p1 + p2 * p2) / (2.0 * metric.value(x, y)) for x, y, p1, p2 in Z])
    F = None
    if state is not None:
        F = np.array([F_eval(state, x, y, p1, p2) for x, y, p1, p2 in Z])
    return Trajectory(t, Z[:, 0], Z[:, 1], Z[:, 2], Z[:, 3], H, F)


def drift_study(metric: ConformalMetric, start: PhaseState, T: float, dts,
                state: CubicIntegralState | None = None, quantities=("H",)) -> dict:
    """Drift of each quantity per step size and successive reduction ratios."""
    out = {q: [] for q in quantities}
    for dt in dts:
        tr = integrate_geodesic(metric, start, T, dt, state, every=max(1, int(round(0.01 / dt))))
        for q in quantities:
            out[q].append(tr.drift(q))
    ratios = {q: [a / b if b > 0 else math.inf for a, b in zip(v, v[1:])] for q, v in out.items()}
    return {"dt": list(dts), "drift": out, "ratio": ratios}


# ---- fibre analysis ----------------------------------------------------------

def fibre_fourier(state: CubicIntegralState, x: float, y: float) -> tuple:
    """F on the energy fibre as a1 cos + b1 sin + a3 cos 3phi + b3 sin 3phi."""
    c, lam = state.coefficients((float(x), float(y)))
    s = lam ** 1.5 / 4.0
    return (s * (3 * c[0] + c[2]), s * (c[1] + 3 * c[3]), s * (c[0] - c[2]), s * (c[1] - c[3]))


def _fibre_derivative(coef, phi, order: int):
    a1, b1, a3, b3 = coef
    phi = np.asarray(phi, dtype=float)
    terms = ((a1, b1, 1.0), (a3, b3, 3.0))
    out = 0.0
    for ca, cb, m in terms:
        # d^order/dphi^order of ca cos(m phi) + cb sin(m phi)
        shift = order * math.pi / 2
        out = out + m ** order * (ca * np.cos(m * phi + shift) + cb * np.sin(m * phi + shift))
    return out


def fibre_values(state: CubicIntegralState, x: float, y: float, phi) -> tuple:
    """(F, F_phi, F_phiphi) on the fibre at the angles ``phi``."""
    coef = fibre_fourier(state, x, y)
    return tuple(_fibre_derivative(coef, phi, k) for k in range(3))


@dataclass
class CriticalPoint:
    phi: float
    value: float
    second: float
    degenerate: bool


def fibre_critical_points(state: CubicIntegralState, x: float, y: float,
                          scan: int = 1440, tol: float = 1e-8) -> list:
    """Zeros of F_phi on [0, 2pi) by a dense sign scan refined with brentq."""
    coef = fibre_fourier(state, x, y)
    grid = np.linspace(0.0, 2 * math.pi, scan + 1)
    d = _fibre_derivative(coef, grid, 1)
    scale = float(np.max(np.abs(d)))
    if scale == 0.0:
        return []
    fn = lambda p: float(_fibre_derivative(coef, p, 1))
    found = []
    for m in range(scan):
        lo, hi = grid[m], grid[m + 1]
        if d[m] == 0.0:
            root = lo
        elif d[m] * d[m + 1] < 0.0:
            root = optimize.brentq(fn, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)
        else:
            continue
        root = root % (2 * math.pi)
        if any(abs(root - r) < 1e-10 or abs(abs(root - r) - 2 * math.pi) < 1e-10 for r in found):
            continue
        found.append(root)
    out = []
    for r in sorted(found):
        F, _, F2 = (float(v) for v in fibre_values(state, x, y, r))
        out.append(CriticalPoint(r, F, F2, abs(F2) < tol * scale))
    return out


def critical_angles_mod_pi(points) -> list:
    # merge the pairs phi, phi + pi that only differ by roundoff
    merged = []
    for a in sorted(p.phi % math.pi for p in points):
        if not merged or min(abs(a - merged[-1]), math.pi - abs(a - merged[-1])) > 1e-9:
            merged.append(a)
    if len(merged) > 1 and math.pi - merged[-1] + merged[0] <= 1e-9:
        merged.pop()
    return merged


def fan_match(state: CubicIntegralState, x: float, y: float) -> float:
    """Max distance mod pi between fibre critical angles and the pencil fan."""
    crit = critical_angles_mod_pi(fibre_critical_points(state, x, y))
    fan = characteristic_fan(pencil_at(state.system, state.U(x, y))).angles
    if len(crit) != len(fan):
        return math.inf
    dist = lambda p, q: min(abs(p - q), math.pi - abs(p - q))
    return max(dist(p, q) for p, q in zip(crit, fan))


def verify_P_vs_Fphi(state: CubicIntegralState, x: float, y: float, grid: int = 360) -> tuple:
    """Fit P(cos phi, sin phi) = c F_phi at the largest |F_phi| and return (c, max residual)."""
    P = pencil_at(state.system, state.U(x, y))
    phi = 2 * math.pi * np.arange(grid) / grid
    Fp = fibre_values(state, x, y, phi)[1]
    m = int(np.argmax(np.abs(Fp)))
    if Fp[m] == 0.0:
        raise DomainError("F_phi vanishes on the whole fibre")
    c = float(P.on_circle(phi[m]) / Fp[m])
    return c, float(np.max(np.abs(P.on_circle(phi) - c * Fp)))


def riemann_invariants(a: float, b: float, U, ) -> np.ndarray:
    """Critical values of F at the critical angles in [0, pi), sorted by angle."""
    st = CubicIntegralState.from_strings(a, b, repr(float(U[0])), repr(float(U[1])), repr(float(U[2])))
    pts = [p for p in fibre_critical_points(st, 0.0, 0.0) if p.phi < math.pi]
    return np.array([p.value for p in pts])


def invariant_jacobian(a: float, b: float, U, h: float = 1e-6) -> tuple:
    """Central-difference Jacobian of (u, v, L) -> (r1, r2, r3) and its determinant."""
    U = np.asarray(U, dtype=float)
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        rp, rm = riemann_invariants(a, b, U + e), riemann_invariants(a, b, U - e)
        if len(rp) != 3 or len(rm) != 3:
            raise DomainError("critical point count changed inside the difference stencil")
        cols.append((rp - rm) / (2 * h))
    J = np.array(cols).T
    return J, float(np.linalg.det(J))


def is_regular_change(a: float, b: float, U, det_tol: float = 1e-6) -> bool:
    return abs(invariant_jacobian(a, b, U)[1]) >= det_tol


# ---- PDE residuals -------------------------------------------------------------

def transport_residual(state: CubicIntegralState, x: float, y: float, phi: float) -> float:
    """F_x cos + F_y sin + F_phi (L_y cos - L_x sin) / (2L) at fixed phi."""
    x, y, phi = float(x), float(y), float(phi)
    Fx = dual.tangent(_fibre_F(state, dual.seed((x, y), 0), phi))
    Fy = dual.tangent(_fibre_F(state, dual.seed((x, y), 1), phi))
    Fphi = dual.tangent(_fibre_F(state, (x, y), Dual(phi, 1.0)))
    lam, (lx, ly) = state.metric.value_and_gradient(x, y)
    c, s = math.cos(phi), math.sin(phi)
    return float(Fx * c + Fy * s + Fphi * (ly * c - lx * s) / (2.0 * lam))


def system22_residual(state: CubicIntegralState, x: float, y: float) -> np.ndarray:
    """A(U) U_x + B(U) U_y for U = (u, v, L) as fields of (x, y)."""
    p = (float(x), float(y))
    U = state.U(*p)
    J = np.array([e.gradient(p) for e in (state.u, state.v, state.L)])
    A, B = state.system.matrices(U)
    return A @ J[:, 0] + B @ J[:, 1]
