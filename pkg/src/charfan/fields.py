"""Solution fields r(x, y) of a diagonal system and derivatives along characteristics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dual import Dual
from .errors import CoincidentAnglesError, FieldDomainError, GradientCatastropheError
from .expr import Expression, parse_expression
from .richness import COINCIDENCE_TOL, DiagonalSystem, angle_gap

XY = ("x", "y")


@dataclass
class FieldSample:
    values: np.ndarray  # r_i
    grads: np.ndarray  # shape (n, 2): (d_x r_i, d_y r_i)
    hint: object = None


class SolutionField:
    """Base class; subclasses implement :meth:`evaluate`."""

    kind = "abstract"

    def __init__(self, n: int, bounds=None):
        self.n = n
        # (xmin, ymin, xmax, ymax); None means unbounded
        self.bounds = None if bounds is None else tuple(float(b) for b in bounds)

    def contains(self, x: float, y: float) -> bool:
        if self.bounds is None:
            return True
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1

    def evaluate(self, x: float, y: float, hint=None) -> FieldSample:
        raise NotImplementedError

    def values(self, x: float, y: float) -> np.ndarray:
        return self.evaluate(x, y).values

    def gradients(self, x: float, y: float) -> np.ndarray:
        return self.evaluate(x, y).grads

    def diameter(self) -> float:
        if self.bounds is None:
            return 1.0
        x0, y0, x1, y1 = self.bounds
        return math.hypot(x1 - x0, y1 - y0)


class AnalyticField(SolutionField):
    kind = "analytic"

    def __init__(self, exprs: Sequence[Expression], bounds=None):
        super().__init__(len(exprs), bounds)
        for e in exprs:
            if e.variables != XY:
                raise ValueError("analytic fields are expressions in (x, y)")
        self.exprs = tuple(exprs)

    def evaluate(self, x, y, hint=None) -> FieldSample:
        if not self.contains(x, y):
            raise FieldDomainError(f"({x}, {y}) outside analytic field bounds")
        p = (float(x), float(y))
        vals = np.array([e.eval(p) for e in self.exprs])
        grads = np.array([e.gradient(p) for e in self.exprs])
        return FieldSample(vals, grads)


def build_analytic_field(texts: Sequence[str], bounds=None) -> AnalyticField:
    return AnalyticField([parse_expression(t, XY) for t in texts], bounds)


class GridField(SolutionField):
    """Bilinear interpolation of samples on a regular tensor grid."""

    kind = "grid"

    def __init__(self, xs, ys, samples):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        samples = np.asarray(samples, float)
        if xs.size < 2 or ys.size < 2:
            raise ValueError("grid needs at least 2x2 nodes")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if samples.ndim != 3 or samples.shape[1:] != (xs.size, ys.size):
            raise ValueError("samples must have shape (n, len(xs), len(ys))")
        super().__init__(samples.shape[0], (xs[0], ys[0], xs[-1], ys[-1]))
        self.xs, self.ys, self.samples = xs, ys, samples

    def evaluate(self, x, y, hint=None) -> FieldSample:
        if not self.contains(x, y):
            raise FieldDomainError(f"({x}, {y}) outside grid hull")
        i = min(max(int(np.searchsorted(self.xs, x, side="right")) - 1, 0), self.xs.size - 2)
        j = min(max(int(np.searchsorted(self.ys, y, side="right")) - 1, 0), self.ys.size - 2)
        hx = self.xs[i + 1] - self.xs[i]
        hy = self.ys[j + 1] - self.ys[j]
        tx = (x - self.xs[i]) / hx
        ty = (y - self.ys[j]) / hy
        f00 = self.samples[:, i, j]
        f10 = self.samples[:, i + 1, j]
        f01 = self.samples[:, i, j + 1]
        f11 = self.samples[:, i + 1, j + 1]
        vals = (f00 * (1 - tx) * (1 - ty) + f10 * tx * (1 - ty)
                + f01 * (1 - tx) * ty + f11 * tx * ty)
        dx = ((f10 - f00) * (1 - ty) + (f11 - f01) * ty) / hx
        dy = ((f01 - f00) * (1 - tx) + (f11 - f10) * tx) / hy
        return FieldSample(vals, np.stack([dx, dy], axis=1))

    @classmethod
    def from_function(cls, fn, xs, ys) -> "GridField":
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        data = np.array([[fn(x, y) for y in ys] for x in xs])  # (nx, ny, n)
        return cls(xs, ys, np.moveaxis(data, -1, 0))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"] + [f"r{m + 1}" for m in range(self.n)])
            for j, y in enumerate(self.ys):
                for i, x in enumerate(self.xs):
                    w.writerow([repr(float(x)), repr(float(y))]
                               + [repr(float(v)) for v in self.samples[:, i, j]])

    @classmethod
    def from_csv(cls, path) -> "GridField":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header = [h.strip() for h in rows[0]]
        if header[:2] != ["x", "y"] or len(header) < 3:
            raise ValueError("grid CSV header must read x,y,r1,...,rn")
        data = np.array([[float(v) for v in row] for row in rows[1:] if row])
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        if data.shape[0] != xs.size * ys.size:
            raise ValueError("grid CSV is not a complete regular grid")
        n = data.shape[1] - 2
        samples = np.empty((n, xs.size, ys.size))
        ix = np.searchsorted(xs, data[:, 0])
        iy = np.searchsorted(ys, data[:, 1])
        samples[:, ix, iy] = data[:, 2:].T
        return cls(xs, ys, samples)


def build_grid_field(xs, ys, samples) -> GridField:
    return GridField(xs, ys, samples)


# -- simple waves -------------------------------------------------------------

@dataclass(frozen=True)
class SimpleWaveSpec:
    """One active invariant carried by straight characteristics from a line.

    ``state`` gives all invariants; its entry at ``active`` is ignored and
    replaced by ``profile(xi)`` along the initial line origin + xi*direction.
    """

    system: DiagonalSystem
    active: int
    state: tuple
    origin: tuple
    direction: tuple
    profile: Expression  # in variable "xi"
    xi_range: tuple


class SimpleWaveField(SolutionField):
    kind = "simple-wave"

    def __init__(self, spec: SimpleWaveSpec, bounds, allow_crossing: bool = False,
                 scan: int = 401):
        super().__init__(spec.system.n, bounds)
        if spec.profile.variables != ("xi",):
            raise ValueError("profile must be an expression in 'xi'")
        d = np.asarray(spec.direction, float)
        self.spec = spec
        self.direction = tuple(d / np.linalg.norm(d))
        self.origin = tuple(float(v) for v in spec.origin)
        self.xi_lo, self.xi_hi = (float(v) for v in spec.xi_range)
        self.base = [float(v) for v in spec.state]
        self.catastrophe = self._earliest_crossing(scan)
        if self.catastrophe is not None and not allow_crossing:
            s, xi, pt = self.catastrophe
            raise GradientCatastropheError(
                f"characteristics cross at ({pt[0]:.6g}, {pt[1]:.6g}) "
                f"(xi={xi:.6g}, arclength {s:.6g}) inside the domain", pt)

    # characteristic data carried from the initial line
    def line_data(self, xi: float) -> dict:
        sp = self.spec
        rho = sp.profile.evaluate((Dual(float(xi), 1.0),))
        rho, drho = (rho.re, rho.eps) if isinstance(rho, Dual) else (rho, 0.0)
        r = list(self.base)
        r[sp.active] = rho
        phi, kappa = _phi_and_kappa(sp.system, sp.active, r)
        q = (self.origin[0] + xi * self.direction[0], self.origin[1] + xi * self.direction[1])
        c0 = self.direction[1] * math.cos(phi) - self.direction[0] * math.sin(phi)
        return dict(xi=xi, rho=rho, drho=drho, r=r, phi=phi, kappa=kappa, q=q, c0=c0)

    def crossing_length(self, xi: float) -> float | None:
        """Arclength at which the characteristic from ``xi`` meets its neighbours."""
        ld = self.line_data(xi)
        slope = ld["kappa"] * ld["drho"]
        if slope == 0.0 or ld["c0"] / slope >= 0.0:
            return None
        return -ld["c0"] / slope

    def _earliest_crossing(self, scan: int):
        best = None
        for xi in np.linspace(self.xi_lo, self.xi_hi, scan):
            s = self.crossing_length(float(xi))
            if s is None:
                continue
            ld = self.line_data(float(xi))
            pt = (ld["q"][0] + s * math.cos(ld["phi"]), ld["q"][1] + s * math.sin(ld["phi"]))
            if self.contains(*pt) and (best is None or s < best[0]):
                best = (float(s), float(xi), (float(pt[0]), float(pt[1])))
        return best

    def _F(self, xi: float, x: float, y: float):
        ld = self.line_data(xi)
        c, s = math.cos(ld["phi"]), math.sin(ld["phi"])
        dx, dy = x - ld["q"][0], y - ld["q"][1]
        F = dx * s - dy * c
        along = dx * c + dy * s
        dF = ld["c0"] + along * ld["kappa"] * ld["drho"]
        return F, dF, along, ld

    def _newton(self, x, y, xi, lo=None, hi=None):
        flo = None
        if lo is not None:
            flo = self._F(lo, x, y)[0]
        for _ in range(100):
            F, dF, along, ld = self._F(xi, x, y)
            if abs(F) <= 1e-14 * (1.0 + abs(x) + abs(y)):
                return xi, F, dF, along, ld
            if lo is not None:
                if (F < 0) == (flo < 0):
                    lo, flo = xi, F
                else:
                    hi = xi
            step = F / dF if dF != 0.0 else math.inf
            new = xi - step
            if lo is not None and not (min(lo, hi) < new < max(lo, hi)):
                new = 0.5 * (lo + hi)
            if abs(new - xi) <= 1e-15 * (1.0 + abs(xi)):
                xi = new
                F, dF, along, ld = self._F(xi, x, y)
                return xi, F, dF, along, ld
            xi = new
        raise FieldDomainError(f"simple-wave root finding did not converge at ({x}, {y})")

    def _global_root(self, x, y, samples: int = 64):
        grid = np.linspace(self.xi_lo, self.xi_hi, samples)
        Fs = [self._F(float(g), x, y)[0] for g in grid]
        brackets = []
        for a, b, fa, fb in zip(grid, grid[1:], Fs, Fs[1:]):
            if fa == 0.0 or (fa < 0) != (fb < 0):
                brackets.append((float(a), float(b)))
        if Fs[-1] == 0.0:
            brackets.append((float(grid[-2]), float(grid[-1])))
        roots = []
        for a, b in brackets:
            res = self._newton(x, y, 0.5 * (a + b), a, b)
            if res[3] >= -1e-12 and all(abs(res[0] - r[0]) > 1e-10 for r in roots):
                roots.append(res)
        if not roots:
            raise FieldDomainError(f"({x}, {y}) is not reached by any characteristic of the wave")
        if len(roots) > 1:
            raise GradientCatastropheError(
                f"({x}, {y}) lies beyond the gradient catastrophe ({len(roots)} characteristics)",
                self.catastrophe[2] if self.catastrophe else (x, y))
        xi, along = roots[0][0], roots[0][3]
        s_cross = self.crossing_length(xi)
        if s_cross is not None and along > s_cross:
            # a single characteristic, but one that has already passed through its focus
            raise GradientCatastropheError(
                f"({x}, {y}) lies beyond the crossing of the characteristic from xi={xi:.6g}",
                self.catastrophe[2] if self.catastrophe else (x, y))
        return roots[0]

    def evaluate(self, x, y, hint=None) -> FieldSample:
        if not self.contains(x, y):
            raise FieldDomainError(f"({x}, {y}) outside simple-wave domain")
        if hint is None:
            xi, F, dF, along, ld = self._global_root(x, y)
        else:
            xi, F, dF, along, ld = self._newton(x, y, float(hint))
            if along < -1e-12:
                raise FieldDomainError("continued root lies behind the initial line")
        # continued roots near a caustic are ill-conditioned; allow slack
        slack = 1e-9 if hint is None else 1e-6
        if not (self.xi_lo - slack <= xi <= self.xi_hi + slack):
            raise FieldDomainError(f"({x}, {y}) traces back outside the initial segment")
        if dF == 0.0:
            raise GradientCatastropheError(f"singular gradient at ({x}, {y})", (x, y))
        vals = np.array(ld["r"], dtype=float)
        grads = np.zeros((self.n, 2))
        a = self.spec.active
        c, s = math.cos(ld["phi"]), math.sin(ld["phi"])
        grads[a, 0] = -ld["drho"] * s / dF
        grads[a, 1] = ld["drho"] * c / dF
        return FieldSample(vals, grads, hint=xi)

    def w_analytic(self, xi: float, s: float) -> float:
        """Transversal derivative of the active invariant at arclength s along char xi."""
        ld = self.line_data(xi)
        return ld["drho"] / (ld["c0"] + s * ld["kappa"] * ld["drho"])


def _phi_and_kappa(sys: DiagonalSystem, j: int, r):
    out = sys.phi[j].evaluate(tuple(Dual(v, 1.0 if m == j else 0.0) for m, v in enumerate(r)))
    if isinstance(out, Dual):
        return float(out.re), float(out.eps)
    return float(out), 0.0


def build_simple_wave(spec: SimpleWaveSpec, bounds, allow_crossing: bool = False) -> SimpleWaveField:
    return SimpleWaveField(spec, bounds, allow_crossing=allow_crossing)


# -- derivatives along characteristics ---------------------------------------

def _angles(sys: DiagonalSystem, sample: FieldSample) -> list:
    return sys.angles(tuple(float(v) for v in sample.values))


def _check_dims(field: SolutionField, sys: DiagonalSystem):
    if field.n != sys.n:
        raise ValueError("field and system dimensions differ")


def directional(sample: FieldSample, m: int, angle: float) -> float:
    """Derivative of r_m along (cos angle, sin angle)."""
    gx, gy = sample.grads[m]
    return math.cos(angle) * gx + math.sin(angle) * gy


def residual_diagonal(field: SolutionField, sys: DiagonalSystem, i: int, point, sample=None) -> float:
    _check_dims(field, sys)
    sample = sample or field.evaluate(*point)
    phi = _angles(sys, sample)[i]
    return abs(directional(sample, i, phi))


def w_transversal(field: SolutionField, sys: DiagonalSystem, i: int, point, sample=None) -> float:
    """Derivative of r_i along the rotated characteristic direction v_i^perp."""
    _check_dims(field, sys)
    sample = sample or field.evaluate(*point)
    phi = _angles(sys, sample)[i]
    return directional(sample, i, phi + math.pi / 2)


def cross_derivative_residual(field: SolutionField, sys: DiagonalSystem, i: int, j: int,
                              point, sample=None) -> float:
    """|L_{v_j^perp} r_i + L_{v_j} r_i / tan(phi_i - phi_j)|."""
    if i == j:
        raise ValueError("i and j must differ")
    _check_dims(field, sys)
    sample = sample or field.evaluate(*point)
    ang = _angles(sys, sample)
    if angle_gap(ang[i], ang[j]) <= COINCIDENCE_TOL:
        raise CoincidentAnglesError(f"phi_{i} and phi_{j} coincide")
    along = directional(sample, i, ang[j])
    perp = directional(sample, i, ang[j] + math.pi / 2)
    d = ang[i] - ang[j]
    return abs(perp + along * math.cos(d) / math.sin(d))
