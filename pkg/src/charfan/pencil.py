"""Characteristic pencil P(alpha, beta) = det(alpha*B - beta*A) and its angle fan."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegeneratePencilError, DomainError
from .expr import parse_expression
from .parallel import parallel_map

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class QuasiLinearSystem:
    """A(u) u_x + B(u) u_y = 0 with matrix entries given as expressions in u."""

    variables: tuple
    A: tuple  # n x n tuple of Expression
    B: tuple

    def __post_init__(self):
        n = len(self.variables)
        if n < 1:
            raise ValueError("system needs at least one unknown")
        for name, M in (("A", self.A), ("B", self.B)):
            if len(M) != n or any(len(row) != n for row in M):
                raise ValueError(f"matrix {name} must be {n}x{n}")
            for row in M:
                for e in row:
                    if e.variables != tuple(self.variables):
                        raise ValueError(f"entry of {name} uses a different variable list")

    @property
    def n(self) -> int:
        return len(self.variables)

    @classmethod
    def from_strings(cls, variables: Sequence[str], A, B) -> "QuasiLinearSystem":
        variables = tuple(variables)
        conv = lambda M: tuple(tuple(parse_expression(str(s), variables) for s in row) for row in M)
        return cls(variables, conv(A), conv(B))

    def matrices(self, u) -> tuple:
        A = np.array([[e.eval(u) for e in row] for row in self.A])
        B = np.array([[e.eval(u) for e in row] for row in self.B])
        return A, B

    def as_strings(self) -> dict:
        return {
            "variables": list(self.variables),
            "A": [[str(e) for e in row] for row in self.A],
            "B": [[str(e) for e in row] for row in self.B],
        }


@dataclass(frozen=True)
class PencilPolynomial:
    """Coefficients c_k of P = sum_k c_k alpha^(n-k) beta^k at a fixed state."""

    coeffs: tuple
    scale: float = 0.0  # max |entry| of A, B at the state
    condition: float = 1.0

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def norm(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __call__(self, alpha: float, beta: float) -> float:
        n = self.n
        return sum(c * alpha ** (n - k) * beta ** k for k, c in enumerate(self.coeffs))

    def on_circle(self, phi):
        """P(cos phi, sin phi), vectorised over ``phi``."""
        phi = np.asarray(phi, dtype=float)
        ca, sa = np.cos(phi), np.sin(phi)
        n = self.n
        return sum(c * ca ** (n - k) * sa ** k for k, c in enumerate(self.coeffs))

    def d_on_circle(self, phi):
        """d/dphi of P(cos phi, sin phi)."""
        phi = np.asarray(phi, dtype=float)
        ca, sa = np.cos(phi), np.sin(phi)
        n = self.n
        out = 0.0
        for k, c in enumerate(self.coeffs):
            if n - k > 0:
                out = out - c * (n - k) * ca ** (n - k - 1) * sa ** (k + 1)
            if k > 0:
                out = out + c * k * ca ** (n - k + 1) * sa ** (k - 1)
        return out


@dataclass
class CharacteristicFan:
    angles: list  # sorted, each in [0, pi)
    strict: bool
    min_gap: float
    n: int
    residuals: list = field(default_factory=list)

    def directions(self) -> list:
        return [(math.cos(a), math.sin(a)) for a in self.angles]


def _pencil_from_matrices(A: np.ndarray, B: np.ndarray) -> PencilPolynomial:
    n = A.shape[0]
    thetas = np.pi * np.arange(n + 1) / (n + 1)
    ca, sa = np.cos(thetas), np.sin(thetas)
    V = np.array([[ca[m] ** (n - k) * sa[m] ** k for k in range(n + 1)] for m in range(n + 1)])
    d = np.array([np.linalg.det(ca[m] * B - sa[m] * A) for m in range(n + 1)])
    cond = float(np.linalg.cond(V))
    if cond > 1e8:
        raise ArithmeticError(f"pencil interpolation ill-conditioned (cond={cond:.3g})")
    c = np.linalg.solve(V, d)
    scale = float(max(np.max(np.abs(A)), np.max(np.abs(B))))
    return PencilPolynomial(tuple(float(x) for x in c), scale, cond)


def pencil_at(sys: QuasiLinearSystem, u) -> PencilPolynomial:
    """Interpolate the pencil coefficients from determinants at n+1 fixed angles."""
    A, B = sys.matrices(u)
    return _pencil_from_matrices(A, B)


def is_nonzero_pencil(P: PencilPolynomial, tol: float = DEFAULT_TOL) -> bool:
    return P.norm() > tol * (1.0 + P.scale)


def _normalize(angle: float) -> float:
    a = math.fmod(angle, math.pi)
    if a < 0:
        a += math.pi
    if a >= math.pi:
        a -= math.pi
    return a


def _polish(P: PencilPolynomial, phi: float) -> float:
    for _ in range(8):
        f = float(P.on_circle(phi))
        df = float(P.d_on_circle(phi))
        if df == 0.0:
            break
        step = f / df
        if abs(step) > 1e-3:
            break
        phi -= step
        if abs(step) < 1e-16:
            break
    return phi


def characteristic_fan(P: PencilPolynomial, tol: float = DEFAULT_TOL,
                       imag_tol: float = 1e-7) -> CharacteristicFan:
    """Real projective roots of the pencil as angles in [0, pi)."""
    if not is_nonzero_pencil(P, tol):
        raise DegeneratePencilError("pencil vanishes identically at this state")
    n = P.n
    c = np.array(P.coeffs, dtype=float)
    cnorm = float(np.max(np.abs(c)))
    # alpha = 0 (angle pi/2) is a root once per vanishing top coefficient of beta
    at_infinity = 0
    top = n
    while top > 0 and abs(c[top]) <= tol * cnorm:
        at_infinity += 1
        top -= 1
    angles = [math.pi / 2] * at_infinity
    if top > 0:
        # numpy.roots builds the companion matrix; highest power first
        roots = np.roots(c[: top + 1][::-1])
        for t in roots:
            if abs(t.imag) <= imag_tol * (1.0 + abs(t)):
                angles.append(_normalize(math.atan(float(t.real))))
    angles = sorted(_normalize(_polish(P, a)) for a in angles)
    if len(angles) > 1:
        gaps = [b - a for a, b in zip(angles, angles[1:])]
        gaps.append(angles[0] + math.pi - angles[-1])
        min_gap = min(gaps)
    else:
        min_gap = math.pi if angles else 0.0
    strict = len(angles) == n and min_gap > max(tol, 1e-7)
    resid = [float(abs(P.on_circle(a))) for a in angles]
    return CharacteristicFan(angles, strict, float(min_gap), n, resid)


def classify_state(sys: QuasiLinearSystem, u, tol: float = DEFAULT_TOL) -> str:
    """One of 'strict', 'non-strict', 'pencil-degenerate' or 'domain-error'."""
    try:
        P = pencil_at(sys, u)
    except DomainError:
        return "domain-error"
    if not is_nonzero_pencil(P, tol):
        return "pencil-degenerate"
    return "strict" if characteristic_fan(P, tol).strict else "non-strict"


@dataclass
class ScanReport:
    nodes: list  # list of (point tuple, classification)
    counts: dict


def hyperbolicity_scan(sys: QuasiLinearSystem, lower, upper, resolution: int,
                       tol: float = DEFAULT_TOL) -> ScanReport:
    """Classify every node of a regular grid over the box [lower, upper]."""
    if len(lower) != sys.n or len(upper) != sys.n:
        raise ValueError("box dimension mismatch")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(lower, upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, sys.n)
    points = [tuple(float(x) for x in p) for p in grid]
    labels = parallel_map(lambda p: classify_state(sys, p, tol), points)
    counts = {k: 0 for k in ("strict", "non-strict", "pencil-degenerate", "domain-error")}
    for lab in labels:
        counts[lab] += 1
    return ScanReport(list(zip(points, labels)), counts)


def rotate_coordinates(sys: QuasiLinearSystem, theta: float) -> QuasiLinearSystem:
    """Rotated system whose characteristic fan is the original one shifted by +theta."""
    c, s = math.cos(theta), math.sin(theta)
    n = sys.n
    A = tuple(tuple(c * sys.A[i][j] - s * sys.B[i][j] for j in range(n)) for i in range(n))
    B = tuple(tuple(s * sys.A[i][j] + c * sys.B[i][j] for j in range(n)) for i in range(n))
    return QuasiLinearSystem(sys.variables, A, B)
