"""Check that proposed conservation laws (g_i)_x + (h_i)_y = 0 represent a system.

A candidate represents A u_x + B u_y = 0 when Dg = C A and Dh = C B for an
invertible multiplier C(u). Where A is singular the plane is rotated first:
with A_t = cos t A + sin t B and B_t = -sin t A + cos t B one solves
C = (cos t Dg + sin t Dh) A_t^{-1} and checks -sin t Dg + cos t Dh = C B_t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegeneratePencilError
from .expr import parse_expression
from .pencil import QuasiLinearSystem
from .richness import DiagonalSystem, check_richness, diagonal_matrices

ROTATION_GRID = tuple(m * math.pi / 16 for m in range(16))


@dataclass(frozen=True)
class ConservationCandidate:
    g: tuple
    h: tuple

    @classmethod
    def from_strings(cls, g: Sequence[str], h: Sequence[str], variables) -> "ConservationCandidate":
        variables = tuple(variables)
        return cls(tuple(parse_expression(t, variables) for t in g),
                   tuple(parse_expression(t, variables) for t in h))

    def jacobians(self, u) -> tuple:
        Dg = np.array([e.gradient(u) for e in self.g])
        Dh = np.array([e.gradient(u) for e in self.h])
        return Dg, Dh


@dataclass
class MultiplierSample:
    point: tuple
    C: np.ndarray
    residual: float
    scale: float
    det_C: float
    theta: float
    ok: bool


@dataclass
class MultiplierReport:
    samples: list = field(default_factory=list)
    tol: float = 1e-10
    det_tol: float = 1e-10
    richness: object = None  # RichnessReport when produced from a diagonal system

    @property
    def passed(self) -> bool:
        return bool(self.samples) and all(s.ok for s in self.samples)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)

    def max_deviation_from_identity(self) -> float:
        return max((float(np.max(np.abs(s.C - np.eye(s.C.shape[0])))) for s in self.samples),
                   default=0.0)

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "samples": len(self.samples),
            "failures": sum(not s.ok for s in self.samples),
            "max_residual": self.max_residual(),
            "max_C_minus_I": self.max_deviation_from_identity(),
            "min_abs_det_C": min((abs(s.det_C) for s in self.samples), default=None),
            "rotations_used": sorted({s.theta for s in self.samples}),
        }
        if self.richness is not None:
            out["richness_verdict_Phi"] = self.richness.verdict_Phi
        return out


def _rotated(A, B, theta):
    c, s = math.cos(theta), math.sin(theta)
    return c * A + s * B, -s * A + c * B


def invertible_rotations(A: np.ndarray, B: np.ndarray, cond_max: float = 1e10) -> list:
    return [t for t in ROTATION_GRID if np.linalg.cond(_rotated(A, B, t)[0]) < cond_max]


def multiplier_at(sys: QuasiLinearSystem, cand: ConservationCandidate, u,
                  theta: float | None = None, tol: float = 1e-10,
                  det_tol: float = 1e-10) -> MultiplierSample:
    u = tuple(float(v) for v in u)
    A, B = sys.matrices(u)
    Dg, Dh = cand.jacobians(u)
    if theta is None:
        thetas = invertible_rotations(A, B)
        if not thetas:
            raise DegeneratePencilError(f"no invertible rotation of A at {u}: pencil degenerate")
        theta = thetas[0]
    At, Bt = _rotated(A, B, theta)
    c, s = math.cos(theta), math.sin(theta)
    C = np.linalg.solve(At.T, (c * Dg + s * Dh).T).T
    resid = float(np.max(np.abs((-s * Dg + c * Dh) - C @ Bt)))
    scale = 1.0 + float(max(np.max(np.abs(Dg)), np.max(np.abs(Dh))))
    det_C = float(np.linalg.det(C))
    ok = resid <= tol * scale and abs(det_C) > det_tol
    return MultiplierSample(u, C, resid, scale, det_C, float(theta), ok)


def verify_conservation_form(sys: QuasiLinearSystem, cand: ConservationCandidate, points,
                             tol: float = 1e-10, det_tol: float = 1e-10,
                             theta: float | None = None) -> MultiplierReport:
    if len(cand.g) != sys.n or len(cand.h) != sys.n:
        raise ValueError("candidate must provide n densities and n fluxes")
    for e in cand.g + cand.h:
        if e.variables != sys.variables:
            raise ValueError("candidate expressions must use the system variables")
    report = MultiplierReport(tol=tol, det_tol=det_tol)
    for p in points:
        report.samples.append(multiplier_at(sys, cand, p, theta, tol, det_tol))
    return report


def diagonal_as_quasilinear(diag: DiagonalSystem) -> QuasiLinearSystem:
    A, B = diagonal_matrices(diag)
    return QuasiLinearSystem(diag.names, A, B)


def verify_diagonal_from_claws(diag: DiagonalSystem, cand: ConservationCandidate, points,
                               tol: float = 1e-10, det_tol: float = 1e-10,
                               richness_tol: float = 1e-8) -> MultiplierReport:
    """Conservation check on A = diag(cos phi), B = diag(sin phi), plus the (Phi) verdict."""
    points = list(points)
    report = verify_conservation_form(diagonal_as_quasilinear(diag), cand, points, tol, det_tol)
    report.richness = check_richness(diag, points, richness_tol)
    return report
