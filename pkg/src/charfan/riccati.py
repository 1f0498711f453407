"""Characteristic tracing and blow-up of the transversal derivative.

Along the i-th characteristic the quantity W = exp(-G_i) w_i obeys
dW/ds + k W^2 = 0 with k = exp(G_i) d_i phi_i, hence
W(s) = W0 / (1 + W0 K(s)) where K(s) is the integral of k. Blow-up is the
first zero of the denominator.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, optimize

from .errors import DomainError, FieldDomainError
from .fields import FieldSample, SolutionField, w_transversal
from .richness import COINCIDENCE_TOL, DiagonalSystem, angle_gap, reconstruct_G


@dataclass
class CharacteristicCurve:
    index: int
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    step: float
    start: tuple
    samples: list = field(repr=False, default_factory=list)
    terminated: str = "max_length"


def _direction(field_: SolutionField, sys: DiagonalSystem, i: int, x, y, hint):
    sample = field_.evaluate(x, y, hint)
    phi = sys.angles(tuple(float(v) for v in sample.values))
    return math.cos(phi[i]), math.sin(phi[i]), sample, phi


def trace_characteristic(field_: SolutionField, sys: DiagonalSystem, i: int, start,
                         step: float | None = None, max_length: float = 1.0,
                         hint=None) -> CharacteristicCurve:
    """Fixed-step RK4 for (x', y') = (cos phi_i, sin phi_i) in arclength."""
    if step is None:
        step = field_.diameter() / 2000.0
    x, y = float(start[0]), float(start[1])
    cx, cy, sample, phi = _direction(field_, sys, i, x, y, hint)
    xs, ys, samples = [x], [y], [sample]
    nsteps = int(math.floor(max_length / step + 1e-9))
    reason = "max_length"
    for _ in range(nsteps):
        h = sample.hint
        try:
            k1 = (cx, cy)
            k2 = _direction(field_, sys, i, x + 0.5 * step * k1[0], y + 0.5 * step * k1[1], h)[:2]
            k3 = _direction(field_, sys, i, x + 0.5 * step * k2[0], y + 0.5 * step * k2[1], h)[:2]
            k4 = _direction(field_, sys, i, x + step * k3[0], y + step * k3[1], h)[:2]
            nx = x + step / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            ny = y + step / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            cx, cy, sample, phi = _direction(field_, sys, i, nx, ny, h)
        except (FieldDomainError, DomainError):
            reason = "domain"
            break
        if min(angle_gap(phi[i], phi[m]) for m in range(sys.n) if m != i) <= COINCIDENCE_TOL:
            reason = "strictness"
            break
        x, y = nx, ny
        xs.append(x)
        ys.append(y)
        samples.append(sample)
    s = step * np.arange(len(xs))
    return CharacteristicCurve(i, np.array(xs), np.array(ys), s, step, (float(start[0]), float(start[1])),
                               samples, reason)


def _phi_partial(sys: DiagonalSystem, i: int, r) -> float:
    return sys.phi[i].partial(i, r)


def riccati_coefficient(sys: DiagonalSystem, field_: SolutionField, i: int, point,
                        G_base, sample: FieldSample | None = None) -> tuple:
    """(G_i, k) at ``point`` with k = exp(G_i) * d_i phi_i."""
    sample = sample or field_.evaluate(*point)
    r = tuple(float(v) for v in sample.values)
    G = reconstruct_G(sys, i, G_base, r)
    return G, math.exp(G) * _phi_partial(sys, i, r)


@dataclass
class RiccatiTrace:
    s: np.ndarray
    G: np.ndarray
    k: np.ndarray
    K: np.ndarray
    W: np.ndarray
    w: np.ndarray
    W0: float
    s_star: float | None

    @property
    def denominator(self) -> np.ndarray:
        return 1.0 + self.W0 * self.K

    def to_csv(self, path, curve: CharacteristicCurve) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["s", "x", "y", "G", "k", "K", "W", "w"])
            for m in range(len(self.s)):
                wr.writerow([repr(float(v)) for v in (self.s[m], curve.x[m], curve.y[m], self.G[m],
                                                      self.k[m], self.K[m], self.W[m], self.w[m])])


def cumulative_simpson(k: np.ndarray, step: float) -> np.ndarray:
    """Running integral of uniformly spaced samples.

    Even nodes get composite Simpson, whose error is a smooth C h^4 term.
    Odd nodes add the integral of a local cubic over one half-panel (error
    O(h^5)), so the error stays smooth across nodes. Halving the step then
    divides it by ~16.
    """
    k = np.asarray(k, float)
    N = k.size
    K = np.zeros(N)
    if N == 1:
        return K
    if N < 4:
        if N == 2:
            K[1] = 0.5 * step * (k[0] + k[1])
        else:
            K[1] = step / 12.0 * (5 * k[0] + 8 * k[1] - k[2])
            K[2] = step / 3.0 * (k[0] + 4 * k[1] + k[2])
        return K
    for m in range(2, N, 2):
        K[m] = K[m - 2] + step / 3.0 * (k[m - 2] + 4 * k[m - 1] + k[m])
    for m in range(1, N, 2):
        a = m - 1
        if a == 0:
            inc = 9 * k[0] + 19 * k[1] - 5 * k[2] + k[3]
        elif m + 1 < N:
            inc = -k[a - 1] + 13 * k[a] + 13 * k[m] - k[m + 1]
        else:
            inc = k[a - 2] - 5 * k[a - 1] + 19 * k[a] + 9 * k[m]
        K[m] = K[a] + step / 24.0 * inc
    return K


def locate_blowup(s: np.ndarray, K: np.ndarray, W0: float) -> float | None:
    """First zero of 1 + W0 K(s) on the sampled range, or None.

    The zero is bracketed by the first sign change of the sampled
    denominator and refined by brentq on a local six-point interpolant.
    """
    s = np.asarray(s, float)
    D = 1.0 + W0 * np.asarray(K, float)
    hits = np.nonzero(D <= 0.0)[0]
    if hits.size == 0:
        return None
    m = int(hits[0])
    if m == 0:
        return float(s[0])
    if D[m] == 0.0:
        return float(s[m])
    lo = max(0, min(m - 3, len(s) - 6))
    hi = min(len(s), lo + 6)
    poly = interpolate.BarycentricInterpolator(s[lo:hi], D[lo:hi])
    return float(optimize.brentq(lambda t: float(poly(t)), s[m - 1], s[m], xtol=1e-15, rtol=1e-15))


def integrate_riccati(s: np.ndarray, k: np.ndarray, W0: float, G=None, step=None) -> RiccatiTrace:
    """Closed-form Riccati solution from samples of k along a uniform arclength grid."""
    s = np.asarray(s, float)
    k = np.asarray(k, float)
    if step is None:
        step = float(s[1] - s[0]) if s.size > 1 else 1.0
    K = cumulative_simpson(k, step)
    D = 1.0 + W0 * K
    with np.errstate(divide="ignore"):
        W = np.where(D != 0.0, W0 / np.where(D == 0.0, 1.0, D), np.inf)
    G = np.zeros_like(s) if G is None else np.asarray(G, float)
    return RiccatiTrace(s, G, k, K, W, np.exp(G) * W, float(W0), locate_blowup(s, K, W0))


@dataclass
class BlowupResult:
    index: int
    start: tuple
    s_star: float | None
    curve: CharacteristicCurve
    trace: RiccatiTrace
    G_base: tuple
    w0: float

    @property
    def verdict(self) -> str:
        return "blow-up" if self.s_star is not None else "none in range"

    def summary(self) -> dict:
        return {"index": self.index, "start": list(self.start), "s_star": self.s_star,
                "verdict": self.verdict}

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def predict_blowup(field_: SolutionField, sys: DiagonalSystem, i: int, start,
                   W0: float | None = None, step: float | None = None,
                   max_length: float = 1.0, G_base=None, hint=None) -> BlowupResult:
    """Trace the i-th characteristic and solve the Riccati equation along it.

    With ``W0`` None the initial value is measured from the field:
    W0 = exp(-G_i(start)) * w_i(start).
    """
    curve = trace_characteristic(field_, sys, i, start, step, max_length, hint)
    r0 = tuple(float(v) for v in curve.samples[0].values)
    G_base = r0 if G_base is None else tuple(float(v) for v in G_base)
    Gk = [riccati_coefficient(sys, field_, i, None, G_base, sample=smp) for smp in curve.samples]
    G = np.array([g for g, _ in Gk])
    k = np.array([kk for _, kk in Gk])
    w0 = w_transversal(field_, sys, i, curve.start, sample=curve.samples[0])
    if W0 is None:
        W0 = math.exp(-G[0]) * w0
    trace = integrate_riccati(curve.s, k, W0, G, curve.step)
    return BlowupResult(i, curve.start, trace.s_star, curve, trace, G_base, w0)


def cross_check_w(field_: SolutionField, sys: DiagonalSystem, i: int,
                  curve: CharacteristicCurve, trace: RiccatiTrace,
                  min_denominator: float = 1e-2) -> tuple:
    """Max |exp(G) W - w_measured| before blow-up, and max |w_measured| there.

    Samples whose Riccati denominator has dropped below ``min_denominator``
    (or past s*) are excluded.
    """
    dev, wmax = 0.0, 0.0
    D = trace.denominator
    for m, smp in enumerate(curve.samples):
        if D[m] < min_denominator or (trace.s_star is not None and trace.s[m] >= trace.s_star):
            break
        w_meas = w_transversal(field_, sys, i, (curve.x[m], curve.y[m]), sample=smp)
        dev = max(dev, abs(trace.w[m] - w_meas))
        wmax = max(wmax, abs(w_meas))
    return dev, wmax


def measured_w(field_: SolutionField, sys: DiagonalSystem, i: int, curve: CharacteristicCurve) -> np.ndarray:
    return np.array([w_transversal(field_, sys, i, (curve.x[m], curve.y[m]), sample=smp)
                     for m, smp in enumerate(curve.samples)])


def genuine_nonlinearity_sign(sys: DiagonalSystem, i: int, curve: CharacteristicCurve) -> list:
    """Sign of d_i phi_i at each curve sample (reported, never enforced)."""
    out = []
    for smp in curve.samples:
        d = _phi_partial(sys, i, tuple(float(v) for v in smp.values))
        out.append(0 if d == 0.0 else (1 if d > 0 else -1))
    return out
