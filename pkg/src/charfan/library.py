"""Bundled diagonal systems used by the CLI catalog and the test-suite.

Rich systems satisfy the cross-derivative identities identically; each
non-rich system carries a golden point (triple, point) where both residuals
are far from zero.
"""
from __future__ import annotations

from dataclasses import dataclass

from .richness import DiagonalSystem, rotate_fan

R3 = ("r1", "r2", "r3")
R4 = ("r1", "r2", "r3", "r4")

EPS_BOX = dict(lower=(0.0, 0.8, 1.6), upper=(0.5, 1.3, 2.1))


def epsilon_system(eps: float = 1.0, n: int = 3) -> DiagonalSystem:
    """lambda_m = r_m + eps * (r_1 + ... + r_n)."""
    names = R3 if n == 3 else tuple(f"r{m + 1}" for m in range(n))
    total = "(" + " + ".join(names) + ")"
    lam = [f"{r} + {eps!r}*{total}" for r in names]
    lower = tuple(0.8 * m for m in range(n))
    upper = tuple(0.8 * m + 0.5 for m in range(n))
    return DiagonalSystem.from_speeds(names, lam, lower=lower, upper=upper,
                                      label=f"epsilon n={n} eps={eps}")


def perturbed_epsilon() -> DiagonalSystem:
    return DiagonalSystem.from_angles(
        R3,
        ["atan(r1 + r2 + r3 + r1) + 0.1*r2*r3",
         "atan(r2 + (r1 + r2 + r3))",
         "atan(r3 + (r1 + r2 + r3))"],
        **EPS_BOX, label="epsilon-perturbed",
    )


# (triple, point) with 0-based indices
PERTURBED_GOLDEN = ((1, 0, 2), (0.3, 0.7, 1.2))


def constant_system() -> DiagonalSystem:
    return DiagonalSystem.from_angles(R3, ["0.2", "1.0", "2.5"],
                                      lower=(-1, -1, -1), upper=(1, 1, 1), label="constant")


def decoupled_system() -> DiagonalSystem:
    return DiagonalSystem.from_angles(
        R3, ["0.3 + 0.2*sin(r1)", "1.2 + 0.1*r2^2", "2.2 + 0.3*atan(r3)"],
        lower=(-1, -1, -1), upper=(1, 1, 1), label="decoupled",
    )


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    system: DiagonalSystem
    rich: bool
    golden: tuple | None = None  # (triple, point) for non-rich systems


def rich_library() -> list:
    rotated = rotate_fan(epsilon_system(), 0.4)
    rotated = DiagonalSystem(rotated.names, rotated.phi, rotated.lower, rotated.upper,
                             "epsilon rotated by 0.4")
    return [
        LibraryEntry("epsilon", epsilon_system(), True),
        LibraryEntry("epsilon-0.3", epsilon_system(0.3), True),
        LibraryEntry("epsilon-n4", epsilon_system(1.0, 4), True),
        LibraryEntry("constant", constant_system(), True),
        LibraryEntry("decoupled", decoupled_system(), True),
        LibraryEntry("epsilon-rotated", rotated, True),
    ]


def non_rich_library() -> list:
    return [
        LibraryEntry("epsilon-perturbed", perturbed_epsilon(), False, PERTURBED_GOLDEN),
        LibraryEntry(
            "product-speed",
            DiagonalSystem.from_speeds(R3, ["3 + r1 + r2*r3", "r2", "-1 - r3"],
                                       lower=(0, 0, 0), upper=(1, 1, 1), label="product-speed"),
            False, ((1, 0, 2), (0.36, 0.76, 0.03)),
        ),
        LibraryEntry(
            "quadratic-sum",
            DiagonalSystem.from_speeds(
                R3, ["r1 + (r1 + r2 + r3)^2", "r2 + (r1 + r2 + r3)^2", "r3 + (r1 + r2 + r3)^2"],
                **EPS_BOX, label="quadratic-sum"),
            False, ((0, 1, 2), (0.42, 1.27, 1.61)),
        ),
        LibraryEntry(
            "angle-coupled",
            DiagonalSystem.from_angles(
                R3, ["0.3 + 0.2*sin(r1*r2*r3)", "1.1 + 0.2*r2 + 0.1*r1*r3", "2.3 + 0.2*cos(r3 + r1*r2)"],
                lower=(-1, -1, -1), upper=(1, 1, 1), label="angle-coupled"),
            False, ((0, 1, 2), (-0.95, -0.87, 0.93)),
        ),
        LibraryEntry(
            "decoupled-perturbed",
            DiagonalSystem.from_angles(
                R3, ["0.3 + 0.2*sin(r1) + 0.1*r2*r3", "1.2 + 0.1*r2^2", "2.2 + 0.3*atan(r3)"],
                lower=(-1, -1, -1), upper=(1, 1, 1), label="decoupled-perturbed"),
            False, ((1, 0, 2), (0.61, 0.57, 0.83)),
        ),
        LibraryEntry(
            "epsilon-n4-coupled",
            DiagonalSystem.from_speeds(
                R4, [f"{r} + r1*r2 + r3*r4" for r in R4],
                lower=(0.0, 0.8, 1.6, 2.4), upper=(0.5, 1.3, 2.1, 2.9), label="epsilon-n4-coupled"),
            False, ((0, 2, 1), (0.25, 1.05, 1.85, 2.65)),
        ),
    ]


def two_component_system() -> DiagonalSystem:
    return DiagonalSystem.from_speeds(("r1", "r2"), ["r2", "r1 + 2"],
                                      lower=(0, 0), upper=(1, 1), label="n=2")


# Conservation laws of the epsilon system (eps = 1) in Riemann invariants:
# the elementary symmetric functions and their fluxes.
EPSILON_CLAWS = {
    "g": ["r1 + r2 + r3", "r1*r2 + r1*r3 + r2*r3", "r1*r2*r3"],
    "h": [
        "r1^2 + r2^2 + r3^2 + r1*r2 + r1*r3 + r2*r3",
        "(r1 + r2 + r3)*(r1*r2 + r1*r3 + r2*r3) - r1*r2*r3",
        "r1*r2*r3*(r1 + r2 + r3)",
    ],
}


# -- solution fields -----------------------------------------------------------

SIMPLE_WAVE_STATE = (0.0, 0.9, 1.7)


def simple_wave(profile: str, bounds, allow_crossing: bool = False, xi_range=(-0.5, 0.5)):
    """Simple wave of the epsilon system: r1 carried from the y-axis, r2, r3 frozen.

    With these constants the characteristic from xi has slope lambda = 2 rho + 2.6,
    so for a decreasing profile neighbours cross on the line x = 1.
    """
    from .expr import parse_expression
    from .fields import SimpleWaveSpec, build_simple_wave

    spec = SimpleWaveSpec(epsilon_system(), 0, SIMPLE_WAVE_STATE, (0.0, 0.0), (0.0, 1.0),
                          parse_expression(profile, ("xi",)), tuple(xi_range))
    return build_simple_wave(spec, bounds, allow_crossing)


def exact_fields() -> dict:
    """Named exact solutions paired with their diagonal systems."""
    from .fields import build_analytic_field

    c = constant_system()
    plane = build_analytic_field(
        ["sin(x*sin(0.2) - y*cos(0.2))", "(x*sin(1.0) - y*cos(1.0))^2",
         "exp(0.3*(x*sin(2.5) - y*cos(2.5)))"], bounds=(-1, -1, 1, 1))
    return {
        "constant": (epsilon_system(), build_analytic_field(["0.2", "0.9", "1.7"], bounds=(0, 0, 1, 1))),
        "plane-waves": (c, plane),
        "expansive-wave": (epsilon_system(), simple_wave("0.25 + 0.5*xi", (0.0, -0.5, 3.0, 4.0))),
        "compressive-wave-before-crossing": (epsilon_system(),
                                             simple_wave("0.25 - 0.5*xi", (0.0, -0.5, 0.9, 4.0))),
        "gentle-wave": (epsilon_system(), simple_wave("0.1*xi", (0.0, -1.0, 0.3, 3.0), xi_range=(-1.0, 2.0))),
    }


def non_solution_field():
    """r = (x, c2, c3) does not solve the epsilon system."""
    from .fields import build_analytic_field

    return epsilon_system(), build_analytic_field(["x", "0.9", "1.7"], bounds=(0, 0, 1, 1))
