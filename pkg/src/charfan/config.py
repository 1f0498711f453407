"""TOML run configurations and the builders that turn them into analysis objects."""
from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .errors import CharfanError, ConfigError, ParseError
from .expr import parse_expression
from .geoflow import CubicIntegralState, build_system22
from .library import EPSILON_CLAWS, non_rich_library, rich_library, two_component_system
from .pencil import QuasiLinearSystem
from .richness import DiagonalSystem

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = ("pencil", "richness", "riccati", "claws", "geoflow")


def catalog_dir() -> Path:
    return Path(str(resources.files("charfan") / "catalog"))


def catalog_files(command: str | None = None) -> list:
    files = sorted(catalog_dir().glob("*.toml"))
    if command is None:
        return files
    return [f for f in files if load_config(f)["command"] == command]


def load_config(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if cfg.get("command") not in COMMANDS:
        raise ConfigError(f"{path}: 'command' must be one of {', '.join(COMMANDS)}")
    cfg.setdefault("name", path.stem)
    return cfg


def require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key '{key}' in [{where}]")
    return section[key]


def parse_in(text, variables, where: str):
    """Parse an expression, prefixing position-annotated errors with the config key."""
    try:
        return parse_expression(str(text), variables)
    except ParseError as exc:
        raise ConfigError(f"[{where}] expression {str(text)!r}: {exc}") from None


def _library_diagonal(name: str) -> DiagonalSystem:
    named = {e.name: e.system for e in rich_library() + non_rich_library()}
    named["n=2"] = two_component_system()
    if name not in named:
        raise ConfigError(f"unknown library system {name!r}; known: {', '.join(sorted(named))}")
    return named[name]


def library_golden(name: str):
    for e in non_rich_library():
        if e.name == name:
            return e.golden
    return None


def build_diagonal(sec: dict, where: str = "diagonal") -> DiagonalSystem:
    if "library" in sec:
        return _library_diagonal(sec["library"])
    names = tuple(require(sec, "names", where))
    box = {}
    if "lower" in sec or "upper" in sec:
        box = dict(lower=tuple(require(sec, "lower", where)), upper=tuple(require(sec, "upper", where)))
    label = sec.get("label", "")
    if "angles" in sec:
        texts, speeds = sec["angles"], False
    else:
        texts, speeds = require(sec, "speeds", where), True
    exprs = [parse_in(t, names, where) for t in texts]
    if speeds:
        exprs = [e.apply("atan") for e in exprs]
    return DiagonalSystem(names, tuple(exprs), box.get("lower"), box.get("upper"), label)


def build_system(sec: dict, where: str = "system") -> QuasiLinearSystem:
    if "geodesic" in sec:
        g = sec["geodesic"]
        return build_system22(require(g, "a", where + ".geodesic"), require(g, "b", where + ".geodesic"))
    names = tuple(require(sec, "variables", where))
    conv = lambda M: tuple(tuple(parse_in(t, names, where) for t in row) for row in M)
    try:
        return QuasiLinearSystem(names, conv(require(sec, "A", where)), conv(require(sec, "B", where)))
    except ValueError as exc:
        if isinstance(exc, CharfanError):
            raise
        raise ConfigError(f"[{where}] {exc}") from None


def build_cubic_state(sec: dict, where: str = "geoflow") -> CubicIntegralState:
    vals = [require(sec, k, where) for k in ("a", "b", "u", "v", "L")]
    xy = ("x", "y")
    u, v, L = (parse_in(t, xy, where) for t in vals[2:])
    return CubicIntegralState(float(vals[0]), float(vals[1]), u, v, L)


def candidate_texts(sec: dict, where: str = "candidate") -> tuple:
    if sec.get("preset") == "epsilon":
        return EPSILON_CLAWS["g"], EPSILON_CLAWS["h"]
    return require(sec, "g", where), require(sec, "h", where)

