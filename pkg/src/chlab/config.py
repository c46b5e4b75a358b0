"""Scenario configuration: parsing, validation, defaults, and hashing.

A scenario bundles everything one run needs — grid, initial datum, solver
knobs, weights to track, and which diagnostic layers to enable.  Configs
arrive as YAML (nested key/value sections, see ``configs/``) or as plain
dicts; both go through the same validator, which fills every default in
and echoes the *effective* configuration back, so a run can always be
reproduced from its summary alone.

Validation errors carry the dotted path of the offending field
("solver.cfl", "weights_to_track[1].p") so a typo in a config file points
at the line that caused it, not at a traceback.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Tuple

import yaml

from .field import Field, Grid
from .initial_data import InitialData, initial_data_from_dict, initial_data_to_dict
from .solver import SolverConfig, boundary_fraction
from .weights import Weight, weight_from_dict, weight_to_dict

__all__ = [
    "ConfigError",
    "CertificationWarning",
    "TrackedWeight",
    "Scenario",
    "scenario_from_dict",
    "parse_scenario",
    "load_scenario",
    "scenario_to_dict",
    "canonical_json",
]

#: Initial data may not touch the domain boundary: the outermost cells must
#: stay below this fraction of the peak at t = 0 (runs on a periodic grid
#: only stand in for the line while wrap-around influence is negligible).
INITIAL_BOUNDARY_TOL = 1e-10


class ConfigError(ValueError):
    """A scenario config failed validation; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CertificationWarning(UserWarning):
    """A tracked weight is accepted but lies outside the certifiable range,
    so no persistence guarantee attaches to its norm."""


@dataclass(frozen=True)
class TrackedWeight:
    """One weighted norm to monitor during a run: W(t) with this weight
    and exponent p (math.inf for the sup norm)."""

    weight: Weight
    p: float

    def as_dict(self) -> dict:
        return {"weight": weight_to_dict(self.weight), "p": _p_to_json(self.p)}


@dataclass(frozen=True)
class Scenario:
    """A fully validated run description (all defaults resolved)."""

    name: str
    grid: Grid
    initial_data: InitialData
    solver: SolverConfig
    weights_to_track: Tuple[TrackedWeight, ...] = ()
    profiles_enabled: bool = False
    predictors_enabled: bool = True
    rate_cap_factor: Optional[float] = None

    def effective_config(self) -> dict:
        """Complete config echo: parsing this dict again reproduces the
        scenario exactly (every default is spelled out)."""
        return scenario_to_dict(self)

    def content_hash(self) -> str:
        """Hash of the effective configuration (first 12 hex digits)."""
        digest = hashlib.sha256(canonical_json(self.effective_config()).encode())
        return digest.hexdigest()[:12]

    def run_dirname(self) -> str:
        """Artifact directory name: scenario name plus content hash, so
        distinct effective configs never collide and reruns of the same
        config land in the same place."""
        return f"{self.name}-{self.content_hash()}"

    def build_initial(self) -> Field:
        return self.initial_data.build(self.grid)

    def with_profiles(self) -> "Scenario":
        return replace(self, profiles_enabled=True)


def canonical_json(data: Any) -> str:
    """Deterministic JSON encoding (sorted keys, no whitespace)."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _p_to_json(p: float) -> Any:
    return "inf" if math.isinf(p) else p


def _parse_p(raw: Any, path: str) -> float:
    if isinstance(raw, str):
        if raw.strip().lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(path, f"expected a number or 'inf', got {raw!r}")
    p = _number(raw, path)
    if not (p >= 1.0):
        raise ConfigError(path, f"exponent p must be >= 1, got {p}")
    return p


def _number(raw: Any, path: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(raw).__name__} {raw!r}")
    value = float(raw)
    if not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {raw!r}")
    return value


def _integer(raw: Any, path: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        if isinstance(raw, float) and raw.is_integer():
            return int(raw)
        raise ConfigError(path, f"expected an integer, got {raw!r}")
    return int(raw)


def _boolean(raw: Any, path: str) -> bool:
    if not isinstance(raw, bool):
        raise ConfigError(path, f"expected true/false, got {raw!r}")
    return raw


def _mapping(raw: Any, path: str) -> Mapping:
    if not isinstance(raw, Mapping):
        raise ConfigError(path, f"expected a mapping, got {type(raw).__name__}")
    return raw


def _reject_unknown(data: Mapping, allowed: Sequence[str], path: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(
            path or "config",
            f"unknown key(s) {', '.join(map(repr, unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}",
        )


_SOLVER_KEYS = ("t_end", "cfl", "dt_max", "dt_floor", "slope_stop",
                "snapshot_stride", "dealias", "boundary_tol")

_INITIAL_KEYS = {
    "mollified_peakon": ("kind", "c", "x0", "mollify_width"),
    "mollified_exponential": ("kind", "amplitude", "rate", "center",
                              "mollify_width"),
    "gaussian": ("kind", "amplitude", "width", "center"),
    "odd_gaussian_derivative": ("kind", "amplitude", "width"),
    "from_potential": ("kind", "m0"),
    "from_file": ("kind", "path"),
}

_POTENTIAL_KEYS = {
    "gaussian": ("shape", "amplitude", "width", "center"),
    "tanh_gaussian": ("shape", "amplitude", "slope_width", "envelope_width"),
}

_WEIGHT_KEYS = {
    "standard": ("kind", "a", "b", "c", "d"),
    "one_sided": ("kind", "a"),
    "truncated": ("kind", "cap", "base"),
    "tabulated": ("kind", "x", "samples"),
}

_TOP_KEYS = ("name", "grid", "initial_data", "solver", "weights_to_track",
             "profiles_enabled", "predictors_enabled", "rate_cap_factor")


def _parse_grid(raw: Any, path: str) -> Grid:
    data = _mapping(raw, path)
    _reject_unknown(data, ("L", "N"), path)
    if "L" not in data:
        raise ConfigError(f"{path}.L", "required (half-width of the domain)")
    if "N" not in data:
        raise ConfigError(f"{path}.N", "required (number of grid points)")
    L = _number(data["L"], f"{path}.L")
    N = _integer(data["N"], f"{path}.N")
    try:
        return Grid(L=L, N=N)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_initial(raw: Any, path: str) -> InitialData:
    data = _mapping(raw, path)
    kind = data.get("kind")
    if kind not in _INITIAL_KEYS:
        raise ConfigError(
            f"{path}.kind",
            f"unknown initial-data kind {kind!r}; "
            f"one of: {', '.join(sorted(_INITIAL_KEYS))}",
        )
    _reject_unknown(data, _INITIAL_KEYS[kind], path)
    if kind == "from_potential":
        m0 = _mapping(data.get("m0", {}), f"{path}.m0")
        shape = m0.get("shape")
        if shape not in _POTENTIAL_KEYS:
            raise ConfigError(
                f"{path}.m0.shape",
                f"unknown potential shape {shape!r}; "
                f"one of: {', '.join(sorted(_POTENTIAL_KEYS))}",
            )
        _reject_unknown(m0, _POTENTIAL_KEYS[shape], f"{path}.m0")
    try:
        return initial_data_from_dict(dict(data))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_weight(raw: Any, path: str) -> Weight:
    data = _mapping(raw, path)
    kind = data.get("kind")
    if kind not in _WEIGHT_KEYS:
        raise ConfigError(
            f"{path}.kind",
            f"unknown weight kind {kind!r}; one of: "
            f"{', '.join(sorted(_WEIGHT_KEYS))}",
        )
    _reject_unknown(data, _WEIGHT_KEYS[kind], path)
    if kind == "truncated":
        _parse_weight(data.get("base"), f"{path}.base")
    try:
        return weight_from_dict(dict(data))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_tracked(raw: Any, path: str) -> Tuple[TrackedWeight, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, Sequence) or isinstance(raw, (str, bytes)):
        raise ConfigError(path, "expected a list of {weight, p} entries")
    out = []
    for i, entry in enumerate(raw):
        entry_path = f"{path}[{i}]"
        data = _mapping(entry, entry_path)
        _reject_unknown(data, ("weight", "p"), entry_path)
        if "weight" not in data:
            raise ConfigError(f"{entry_path}.weight", "required")
        weight = _parse_weight(data["weight"], f"{entry_path}.weight")
        p = _parse_p(data.get("p", "inf"), f"{entry_path}.p")
        if not getattr(weight, "certifiable", True):
            warnings.warn(
                f"{entry_path}.weight: {weight} grows faster than "
                f"exponential; it will be tracked, but admissibility cannot "
                f"be certified for it",
                CertificationWarning, stacklevel=2)
        out.append(TrackedWeight(weight=weight, p=p))
    return tuple(out)


def _parse_solver(raw: Any, path: str) -> SolverConfig:
    data = _mapping(raw, path)
    _reject_unknown(data, _SOLVER_KEYS, path)
    if "t_end" not in data:
        raise ConfigError(f"{path}.t_end", "required (end time of the run)")
    kwargs: dict = {"t_end": _number(data["t_end"], f"{path}.t_end")}
    for key in ("cfl", "dt_max", "dt_floor", "slope_stop", "boundary_tol"):
        if key in data:
            kwargs[key] = _number(data[key], f"{path}.{key}")
    if "snapshot_stride" in data:
        kwargs["snapshot_stride"] = _integer(
            data["snapshot_stride"], f"{path}.snapshot_stride")
    if "dealias" in data:
        kwargs["dealias"] = _boolean(data["dealias"], f"{path}.dealias")
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def scenario_from_dict(data: Mapping, *, default_name: Optional[str] = None,
                       check_initial: bool = True) -> Scenario:
    """Validate a raw config mapping into a Scenario.

    Fills defaults, rejects unknown keys with their dotted path, and
    (unless ``check_initial`` is disabled) builds the initial datum once
    to verify it is not boundary-contaminated on the requested grid.
    """
    data = _mapping(data, "")
    _reject_unknown(data, _TOP_KEYS, "")

    name = data.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "required (a non-empty string)")
    if any(ch in name for ch in "/\\ \t\n"):
        raise ConfigError("name", f"must not contain spaces or slashes: {name!r}")

    for key in ("grid", "initial_data", "solver"):
        if key not in data:
            raise ConfigError(key, "required section")

    grid = _parse_grid(data["grid"], "grid")
    initial = _parse_initial(data["initial_data"], "initial_data")
    solver = _parse_solver(data["solver"], "solver")
    tracked = _parse_tracked(data.get("weights_to_track"), "weights_to_track")

    profiles = data.get("profiles_enabled", False)
    predictors = data.get("predictors_enabled", True)
    profiles = _boolean(profiles, "profiles_enabled")
    predictors = _boolean(predictors, "predictors_enabled")

    rate_cap = data.get("rate_cap_factor")
    if rate_cap is not None:
        rate_cap = _number(rate_cap, "rate_cap_factor")
        if rate_cap <= 1.0:
            raise ConfigError("rate_cap_factor",
                              f"must exceed 1 (cap relative to the initial "
                              f"value), got {rate_cap}")

    scenario = Scenario(
        name=name, grid=grid, initial_data=initial, solver=solver,
        weights_to_track=tracked, profiles_enabled=profiles,
        predictors_enabled=predictors, rate_cap_factor=rate_cap,
    )

    if check_initial:
        try:
            u0 = scenario.build_initial()
        except (ValueError, OSError) as exc:
            raise ConfigError("initial_data", str(exc)) from exc
        edge = boundary_fraction(u0)
        if edge > INITIAL_BOUNDARY_TOL:
            raise ConfigError(
                "initial_data",
                f"boundary-contaminated on grid L={grid.L}, N={grid.N}: "
                f"relative edge magnitude {edge:.3e} exceeds "
                f"{INITIAL_BOUNDARY_TOL:.0e} (enlarge L or shrink the tails)",
            )
    return scenario


def parse_scenario(text: str, *, default_name: Optional[str] = None,
                   check_initial: bool = True) -> Scenario:
    """Parse YAML text into a validated Scenario."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError("", f"invalid YAML{where}: {exc}") from exc
    if data is None:
        raise ConfigError("", "empty config")
    if not isinstance(data, Mapping):
        raise ConfigError("", f"expected a mapping at top level, got "
                              f"{type(data).__name__}")
    return scenario_from_dict(data, default_name=default_name,
                              check_initial=check_initial)


def load_scenario(path, *, check_initial: bool = True) -> Scenario:
    """Read and validate a scenario config file (YAML)."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read config {p}: {exc}") from exc
    return parse_scenario(text, default_name=p.stem,
                          check_initial=check_initial)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Serialize a Scenario to its effective (fully defaulted) dict."""
    solver = scenario.solver
    return {
        "name": scenario.name,
        "grid": {"L": scenario.grid.L, "N": scenario.grid.N},
        "initial_data": initial_data_to_dict(scenario.initial_data),
        "solver": {
            "t_end": solver.t_end,
            "cfl": solver.cfl,
            "dt_max": solver.dt_max,
            "dt_floor": solver.dt_floor,
            "slope_stop": solver.slope_stop,
            "snapshot_stride": solver.snapshot_stride,
            "dealias": solver.dealias,
            "boundary_tol": solver.boundary_tol,
        },
        "weights_to_track": [tw.as_dict() for tw in scenario.weights_to_track],
        "profiles_enabled": scenario.profiles_enabled,
        "predictors_enabled": scenario.predictors_enabled,
        "rate_cap_factor": scenario.rate_cap_factor,
    }
