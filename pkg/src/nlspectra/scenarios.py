"""Named run configurations for the figure reproductions.

Configs are plain JSON documents (``"schema": 1``).  Evolution configs look
like::

    {"schema": 1, "kind": "evolve",
     "initial": {"kind": "soliton", "E": -0.9, "epsilon": -1.0, "x0": -2.0, "k": 0.5},
     "nonlinearity": {"kind": "zakharov", "epsilon": -1.0},
     "potential": {"kind": "bump", "V0": 1.0, "xv": 4.0, "sigma": 0.5},
     "grid": {"x_min": -30.0, "x_max": 30.0, "n": 1501},
     "evolution": {"t_end": 22.0, "dt": 0.0002, "record_every": 500,
                   "absorber": {"width": 4.0, "strength": 0.002},
                   "partial_intervals": [[null, -1.0], [1.0, null]]},
     "report": "scattering"}

``null`` interval ends stand for -inf / +inf.
"""

from __future__ import annotations

import copy
import math

import numpy as np

from .field import Absorber, EvolutionConfig, FieldState, grid, scattering_intervals
from .macrostate import gausson, soliton
from .model import Bump, ModelError, Nonlinearity, Potential, nonlinearity_from_json, potential_from_json
from .spectral import ShootingConfig

SCHEMA = 1


class ConfigError(ValueError):
    pass


def _bump(V0, xv, sigma=0.5):
    return {"kind": "bump", "V0": V0, "xv": xv, "sigma": sigma}


def _evolve(description, initial, potential, t_end, *, grid_=None, intervals=(), report="none",
            record_every=500, snapshot_every=25000):
    nl = {"kind": "zakharov" if initial["kind"] == "soliton" else "logarithmic", "epsilon": initial["epsilon"]}
    return {
        "schema": SCHEMA,
        "kind": "evolve",
        "description": description,
        "initial": initial,
        "nonlinearity": nl,
        "potential": potential,
        "grid": grid_ or {"x_min": -16.0, "x_max": 16.0, "n": 801},
        "evolution": {
            "t_end": t_end,
            "dt": 2e-4,
            "record_every": record_every,
            "snapshot_every": snapshot_every,
            "fixed_point_tol": 1e-12,
            "max_fp_iters": 50,
            "absorber": {"width": 4.0, "strength": 2e-3},
            "partial_intervals": [list(iv) for iv in intervals],
        },
        "report": report,
    }


_GAUSSON = {"kind": "gausson", "E": -1.0, "epsilon": -1.0, "x0": 0.0, "k": 0.0}
_SOLITON = {"kind": "soliton", "E": -0.5, "epsilon": -1.0, "x0": 0.0, "k": 0.0}
_TRAVELLING = {"kind": "soliton", "E": -0.9, "epsilon": -1.0, "x0": -2.0}
_WIDE = {"x_min": -30.0, "x_max": 30.0, "n": 1501}
_SIDES = ([None, -1.0], [1.0, None])


EVOLVE_SCENARIOS: dict[str, dict] = {
    "fig7a": _evolve("gausson next to a shallow well at x=2", _GAUSSON, _bump(-0.75, 2.0), 60.0,
                     intervals=([-8.0, 10.0],), report="centroid"),
    "fig7b": _evolve("Zakharov soliton next to a shallow well at x=2", _SOLITON, _bump(-0.75, 2.0), 60.0,
                     intervals=([-8.0, 10.0],), report="centroid"),
    "fig7c": _evolve("Zakharov soliton next to a deeper well at x=2", _SOLITON, _bump(-2.0, 2.0), 60.0,
                     intervals=([-8.0, 10.0],), report="centroid"),
    "fig8a": _evolve("gausson on a low barrier (deflects intact)", _GAUSSON, _bump(0.5, 0.001), 16.0,
                     intervals=_SIDES, report="split"),
    "fig8b": _evolve("gausson on a medium barrier (deflects, sheds mass)", _GAUSSON, _bump(1.0, 0.001), 14.0,
                     intervals=_SIDES, report="split"),
    "fig8c": _evolve("gausson on a high barrier (splits)", _GAUSSON, _bump(2.0, 0.001), 10.0,
                     intervals=_SIDES, report="split"),
    "fig9a": _evolve("slow soliton on a barrier (reflected)", dict(_TRAVELLING, k=0.5), _bump(1.0, 4.0), 22.0,
                     grid_=_WIDE, report="scattering"),
    "fig9b": _evolve("intermediate soliton on a barrier (splits)", dict(_TRAVELLING, k=0.7), _bump(1.0, 4.0), 22.0,
                     grid_=_WIDE, report="scattering"),
    "fig9c": _evolve("fast soliton on a lower barrier (transmitted)", dict(_TRAVELLING, k=1.0), _bump(0.5, 4.0),
                     22.0, grid_=_WIDE, report="scattering"),
    "fig10a": _evolve("soliton between two shallow wells at x=-2, 2", _SOLITON,
                      {"kind": "sum", "bumps": [_bump(-0.5, -2.0), _bump(-0.5, 2.0)]}, 40.0,
                      intervals=([-12.0, 12.0],), report="none"),
    "fig10b": _evolve("soliton between two deeper wells at x=-2, 2", _SOLITON,
                      {"kind": "sum", "bumps": [_bump(-1.0, -2.0), _bump(-1.0, 2.0)]}, 40.0,
                      intervals=([-12.0, 12.0],), report="none"),
}


def _spectrum(description, nl, q_a, E_range, n_max, N_targets, n_scan=401):
    return {
        "schema": SCHEMA,
        "kind": "spectrum",
        "description": description,
        "nonlinearity": nl,
        "potential": {"kind": "rect_well", "V0": -10.0, "b": 1.6},
        "q_a": q_a,
        "E_range": list(E_range),
        "n_max": n_max,
        "N_targets": list(N_targets),
        "shooting": {"n_scan": n_scan},
    }


SPECTRUM_SCENARIOS: dict[str, dict] = {
    "square-well": _spectrum("linear square well, all bound states", {"kind": "linear"},
                             {"start": 0.05, "stop": 0.5, "num": 4}, (-10.0, -0.01), 10, (), n_scan=2001),
    "fig3a": _spectrum("repulsive cubic model in the square well, ground branch",
                       {"kind": "zakharov", "epsilon": 2.0}, {"start": 0.02, "stop": 0.6, "num": 30},
                       (-12.0, -0.5), 0, (1.0, 2.0)),
    "fig3b": _spectrum("attractive cubic model in the square well, ground branch",
                       {"kind": "zakharov", "epsilon": -2.0}, {"start": 0.02, "stop": 0.6, "num": 30},
                       (-16.0, -0.5), 0, (1.0, 2.0)),
}


def list_scenarios() -> list[tuple[str, str, str]]:
    rows = [(name, "evolve", cfg["description"]) for name, cfg in EVOLVE_SCENARIOS.items()]
    rows += [(name, "spectrum", cfg["description"]) for name, cfg in SPECTRUM_SCENARIOS.items()]
    return rows


def get_scenario(name: str) -> dict:
    for table in (EVOLVE_SCENARIOS, SPECTRUM_SCENARIOS):
        if name in table:
            return copy.deepcopy(table[name])
    raise ConfigError(f"unknown scenario {name!r}")


def merge(base: dict, override: dict) -> dict:
    """Recursive dict update (override wins); lists and scalars are replaced."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


# --------------------------------------------------------------------------
# building runtime objects


def _check_schema(cfg: dict):
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"unsupported schema {cfg.get('schema')!r}")


def _interval(iv) -> tuple[float, float]:
    try:
        lo, hi = iv
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad interval {iv!r}") from exc
    if not hi > lo:
        raise ConfigError(f"empty interval {iv!r}")
    return lo, hi


def initial_field(init: dict, x: np.ndarray) -> FieldState:
    kind = init.get("kind")
    x0 = float(init.get("x0", 0.0))
    k = float(init.get("k", 0.0))
    try:
        if kind == "soliton":
            amp = soliton(float(init["E"]), float(init["epsilon"]))(x - x0)
        elif kind == "gausson":
            amp = gausson(float(init["E"]), float(init["epsilon"]))(x - x0)
        elif kind == "gaussian":
            s = float(init["sigma"])
            amp = np.exp(-((x - x0) ** 2) / (4 * s * s)) / (2 * math.pi * s * s) ** 0.25
        elif kind == "zero":
            amp = np.zeros_like(x)
        else:
            raise ConfigError(f"unknown initial condition {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"initial condition misses {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return FieldState.from_psi(amp * np.exp(1j * k * x), x)


def build_evolution(cfg: dict):
    """(initial state, nonlinearity, potential, EvolutionConfig) from an evolve config."""
    _check_schema(cfg)
    try:
        nl = nonlinearity_from_json(cfg["nonlinearity"])
        V = potential_from_json(cfg["potential"])
        g = cfg.get("grid", {})
        x = grid(float(g.get("x_min", -16.0)), float(g.get("x_max", 16.0)), int(g.get("n", 801)))
        ev = dict(cfg["evolution"])
    except (KeyError, ModelError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    intervals = [_interval(iv) for iv in ev.pop("partial_intervals", [])]
    if cfg.get("report") == "scattering":
        if not isinstance(V, Bump):
            raise ConfigError("a scattering report needs a single bump barrier")
        intervals += [iv for iv in scattering_intervals(V) if iv not in intervals]
    absorber = ev.pop("absorber", None)
    try:
        ecfg = EvolutionConfig(absorber=Absorber(**absorber) if absorber else None,
                               partial_intervals=tuple(intervals), **ev)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad evolution block: {exc}") from exc
    psi0 = initial_field(cfg.get("initial", {"kind": "zero"}), x)
    return psi0, nl, V, ecfg


def q_a_values(spec) -> np.ndarray:
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except KeyError as exc:
            raise ConfigError(f"q_a grid misses {exc}") from exc
    arr = np.asarray(spec, dtype=float).ravel()
    if arr.size == 0:
        raise ConfigError("empty q_a grid")
    return arr


def build_spectrum(cfg: dict):
    """(nl, V, q_a grid, E_range, n_max, N_targets, ShootingConfig, window) from a spectrum config."""
    _check_schema(cfg)
    try:
        nl: Nonlinearity = nonlinearity_from_json(cfg["nonlinearity"])
        V: Potential = potential_from_json(cfg["potential"])
        qs = q_a_values(cfg["q_a"])
        E_range = tuple(float(e) for e in cfg.get("E_range", (-20.0, 0.0)))
        n_max = int(cfg.get("n_max", 50))
        targets = [float(n) for n in cfg.get("N_targets", [])]
        shoot = ShootingConfig(**cfg.get("shooting", {}))
        window = cfg.get("window")
    except (KeyError, ModelError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if len(E_range) != 2 or not E_range[0] < E_range[1]:
        raise ConfigError("E_range must be [lo, hi] with lo < hi")
    if np.any(qs <= 0):
        raise ConfigError("q_a values must be positive")
    return nl, V, qs, E_range, n_max, targets, shoot, window
