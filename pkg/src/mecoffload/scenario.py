"""Reproducible network drops: hexagonal BS layout, uniform user placement,
distance path loss with log-normal shadowing.

Scenario configs are JSON documents with five sections::

    {
      "network": {"num_cells": 7, "inter_bs_distance_km": 1.0,
                  "users_per_cell": 4, "users_total": null,
                  "min_distance_km": 0.01, "shadowing_std_db": 8.0},
      "radio":   {"bandwidth_hz": 20e6, "num_subbands": null, "noise_dbm": -100.0},
      "server":  {"cpu_hz": 20e9},
      "user":    {"local_cpu_hz": 1e9, "energy_coeff": 5e-27, "max_power_dbm": 20.0,
                  "beta_t": 0.2, "provider_weight": 1.0},
      "task":    {"input_kb": 420, "workload_megacycles": 1000,
                  "cell_workload_megacycles": {"1": 500, "2": 2000}},
      "seed": 0
    }

At most one of ``users_per_cell`` / ``users_total`` is set (default: 4 users
per cell). ``num_subbands``
defaults to the number of users per cell (rounded up for ``users_total``).
``input_kb`` uses decimal kilobytes (1 KB = 8000 bits). ``beta_e`` is
``1 - beta_t``. Cells are numbered from 1: the centre cell first, then ring
order as produced by :func:`hex_layout`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, Optional

import numpy as np

from .model import EdgeServer, NetworkScenario, RadioConfig, TaskProfile, UserDevice

SQRT3 = math.sqrt(3.0)

# axial hex directions, counter-clockwise starting east
_HEX_DIRS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


class ConfigError(ValueError):
    pass


def dbm_to_watt(dbm):
    w = 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)
    return float(w) if w.ndim == 0 else w


def watt_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    num_cells: int = 7
    inter_bs_distance_km: float = 1.0
    users_per_cell: Optional[int] = None
    users_total: Optional[int] = None
    num_subbands: Optional[int] = None
    bandwidth_hz: float = 20e6
    noise_dbm: float = -100.0
    server_cpu_hz: float = 20e9
    local_cpu_hz: float = 1e9
    energy_coeff: float = 5e-27
    max_power_dbm: float = 20.0
    beta_t: float = 0.2
    provider_weight: float = 1.0
    input_kb: float = 420.0
    workload_megacycles: float = 1000.0
    cell_workload_megacycles: Dict[int, float] = field(default_factory=dict)
    shadowing_std_db: float = 8.0
    min_distance_km: float = 0.01
    seed: int = 0

    def __post_init__(self):
        errors = []
        if self.users_per_cell is None and self.users_total is None:
            object.__setattr__(self, "users_per_cell", 4)
        if int(self.num_cells) != self.num_cells or self.num_cells < 1:
            errors.append("network.num_cells must be an integer >= 1")
        if (self.users_per_cell is None) == (self.users_total is None):
            errors.append("network: set exactly one of users_per_cell / users_total")
        for name in ("users_per_cell", "users_total", "num_subbands"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                errors.append(f"{name} must be an integer >= 1")
        for name in ("inter_bs_distance_km", "bandwidth_hz", "server_cpu_hz",
                     "local_cpu_hz", "energy_coeff", "input_kb", "workload_megacycles",
                     "min_distance_km"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be > 0")
        if not self.shadowing_std_db >= 0:
            errors.append("shadowing_std_db must be >= 0")
        if not 0.0 <= self.beta_t <= 1.0:
            errors.append("beta_t must lie in [0, 1]")
        if not 0.0 < self.provider_weight <= 1.0:
            errors.append("provider_weight must lie in (0, 1]")
        for cell, mc in dict(self.cell_workload_megacycles).items():
            if not 1 <= int(cell) <= self.num_cells:
                errors.append(f"cell_workload_megacycles: cell {cell} out of range")
            if not mc > 0:
                errors.append(f"cell_workload_megacycles[{cell}] must be > 0")
        if errors:
            raise ConfigError("; ".join(errors))
        object.__setattr__(self, "cell_workload_megacycles",
                           {int(k): float(v) for k, v in self.cell_workload_megacycles.items()})

    @property
    def total_users(self) -> int:
        if self.users_total is not None:
            return int(self.users_total)
        return int(self.users_per_cell) * int(self.num_cells)

    @property
    def subbands(self) -> int:
        if self.num_subbands is not None:
            return int(self.num_subbands)
        if self.users_per_cell is not None:
            return int(self.users_per_cell)
        return math.ceil(self.users_total / self.num_cells)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    # nested JSON <-> flat dataclass
    _SECTIONS = {
        "network": ("num_cells", "inter_bs_distance_km", "users_per_cell", "users_total",
                    "min_distance_km", "shadowing_std_db"),
        "radio": ("bandwidth_hz", "num_subbands", "noise_dbm"),
        "server": {"cpu_hz": "server_cpu_hz"},
        "user": ("local_cpu_hz", "energy_coeff", "max_power_dbm", "beta_t", "provider_weight"),
        "task": ("input_kb", "workload_megacycles", "cell_workload_megacycles"),
    }

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        flat = {}
        for section, keys in cls._SECTIONS.items():
            block = doc.get(section, {})
            if not isinstance(block, dict):
                raise ConfigError(f"{section} must be an object")
            mapping = keys if isinstance(keys, dict) else {k: k for k in keys}
            for k, v in block.items():
                if k not in mapping:
                    raise ConfigError(f"unknown field {section}.{k}")
                flat[mapping[k]] = v
        for k, v in doc.items():
            if k in cls._SECTIONS:
                continue
            if k not in known:
                raise ConfigError(f"unknown field {k}")
            flat[k] = v
        try:
            return cls(**flat)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        flat = asdict(self)
        doc = {}
        for section, keys in self._SECTIONS.items():
            mapping = keys if isinstance(keys, dict) else {k: k for k in keys}
            doc[section] = {k: flat.pop(v) for k, v in mapping.items()}
        doc["task"]["cell_workload_megacycles"] = {
            str(k): v for k, v in doc["task"]["cell_workload_megacycles"].items()}
        doc.update(flat)
        return doc


def load_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return ScenarioConfig.from_dict(doc)


def hex_layout(num_cells: int, spacing: float = 1.0) -> np.ndarray:
    """BS positions on a hexagonal grid, filled ring by ring from the origin.

    Neighbouring sites are ``spacing`` apart. Ring ``k`` starts at angle 240
    degrees and walks counter-clockwise.
    """
    if num_cells < 1:
        raise ValueError(f"num_cells must be >= 1, got {num_cells}")
    axial = [(0, 0)]
    k = 1
    while len(axial) < num_cells:
        q, r = k * _HEX_DIRS[4][0], k * _HEX_DIRS[4][1]
        for d in range(6):
            for _ in range(k):
                axial.append((q, r))
                q += _HEX_DIRS[d][0]
                r += _HEX_DIRS[d][1]
        k += 1
    axial = np.array(axial[:num_cells], dtype=float)
    x = spacing * (axial[:, 0] + axial[:, 1] / 2.0)
    y = spacing * (axial[:, 1] * SQRT3 / 2.0)
    return np.column_stack([x, y])


def in_hexagon(points, center, spacing) -> np.ndarray:
    """True for points inside the hexagonal cell of a BS (inradius spacing/2)."""
    d = np.atleast_2d(points) - np.asarray(center)
    half = spacing / 2.0 * (1 + 1e-12)
    out = np.ones(len(d), dtype=bool)
    for ang in (0.0, math.pi / 3, 2 * math.pi / 3):
        out &= np.abs(d[:, 0] * math.cos(ang) + d[:, 1] * math.sin(ang)) <= half
    return out


def pathloss_db(distance_km):
    """Macro-cell path loss 140.7 + 36.7 log10(d[km])."""
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    out = 140.7 + 36.7 * np.log10(d)
    return float(out) if out.ndim == 0 else out


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox-4x64 generator keyed by (seed, stream)."""
    mask = (1 << 64) - 1
    return np.random.Generator(np.random.Philox(key=[int(seed) & mask, int(stream) & mask]))


_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 output for state ``x`` (Steele, Lea and Flood finaliser)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """64-bit seed for item ``index`` under ``master``: splitmix64(splitmix64(master) ^ index)."""
    return splitmix64(splitmix64(int(master) & _MASK64) ^ (int(index) & _MASK64))


def counter_draws(seed: int, stream: int, n: int, bound: int) -> list:
    """``n`` integers in ``[0, bound)`` from the counter-based splitmix64 stream.

    Word ``i`` of the stream is ``splitmix64(key + i)`` with
    ``key = derive_seed(seed, stream)``. Each word is read as base-``bound``
    digits, least significant first, using only as many digits as fit in 32
    bits so the modulo bias stays below 2**-32 per word. Cheap for the
    handful of draws the randomised baseline needs.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    key = derive_seed(seed, stream)
    per_word = max(1, 32 // max(1, (bound - 1).bit_length()))
    out, i = [], 0
    while len(out) < n:
        z = splitmix64((key + i) & _MASK64)
        i += 1
        for _ in range(min(per_word, n - len(out))):
            z, r = divmod(z, bound)
            out.append(r)
    return out


def _sample_in_cell(rng, center, spacing):
    a = spacing / 2.0
    R = spacing / SQRT3
    while True:
        pt = np.array([rng.uniform(-a, a), rng.uniform(-R, R)]) + center
        if in_hexagon(pt, center, spacing)[0]:
            return pt


def generate(config: ScenarioConfig, seed: Optional[int] = None) -> NetworkScenario:
    """Draw one network realisation. Pure function of ``(config, seed)``.

    Random draws, in order, from ``make_rng(seed, 0)``: for every user its
    cell (only in ``users_total`` mode, uniform over cells) followed by a
    rejection-sampled point in that hexagon; then the ``U x S`` shadowing
    matrix in dB, row-major.
    """
    seed = config.seed if seed is None else seed
    rng = make_rng(seed, 0)
    S = int(config.num_cells)
    spacing = float(config.inter_bs_distance_km)
    bs = hex_layout(S, spacing)

    U = config.total_users
    cells = []
    positions = []
    for u in range(U):
        if config.users_total is not None:
            c = int(rng.integers(S))
        else:
            c = u // int(config.users_per_cell)
        cells.append(c)
        positions.append(_sample_in_cell(rng, bs[c], spacing))
    positions = np.array(positions).reshape(U, 2)

    dist = np.linalg.norm(positions[:, None, :] - bs[None, :, :], axis=2)
    dist = np.maximum(dist, config.min_distance_km)
    shadow = rng.normal(0.0, config.shadowing_std_db, size=(U, S)) if U else np.zeros((0, S))
    gains = 10.0 ** (-(pathloss_db(dist) + shadow) / 10.0) if U else np.zeros((0, S))

    servers = tuple(EdgeServer(s, (float(bs[s, 0]), float(bs[s, 1])), config.server_cpu_hz)
                    for s in range(S))
    p_max = float(dbm_to_watt(config.max_power_dbm))
    users = []
    for u in range(U):
        mc = config.cell_workload_megacycles.get(cells[u] + 1, config.workload_megacycles)
        task = TaskProfile(config.input_kb * 8000.0, mc * 1e6)
        users.append(UserDevice(
            id=u, position=(float(positions[u, 0]), float(positions[u, 1])),
            local_cpu_rate=config.local_cpu_hz, energy_coeff=config.energy_coeff,
            max_power=p_max, pref_time=config.beta_t, pref_energy=1.0 - config.beta_t,
            provider_weight=config.provider_weight, task=task))
    radio = RadioConfig(config.bandwidth_hz, config.subbands,
                        float(dbm_to_watt(config.noise_dbm)))
    return NetworkScenario(tuple(users), servers, gains, radio, cells=tuple(cells))
