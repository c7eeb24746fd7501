"""Seeded Monte-Carlo campaigns comparing the schedulers, with CSV output.

Drop ``i`` of a campaign uses scenario seed ``derive_seed(master_seed, i)``
(a two-round splitmix64 mix, see :mod:`mecoffload.scenario`). The same seed
is reused for every scheme and every sweep point, so comparisons are paired
and adding a scheme never perturbs the scenarios.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import SchemeId, SearchTooLarge, run_scheme
from .model import NetworkScenario
from .power import DEFAULT_TOL
from .scenario import ScenarioConfig, derive_seed, generate
from .search import DEFAULT_EPS, heuristic_schedule

log = logging.getLogger(__name__)

SWEEPS = ("users_per_cell", "c_u", "d_u", "beta_t", "P_u_dbm")
MODES = ("approx", "exact", "both")
CSV_HEADER = ("sweep_value", "scheme", "mean_utility", "ci95", "mean_delay_s",
              "mean_energy_j", "mean_runtime_ms", "drops")
ALL_SCHEMES = tuple(SchemeId)
# schemes that run in about a millisecond get timed timeit-style (see _timed)
_FAST_RUN_S = 2e-3


@dataclass(frozen=True)
class Sweep:
    name: str
    values: Tuple[float, ...]

    def __post_init__(self):
        if self.name not in SWEEPS:
            raise ValueError(f"unknown sweep {self.name!r}; choose from {SWEEPS}")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    schemes: Tuple[SchemeId, ...] = ALL_SCHEMES
    drops: int = 100
    master_seed: int = 0
    sweep: Optional[Sweep] = None
    interference_mode: str = "exact"
    eps: float = DEFAULT_EPS
    tol: float = DEFAULT_TOL
    timing_repeats: int = 3
    # off: runtime column is 0 and the CSV is bit-for-bit reproducible
    measure_runtime: bool = True

    def __post_init__(self):
        if int(self.drops) != self.drops or self.drops < 1:
            raise ValueError("drops must be an integer >= 1")
        if self.interference_mode not in MODES:
            raise ValueError(f"interference_mode must be one of {MODES}")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        object.__setattr__(self, "schemes", tuple(
            SchemeId.parse(s) if isinstance(s, str) else SchemeId(s) for s in self.schemes))
        if self.timing_repeats < 1:
            raise ValueError("timing_repeats must be >= 1")

    def points(self) -> List[Tuple[float, ScenarioConfig]]:
        """(sweep_value, config) pairs; a single NaN-valued point without a sweep."""
        if self.sweep is None:
            return [(math.nan, self.scenario)]
        return [(v, apply_sweep(self.scenario, self.sweep.name, v)) for v in self.sweep.values]


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    scheme: str
    mean_utility: float
    ci95_halfwidth: float
    mean_user_delay: float
    mean_user_energy: float
    mean_runtime_ms: float
    drops: int

    def astuple(self):
        return (self.sweep_value, self.scheme, self.mean_utility, self.ci95_halfwidth,
                self.mean_user_delay, self.mean_user_energy, self.mean_runtime_ms, self.drops)


def apply_sweep(config: ScenarioConfig, name: str, value) -> ScenarioConfig:
    if name == "users_per_cell":
        # sub-bands track users per cell, as in the reference campaign
        return config.with_(users_per_cell=int(value), users_total=None, num_subbands=None)
    if name == "c_u":
        return config.with_(workload_megacycles=float(value))
    if name == "d_u":
        return config.with_(input_kb=float(value))
    if name == "beta_t":
        return config.with_(beta_t=float(value))
    if name == "P_u_dbm":
        return config.with_(max_power_dbm=float(value))
    raise ValueError(f"unknown sweep {name!r}; choose from {SWEEPS}")


def scenario_digest(scen: NetworkScenario) -> str:
    """Short content hash of a drop, logged to show schemes share the same scenario."""
    h = hashlib.sha256(scen.gains.tobytes())
    for u in scen.users:
        h.update(repr((u.task, u.max_power, u.pref_time)).encode())
    return h.hexdigest()[:16]


def ci95(values) -> float:
    """Normal-approximation half width ``1.96 s / sqrt(n)``; 0 for a single value."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return 0.0
    return float(1.96 * x.std(ddof=1) / math.sqrt(x.size))


def _timed(fn, repeats: int):
    """Run ``fn`` and return ``(result, seconds)``.

    Runs that finish in under ``_FAST_RUN_S`` are re-timed in batches, best
    of ``repeats``, because a single sub-millisecond call mostly measures
    timer and cache noise.
    """
    t0 = time.perf_counter()
    out = fn()
    best = time.perf_counter() - t0
    if best < _FAST_RUN_S and repeats > 1:
        number = max(1, int(_FAST_RUN_S / max(best, 1e-7)))
        for _ in range(repeats):
            t0 = time.perf_counter()
            for _ in range(number):
                fn()
            best = min(best, (time.perf_counter() - t0) / number)
    return out, best


def _one_drop(args):
    """All (sweep point, scheme) outcomes for one drop index."""
    spec, index = args
    seed = derive_seed(spec.master_seed, index)
    modes = ("approx", "exact") if spec.interference_mode == "both" else (spec.interference_mode,)
    out = []
    for point, (value, config) in enumerate(spec.points()):
        scen = generate(config, seed)
        log.debug("drop %d value %s scenario %s", index, value, scenario_digest(scen))
        for scheme in spec.schemes:
            try:
                job = lambda: run_scheme(scheme, scen, seed, spec.eps, spec.tol)  # noqa: E731
                sched, secs = _timed(job, spec.timing_repeats) if spec.measure_runtime \
                    else (job(), 0.0)
            except SearchTooLarge as exc:
                out.append((point, scheme.value, None, str(exc)))
                continue
            for mode in modes:
                rep = sched.report(scen, mode)
                n = max(scen.n_users, 1)
                out.append((point, scheme.value, mode, (
                    rep.system_utility,
                    sum(rep.per_user_delay.values()) / n,
                    sum(rep.per_user_energy.values()) / n,
                    secs * 1e3)))
    return out


def _label(scheme: str, mode: Optional[str], spec: ExperimentSpec) -> str:
    return f"{scheme}[{mode}]" if spec.interference_mode == "both" and mode else scheme


@dataclass
class Samples:
    """Per-drop outcomes in drop order.

    ``values[(point, scheme, mode)]`` is a ``drops x 4`` array of system
    utility, mean user delay [s], mean user energy [J] and runtime [ms].
    ``refused[(point, scheme)]`` holds the reason a scheme declined a point.
    """

    values: Dict[tuple, np.ndarray]
    refused: Dict[tuple, str]

    def utility(self, scheme, point: int = 0, mode: str = "exact") -> np.ndarray:
        name = scheme.value if isinstance(scheme, SchemeId) else scheme
        return self.values[(point, name, mode)][:, 0]


def collect(spec: ExperimentSpec, workers: int = 1) -> Samples:
    """Run every drop of ``spec`` and keep the per-drop numbers (for paired statistics)."""
    jobs = [(spec, i) for i in range(spec.drops)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_drop = list(pool.map(_one_drop, jobs,
                                     chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_drop = [_one_drop(j) for j in jobs]

    lists: Dict[tuple, list] = {}
    refused: Dict[tuple, str] = {}
    for drop in per_drop:
        for point, scheme, mode, payload in drop:
            if mode is None:
                refused.setdefault((point, scheme), payload)
                continue
            lists.setdefault((point, scheme, mode), []).append(payload)
    return Samples({k: np.asarray(v, dtype=float) for k, v in lists.items()}, refused)


def aggregate(spec: ExperimentSpec, samples: Samples) -> List[ResultRow]:
    order = {s.value: i for i, s in enumerate(spec.schemes)}
    rows = []
    for point, (value, _) in enumerate(spec.points()):
        for scheme in sorted(order, key=order.get):
            if (point, scheme) in samples.refused:
                log.warning("%s skipped: %s", scheme, samples.refused[(point, scheme)])
                rows.append(ResultRow(value, scheme, math.nan, math.nan, math.nan,
                                      math.nan, math.nan, 0))
                continue
            for mode in ("approx", "exact"):
                a = samples.values.get((point, scheme, mode))
                if a is None:
                    continue
                rows.append(ResultRow(value, _label(scheme, mode, spec), float(a[:, 0].mean()),
                                      ci95(a[:, 0]), float(a[:, 1].mean()),
                                      float(a[:, 2].mean()), float(a[:, 3].mean()), len(a)))
    return rows


def run(spec: ExperimentSpec, workers: int = 1) -> List[ResultRow]:
    """Aggregate per (sweep value, scheme) over ``spec.drops`` paired drops.

    A scheme that refuses a drop (exhaustive search too large) is reported
    as a warning row with NaN statistics and ``drops = 0``.
    """
    return aggregate(spec, collect(spec, workers))


def fig6_gap(spec: ExperimentSpec, workers: int = 1) -> List[Tuple[float, float, float]]:
    """Mean utility of the same hJTORA solution scored with approximated and exact SINR.

    Returns ``(P_u_dbm, utility_approx, utility_exact)`` per sweep value.
    """
    if spec.sweep is None or spec.sweep.name != "P_u_dbm":
        raise ValueError("fig6_gap needs a P_u_dbm sweep")
    jobs = [(spec, i) for i in range(spec.drops)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_drop = list(pool.map(_gap_drop, jobs))
    else:
        per_drop = [_gap_drop(j) for j in jobs]
    a = np.asarray(per_drop, dtype=float)  # drops x points x 2
    return [(float(v), float(a[:, k, 0].mean()), float(a[:, k, 1].mean()))
            for k, v in enumerate(spec.sweep.values)]


def _gap_drop(args):
    spec, index = args
    seed = derive_seed(spec.master_seed, index)
    out = []
    for _, config in spec.points():
        scen = generate(config, seed)
        sched = heuristic_schedule(scen, spec.eps, spec.tol)
        out.append((sched.report(scen, "approx").system_utility,
                    sched.report(scen, "exact").system_utility))
    return out


def relative_gap(approx: float, exact: float) -> float:
    """``|approx - exact| / |exact|``, 0 when both vanish."""
    if approx == exact:
        return 0.0
    return abs(approx - exact) / abs(exact) if exact else math.inf


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.9g" % v


def _write_rows(fh, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(x) for x in r.astuple()])


def emit_csv(rows: Sequence[ResultRow], path) -> None:
    """Write rows to ``path`` (or to an open text stream)."""
    if hasattr(path, "write"):
        _write_rows(path, rows)
        return
    try:
        with open(path, "w", newline="") as fh:
            _write_rows(fh, rows)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_csv(path) -> List[ResultRow]:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        return [ResultRow(float(r[0]), r[1], *(float(x) for x in r[2:7]), int(r[7]))
                for r in rd]


# ---------------------------------------------------------------------------
# presets for the reference campaign

SMALL = ScenarioConfig(num_cells=4, users_total=6, num_subbands=2)
FOUR_SCHEMES = (SchemeId.HJTORA, SchemeId.DORA, SchemeId.GOJRA, SchemeId.IOJRA)
NON_UNIFORM = {1: 500.0, 3: 500.0, 5: 500.0, 7: 500.0, 2: 2000.0, 4: 2000.0, 6: 2000.0}


def preset(name: str, panel: str = "a", drops: int = 100, master_seed: int = 0,
           base: Optional[ScenarioConfig] = None) -> ExperimentSpec:
    """Experiment specs for the figures and the runtime table.

    ``base`` replaces the preset's scenario (sweeps still apply on top).
    """
    name, panel = name.lower(), panel.lower()
    if panel not in ("a", "b"):
        raise ValueError("panel must be 'a' or 'b'")
    if name == "fig2":
        # panels differ only in workload: 1000 vs 2000 Megacycles
        cfg = (base or SMALL).with_(workload_megacycles=1000.0 if panel == "a" else 2000.0)
        return ExperimentSpec(cfg, ALL_SCHEMES, drops, master_seed)
    if name == "fig3":
        cfg = base or ScenarioConfig(num_cells=7)
        if panel == "b":
            cfg = cfg.with_(cell_workload_megacycles=NON_UNIFORM)
        return ExperimentSpec(cfg, FOUR_SCHEMES, drops, master_seed,
                              Sweep("users_per_cell", tuple(range(1, 11))))
    if name == "fig4":
        cfg = base or ScenarioConfig(num_cells=7, users_per_cell=4)
        sweep = (Sweep("c_u", (500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0)) if panel == "a"
                 else Sweep("d_u", (100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0,
                                    900.0, 1000.0)))
        return ExperimentSpec(cfg, FOUR_SCHEMES, drops, master_seed, sweep)
    if name == "fig5":
        # panel a: U = 14, panel b: U = 21
        cfg = base or ScenarioConfig(num_cells=7, users_per_cell=2 if panel == "a" else 3)
        return ExperimentSpec(cfg, (SchemeId.HJTORA,), drops, master_seed,
                              Sweep("beta_t", tuple(round(0.1 * k, 1) for k in range(1, 10))))
    if name == "fig6":
        cfg = base or ScenarioConfig(num_cells=7, users_per_cell=4)
        return ExperimentSpec(cfg, (SchemeId.HJTORA,), drops, master_seed,
                              Sweep("P_u_dbm", tuple(float(p) for p in range(0, 36, 5))),
                              interference_mode="both")
    if name == "table1":
        return ExperimentSpec(base or SMALL, (SchemeId.IOJRA, SchemeId.GOJRA, SchemeId.DORA,
                                              SchemeId.HJTORA, SchemeId.EXHAUSTIVE),
                              drops, master_seed)
    raise ValueError(f"unknown preset {name!r}")
