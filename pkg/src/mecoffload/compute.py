"""Closed-form split of each server's CPU among its offloaded users.

Minimising ``sum_u eta_u / f_u`` subject to ``sum_u f_u <= f_s`` gives
``f_u = f_s sqrt(eta_u) / sum sqrt(eta)`` with optimal value
``(sum sqrt(eta))**2 / f_s``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .model import Assignment, ComputeAllocation, NetworkScenario

ETA_FLOOR = 1e-12


@dataclass(frozen=True)
class CraInstance:
    server_rate: float
    etas: Tuple[float, ...]

    def __post_init__(self):
        if not self.server_rate > 0:
            raise ValueError("server_rate must be > 0")
        etas = tuple(float(e) for e in self.etas)
        if any(e < 0 for e in etas):
            raise ValueError("etas must be non-negative")
        object.__setattr__(self, "etas", etas)


def _clamped(etas: Sequence[float]) -> np.ndarray:
    eta = np.asarray(etas, dtype=float)
    if eta.size and np.any(eta <= 0):
        top = eta.max()
        if top <= 0:
            # nobody values time: any split is optimal, share evenly
            return np.ones_like(eta)
        warnings.warn("eta <= 0 (beta_t = 0 user) clamped to a small positive floor",
                      RuntimeWarning, stacklevel=3)
        eta = np.maximum(eta, ETA_FLOOR * top)
    return eta


def allocate(inst: CraInstance) -> np.ndarray:
    if not inst.etas:
        return np.zeros(0)
    root = np.sqrt(_clamped(inst.etas))
    return inst.server_rate * root / math.fsum(root)


def optimal_value(inst: CraInstance) -> float:
    if not inst.etas or max(inst.etas) <= 0:
        return 0.0
    return math.fsum(np.sqrt(_clamped(inst.etas))) ** 2 / inst.server_rate


def solve_cra(scen: NetworkScenario, X: Assignment) -> Tuple[ComputeAllocation, float]:
    """Allocate every server independently; returns ``(F*, Lambda(X, F*))``."""
    F: ComputeAllocation = {}
    total = 0.0
    by_server = {}
    for e in X:
        by_server.setdefault(e.server, []).append(e.user)
    eta, rate = scen.py.eta, scen.py.server_rate
    for s, users in sorted(by_server.items()):
        etas = [eta[u] for u in users]
        fs = rate[s]
        if min(etas) > 0:
            roots = [math.sqrt(e) for e in etas]
            acc = math.fsum(roots)
            for u, r in zip(users, roots):
                F[(u, s)] = fs * r / acc
            total += acc * acc / fs
            continue
        inst = CraInstance(fs, tuple(etas))
        for u, f in zip(users, allocate(inst)):
            F[(u, s)] = float(f)
        total += optimal_value(inst)
    return F, total
