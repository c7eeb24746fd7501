"""Uplink power allocation for a fixed offloading decision.

Interference from other cells is replaced by its upper bound (interferers at
full power), which decouples the problem into one scalar quasi-convex
subproblem per offloaded user::

    Gamma(p) = (phi + psi p) / log2(1 + theta p),   0 < p <= P_max

solved by bisection on the sign of its stationarity function ``omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import LN2, Assignment, NetworkScenario, PowerAllocation, interference

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class UpaCoefficients:
    phi: float
    psi: float
    theta: float
    max_power: float

    def __post_init__(self):
        for name in ("phi", "psi", "theta", "max_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


def interference_upper_bound(scen: NetworkScenario, X: Assignment, u: int, s: int,
                             j: int) -> float:
    """Interference at BS ``s`` on sub-band ``j`` if all other-cell users on ``j`` used max power."""
    return interference(scen, X, s, j, scen.max_power)


def effective_channel(scen: NetworkScenario, X: Assignment, u: int) -> float:
    """theta_us = h_us / (I_upper + noise) for the slot user ``u`` holds in ``X``."""
    e = X.slot_of(u)
    if e is None:
        raise ValueError(f"user {u} is not offloaded")
    I = interference_upper_bound(scen, X, u, e.server, e.subband)
    return scen.gains[u, e.server] / (I + scen.radio.noise_power)


def upa_coefficients(scen: NetworkScenario, X: Assignment, u: int) -> UpaCoefficients:
    return UpaCoefficients(float(scen.phi[u]), float(scen.psi[u]),
                           float(effective_channel(scen, X, u)), float(scen.max_power[u]))


def gamma_objective(coef: UpaCoefficients, p):
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("power must be > 0")
    out = (coef.phi + coef.psi * p) / (np.log1p(coef.theta * p) / LN2)
    return float(out) if out.ndim == 0 else out


def omega(coef: UpaCoefficients, p):
    """Stationarity function; same sign as Gamma'(p) and strictly increasing."""
    p = np.asarray(p, dtype=float)
    a = 1.0 + coef.theta * p
    out = (coef.psi * np.log1p(coef.theta * p) / LN2
           - coef.theta * (coef.phi + coef.psi * p) / (a * LN2))
    return float(out) if out.ndim == 0 else out


def gamma_derivatives(coef: UpaCoefficients, p: float) -> Tuple[float, float]:
    """Closed-form first and second derivatives of Gamma at ``p``."""
    if p <= 0:
        raise ValueError("power must be > 0")
    th, phi, psi = coef.theta, coef.phi, coef.psi
    A = 1.0 + th * p
    C = math.log1p(th * p) / LN2
    D = phi + psi * p
    G = th * D - 2.0 * psi * A
    d1 = (psi * C - th * D / (A * LN2)) / C ** 2
    d2 = th * (G * C + 2.0 * th * D / LN2) / (A ** 2 * C ** 3 * LN2)
    return d1, d2


def _omega(phi, psi, th, p):
    tp = th * p
    return psi * math.log1p(tp) / LN2 - th * (phi + psi * p) / ((1.0 + tp) * LN2)


def _bisect(phi, psi, th, pmax, tol):
    if _omega(phi, psi, th, pmax) <= 0:
        return pmax, 0
    lo, hi = 0.0, pmax
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _omega(phi, psi, th, mid) <= 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it


def bisect_power(coef: UpaCoefficients, tol: float = DEFAULT_TOL, full_output: bool = False):
    """Optimal transmit power for one user.

    Returns ``P_max`` when ``omega(P_max) <= 0``; otherwise bisects
    ``[0, P_max]`` until the bracket is no wider than ``tol`` and returns its
    midpoint. With ``full_output`` also returns the number of bisection steps.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    p, it = _bisect(coef.phi, coef.psi, coef.theta, coef.max_power, tol)
    return (p, it) if full_output else p


def _gamma(phi, psi, th, p):
    return (phi + psi * p) / (math.log1p(th * p) / LN2)


def solve_user(phi: float, psi: float, theta: float, pmax: float,
               tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Scalar fast path returning ``(p*, Gamma(p*))``."""
    phi, psi, theta, pmax = float(phi), float(psi), float(theta), float(pmax)
    p, _ = _bisect(phi, psi, theta, pmax, tol)
    return p, _gamma(phi, psi, theta, p)


def solve_upa(scen: NetworkScenario, X: Assignment,
              tol: float = DEFAULT_TOL) -> Tuple[PowerAllocation, float]:
    """Per-user bisection for every offloaded user.

    Returns the power allocation and the approximated radio overhead
    ``sum_u Gamma_u(p_u*)``.
    """
    power: PowerAllocation = {}
    total = 0.0
    on_band = {}
    for e in X:
        on_band.setdefault(e.subband, []).append(e)
    py = scen.py
    g, pmax = py.gains, py.max_power
    noise = scen.radio.noise_power
    for e in X:
        u, s = e.user, e.server
        I = 0.0
        for k in on_band[e.subband]:
            if k.server != s:
                I += pmax[k.user] * g[k.user][s]
        p, _ = _bisect(py.phi[u], py.psi[u], g[u][s] / (I + noise), pmax[u], tol)
        power[u] = p
        total += _gamma(py.phi[u], py.psi[u], g[u][s] / (I + noise), p)
    return power, total
