"""Offloading decision search over the two-matroid ground set.

``J*(X)`` is the best system utility reachable for a fixed decision ``X``
once power (bisection) and compute (closed form) are optimised. The
scheduler is a first-improvement local search over *remove* and *exchange*
moves with a multiplicative acceptance threshold ``1 + eps / n**2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .compute import solve_cra
from .model import (
    Assignment,
    ComputeAllocation,
    GroundElement,
    NetworkScenario,
    PowerAllocation,
    UtilityReport,
    system_utility,
)
from .power import DEFAULT_TOL, solve_upa, solve_user

DEFAULT_EPS = 0.1


@dataclass(frozen=True)
class Move:
    kind: str  # "remove" | "exchange"
    element: GroundElement
    before: float
    after: float


@dataclass
class SearchTrace:
    iterations: int = 0
    accepted_moves: List[Move] = field(default_factory=list)
    final_value: float = 0.0
    evaluations: int = 0
    threshold: float = 1.0


@dataclass
class Schedule:
    """A complete solution: decision, power, compute, and its J* value."""

    scheme: str
    assignment: Assignment
    power: PowerAllocation
    compute: ComputeAllocation
    value: float
    trace: Optional[SearchTrace] = None

    def report(self, scen: NetworkScenario, interference_mode: str = "exact") -> UtilityReport:
        return system_utility(scen, self.assignment, self.power, self.compute,
                              interference_mode)


def is_feasible(X: Assignment) -> bool:
    return X.is_feasible()


def ground_set(scen: NetworkScenario) -> List[GroundElement]:
    return [GroundElement(u, s, j) for u, s, j in itertools.product(
        range(scen.n_users), range(scen.n_servers), range(scen.n_subbands))]


def remove_op(X: Assignment, elem) -> Assignment:
    elem = GroundElement(*elem)
    if elem not in X.triples:
        raise ValueError(f"{elem} is not in the assignment")
    return Assignment(X.triples - {elem})


def exchange_op(X: Assignment, elem) -> Assignment:
    """Insert ``elem``, dropping the user's current slot and the slot's current occupant."""
    elem = GroundElement(*elem)
    if elem in X.triples:
        raise ValueError(f"{elem} is already in the assignment")
    kept = frozenset(e for e in X.triples
                     if e.user != elem.user
                     and not (e.server == elem.server and e.subband == elem.subband))
    return Assignment(kept | {elem})


def j_star(X: Assignment, scen: NetworkScenario, tol: float = DEFAULT_TOL) -> float:
    """Optimal-value function of the resource allocation problem for decision ``X``."""
    if not X.is_feasible():
        raise ValueError(f"infeasible assignment {X.canonical()}")
    _, gamma = solve_upa(scen, X, tol)
    _, lam = solve_cra(scen, X)
    return float(sum(scen.offload_gain[u] for u in X.users())) - gamma - lam


class JStarEvaluator:
    """Memoised ``J*`` for one scenario.

    Users on one sub-band only see each other's interference, so the radio
    part is cached per sub-band group (a sorted tuple of (user, server)
    pairs; the sub-band index itself does not affect the value). Whole
    assignments are cached by their canonical triple list.
    """

    def __init__(self, scen: NetworkScenario, tol: float = DEFAULT_TOL):
        self.scen = scen
        self.tol = tol
        py = scen.py
        self._phi = py.phi
        self._psi = py.psi
        self._pmax = py.max_power
        self._gain0 = py.offload_gain
        self._sqrt_eta = [math.sqrt(max(e, 0.0)) for e in py.eta]
        self._fs = py.server_rate
        self._g = py.gains
        self._noise = scen.radio.noise_power
        self._groups: Dict[tuple, float] = {}
        self._values: Dict[tuple, float] = {}
        self.evaluations = 0

    def group_value(self, members: tuple) -> float:
        """sum over members of lambda(beta_t + beta_e) - Gamma(p*) for one sub-band."""
        v = self._groups.get(members)
        if v is not None:
            return v
        g, pmax = self._g, self._pmax
        v = 0.0
        for u, s in members:
            I = 0.0
            for k, w in members:
                if w != s:
                    I += pmax[k] * g[k][s]
            theta = g[u][s] / (I + self._noise)
            _, gam = solve_user(self._phi[u], self._psi[u], theta, pmax[u], self.tol)
            v += self._gain0[u] - gam
        self._groups[members] = v
        return v

    def __call__(self, X: Assignment) -> float:
        key = X.canonical()
        v = self._values.get(key)
        if v is not None:
            return v
        self.evaluations += 1
        groups: Dict[int, list] = {}
        roots: Dict[int, float] = {}
        for u, s, j in key:
            groups.setdefault(j, []).append((u, s))
            roots[s] = roots.get(s, 0.0) + self._sqrt_eta[u]
        v = 0.0
        for members in groups.values():
            v += self.group_value(tuple(sorted(members)))
        for s, r in roots.items():
            v -= r * r / self._fs[s]
        self._values[key] = v
        return v


def finalize(scheme: str, scen: NetworkScenario, X: Assignment, tol: float = DEFAULT_TOL,
             value: Optional[float] = None, trace: Optional[SearchTrace] = None) -> Schedule:
    """Derive P* and F* for a decision and package the result."""
    power, gamma = solve_upa(scen, X, tol)
    compute, lam = solve_cra(scen, X)
    if value is None:
        gain0 = scen.py.offload_gain
        value = sum(gain0[e.user] for e in X.triples) - gamma - lam
    return Schedule(scheme, X, power, compute, float(value), trace)


def heuristic_schedule(scen: NetworkScenario, eps: float = DEFAULT_EPS,
                       tol: float = DEFAULT_TOL,
                       evaluator: Optional[JStarEvaluator] = None) -> Schedule:
    """First-improvement remove/exchange local search started from the best singleton.

    Moves are scanned in ascending (user, server, subband) order; all
    removals are tried before any exchange. A move is accepted when it
    raises ``J*`` above ``(1 + eps / n**2)`` times its current value, with
    ``n`` the ground-set size.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    J = evaluator if evaluator is not None else JStarEvaluator(scen, tol)
    n = scen.ground_size
    factor = 1.0 + eps / n ** 2
    trace = SearchTrace(threshold=factor)
    ground = ground_set(scen)

    best, best_val = None, 0.0
    for e in ground:
        v = J(Assignment(frozenset((e,))))
        if best is None or v > best_val:
            best, best_val = e, v
    if best is None or best_val <= 0:
        trace.evaluations = J.evaluations
        return finalize("hJTORA", scen, Assignment(), tol, 0.0, trace)

    X = Assignment(frozenset((best,)))
    cur = best_val
    while True:
        trace.iterations += 1
        move = None
        for e in X.canonical():
            Y = remove_op(X, e)
            v = J(Y)
            if v > factor * cur:
                move = Move("remove", e, cur, v)
                break
        if move is None:
            for e in ground:
                if e in X.triples:
                    continue
                Y = exchange_op(X, e)
                v = J(Y)
                if v > factor * cur:
                    move = Move("exchange", e, cur, v)
                    break
        if move is None:
            break
        trace.accepted_moves.append(move)
        X, cur = Y, move.after

    trace.final_value = cur
    trace.evaluations = J.evaluations
    return finalize("hJTORA", scen, X, tol, cur, trace)


def is_local_optimum(scen: NetworkScenario, X: Assignment, eps: float = DEFAULT_EPS,
                     tol: float = DEFAULT_TOL,
                     evaluator: Optional[JStarEvaluator] = None) -> bool:
    """True when no single remove or exchange clears the acceptance threshold."""
    J = evaluator if evaluator is not None else JStarEvaluator(scen, tol)
    cur = J(X)
    if not X.triples:
        return all(J(Assignment(frozenset((e,)))) <= 0 for e in ground_set(scen))
    factor = 1.0 + eps / scen.ground_size ** 2
    for e in X.canonical():
        if J(remove_op(X, e)) > factor * cur:
            return False
    for e in ground_set(scen):
        if e not in X.triples and J(exchange_op(X, e)) > factor * cur:
            return False
    return True
