"""Comparison schedulers: Exhaustive, GOJRA, IOJRA and DORA.

Every scheme returns a :class:`~mecoffload.search.Schedule` whose power and
compute allocations come from the same joint resource allocation (bisection
power control plus closed-form CPU split), so only the offloading decision
differs between schemes.
"""

from __future__ import annotations

import enum
import math
from typing import Optional

import numpy as np

from .model import LN2, Assignment, GroundElement, NetworkScenario
from .power import DEFAULT_TOL
from .scenario import counter_draws
from .search import DEFAULT_EPS, JStarEvaluator, Schedule, finalize, heuristic_schedule

DEFAULT_MAX_ASSIGNMENTS = 2_000_000


class SchemeId(str, enum.Enum):
    EXHAUSTIVE = "Exhaustive"
    GOJRA = "GOJRA"
    IOJRA = "IOJRA"
    DORA = "DORA"
    HJTORA = "hJTORA"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        for s in cls:
            if s.value.lower() == name.strip().lower():
                return s
        raise ValueError(f"unknown scheme {name!r}; choose from {[s.value for s in cls]}")


class SearchTooLarge(ValueError):
    pass


def count_feasible(n_users: int, n_slots: int) -> int:
    """Number of decisions obeying both matroid constraints: partial injections users -> slots."""
    return sum(math.comb(n_users, k) * math.perm(n_slots, k)
               for k in range(min(n_users, n_slots) + 1))


def exhaustive_schedule(scen: NetworkScenario, tol: float = DEFAULT_TOL,
                        max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
                        evaluator: Optional[JStarEvaluator] = None) -> Schedule:
    """Optimal decision by backtracking over all feasible assignments.

    Users are visited in index order; each either stays local (tried first)
    or takes a free (server, subband) slot in ascending order. Ties keep the
    first assignment found, with the empty assignment (value 0) first.
    """
    U, S, N = scen.n_users, scen.n_servers, scen.n_subbands
    total = count_feasible(U, S * N)
    if total > max_assignments:
        raise SearchTooLarge(
            f"exhaustive search over {total} feasible assignments "
            f"(U={U}, S={S}, N={N}, n={U * S * N}) exceeds limit {max_assignments}")
    J = evaluator if evaluator is not None else JStarEvaluator(scen, tol)
    group_value = J.group_value
    sqrt_eta = J._sqrt_eta
    fs = J._fs
    slots = [(s, j) for s in range(S) for j in range(N)]
    taken = [False] * len(slots)
    chosen = []  # (u, s, j)
    best = {"value": 0.0, "X": ()}

    def score():
        groups = {}
        roots = {}
        for u, s, j in chosen:
            groups.setdefault(j, []).append((u, s))
            roots[s] = roots.get(s, 0.0) + sqrt_eta[u]
        v = 0.0
        for members in groups.values():
            v += group_value(tuple(sorted(members)))
        for s, r in roots.items():
            v -= r * r / fs[s]
        return v

    def visit(u):
        if u == U:
            if chosen:
                v = score()
                if v > best["value"]:
                    best["value"], best["X"] = v, tuple(chosen)
            return
        visit(u + 1)
        for i, (s, j) in enumerate(slots):
            if taken[i]:
                continue
            taken[i] = True
            chosen.append((u, s, j))
            visit(u + 1)
            chosen.pop()
            taken[i] = False

    visit(0)
    X = Assignment.of(best["X"])
    return finalize(SchemeId.EXHAUSTIVE.value, scen, X, tol, best["value"])


def gojra_schedule(scen: NetworkScenario, tol: float = DEFAULT_TOL) -> Schedule:
    """Offload everyone the home BS can admit, assigning by greedy channel gain.

    Each round hands the free (user, sub-band) pair with the highest gain to
    the home BS, until the cell's users or sub-bands run out. Ties go to the
    lower user index, then the lower sub-band.
    """
    g, home = scen.py.gains, scen.py.home
    triples = []
    for s in range(scen.n_servers):
        users = [u for u in range(scen.n_users) if home[u] == s]
        bands = list(range(scen.n_subbands))
        while users and bands:
            # gains do not vary across sub-bands, but the rule is stated per pair
            _, u, j = max((g[u][s], -u, -j) for u in users for j in bands)
            u, j = -u, -j
            triples.append((u, s, j))
            users.remove(u)
            bands.remove(j)
    return finalize(SchemeId.GOJRA.value, scen, Assignment.of(triples), tol)


def iojra_schedule(scen: NetworkScenario, seed: int, tol: float = DEFAULT_TOL) -> Schedule:
    """Random sub-band at the home BS, then each user offloads iff it expects to gain.

    A user's expectation assumes it transmits at full power, gets the whole
    server CPU and sees every other-cell contender on its sub-band at full
    power. Users drawing an already-taken slot stay local.
    """
    draws = counter_draws(seed, 1, scen.n_users, scen.n_subbands)
    py = scen.py
    home = py.home
    occupied = {}
    for u in range(scen.n_users):
        occupied.setdefault((home[u], draws[u]), u)
    on_band = {}
    for (s, j), u in occupied.items():
        on_band.setdefault(j, []).append((u, s))

    pmax, g = py.max_power, py.gains
    bits, cycles, fs, xi = py.input_bits, py.workload, py.server_rate, py.amp_efficiency
    tl, el, bt, be = py.t_local, py.e_local, py.pref_time, py.pref_energy
    noise, W = scen.radio.noise_power, scen.radio.subband_width
    triples = []
    for (s, j), u in occupied.items():
        I = 0.0
        for k, w in on_band[j]:
            if w != s:
                I += pmax[k] * g[k][s]
        t_up = bits[u] * LN2 / (W * math.log1p(pmax[u] * g[u][s] / (I + noise)))
        t = t_up + cycles[u] / fs[s]
        energy = pmax[u] * t_up / xi[u]
        if bt[u] * (tl[u] - t) / tl[u] + be[u] * (el[u] - energy) / el[u] > 0:
            triples.append((u, s, j))
    return finalize(SchemeId.IOJRA.value, scen, Assignment.of(triples), tol)


def cell_subscenario(scen: NetworkScenario, s: int):
    """Scenario restricted to the users homed at BS ``s`` and that BS only."""
    members = [u for u in range(scen.n_users) if scen.home[u] == s]
    sub = NetworkScenario(
        users=tuple(scen.users[u] for u in members),
        servers=(scen.servers[s],),
        gains=scen.gains[np.ix_(members, [s])] if members else np.zeros((0, 1)),
        radio=scen.radio,
    )
    return sub, members


def dora_schedule(scen: NetworkScenario, eps: float = DEFAULT_EPS,
                  tol: float = DEFAULT_TOL) -> Schedule:
    """Each BS runs the local search on its own users, blind to other cells."""
    triples = []
    for s in range(scen.n_servers):
        sub, members = cell_subscenario(scen, s)
        if not members:
            continue
        local = heuristic_schedule(sub, eps, tol)
        triples += [(members[e.user], s, e.subband) for e in local.assignment]
    return finalize(SchemeId.DORA.value, scen, Assignment.of(triples), tol)


def run_scheme(scheme, scen: NetworkScenario, seed: int = 0, eps: float = DEFAULT_EPS,
               tol: float = DEFAULT_TOL,
               max_assignments: int = DEFAULT_MAX_ASSIGNMENTS) -> Schedule:
    scheme = SchemeId.parse(scheme) if isinstance(scheme, str) else scheme
    if scheme is SchemeId.HJTORA:
        return heuristic_schedule(scen, eps, tol)
    if scheme is SchemeId.DORA:
        return dora_schedule(scen, eps, tol)
    if scheme is SchemeId.GOJRA:
        return gojra_schedule(scen, tol)
    if scheme is SchemeId.IOJRA:
        return iojra_schedule(scen, seed, tol)
    if scheme is SchemeId.EXHAUSTIVE:
        return exhaustive_schedule(scen, tol, max_assignments)
    raise ValueError(scheme)
