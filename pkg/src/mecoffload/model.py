"""System model for multi-cell MEC offloading.

Domain types plus the pure evaluation functions needed to score a candidate
(assignment, power, compute) triple. All quantities are SI: W, Hz, bits,
cycles, s, J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from types import SimpleNamespace
from typing import Dict, Iterable, NamedTuple, Optional, Tuple

import numpy as np

LN2 = math.log(2.0)

PowerAllocation = Dict[int, float]
ComputeAllocation = Dict[Tuple[int, int], float]


class UnreachableServerError(ValueError):
    """Raised when an offloading user has zero uplink rate."""


@dataclass(frozen=True)
class TaskProfile:
    input_bits: float
    workload_cycles: float

    def __post_init__(self):
        if not self.input_bits > 0:
            raise ValueError(f"input_bits must be > 0, got {self.input_bits}")
        if not self.workload_cycles > 0:
            raise ValueError(f"workload_cycles must be > 0, got {self.workload_cycles}")


@dataclass(frozen=True)
class UserDevice:
    id: int
    position: Tuple[float, float]
    local_cpu_rate: float
    energy_coeff: float
    max_power: float
    pref_time: float
    pref_energy: float
    task: TaskProfile
    provider_weight: float = 1.0
    amp_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("local_cpu_rate", "energy_coeff", "max_power", "amp_efficiency"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not (0.0 <= self.pref_time <= 1.0 and 0.0 <= self.pref_energy <= 1.0):
            raise ValueError("preferences must lie in [0, 1]")
        if abs(self.pref_time + self.pref_energy - 1.0) > 1e-9:
            raise ValueError(
                f"pref_time + pref_energy must be 1, got {self.pref_time + self.pref_energy}"
            )
        if not 0.0 < self.provider_weight <= 1.0:
            raise ValueError(f"provider_weight must be in (0, 1], got {self.provider_weight}")


@dataclass(frozen=True)
class EdgeServer:
    id: int
    position: Tuple[float, float]
    cpu_rate: float

    def __post_init__(self):
        if not self.cpu_rate > 0:
            raise ValueError(f"cpu_rate must be > 0, got {self.cpu_rate}")


@dataclass(frozen=True)
class RadioConfig:
    total_bandwidth: float
    num_subbands: int
    noise_power: float

    def __post_init__(self):
        if not self.total_bandwidth > 0:
            raise ValueError("total_bandwidth must be > 0")
        if int(self.num_subbands) != self.num_subbands or self.num_subbands < 1:
            raise ValueError("num_subbands must be a positive integer")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be > 0")

    @property
    def subband_width(self) -> float:
        return self.total_bandwidth / self.num_subbands


class GroundElement(NamedTuple):
    """One offloading variable: user -> server on a sub-band."""

    user: int
    server: int
    subband: int


@dataclass(frozen=True)
class Assignment:
    """An offloading decision, i.e. the set of active (user, server, subband) triples.

    Construction does not enforce the two matroid constraints; use
    :meth:`is_feasible` (search code only ever builds feasible sets).
    """

    triples: frozenset = frozenset()

    @classmethod
    def of(cls, triples: Iterable[Tuple[int, int, int]] = ()) -> "Assignment":
        return cls(frozenset(GroundElement(*t) for t in triples))

    def __iter__(self):
        return iter(self.canonical())

    def __len__(self):
        return len(self.triples)

    def __contains__(self, item):
        return tuple(item) in self.triples

    def canonical(self) -> Tuple[GroundElement, ...]:
        return tuple(sorted(self.triples))

    @cached_property
    def _slot_of(self) -> Dict[int, GroundElement]:
        return {e.user: e for e in self.triples}

    def users(self):
        return set(self._slot_of)

    def slot_of(self, user: int) -> Optional[GroundElement]:
        return self._slot_of.get(user)

    def server_users(self, server: int):
        return sorted(e.user for e in self.triples if e.server == server)

    def is_feasible(self) -> bool:
        users = [e.user for e in self.triples]
        slots = [(e.server, e.subband) for e in self.triples]
        return len(set(users)) == len(users) and len(set(slots)) == len(slots)


@dataclass(frozen=True)
class NetworkScenario:
    """Users, servers, channel gains and radio plan of one network drop.

    ``gains[u, s]`` is the linear uplink power gain from user ``u`` to BS ``s``;
    it is the same on every sub-band.
    """

    users: Tuple[UserDevice, ...]
    servers: Tuple[EdgeServer, ...]
    gains: np.ndarray
    radio: RadioConfig
    cells: Optional[Tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        if g.shape != (len(self.users), len(self.servers)):
            raise ValueError(
                f"gains shape {g.shape} does not match "
                f"{len(self.users)} users x {len(self.servers)} servers"
            )
        if not np.all(np.isfinite(g)) or not np.all(g > 0):
            raise ValueError("channel gains must be finite and strictly positive")
        g.setflags(write=False)
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "servers", tuple(self.servers))
        object.__setattr__(self, "gains", g)
        for name in self._DERIVED:
            getattr(self, name)
        self.py

    _DERIVED = ("home", "max_power", "input_bits", "workload", "pref_time", "pref_energy",
                "amp_efficiency", "server_rate", "t_local", "e_local", "offload_gain",
                "phi", "psi", "eta")

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_servers(self) -> int:
        return len(self.servers)

    @property
    def n_subbands(self) -> int:
        return self.radio.num_subbands

    @property
    def ground_size(self) -> int:
        return self.n_users * self.n_servers * self.n_subbands

    @cached_property
    def home(self) -> np.ndarray:
        """Home BS of each user: the one with the strongest gain."""
        return np.argmax(self.gains, axis=1)

    def _arr(self, fn):
        return np.array([fn(u) for u in self.users], dtype=float)

    @cached_property
    def max_power(self) -> np.ndarray:
        return self._arr(lambda u: u.max_power)

    @cached_property
    def input_bits(self) -> np.ndarray:
        return self._arr(lambda u: u.task.input_bits)

    @cached_property
    def workload(self) -> np.ndarray:
        return self._arr(lambda u: u.task.workload_cycles)

    @cached_property
    def pref_time(self) -> np.ndarray:
        return self._arr(lambda u: u.pref_time)

    @cached_property
    def pref_energy(self) -> np.ndarray:
        return self._arr(lambda u: u.pref_energy)

    @cached_property
    def amp_efficiency(self) -> np.ndarray:
        return self._arr(lambda u: u.amp_efficiency)

    @cached_property
    def server_rate(self) -> np.ndarray:
        return np.array([s.cpu_rate for s in self.servers], dtype=float)

    @cached_property
    def t_local(self) -> np.ndarray:
        return self._arr(local_completion_time)

    @cached_property
    def e_local(self) -> np.ndarray:
        return self._arr(local_energy)

    @cached_property
    def offload_gain(self) -> np.ndarray:
        """lambda_u * (beta_t + beta_e): what an offloaded user adds before overheads."""
        return self._arr(lambda u: u.provider_weight * (u.pref_time + u.pref_energy))

    @cached_property
    def phi(self) -> np.ndarray:
        W = self.radio.subband_width
        return self._arr(
            lambda u: u.provider_weight * u.pref_time * u.task.input_bits
            / (local_completion_time(u) * W)
        )

    @cached_property
    def psi(self) -> np.ndarray:
        W = self.radio.subband_width
        return self._arr(
            lambda u: u.provider_weight * u.pref_energy * u.task.input_bits
            / (local_energy(u) * W * u.amp_efficiency)
        )

    @cached_property
    def eta(self) -> np.ndarray:
        return self._arr(lambda u: u.provider_weight * u.pref_time * u.local_cpu_rate)

    @cached_property
    def py(self) -> SimpleNamespace:
        """The derived arrays (and ``gains``) as plain Python lists for scalar loops."""
        return SimpleNamespace(gains=self.gains.tolist(),
                               **{n: getattr(self, n).tolist() for n in self._DERIVED})


@dataclass
class UtilityReport:
    """Per-user breakdown and weighted system utility.

    ``per_user_delay``/``per_user_energy`` hold the completion time and
    device energy the user actually experiences, i.e. the local values for
    users that do not offload.
    """

    per_user_utility: Dict[int, float]
    per_user_delay: Dict[int, float]
    per_user_energy: Dict[int, float]
    system_utility: float


def local_completion_time(user: UserDevice) -> float:
    return user.task.workload_cycles / user.local_cpu_rate


def local_energy(user: UserDevice) -> float:
    return user.energy_coeff * user.local_cpu_rate ** 2 * user.task.workload_cycles


def interference(scen: NetworkScenario, X: Assignment, s: int, j: int, powers) -> float:
    """Power received at BS ``s`` on sub-band ``j`` from users served by other BSs."""
    total = 0.0
    for e in X.triples:
        if e.subband == j and e.server != s:
            total += powers[e.user] * scen.gains[e.user, s]
    return total


def _sinr(scen, X, P, u, s, j, mode):
    if (u, s, j) not in X:
        return 0.0
    if mode == "exact":
        I = interference(scen, X, s, j, P)
    elif mode == "approx":
        I = interference(scen, X, s, j, scen.max_power)
    else:
        raise ValueError(f"unknown interference mode {mode!r}")
    return P[u] * scen.gains[u, s] / (I + scen.radio.noise_power)


def exact_sinr(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
               u: int, s: int, j: int) -> float:
    """Uplink SINR of user ``u`` at BS ``s`` on sub-band ``j``; 0 if the triple is inactive."""
    return _sinr(scen, X, P, u, s, j, "exact")


def approx_sinr(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
                u: int, s: int, j: int) -> float:
    """SINR with interferers assumed at their maximum power."""
    return _sinr(scen, X, P, u, s, j, "approx")


def _user_sinr(scen, X, P, u, interference_mode):
    e = X.slot_of(u)
    if e is None:
        return None, 0.0
    return e, _sinr(scen, X, P, u, e.server, e.subband, interference_mode)


def uplink_rate(scen: NetworkScenario, X: Assignment, P: PowerAllocation, u: int,
                s: int, interference_mode: str = "exact") -> float:
    e, gamma = _user_sinr(scen, X, P, u, interference_mode)
    if e is None or e.server != s:
        raise ValueError(f"user {u} does not offload to server {s}")
    return scen.radio.subband_width * math.log1p(gamma) / LN2


def offload_delay_energy(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
                         F: ComputeAllocation, u: int,
                         interference_mode: str = "exact") -> Tuple[float, float]:
    """Completion time (upload + remote execution) and uplink energy of an offloading user."""
    e = X.slot_of(u)
    if e is None:
        raise ValueError(f"user {u} is not offloaded")
    rate = uplink_rate(scen, X, P, u, e.server, interference_mode)
    if rate <= 0.0:
        raise UnreachableServerError(f"user {u} has zero uplink rate to server {e.server}")
    user = scen.users[u]
    t_up = user.task.input_bits / rate
    t = t_up + user.task.workload_cycles / F[(u, e.server)]
    energy = P[u] * t_up / user.amp_efficiency
    return t, energy


def user_utility(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
                 F: ComputeAllocation, u: int, interference_mode: str = "exact") -> float:
    if X.slot_of(u) is None:
        return 0.0
    user = scen.users[u]
    t, energy = offload_delay_energy(scen, X, P, F, u, interference_mode)
    tl, el = scen.t_local[u], scen.e_local[u]
    return user.pref_time * (tl - t) / tl + user.pref_energy * (el - energy) / el


def _check_consistent(X, P, F):
    offloaded = X.users()
    powered = {u for u, p in P.items() if p != 0}
    computed = {u for (u, _), f in F.items() if f != 0}
    if powered != offloaded or computed != offloaded:
        raise ValueError(
            "assignment, power and compute allocations disagree on the offloaded set: "
            f"X={sorted(offloaded)} P={sorted(powered)} F={sorted(computed)}"
        )
    for e in X.triples:
        if (e.user, e.server) not in F:
            raise ValueError(f"no compute allocation for user {e.user} at server {e.server}")


def system_utility(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
                   F: ComputeAllocation, interference_mode: str = "exact") -> UtilityReport:
    _check_consistent(X, P, F)
    util, delay, energy = {}, {}, {}
    total = 0.0
    for u, user in enumerate(scen.users):
        if X.slot_of(u) is None:
            util[u], delay[u], energy[u] = 0.0, scen.t_local[u], scen.e_local[u]
            continue
        delay[u], energy[u] = offload_delay_energy(scen, X, P, F, u, interference_mode)
        util[u] = user_utility(scen, X, P, F, u, interference_mode)
        total += user.provider_weight * util[u]
    return UtilityReport(util, delay, energy, total)


def overhead(scen: NetworkScenario, X: Assignment, P: PowerAllocation,
             F: ComputeAllocation, interference_mode: str = "exact") -> float:
    """Total offloading overhead: sum of radio terms (phi + psi p)/log2(1+sinr) plus eta/f."""
    _check_consistent(X, P, F)
    V = 0.0
    for e in X.triples:
        u = e.user
        gamma = _sinr(scen, X, P, u, e.server, e.subband, interference_mode)
        V += (scen.phi[u] + scen.psi[u] * P[u]) / (math.log1p(gamma) / LN2)
        V += scen.eta[u] / F[(u, e.server)]
    return V
