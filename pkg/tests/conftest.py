import numpy as np
import pytest

from mecoffload.model import EdgeServer, NetworkScenario, RadioConfig, TaskProfile, UserDevice
from mecoffload.scenario import ScenarioConfig, generate


def make_scenario(gains, *, max_power=0.1, bandwidth=20e6, num_subbands=2, noise=1e-13,
                  input_bits=3.36e6, workload=1e9, local_cpu=1e9, kappa=5e-27,
                  beta_t=0.2, server_cpu=20e9, weight=1.0):
    """Hand-built scenario with explicit gains; scalars are broadcast to every user."""
    g = np.atleast_2d(np.asarray(gains, dtype=float))
    U, S = g.shape

    def per_user(v, u):
        return v[u] if np.ndim(v) else v

    users = tuple(
        UserDevice(u, (0.0, 0.0), per_user(local_cpu, u), kappa, per_user(max_power, u),
                   per_user(beta_t, u), 1.0 - per_user(beta_t, u),
                   TaskProfile(per_user(input_bits, u), per_user(workload, u)),
                   provider_weight=per_user(weight, u))
        for u in range(U))
    servers = tuple(EdgeServer(s, (float(s), 0.0), per_user(server_cpu, s)) for s in range(S))
    return NetworkScenario(users, servers, g, RadioConfig(bandwidth, num_subbands, noise))


SMALL = ScenarioConfig(num_cells=4, users_total=6, num_subbands=2)


@pytest.fixture
def small_drops():
    return [generate(SMALL, 500 + k) for k in range(5)]
