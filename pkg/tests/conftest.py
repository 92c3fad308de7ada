"""Seeded random builders shared across the test modules."""

import numpy as np
import pytest

from aerolink.scenario import (ChannelParams, NodeClass, SafetyParams, Scenario,
                               dbm_to_watts)
from aerolink.spectral import GraphMatrices


def make_line_scenario(rng, n_uavs=None, n_si=None, chi=None, ue_aerial=False,
                       p_max_dbm=20.0, jitter=True):
    """Random chain deployment in a 200 m corridor, mirroring the reference one."""
    n_uavs = int(rng.integers(3, 9)) if n_uavs is None else n_uavs
    n_si = int(rng.integers(0, 8)) if n_si is None else n_si
    chi = float(rng.choice([0.0, 1.0])) if chi is None else chi

    bs = np.array([0.0, 0.0, 15.0])
    ue = np.array([200.0, 0.0, float(rng.uniform(5.0, 60.0))])
    frac = np.arange(1, n_uavs + 1) / (n_uavs + 1)
    uavs = np.column_stack([frac * 200.0, np.zeros(n_uavs), np.full(n_uavs, 30.0)])
    if jitter:
        uavs += rng.uniform(-12.0, 12.0, size=uavs.shape)
        uavs[:, 2] = np.clip(uavs[:, 2], 3.0, None)
    si_xy = rng.uniform(low=[0.0, -100.0], high=[200.0, 100.0], size=(n_si, 2))
    sis = np.column_stack([si_xy, np.full(n_si, 20.0)])

    n_primary = n_uavs + 2
    p_max_w = dbm_to_watts(p_max_dbm)
    weights = np.ones(n_primary)
    weights[1:-1] = rng.uniform(0.005, 1.0, size=n_uavs)
    if chi == 0.0 and n_si == 0:
        n_si = 1  # the SIR denominator must not vanish
        sis = np.array([[100.0, 80.0, 20.0]])

    return Scenario(
        classes=((NodeClass.BASE_STATION,) + (NodeClass.RELAY_UAV,) * n_uavs
                 + (NodeClass.USER_EQUIPMENT,) + (NodeClass.INTERFERENCE_SOURCE,) * n_si),
        positions=np.vstack([bs[None, :], uavs, ue[None, :], sis]),
        node_powers_w=np.full(n_primary, p_max_w),
        si_powers_w=np.full(n_si, 1.0),
        p_max_w=p_max_w,
        i_max_w=np.full(n_si, dbm_to_watts(float(rng.uniform(-50.0, -10.0)))),
        channel=ChannelParams(),
        safety=SafetyParams(chi=chi),
        weights=weights,
        topology=tuple((i, i + 1) for i in range(n_primary - 1)),
        ue_aerial=ue_aerial,
    )


def make_connected_graph(rng, n=None, w_min=0.1, w_max=3.0):
    """Random connected weighted adjacency (spanning tree plus extra edges)."""
    n = int(rng.integers(2, 13)) if n is None else n
    a = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        i, j = order[k], order[int(rng.integers(0, k))]
        a[i, j] = a[j, i] = rng.uniform(w_min, w_max)
    extra = rng.random((n, n)) < 0.3
    for i in range(n):
        for j in range(i + 1, n):
            if extra[i, j] and a[i, j] == 0.0:
                a[i, j] = a[j, i] = rng.uniform(w_min, w_max)
    return GraphMatrices.from_adjacency(a)


def make_capacity_network_adjacency(rng, n=None):
    """Random symmetric capacity matrix with a guaranteed s-d path."""
    n = int(rng.integers(4, 11)) if n is None else n
    a = np.zeros((n, n))
    mask = rng.random((n, n)) < 0.45
    for i in range(n):
        for j in range(i + 1, n):
            if mask[i, j]:
                a[i, j] = a[j, i] = rng.uniform(0.2, 10.0)
    # chain fallback so max flow is generally nonzero
    for i in range(n - 1):
        if a[i, i + 1] == 0.0 and rng.random() < 0.7:
            a[i, i + 1] = a[i + 1, i] = rng.uniform(0.2, 10.0)
    return a
