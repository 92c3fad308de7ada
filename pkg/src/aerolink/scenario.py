"""Scenario definition: node layout, radio parameters, and config file I/O.

A scenario is the full description of one relay deployment: a base station,
a chain of relay UAVs, a user terminal, and a set of fixed interference
sources that the relays must coexist with.  All geometry is in meters, all
powers are watts internally (dBm at the config-file boundary), frequencies
in Hz.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

SPEED_OF_LIGHT_M_S = 3.0e8

SCHEMA_VERSION = 1


class NodeClass(Enum):
    BASE_STATION = "bs"
    RELAY_UAV = "uav"
    USER_EQUIPMENT = "ue"
    INTERFERENCE_SOURCE = "si"


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    if p_w <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_w) + 30.0


def free_space_offset_db(carrier_hz: float) -> float:
    """Distance-independent path loss offset of a unit-distance free-space link."""
    if carrier_hz <= 0.0:
        raise ValueError("carrier frequency must be positive")
    return 10.0 * math.log10((4.0 * math.pi * carrier_hz / SPEED_OF_LIGHT_M_S) ** 2)


@dataclass(frozen=True)
class ChannelParams:
    """Log-distance path loss parameters per link class plus system bandwidth.

    ``alpha_*`` are path loss exponents, ``eta_*`` the dB offsets at 1 m.
    Air-to-air links see less clutter than air-to-ground ones, hence the
    separate exponents.
    """

    alpha_a2a: float = 2.05
    alpha_a2g: float = 2.32
    eta_a2a_db: float | None = None  # None: free-space offset at carrier_hz
    eta_a2g_db: float | None = None
    carrier_hz: float = 2.0e9
    bandwidth_hz: float = 1.0e4

    def __post_init__(self):
        if self.alpha_a2a < 1.0 or self.alpha_a2g < 1.0:
            raise ValueError("path loss exponent must be >= 1")
        if self.carrier_hz <= 0.0:
            raise ValueError("carrier frequency must be positive")
        if self.bandwidth_hz <= 0.0:
            raise ValueError("bandwidth must be positive")

    def eta_db(self, a2a: bool) -> float:
        given = self.eta_a2a_db if a2a else self.eta_a2g_db
        if given is not None:
            return given
        return free_space_offset_db(self.carrier_hz)


@dataclass(frozen=True)
class SafetyParams:
    """Smoothed proximity penalty: a sigmoid step on distance / r_int.

    chi scales the penalty's weight in the SIR denominator, zeta is the step
    height, kappa the steepness, y0 the residual level far from the wall.
    """

    chi: float = 1.0
    zeta: float = 1.0
    kappa: float = 10.0
    y0: float = 1.0e-3
    r_int_m: float = 5.0

    def __post_init__(self):
        if self.chi < 0.0:
            raise ValueError("chi must be >= 0")
        if self.zeta <= 0.0:
            raise ValueError("zeta must be positive")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.y0 <= 0.0:
            raise ValueError("y0 must be positive")
        if self.r_int_m <= 0.0:
            raise ValueError("r_int must be positive")


@dataclass(frozen=True)
class AerialPartition:
    """Split of all node indices into aerial and ground sets."""

    aerial: frozenset
    ground: frozenset


@dataclass(frozen=True, eq=False)
class Scenario:
    """One relay deployment.

    Node order is fixed: index 0 is the base station, 1..n_uavs the relay
    UAVs, n_uavs+1 the user terminal; interference sources follow.  The
    relayed traffic flows over ``topology`` edges (pairs of node indices
    within the first n_primary nodes); the default is the chain
    0-1-...-(n_primary-1).
    """

    classes: tuple
    positions: np.ndarray          # (n_total, 3) meters
    node_powers_w: np.ndarray      # (n_primary,) transmit powers
    si_powers_w: np.ndarray        # (n_si,)
    p_max_w: float
    i_max_w: np.ndarray            # (n_si,) allowed received interference
    channel: ChannelParams
    safety: SafetyParams
    weights: np.ndarray            # (n_primary,) node importance weights
    topology: tuple
    ue_aerial: bool = False
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "positions", _own(self.positions, (len(self.classes), 3)))
        n_primary = sum(1 for c in self.classes if c is not NodeClass.INTERFERENCE_SOURCE)
        n_si = len(self.classes) - n_primary
        object.__setattr__(self, "node_powers_w", _own(self.node_powers_w, (n_primary,)))
        object.__setattr__(self, "si_powers_w", _own(self.si_powers_w, (n_si,)))
        object.__setattr__(self, "i_max_w", _own(self.i_max_w, (n_si,)))
        object.__setattr__(self, "weights", _own(self.weights, (n_primary,)))
        object.__setattr__(self, "topology",
                           tuple(tuple(int(v) for v in e) for e in self.topology))

    # -- index helpers -------------------------------------------------

    @property
    def n_total(self) -> int:
        return len(self.classes)

    @property
    def n_primary(self) -> int:
        return self.n_total - self.n_si

    @property
    def n_uavs(self) -> int:
        return sum(1 for c in self.classes if c is NodeClass.RELAY_UAV)

    @property
    def n_si(self) -> int:
        return sum(1 for c in self.classes if c is NodeClass.INTERFERENCE_SOURCE)

    @property
    def source(self) -> int:
        return 0

    @property
    def destination(self) -> int:
        return self.n_primary - 1

    @property
    def uav_indices(self) -> tuple:
        return tuple(i for i, c in enumerate(self.classes) if c is NodeClass.RELAY_UAV)

    @property
    def si_indices(self) -> tuple:
        return tuple(i for i, c in enumerate(self.classes) if c is NodeClass.INTERFERENCE_SOURCE)

    @property
    def nodes(self) -> list:
        return [(c, self.positions[i].copy()) for i, c in enumerate(self.classes)]

    @property
    def uav_positions(self) -> np.ndarray:
        return self.positions[list(self.uav_indices)].copy()

    # -- functional updates --------------------------------------------

    def with_uav_positions(self, uav_positions: np.ndarray) -> "Scenario":
        pos = self.positions.copy()
        upd = np.asarray(uav_positions, dtype=float)
        if upd.shape != (self.n_uavs, 3):
            raise ValueError("expected one 3D position per UAV")
        pos[list(self.uav_indices)] = upd
        return dataclasses.replace(self, positions=pos)

    def with_node_powers(self, powers_w: np.ndarray) -> "Scenario":
        return dataclasses.replace(self, node_powers_w=np.asarray(powers_w, dtype=float))

    def with_i_max_dbm(self, i_max_dbm: float) -> "Scenario":
        val = dbm_to_watts(i_max_dbm)
        return dataclasses.replace(self, i_max_w=np.full(self.n_si, val))

    def with_ue_altitude(self, altitude_m: float) -> "Scenario":
        pos = self.positions.copy()
        pos[self.destination, 2] = float(altitude_m)
        return dataclasses.replace(self, positions=pos)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.classes == other.classes
                and np.array_equal(self.positions, other.positions)
                and np.array_equal(self.node_powers_w, other.node_powers_w)
                and np.array_equal(self.si_powers_w, other.si_powers_w)
                and self.p_max_w == other.p_max_w
                and np.array_equal(self.i_max_w, other.i_max_w)
                and self.channel == other.channel
                and self.safety == other.safety
                and np.array_equal(self.weights, other.weights)
                and self.topology == other.topology
                and self.ue_aerial == other.ue_aerial
                and self.seed == other.seed)


def _own(a, shape) -> np.ndarray:
    out = np.array(a, dtype=float)
    if out.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {out.shape}")
    return out


def partition(scenario: Scenario) -> AerialPartition:
    """Aerial vs ground node split; the UE side is chosen by ``ue_aerial``."""
    aerial = set(scenario.uav_indices)
    ground = {scenario.source} | set(scenario.si_indices)
    if scenario.ue_aerial:
        aerial.add(scenario.destination)
    else:
        ground.add(scenario.destination)
    return AerialPartition(aerial=frozenset(aerial), ground=frozenset(ground))


def build_default_scenario(seed: int = 7,
                           ue_altitude_m: float = 25.0,
                           n_uavs: int = 8,
                           n_si: int = 7,
                           ue_aerial: bool = False,
                           p_max_dbm: float = 20.0,
                           si_power_dbm: float = 30.0,
                           i_max_dbm: float = -30.0) -> Scenario:
    """Reference deployment: BS at the origin, UE 200 m away, relays in between.

    UAVs start evenly spaced on the BS-UE segment at 30 m altitude.
    Interference source positions are drawn from ``seed``: x,y uniform over
    [0,200] x [-100,100] in one (n_si, 2) draw, all at 20 m altitude.
    """
    if n_uavs < 1:
        raise ValueError("need at least one relay UAV")
    if n_si < 0:
        raise ValueError("interference source count must be >= 0")
    rng = np.random.default_rng(seed)
    bs = np.array([0.0, 0.0, 15.0])
    ue = np.array([200.0, 0.0, float(ue_altitude_m)])
    frac = np.arange(1, n_uavs + 1) / (n_uavs + 1)
    uavs = np.column_stack([bs[0] + frac * (ue[0] - bs[0]),
                            bs[1] + frac * (ue[1] - bs[1]),
                            np.full(n_uavs, 30.0)])
    si_xy = rng.uniform(low=[0.0, -100.0], high=[200.0, 100.0], size=(n_si, 2))
    sis = np.column_stack([si_xy, np.full(n_si, 20.0)])

    classes = ((NodeClass.BASE_STATION,)
               + (NodeClass.RELAY_UAV,) * n_uavs
               + (NodeClass.USER_EQUIPMENT,)
               + (NodeClass.INTERFERENCE_SOURCE,) * n_si)
    positions = np.vstack([bs[None, :], uavs, ue[None, :], sis])

    n_primary = n_uavs + 2
    p_max_w = dbm_to_watts(p_max_dbm)
    weights = np.ones(n_primary)
    weights[1:-1] = 1.0e-2
    return Scenario(
        classes=classes,
        positions=positions,
        node_powers_w=np.full(n_primary, p_max_w),
        si_powers_w=np.full(n_si, dbm_to_watts(si_power_dbm)),
        p_max_w=p_max_w,
        i_max_w=np.full(n_si, dbm_to_watts(i_max_dbm)),
        channel=ChannelParams(),
        safety=SafetyParams(),
        weights=weights,
        topology=tuple((i, i + 1) for i in range(n_primary - 1)),
        ue_aerial=ue_aerial,
        seed=seed,
    )


def validate(scenario: Scenario) -> list:
    """Return a list of human-readable problems; empty means valid."""
    errs = []
    cls = scenario.classes
    if sum(1 for c in cls if c is NodeClass.BASE_STATION) != 1:
        errs.append("scenario must contain exactly one base station")
    if sum(1 for c in cls if c is NodeClass.USER_EQUIPMENT) != 1:
        errs.append("scenario must contain exactly one user terminal")
    if scenario.n_uavs < 1:
        errs.append("scenario must contain at least one relay UAV")
    if cls and (cls[0] is not NodeClass.BASE_STATION
                or (scenario.n_primary >= 2
                    and cls[scenario.n_primary - 1] is not NodeClass.USER_EQUIPMENT)):
        errs.append("node order must be base station, UAVs, user terminal, then sources")

    pos = scenario.positions
    if not np.all(np.isfinite(pos)):
        errs.append("all coordinates must be finite")
    else:
        if np.any(pos[:, 2] < 0.0):
            errs.append("altitudes must be >= 0")
        d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
        iu = np.triu_indices(scenario.n_total, k=1)
        if np.any(d[iu] == 0.0):
            errs.append("two nodes share a position; links would be degenerate")

    if not np.all(np.isfinite(scenario.node_powers_w)) or np.any(scenario.node_powers_w <= 0.0):
        errs.append("transmit powers must be positive")
    elif scenario.p_max_w <= 0.0:
        errs.append("power budget p_max must be positive")
    elif np.any(scenario.node_powers_w > scenario.p_max_w * (1.0 + 1e-12)):
        errs.append("transmit powers must not exceed the power budget p_max")
    if np.any(scenario.si_powers_w <= 0.0):
        errs.append("interference source powers must be positive")
    if np.any(scenario.i_max_w <= 0.0):
        errs.append("interference thresholds must be positive")

    w = scenario.weights
    if w.shape[0] == scenario.n_primary and scenario.n_primary >= 2:
        if w[scenario.source] != 1.0:
            errs.append("source weight must be 1")
        if w[scenario.destination] != 1.0:
            errs.append("destination weight must be 1")
        mid = w[1:-1]
        if mid.size and (np.any(mid <= 0.0) or np.any(mid > 1.0)):
            errs.append("UAV weights must lie in (0, 1]")

    n = scenario.n_primary
    seen = set()
    adj = [[] for _ in range(n)]
    for e in scenario.topology:
        if len(e) != 2:
            errs.append(f"topology entry {e} is not a pair")
            continue
        i, j = e
        if not (0 <= i < n and 0 <= j < n):
            errs.append(f"topology edge {e} references a non-primary node")
            continue
        if i == j:
            errs.append(f"topology edge {e} is a self loop")
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            errs.append(f"topology edge {key} is duplicated")
        seen.add(key)
        adj[i].append(j)
        adj[j].append(i)
    if not errs or all("topology" not in m for m in errs):
        # reachability of the terminal over topology edges
        reach = {scenario.source}
        stack = [scenario.source]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in reach:
                    reach.add(v)
                    stack.append(v)
        if scenario.destination not in reach:
            errs.append("destination unreachable over the topology")
    return errs


# -- config file I/O ----------------------------------------------------

def _uavs_from_config(section: dict, bs: np.ndarray, ue: np.ndarray) -> np.ndarray:
    """Explicit positions, or `count` relays evenly spaced between BS and UE."""
    if "positions_m" in section:
        uavs = np.asarray(section["positions_m"], dtype=float)
        if uavs.ndim != 2 or uavs.shape[1] != 3:
            raise ValueError("uavs.positions_m must be a list of [x, y, z] triples")
        return uavs
    count = int(section.get("count", 0))
    if count < 1:
        raise ValueError("uavs need positions_m or a positive count")
    alt = float(section.get("initial_altitude_m", 30.0))
    frac = np.arange(1, count + 1) / (count + 1)
    return np.column_stack([bs[0] + frac * (ue[0] - bs[0]),
                            bs[1] + frac * (ue[1] - bs[1]),
                            np.full(count, alt)])


def _sis_from_config(section: dict, seed) -> np.ndarray:
    """Explicit positions, or `count` sources drawn uniformly from the seed."""
    if "positions_m" in section:
        return np.asarray(section["positions_m"], dtype=float).reshape(-1, 3)
    count = int(section.get("count", 0))
    if count == 0:
        return np.zeros((0, 3))
    if seed is None:
        raise ValueError("drawing interference sources by count needs a seed")
    region = section.get("region_m", {})
    x_lo, x_hi = region.get("x", [0.0, 200.0])
    y_lo, y_hi = region.get("y", [-100.0, 100.0])
    alt = float(region.get("altitude", 20.0))
    rng = np.random.default_rng(int(seed))
    xy = rng.uniform(low=[x_lo, y_lo], high=[x_hi, y_hi], size=(count, 2))
    return np.column_stack([xy, np.full(count, alt)])


def scenario_to_config(scenario: Scenario) -> dict:
    uavs = scenario.uav_positions
    sis = scenario.positions[list(scenario.si_indices)]
    cfg = {
        "schema-version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "nodes": {
            "bs": {"position_m": scenario.positions[scenario.source].tolist()},
            "ue": {"position_m": scenario.positions[scenario.destination].tolist(),
                   "aerial": scenario.ue_aerial},
            "uavs": {"positions_m": uavs.tolist()},
            "sis": {"positions_m": sis.tolist()},
        },
        "channel": {
            "alpha_a2a": scenario.channel.alpha_a2a,
            "alpha_a2g": scenario.channel.alpha_a2g,
            "eta_a2a_db": scenario.channel.eta_a2a_db,
            "eta_a2g_db": scenario.channel.eta_a2g_db,
            "carrier_hz": scenario.channel.carrier_hz,
            "bandwidth_hz": scenario.channel.bandwidth_hz,
        },
        "safety": {
            "chi": scenario.safety.chi,
            "zeta": scenario.safety.zeta,
            "kappa": scenario.safety.kappa,
            "y0": scenario.safety.y0,
            "r_int_m": scenario.safety.r_int_m,
        },
        "powers": {
            "p_max_dbm": watts_to_dbm(scenario.p_max_w),
            "node_dbm": [watts_to_dbm(p) for p in scenario.node_powers_w],
            "si_dbm": [watts_to_dbm(p) for p in scenario.si_powers_w],
            "i_max_dbm": [watts_to_dbm(p) for p in scenario.i_max_w],
        },
        "weights": scenario.weights.tolist(),
        "topology": [list(e) for e in scenario.topology],
    }
    return cfg


def scenario_from_config(cfg: dict) -> Scenario:
    version = cfg.get("schema-version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema-version {version!r}; expected {SCHEMA_VERSION}")
    for key in ("nodes", "channel", "safety", "powers", "weights", "topology"):
        if key not in cfg:
            raise ValueError(f"config is missing required key {key!r}")

    nodes = cfg["nodes"]
    try:
        bs = np.asarray(nodes["bs"]["position_m"], dtype=float)
        ue = np.asarray(nodes["ue"]["position_m"], dtype=float)
        uavs = _uavs_from_config(nodes["uavs"], bs, ue)
        sis = _sis_from_config(nodes.get("sis", {}), cfg.get("seed"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed nodes section: {exc}") from exc
    n_uavs, n_si = uavs.shape[0], sis.shape[0]
    n_primary = n_uavs + 2

    ch = cfg["channel"]
    channel = ChannelParams(
        alpha_a2a=float(ch.get("alpha_a2a", 2.05)),
        alpha_a2g=float(ch.get("alpha_a2g", 2.32)),
        eta_a2a_db=None if ch.get("eta_a2a_db") is None else float(ch["eta_a2a_db"]),
        eta_a2g_db=None if ch.get("eta_a2g_db") is None else float(ch["eta_a2g_db"]),
        carrier_hz=float(ch.get("carrier_hz", 2.0e9)),
        bandwidth_hz=float(ch.get("bandwidth_hz", 1.0e4)),
    )
    sf = cfg["safety"]
    safety = SafetyParams(
        chi=float(sf.get("chi", 1.0)),
        zeta=float(sf.get("zeta", 1.0)),
        kappa=float(sf.get("kappa", 10.0)),
        y0=float(sf.get("y0", 1.0e-3)),
        r_int_m=float(sf.get("r_int_m", 5.0)),
    )

    pw = cfg["powers"]
    p_max_w = dbm_to_watts(float(pw["p_max_dbm"]))
    node_dbm = pw.get("node_dbm")
    if node_dbm is None:
        node_powers = np.full(n_primary, p_max_w)
    else:
        if len(node_dbm) != n_primary:
            raise ValueError("node_dbm must list one power per primary node")
        node_powers = np.array([dbm_to_watts(float(p)) for p in node_dbm])
    si_dbm = pw.get("si_dbm", [])
    if np.isscalar(si_dbm):
        si_dbm = [si_dbm] * n_si
    if len(si_dbm) != n_si:
        raise ValueError("si_dbm must list one power per interference source")
    imax_dbm = pw.get("i_max_dbm", -30.0)
    if np.isscalar(imax_dbm):
        imax_dbm = [imax_dbm] * n_si
    if len(imax_dbm) != n_si:
        raise ValueError("i_max_dbm must list one threshold per interference source")

    weights = np.asarray(cfg["weights"], dtype=float)
    if weights.shape != (n_primary,):
        raise ValueError("weights must list one value per primary node")

    topology = cfg["topology"]
    if topology == "line":
        topology = [(i, i + 1) for i in range(n_primary - 1)]

    classes = ((NodeClass.BASE_STATION,)
               + (NodeClass.RELAY_UAV,) * n_uavs
               + (NodeClass.USER_EQUIPMENT,)
               + (NodeClass.INTERFERENCE_SOURCE,) * n_si)
    positions = np.vstack([bs[None, :], uavs, ue[None, :], sis])
    scen = Scenario(
        classes=classes,
        positions=positions,
        node_powers_w=node_powers,
        si_powers_w=np.array([dbm_to_watts(float(p)) for p in si_dbm]),
        p_max_w=p_max_w,
        i_max_w=np.array([dbm_to_watts(float(p)) for p in imax_dbm]),
        channel=channel,
        safety=safety,
        weights=weights,
        topology=topology,
        ue_aerial=bool(nodes["ue"].get("aerial", False)),
        seed=cfg.get("seed"),
    )
    problems = validate(scen)
    if problems:
        raise ValueError("invalid scenario config: " + "; ".join(problems))
    return scen


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    return scenario_from_config(cfg)


def save_scenario(scenario: Scenario, path: str) -> None:
    text = json.dumps(scenario_to_config(scenario), indent=2)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
    os.replace(tmp, path)
