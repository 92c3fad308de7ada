"""Radio links: path loss, fading, SIR, edge rates, and their spatial gradients.

The signal model is log-distance path loss on top of an optional small-scale
fading draw.  A transmission from i to j is received with power
``P_i * |h_ij|^2`` where ``|h_ij|^2 = |g_ij|^2 * 10^(-eta/10) * d_ij^(-alpha)``.
The link budget at a receiver competes against two terms: aggregate
interference from the fixed sources, and a smoothed proximity penalty that
grows steeply once another primary node comes within the separation radius.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .scenario import NodeClass, SafetyParams, Scenario, partition

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class FadingModel:
    """Small-scale gain model: deterministic unit gains or a seeded Rayleigh draw.

    Rayleigh gains are drawn once per unordered node pair from a stream keyed
    by (seed, i, j) with i < j, so they are reciprocal by construction and do
    not depend on evaluation order.
    """

    kind: str = "unit"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("unit", "rayleigh"):
            raise ValueError("fading kind must be 'unit' or 'rayleigh'")

    @staticmethod
    def unit_gain() -> "FadingModel":
        return FadingModel("unit")

    @staticmethod
    def rayleigh(seed: int) -> "FadingModel":
        return FadingModel("rayleigh", int(seed))

    def gain_sq_matrix(self, n_total: int) -> np.ndarray:
        if self.kind == "unit":
            return np.ones((n_total, n_total))
        return _rayleigh_gain_sq(self.seed, n_total)


@functools.lru_cache(maxsize=64)
def _rayleigh_gain_sq(seed: int, n_total: int) -> np.ndarray:
    g2 = np.ones((n_total, n_total))
    for i in range(n_total):
        for j in range(i + 1, n_total):
            rng = np.random.default_rng((seed, i, j))
            re, im = rng.standard_normal(2)
            g2[i, j] = g2[j, i] = 0.5 * (re * re + im * im)
    g2.setflags(write=False)
    return g2


@dataclass(frozen=True)
class LinkGain:
    """Resolved budget of one directed link."""

    path_loss_db: float
    gain_sq: float        # |h|^2, absolute power ratio
    distance_m: float
    a2a: bool


def path_loss_db(a2a: bool, distance_m: float, channel) -> float:
    """Log-distance path loss alpha*10*log10(d) + eta, in dB."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("path loss undefined at zero distance")
    alpha = channel.alpha_a2a if a2a else channel.alpha_a2g
    return alpha * 10.0 * np.log10(d) + channel.eta_db(a2a)


def smoothed_step(y, safety: SafetyParams):
    """Sigmoid proximity step: ~zeta for y near 0, decaying to 0 for large y.

    The argument y is a distance normalized by the separation radius.  The
    curve crosses zeta/2 at y = -ln(y0)/kappa and its residual floor at y = 0
    is zeta/(1 + y0).
    """
    z = -safety.kappa * np.asarray(y, dtype=float) - np.log(safety.y0)
    return safety.zeta * _sigmoid(z)


def smoothed_step_slope(y, safety: SafetyParams):
    """d(smoothed_step)/dy, always <= 0."""
    z = -safety.kappa * np.asarray(y, dtype=float) - np.log(safety.y0)
    return -safety.zeta * safety.kappa * _sigmoid_prime(z)


def _sigmoid(z):
    # stable in both tails
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def _sigmoid_prime(z):
    e = np.exp(-np.abs(np.asarray(z, dtype=float)))
    out = e / (1.0 + e) ** 2
    return out if out.ndim else float(out)


class ChannelState:
    """Position-dependent link quantities shared by SIR, rate, and gradient calls.

    Holds everything that does not change with primary transmit powers:
    pairwise distances, squared channel gains, per-receiver aggregate
    interference, and the proximity penalty table over primary nodes.
    """

    def __init__(self, scenario: Scenario, fading: FadingModel):
        self.scenario = scenario
        self.fading = fading
        pos = scenario.positions
        n_total = scenario.n_total
        n = scenario.n_primary

        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        off = ~np.eye(n_total, dtype=bool)
        if np.any(dist[off] == 0.0):
            raise ValueError("two nodes share a position; link gain undefined")

        aerial = partition(scenario).aerial
        is_aerial = np.array([i in aerial for i in range(n_total)])
        a2a = is_aerial[:, None] & is_aerial[None, :]
        alpha = np.where(a2a, scenario.channel.alpha_a2a, scenario.channel.alpha_a2g)
        eta = np.where(a2a, scenario.channel.eta_db(True), scenario.channel.eta_db(False))

        g2 = fading.gain_sq_matrix(n_total)
        safe_d = np.where(off, dist, 1.0)
        gain = g2 * 10.0 ** (-eta / 10.0) * safe_d ** (-alpha)
        np.fill_diagonal(gain, 0.0)

        self.dist = dist
        self.alpha = alpha
        self.a2a = a2a
        self.gain_sq = gain

        si = list(scenario.si_indices)
        # aggregate interference from the fixed sources at each primary receiver
        if si:
            self.interference_w = scenario.si_powers_w @ gain[si][:, :n]
        else:
            self.interference_w = np.zeros(n)

        saf = scenario.safety
        y = dist[:n, :n] / saf.r_int_m
        u = smoothed_step(y, saf)
        np.fill_diagonal(u, 0.0)
        self.safety_u = u
        # per-index exclusion masks; summing the surviving terms directly
        # avoids the cancellation of subtracting a dominant u[j, i] from a
        # full row sum (that subtraction silently absorbs tiny terms)
        self._excl = ~np.eye(n, dtype=bool)
        self._safety_slope = None
        self._si_grad = None

    # -- power-independent denominators ---------------------------------

    def sir_denominator(self, i: int, j: int) -> float:
        chi = self.scenario.safety.chi
        safety = float(self.safety_u[j][self._excl[i]].sum())
        return float(self.interference_w[j] + chi * safety)

    # -- lazy gradient tables --------------------------------------------

    @property
    def safety_slope(self) -> np.ndarray:
        """S[j,k] with d u(d_jk/r)/d r_j = S[j,k] * (r_j - r_k)."""
        if self._safety_slope is None:
            n = self.scenario.n_primary
            saf = self.scenario.safety
            d = self.dist[:n, :n]
            safe = np.where(np.eye(n, dtype=bool), 1.0, d)
            s = smoothed_step_slope(d / saf.r_int_m, saf) / (saf.r_int_m * safe)
            np.fill_diagonal(s, 0.0)
            self._safety_slope = s
        return self._safety_slope

    @property
    def si_interference_grad(self) -> np.ndarray:
        """(n_primary, 3): gradient of the aggregate interference at receiver j
        with respect to receiver j's own position."""
        if self._si_grad is None:
            sc = self.scenario
            n = sc.n_primary
            si = list(sc.si_indices)
            out = np.zeros((n, 3))
            if si:
                pos = sc.positions
                d = self.dist[np.ix_(si, range(n))]
                coeff = (sc.si_powers_w[:, None]
                         * (-self.alpha[np.ix_(si, range(n))])
                         * self.gain_sq[np.ix_(si, range(n))] / d ** 2)
                diff = pos[:n][None, :, :] - pos[si][:, None, :]
                out = np.einsum("mj,mjc->jc", coeff, diff)
            self._si_grad = out
        return self._si_grad

    def safety_sum_gradient(self, i: int, j: int, axis: int) -> float:
        """d/d(receiver j coordinate) of the proximity sum over k not in {i, j}."""
        n = self.scenario.n_primary
        pos = self.scenario.positions
        terms = self.safety_slope[j] * (pos[j, axis] - pos[:n, axis])
        return float(terms[self._excl[i]].sum())


def build_state(scenario: Scenario, fading: FadingModel | None = None) -> ChannelState:
    return ChannelState(scenario, fading or FadingModel.unit_gain())


def _state_for(scenario, fading, state):
    if state is not None:
        return state
    return build_state(scenario, fading)


def link_gain(i: int, j: int, scenario: Scenario,
              fading: FadingModel | None = None,
              state: ChannelState | None = None) -> LinkGain:
    """Full budget of link i -> j.  Errors on i == j or coincident nodes."""
    if i == j:
        raise ValueError("link endpoints must differ")
    st = _state_for(scenario, fading, state)
    d = float(st.dist[i, j])
    return LinkGain(
        path_loss_db=float(st.alpha[i, j] * 10.0 * np.log10(d)
                           + scenario.channel.eta_db(bool(st.a2a[i, j]))),
        gain_sq=float(st.gain_sq[i, j]),
        distance_m=d,
        a2a=bool(st.a2a[i, j]),
    )


def sir(i: int, j: int, scenario: Scenario,
        fading: FadingModel | None = None,
        state: ChannelState | None = None) -> float:
    """Signal-to-interference ratio of link i -> j at receiver j.

    The denominator adds the received powers of every fixed interference
    source to the proximity penalty summed over all primary nodes other than
    i and j, scaled by chi.  There is no thermal noise term; a scenario with
    no sources and chi = 0 therefore has no defined SIR.
    """
    n = scenario.n_primary
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("SIR is defined between primary nodes only")
    if i == j:
        raise ValueError("SIR undefined for a node talking to itself")
    st = _state_for(scenario, fading, state)
    denom = st.sir_denominator(i, j)
    if denom == 0.0:
        raise ValueError("zero SIR denominator: no interference sources and no "
                         "proximity term (chi = 0 or fully decayed)")
    with np.errstate(over="ignore"):
        value = float(scenario.node_powers_w[i] * st.gain_sq[i, j] / denom)
    if not np.isfinite(value):
        # a denormal proximity-only denominator overflows the quotient; that
        # is the zero-denominator case in all but the last few bits
        raise ValueError("zero SIR denominator: no interference sources and no "
                         "proximity term (chi = 0 or fully decayed)")
    return value


def edge_rate(i: int, j: int, scenario: Scenario,
              fading: FadingModel | None = None,
              state: ChannelState | None = None) -> float:
    """Symmetric half-duplex rate of topology edge (i, j) in bit/s.

    Each direction gets half the bandwidth: B/2 * (log2(1+SIR_ij) +
    log2(1+SIR_ji)).  Zero for i == j.
    """
    if i == j:
        return 0.0
    _require_edge(i, j, scenario)
    st = _state_for(scenario, fading, state)
    b = scenario.channel.bandwidth_hz
    return float(0.5 * b * (np.log2(1.0 + sir(i, j, scenario, state=st))
                            + np.log2(1.0 + sir(j, i, scenario, state=st))))


def _require_edge(i, j, scenario):
    if (i, j) not in scenario.topology and (j, i) not in scenario.topology:
        raise ValueError(f"({i}, {j}) is not a topology edge")


def _resolve_wrt(scenario, wrt):
    t, axis = wrt
    t = int(t)
    if not (0 <= t < scenario.n_primary) or scenario.classes[t] is not NodeClass.RELAY_UAV:
        raise ValueError(f"node {t} is not a relay UAV; only UAVs move")
    if axis in ("x", "y", "z"):
        axis = "xyz".index(axis)
    axis = int(axis)
    if axis not in (0, 1, 2):
        raise ValueError("axis must be one of x, y, z")
    return t, axis


def sir_spatial_gradient(i: int, j: int, wrt, scenario: Scenario,
                         fading: FadingModel | None = None,
                         state: ChannelState | None = None) -> float:
    """Exact partial derivative of sir(i, j) w.r.t. one UAV coordinate.

    Three mechanisms contribute: the numerator gain when the moving UAV is an
    endpoint, the source interference at j when the mover is j itself, and the
    proximity penalty, which couples every primary node within range of the
    receiver (so with chi > 0 a third-party UAV has a nonzero derivative).
    """
    t, c = _resolve_wrt(scenario, wrt)
    if i == j:
        raise ValueError("SIR undefined for a node talking to itself")
    st = _state_for(scenario, fading, state)
    sc = scenario
    pos = sc.positions
    denom = st.sir_denominator(i, j)
    if denom == 0.0:
        raise ValueError("zero SIR denominator: no interference sources and no "
                         "proximity term (chi = 0 or fully decayed)")
    num = sc.node_powers_w[i] * st.gain_sq[i, j]

    dnum = 0.0
    if t == i or t == j:
        other = j if t == i else i
        d = st.dist[i, j]
        dd = (pos[t, c] - pos[other, c]) / d
        dnum = sc.node_powers_w[i] * (-st.alpha[i, j] * st.gain_sq[i, j] / d) * dd

    dden = 0.0
    if t == j:
        dden += st.si_interference_grad[j, c]
    chi = sc.safety.chi
    if chi != 0.0:
        if t == j:
            dden += chi * st.safety_sum_gradient(i, j, c)
        elif t != i:
            dden += chi * st.safety_slope[j, t] * (pos[t, c] - pos[j, c])

    return float(dnum / denom - (num / denom) * (dden / denom))


def rate_spatial_gradient(p: int, q: int, wrt, scenario: Scenario,
                          fading: FadingModel | None = None,
                          state: ChannelState | None = None) -> float:
    """Exact partial derivative of edge_rate(p, q) w.r.t. one UAV coordinate.

    Chain rule through both directed SIRs of the edge, including the
    1/(2 ln 2) factor from differentiating log2.
    """
    if p == q:
        return 0.0
    _require_edge(p, q, scenario)
    st = _state_for(scenario, fading, state)
    b = scenario.channel.bandwidth_hz
    s_pq = sir(p, q, scenario, state=st)
    s_qp = sir(q, p, scenario, state=st)
    g_pq = sir_spatial_gradient(p, q, wrt, scenario, state=st)
    g_qp = sir_spatial_gradient(q, p, wrt, scenario, state=st)
    return float(b / (2.0 * LN2) * (g_pq / (1.0 + s_pq) + g_qp / (1.0 + s_qp)))
