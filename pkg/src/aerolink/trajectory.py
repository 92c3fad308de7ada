"""3D trajectory design: gradient ascent on algebraic connectivity.

Each step moves every UAV along the gradient of lambda2 of the rate-weighted
Laplacian.  For the node-weighted combinatorial Laplacian the gradient has
an exact per-edge form: with y = W^(-1/2) x_f built from the unit Fiedler
vector, each edge (p, q) contributes (y_p - y_q)^2 times the spatial
gradient of its rate.  Finite differences are available as a fallback and
as the honest option for the normalized Laplacian, whose Fiedler formula
is only a heuristic.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import FadingModel, build_state, rate_spatial_gradient
from .scenario import Scenario
from .spectral import LaplacianBundle, LaplacianMode, connectivity_bundle


class AxisMask(Enum):
    XY = "xy"
    XZ = "xz"
    YZ = "yz"
    XYZ = "xyz"

    @property
    def axes(self) -> tuple:
        return tuple("xyz".index(c) for c in self.value)

    @staticmethod
    def from_string(text: str) -> "AxisMask":
        try:
            return AxisMask(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown axis mask {text!r}; use xy, xz, yz or xyz") from None


class GradientMode(Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite-difference"


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float = 1.0                  # ascent step scale
    mask: AxisMask = AxisMask.XYZ
    gradient_mode: GradientMode = GradientMode.ANALYTIC
    backtracking: bool = True
    max_backtracks: int = 20
    max_step_m: float = 5.0          # per-UAV displacement clip
    min_altitude_m: float = 1.0
    fd_step_m: float = 1.0e-3

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.max_step_m <= 0.0:
            raise ValueError("max_step_m must be positive")
        if self.fd_step_m <= 0.0:
            raise ValueError("fd_step_m must be positive")


@dataclass(frozen=True)
class GradientField:
    d_lambda2: np.ndarray    # (n_uavs, 3)
    mode_used: GradientMode
    degenerate: bool


def _analytic_gradient(scenario: Scenario, bundle: LaplacianBundle,
                       state) -> np.ndarray:
    y = bundle.fiedler / np.sqrt(bundle.weights)
    uavs = scenario.uav_indices
    grad = np.zeros((len(uavs), 3))
    for p, q in scenario.topology:
        coeff = (y[p] - y[q]) ** 2
        if coeff == 0.0:
            continue
        for uidx, t in enumerate(uavs):
            for axis in range(3):
                grad[uidx, axis] += coeff * rate_spatial_gradient(
                    p, q, (t, axis), scenario, state=state)
    return grad


def _fd_gradient(scenario: Scenario, fading, weights, mode, h: float) -> np.ndarray:
    base = scenario.uav_positions
    grad = np.zeros_like(base)
    for uidx in range(base.shape[0]):
        for axis in range(3):
            bumped = base.copy()
            bumped[uidx, axis] += h
            hi = connectivity_bundle(scenario.with_uav_positions(bumped),
                                     fading, weights, mode).lambda2
            bumped[uidx, axis] -= 2.0 * h
            lo = connectivity_bundle(scenario.with_uav_positions(bumped),
                                     fading, weights, mode).lambda2
            grad[uidx, axis] = (hi - lo) / (2.0 * h)
    return grad


def lambda2_gradient(scenario: Scenario,
                     fading: FadingModel | None = None,
                     weights: np.ndarray | None = None,
                     laplacian_mode: LaplacianMode = LaplacianMode.COMBINATORIAL_WEIGHTED,
                     gradient_mode: GradientMode = GradientMode.ANALYTIC,
                     fd_step_m: float = 1.0e-3,
                     bundle: LaplacianBundle | None = None,
                     state=None) -> GradientField:
    """Gradient of lambda2 with respect to every UAV coordinate.

    A degenerate Fiedler pair (tiny spectral gap) makes the analytic form
    unreliable, so the call falls back to central finite differences and
    flags it.  The analytic form is exact only for the combinatorial
    weighted Laplacian; for the normalized one it is a known approximation
    and finite differences should be preferred.
    """
    if state is None:
        state = build_state(scenario, fading)
    if bundle is None:
        bundle = connectivity_bundle(scenario, fading, weights, laplacian_mode, state)
    mode_used = gradient_mode
    degenerate = bundle.degenerate
    if gradient_mode is GradientMode.ANALYTIC:
        # the per-edge formula is the eigenvalue derivative of the
        # combinatorial weighted Laplacian; its Fiedler vector is used even
        # when the caller tracks the normalized one (a documented mismatch
        # that gradcheck exists to expose)
        formula = bundle
        if bundle.mode is not LaplacianMode.COMBINATORIAL_WEIGHTED:
            formula = connectivity_bundle(scenario, fading, bundle.weights,
                                          LaplacianMode.COMBINATORIAL_WEIGHTED, state)
        degenerate = formula.degenerate
        if degenerate:
            mode_used = GradientMode.FINITE_DIFFERENCE
        else:
            grad = _analytic_gradient(scenario, formula, state)
    if mode_used is GradientMode.FINITE_DIFFERENCE:
        grad = _fd_gradient(scenario, fading, bundle.weights, laplacian_mode, fd_step_m)
    return GradientField(d_lambda2=grad, mode_used=mode_used, degenerate=degenerate)


@dataclass(frozen=True)
class StepResult:
    positions: np.ndarray    # (n_uavs, 3) accepted positions
    lambda2_before: float
    lambda2_after: float
    dt_used: float
    halvings: int
    stalled: bool            # backtracking exhausted; positions unchanged


def step(scenario: Scenario,
         gradient: GradientField,
         config: TrajectoryConfig,
         fading: FadingModel | None = None,
         weights: np.ndarray | None = None,
         laplacian_mode: LaplacianMode = LaplacianMode.COMBINATORIAL_WEIGHTED,
         bundle: LaplacianBundle | None = None,
         state=None) -> StepResult:
    """One ascent step with masking, step clipping, and optional backtracking.

    Masked axes are left bit-for-bit untouched.  The displacement of each
    UAV is clipped to max_step_m; accepted altitudes never drop below
    min_altitude_m (only enforced when z is an active axis).  With
    backtracking on, dt is halved until lambda2 does not decrease; if
    max_backtracks halvings all fail the step stalls and returns the
    original positions.
    """
    if state is None:
        state = build_state(scenario, fading)
    if bundle is None:
        bundle = connectivity_bundle(scenario, fading, weights, laplacian_mode, state)
    lam_old = bundle.lambda2
    base = scenario.uav_positions
    axes = list(config.mask.axes)

    def candidate(dt):
        disp = np.zeros_like(base)
        disp[:, axes] = dt * gradient.d_lambda2[:, axes]
        norms = np.linalg.norm(disp, axis=1)
        over = norms > config.max_step_m
        if np.any(over):
            disp[over] *= (config.max_step_m / norms[over])[:, None]
        pos = base.copy()
        pos[:, axes] += disp[:, axes]
        if 2 in axes:
            pos[:, 2] = np.maximum(pos[:, 2], config.min_altitude_m)
        return pos

    def lam_at(pos):
        return connectivity_bundle(scenario.with_uav_positions(pos),
                                   fading, weights, laplacian_mode).lambda2

    dt = config.dt
    pos = candidate(dt)
    if not config.backtracking:
        return StepResult(positions=pos, lambda2_before=lam_old,
                          lambda2_after=lam_at(pos), dt_used=dt,
                          halvings=0, stalled=False)

    halvings = 0
    while True:
        lam_new = lam_at(pos)
        if lam_new >= lam_old:
            return StepResult(positions=pos, lambda2_before=lam_old,
                              lambda2_after=lam_new, dt_used=dt,
                              halvings=halvings, stalled=False)
        if halvings >= config.max_backtracks:
            return StepResult(positions=base, lambda2_before=lam_old,
                              lambda2_after=lam_old, dt_used=0.0,
                              halvings=halvings, stalled=True)
        dt *= 0.5
        halvings += 1
        pos = candidate(dt)
