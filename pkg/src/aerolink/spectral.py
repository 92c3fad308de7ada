"""Connectivity spectra: rate-weighted Laplacians, Fiedler data, Cheeger bounds.

The relay chain's robustness is measured by the algebraic connectivity
(second-smallest eigenvalue) of a node-weighted graph Laplacian whose edge
weights are the half-duplex link rates.  The Cheeger machinery relates that
eigenvalue to the cheapest weighted cut, which is what ultimately limits the
relayed flow.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelState, FadingModel, build_state, edge_rate
from .scenario import Scenario

_EIG_TOL = 1.0e-9


class LaplacianMode(Enum):
    # W^(-1/2) L W^(-1/2): node weights only.  The ascent gradient is exact
    # in this mode, so it is the default.
    COMBINATORIAL_WEIGHTED = "combinatorial-weighted"
    # W^(-1/2) D^(-1/2) L D^(-1/2) W^(-1/2): degree-and-weight normalized.
    NORMALIZED_WEIGHTED = "normalized-weighted"


@dataclass(frozen=True)
class GraphMatrices:
    """Adjacency, diagonal weighted-degree, and combinatorial Laplacian."""

    adjacency: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray

    @staticmethod
    def from_adjacency(adjacency: np.ndarray) -> "GraphMatrices":
        a = np.array(adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(a < 0.0):
            raise ValueError("edge weights must be non-negative")
        if np.any(np.diag(a) != 0.0):
            raise ValueError("self loops are not allowed")
        deg = np.diag(a.sum(axis=1))
        return GraphMatrices(adjacency=a, degree=deg, laplacian=deg - a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def build_matrices(scenario: Scenario,
                   fading: FadingModel | None = None,
                   state: ChannelState | None = None) -> GraphMatrices:
    """Rate matrix over the scenario topology, plus degree and Laplacian."""
    st = state if state is not None else build_state(scenario, fading)
    n = scenario.n_primary
    a = np.zeros((n, n))
    for i, j in scenario.topology:
        r = edge_rate(i, j, scenario, state=st)
        a[i, j] = a[j, i] = r
    return GraphMatrices.from_adjacency(a)


def weighted_laplacian(matrices: GraphMatrices,
                       weights: np.ndarray,
                       mode: LaplacianMode = LaplacianMode.COMBINATORIAL_WEIGHTED
                       ) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (matrices.n,):
        raise ValueError("need one positive weight per node")
    if np.any(w <= 0.0):
        raise ValueError("node weights must be positive")
    scale = 1.0 / np.sqrt(w)
    if mode is LaplacianMode.NORMALIZED_WEIGHTED:
        deg = np.diag(matrices.degree)
        if np.any(deg <= 0.0):
            raise ValueError("normalized mode undefined with an isolated node")
        scale = scale / np.sqrt(deg)
    return matrices.laplacian * scale[:, None] * scale[None, :]


def eig_sym(mat: np.ndarray) -> tuple:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns).
    Rejects non-symmetric input instead of silently symmetrizing.
    """
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > 1.0e-12 * scale:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    return vals, vecs


@dataclass(frozen=True)
class FiedlerResult:
    lambda2: float
    vector: np.ndarray       # unit Fiedler eigenvector
    spectral_gap: float      # lambda3 - lambda2 (inf for 2-node graphs)
    degenerate: bool         # gap below tolerance: lambda2 ill-conditioned


def fiedler_pair(weighted_lap: np.ndarray) -> FiedlerResult:
    """Second eigenpair of a weighted Laplacian, with a degeneracy flag.

    lambda2 must be simple for its eigenvector to define a usable ascent
    direction, so the flag is raised when lambda2 crowds either neighbor:
    the gap to lambda3 or to lambda1 (always 0 here) falls below 1e-9 times
    the matrix scale.  A disconnected graph is degenerate by this rule.
    """
    vals, vecs = eig_sym(weighted_lap)
    n = vals.shape[0]
    if n < 2:
        raise ValueError("connectivity needs at least two nodes")
    scale = max(1.0, float(np.abs(vals).max()))
    if vals[0] < -_EIG_TOL * scale:
        raise ValueError("weighted Laplacian must be positive semidefinite")
    lam2 = float(vals[1])
    gap = float(vals[2] - vals[1]) if n >= 3 else float("inf")
    degenerate = gap < _EIG_TOL * scale or lam2 < _EIG_TOL * scale
    return FiedlerResult(lambda2=lam2, vector=vecs[:, 1].copy(),
                         spectral_gap=gap, degenerate=degenerate)


@dataclass(frozen=True)
class LaplacianBundle:
    """Everything the trajectory step needs from one spectral evaluation."""

    matrices: GraphMatrices
    weighted_laplacian: np.ndarray
    mode: LaplacianMode
    weights: np.ndarray
    lambda2: float
    fiedler: np.ndarray
    spectral_gap: float
    degenerate: bool
    delta_max: float         # largest weighted degree
    w_min: float


def connectivity_bundle(scenario: Scenario,
                        fading: FadingModel | None = None,
                        weights: np.ndarray | None = None,
                        mode: LaplacianMode = LaplacianMode.COMBINATORIAL_WEIGHTED,
                        state: ChannelState | None = None) -> LaplacianBundle:
    w = scenario.weights if weights is None else np.asarray(weights, dtype=float)
    matrices = build_matrices(scenario, fading, state)
    lw = weighted_laplacian(matrices, w, mode)
    fr = fiedler_pair(lw)
    return LaplacianBundle(
        matrices=matrices,
        weighted_laplacian=lw,
        mode=mode,
        weights=w,
        lambda2=fr.lambda2,
        fiedler=fr.vector,
        spectral_gap=fr.spectral_gap,
        degenerate=fr.degenerate,
        delta_max=float(np.diag(matrices.degree).max()),
        w_min=float(w.min()),
    )


@dataclass(frozen=True)
class CheegerReport:
    constant: float          # min over cuts of cut weight / smaller side size
    argmin_side: frozenset   # the side of the best cut containing node 0
    lambda2: float           # combinatorial weighted connectivity used in bounds
    lower_bound: float       # lambda2 / 2
    upper_bound: float       # sqrt(2 * delta_max * lambda2 / w_min)


def cheeger_bruteforce(matrices: GraphMatrices,
                       weights: np.ndarray | None = None) -> CheegerReport:
    """Exhaustive weighted Cheeger constant over all proper bipartitions.

    With weights given, side size is the sum of node weights; without, it is
    the plain cardinality (all-ones weights).  Exponential in n: guarded to
    n <= 20.
    """
    n = matrices.n
    if n < 2:
        raise ValueError("need at least two nodes to cut")
    if n > 20:
        raise ValueError("brute force capped at 20 nodes")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0.0):
        raise ValueError("need one positive weight per node")

    a = matrices.adjacency
    total_w = w.sum()
    best = np.inf
    best_mask = None
    # node 0 pinned to S halves the enumeration without losing any cut
    for bits in range(2 ** (n - 1)):
        mask = np.zeros(n, dtype=bool)
        mask[0] = True
        for b in range(n - 1):
            if bits >> b & 1:
                mask[b + 1] = True
        if mask.all():
            continue
        cut = float(a[mask][:, ~mask].sum())
        side = float(w[mask].sum())
        ratio = cut / min(side, total_w - side)
        if ratio < best:
            best = ratio
            best_mask = mask.copy()

    lw = weighted_laplacian(matrices, w, LaplacianMode.COMBINATORIAL_WEIGHTED)
    lam2 = fiedler_pair(lw).lambda2
    delta_max = float(np.diag(matrices.degree).max())
    return CheegerReport(
        constant=float(best),
        argmin_side=frozenset(np.flatnonzero(best_mask).tolist()),
        lambda2=lam2,
        lower_bound=lam2 / 2.0,
        upper_bound=float(np.sqrt(2.0 * delta_max * lam2 / w.min())),
    )
