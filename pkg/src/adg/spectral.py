"""Second-largest adjacency eigenvalue of the point-line incidence structure.

Adjacency eigenvalues of a bipartite graph are +/- the singular values of
its point-by-line biadjacency matrix B, so lambda1, lambda2 are the two
largest singular values.  The iterative path works with the positive
semidefinite operator B B^T, applied matrix-free through the neighbor oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .algorithms import components
from .graph import ImplicitGraph, ResourceRefusal, check_budget

DENSE_MAX_ORDER = 8192
TOL = 1e-10
MAX_ITER = 500
BLOCK = 4
DEFAULT_SEED = 0x5EED


@dataclass
class SpectralReport:
    lambda1: float
    lambda2: float
    bound: float
    margin: float
    method: str
    residual: float | None = None
    converged: bool = True
    iterations: int | None = None
    component_note: bool = False
    components: int = 1
    per_component: bool = False

    def to_dict(self):
        return asdict(self)


class BiadjacencyOperator:
    """x -> B B^T x on point-indexed vectors, optionally restricted to a set of points.

    Neighbor lists are pulled from the oracle once per operator and reused
    for every application.
    """

    def __init__(self, graph: ImplicitGraph, points: np.ndarray | None = None):
        if points is None:
            points = np.arange(graph.num_points, dtype=np.int64)
        points = np.asarray(points, dtype=np.int64)
        check_budget(points.size * graph.q * 16, f"spectral operator for {graph.name}")
        self.dim = points.size
        pt_nb = graph.neighbor_ids(points)
        lines = np.unique(pt_nb)
        ln_nb = graph.neighbor_ids(lines)
        local = np.full(graph.num_points, -1, dtype=np.int64)
        local[points] = np.arange(points.size)
        self.line_to_points = local[ln_nb]
        if (self.line_to_points < 0).any():
            raise ValueError("point set is not closed under two-step adjacency (not a union of components)")
        lidx = np.full(graph.num_points, -1, dtype=np.int64)
        lidx[lines - graph.num_points] = np.arange(lines.size)
        self.point_to_lines = lidx[pt_nb - graph.num_points]

    def apply_bt(self, x):
        return x[self.line_to_points].sum(axis=1)

    def apply_b(self, y):
        return y[self.point_to_lines].sum(axis=1)

    def __call__(self, x):
        return self.apply_b(self.apply_bt(x))


def dense_biadjacency(graph: ImplicitGraph, points=None) -> np.ndarray:
    if points is None:
        points = np.arange(graph.num_points, dtype=np.int64)
    op = BiadjacencyOperator(graph, points)
    B = np.zeros((op.dim, op.line_to_points.shape[0]))
    rows = np.repeat(np.arange(op.dim), graph.q)
    B[rows, op.point_to_lines.ravel()] = 1.0
    return B


def top_eigenvalues(op, dim: int, k: int = 2, block: int = BLOCK, tol: float = TOL, max_iter: int = MAX_ITER,
                    seed: int = DEFAULT_SEED, max_basis: int | None = None):
    """Largest ``k`` eigenvalues of a symmetric PSD operator by restarted block Lanczos.

    ``op`` maps a (dim, b) block to a (dim, b) block.  Every new block is
    orthogonalized twice against the whole basis; when the basis fills, the
    run restarts from the current best Ritz vectors.  Convergence is the
    largest Ritz residual norm among the top ``k`` pairs falling below ``tol``.
    Returns (values descending, residual, iterations, converged).
    """
    block = min(max(block, k), dim)
    if max_basis is None:
        max_basis = max(4 * block, min(600, (1 << 25) // max(dim, 1)))
    max_basis = min(max_basis, dim)
    rng = np.random.default_rng(seed)
    X = np.linalg.qr(rng.standard_normal((dim, block)))[0]
    iters = 0
    while True:
        V, AV = X, op(X)
        T = V.T @ AV
        while True:
            iters += 1
            theta, S = np.linalg.eigh((T + T.T) / 2)
            theta, S = theta[::-1], S[:, ::-1]
            top = S[:, :k]
            R = AV @ top - (V @ top) * theta[:k]
            vals, res = theta[:k], float(np.linalg.norm(R, axis=0).max())
            if res < tol or V.shape[1] >= dim:
                return vals, res, iters, True
            if iters >= max_iter:
                return vals, res, iters, False
            if V.shape[1] + block > max_basis:
                break
            W = AV[:, -X.shape[1]:]
            for _ in range(2):
                W = W - V @ (V.T @ W)
            Q, Rq = np.linalg.qr(W)
            keep = np.abs(np.diag(Rq)) > 1e-12 * max(1.0, abs(theta[0]))
            if not keep.any():
                # Krylov space is invariant: the Ritz values are exact
                return vals, res, iters, True
            X = Q[:, keep]
            AX = op(X)
            T = np.block([[T, V.T @ AX], [X.T @ AV, X.T @ AX]])
            V = np.hstack([V, X])
            AV = np.hstack([AV, AX])
        X = np.linalg.qr(V @ S[:, :block])[0]


def _sigma_pair(graph, points, method, seed):
    """(sigma1, sigma2, residual, iterations, converged) for the subgraph on ``points``."""
    if method == "dense":
        sv = np.linalg.svd(dense_biadjacency(graph, points), compute_uv=False)
        s2 = sv[1] if sv.size > 1 else 0.0
        return float(sv[0]), float(s2), None, None, True
    op = BiadjacencyOperator(graph, points)
    vals, res, iters, ok = top_eigenvalues(op, op.dim, k=2, seed=seed)
    vals = np.sqrt(np.clip(vals, 0.0, None))
    if vals.size < 2:
        vals = np.append(vals, 0.0)
    return float(vals[0]), float(vals[1]), res, iters, ok


def lambda2(graph: ImplicitGraph, method: str = "auto", per_component: bool = False,
            seed: int = DEFAULT_SEED) -> SpectralReport:
    """Two largest adjacency eigenvalues and the margin to 2 sqrt(q).

    On a disconnected graph the raw lambda2 equals q; with ``per_component``
    the largest lambda2 over the components is reported instead.
    """
    if method == "auto":
        method = "dense" if graph.order <= DENSE_MAX_ORDER else "iterative"
    if method not in ("dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense":
        if graph.order > DENSE_MAX_ORDER:
            raise ResourceRefusal(f"dense spectrum needs 2q^n <= {DENSE_MAX_ORDER}, {graph.name} has {graph.order}")
        check_budget(graph.num_points**2 * 16, f"dense biadjacency of {graph.name}")
    comps = components(graph)
    if per_component and comps.count > 1:
        labels = comps.labels[: graph.num_points]
        best = None
        for c in range(comps.count):
            pts = np.flatnonzero(labels == c)
            cur = _sigma_pair(graph, pts, method, seed)
            if best is None:
                best = list(cur)
            else:
                best[0] = max(best[0], cur[0])
                best[1] = max(best[1], cur[1])
                if cur[2] is not None:
                    best[2] = max(best[2], cur[2])
                    best[3] += cur[3]
                    best[4] = best[4] and cur[4]
        s1, s2, res, iters, ok = best
    else:
        s1, s2, res, iters, ok = _sigma_pair(graph, None, method, seed)
    if not ok:
        warnings.warn(f"Lanczos did not converge on {graph.name}: residual {res:.2e} after {iters} iterations")
    bound = 2 * math.sqrt(graph.q)
    return SpectralReport(
        lambda1=s1, lambda2=s2, bound=bound, margin=bound - s2, method=method, residual=res,
        converged=ok, iterations=iters, component_note=comps.count > 1, components=comps.count,
        per_component=per_component,
    )


def check_2sqrtq(graph: ImplicitGraph, method: str = "auto", per_component: bool = False,
                 seed: int = DEFAULT_SEED) -> tuple[bool, SpectralReport]:
    rep = lambda2(graph, method, per_component, seed)
    return rep.lambda2 <= rep.bound + 1e-8, rep
