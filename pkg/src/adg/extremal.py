"""Turan-number bounds for graphs without short cycles, and per-component comparison tables."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .algorithms import components, default_cap, girth
from .graph import ImplicitGraph


@dataclass(frozen=True)
class TuranBound:
    """Bounds on ex(n, C_{2k+1}), the edge maximum for n vertices and girth > 2k+1."""

    n: int
    k: int
    epsilon: int
    lower: float
    upper: float


def turan_bounds(n: int, k: int) -> TuranBound:
    if n < 2 or k < 2:
        raise ValueError(f"need n >= 2 and k >= 2, got n={n}, k={k}")
    eps = 1 if k % 2 == 0 else 0
    scale = 2.0 ** (1 + 1 / k)
    lower = n ** (1 + 2 / (3 * k - 3 + eps)) / scale
    upper = n ** (1 + 1 / k) / scale + n / 2
    return TuranBound(n, k, eps, lower, upper)


@dataclass
class ComponentRow:
    order: int
    size: int
    girth: int | None
    cap: int
    k: int | None
    lower: float | None
    ratio: float | None

    def to_dict(self):
        d = asdict(self)
        d["girth"] = self.girth if self.girth is not None else f">={self.cap}"
        return d


def component_report(graph: ImplicitGraph, cap: int | None = None) -> list[ComponentRow]:
    """One row per connected component: order, edge count, girth, and the lower bound at that order.

    k is taken from the measured girth g as (g - 2) / 2, the largest k with
    no cycle of length <= 2k + 1.  Bound columns are None when the girth
    is not found below ``cap`` or k < 2.
    """
    cap = default_cap(graph) if cap is None else cap
    comps = components(graph)
    rows = []
    for c in range(comps.count):
        ids = np.flatnonzero(comps.labels == c)
        nb = graph.neighbor_ids(ids)
        inside = comps.labels[nb] == c
        degrees = inside.sum(axis=1)
        if not (degrees == graph.q).all():
            raise RuntimeError(f"component {c} of {graph.name} is not {graph.q}-regular")
        size = int(degrees.sum()) // 2
        pts = ids[ids < graph.num_points]
        g = girth(graph, cap=cap, roots=pts, witness=False)
        k = lower = ratio = None
        if g.exact and (g.value - 2) // 2 >= 2:
            k = (g.value - 2) // 2
            lower = turan_bounds(int(ids.size), k).lower
            ratio = size / lower
        rows.append(ComponentRow(int(ids.size), size, g.value, cap, k, lower, ratio))
    return rows
