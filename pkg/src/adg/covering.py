"""Coordinate-selection maps between equation-defined graphs and covering-map verification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CHUNK, ImplicitGraph, ResourceRefusal, Vertex, family_graph

EXHAUSTIVE_MAX_ORDER = 10**6
DEFAULT_SEED = 0x5EED
DEFAULT_SAMPLES = 10**5


@dataclass(frozen=True)
class GraphDescriptor:
    family: str
    n: int
    q: int

    def __str__(self):
        return f"{self.family}:{self.n}:{self.q}"

    def build(self, field=None) -> ImplicitGraph:
        return family_graph(self.family, self.n, field if field is not None else self.q)


@dataclass(frozen=True)
class CoordinateMap:
    """Side-preserving map; target coordinate t is source coordinate ``index_map[t]`` (1-based)."""

    source: GraphDescriptor
    target: GraphDescriptor
    index_map: tuple

    def __post_init__(self):
        im = self.index_map
        if self.source.q != self.target.q:
            raise ValueError("source and target must be over the same field")
        if len(im) != self.target.n or self.target.n > self.source.n:
            raise ValueError(f"index_map must have {self.target.n} entries and m <= n")
        if len(set(im)) != len(im) or not all(1 <= i <= self.source.n for i in im):
            raise ValueError(f"index_map entries must be distinct and lie in [1, {self.source.n}]")
        if im[0] != 1:
            raise ValueError("index_map must preserve the first coordinate")

    def __str__(self):
        return f"{self.source} -> {self.target} via {list(self.index_map)}"


def projection_map(family: str, n: int, m: int, q: int) -> CoordinateMap:
    """Truncation (x_1, ..., x_n) -> (x_1, ..., x_m) onto the graph of the first m-1 equations."""
    if not 2 <= m <= n:
        raise ValueError(f"need 2 <= m <= n, got m={m}, n={n}")
    family = family.upper()
    return CoordinateMap(GraphDescriptor(family, n, q), GraphDescriptor(family, m, q), tuple(range(1, m + 1)))


def lemma21_map(k: int, q: int) -> CoordinateMap:
    """D(2k+1, q) -> A(k+2, q) keeping coordinates 1, 2, 3, 5, ..., 2k+1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    index_map = (1, 2) + tuple(2 * j + 1 for j in range(1, k + 1))
    return CoordinateMap(GraphDescriptor("D", 2 * k + 1, q), GraphDescriptor("A", k + 2, q), index_map)


def compose(outer: CoordinateMap, inner: CoordinateMap) -> CoordinateMap:
    """``outer`` after ``inner``."""
    if inner.target != outer.source:
        raise ValueError(f"cannot compose: {inner.target} != {outer.source}")
    return CoordinateMap(inner.source, outer.target, tuple(inner.index_map[i - 1] for i in outer.index_map))


def apply_map(cmap: CoordinateMap, v: Vertex) -> Vertex:
    if len(v.coords) != cmap.source.n:
        raise ValueError(f"vertex of dimension {len(v.coords)} given to a map from dimension {cmap.source.n}")
    return Vertex(v.side, tuple(v.coords[i - 1] for i in cmap.index_map))


def apply_ids(cmap: CoordinateMap, src: ImplicitGraph, tgt: ImplicitGraph, ids: np.ndarray) -> np.ndarray:
    """Vectorized map on vertex ids."""
    ids = np.asarray(ids, dtype=np.int64)
    coords = src.coords_of(ids)[:, np.array(cmap.index_map) - 1]
    return tgt.ids_of(coords, ids >= src.num_points)


@dataclass
class CoverResult:
    passed: bool
    checked: int
    certificate: dict | None = None

    def to_dict(self):
        out = {"verdict": "pass" if self.passed else "fail", "checked": self.checked}
        if self.certificate:
            out["certificate"] = self.certificate
        return out


def _cert(src, vid, condition, detail):
    return {"vertex": str(src.decode(vid)), "vertex_id": int(vid), "condition": condition, "detail": detail}


def _check_neighborhoods(cmap, src, tgt, ids) -> dict | None:
    """Neighbors of each v must map one-to-one onto the neighbors of its image."""
    for start in range(0, ids.size, CHUNK):
        chunk = ids[start:start + CHUNK]
        img_nb = apply_ids(cmap, src, tgt, src.neighbor_ids(chunk).ravel()).reshape(chunk.size, src.q)
        img_nb.sort(axis=1)
        tgt_nb = tgt.neighbor_ids(apply_ids(cmap, src, tgt, chunk))
        tgt_nb.sort(axis=1)
        dup = (img_nb[:, 1:] == img_nb[:, :-1]).any(axis=1)
        bad = dup | (img_nb != tgt_nb).any(axis=1)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            v = int(chunk[k])
            if dup[k]:
                return _cert(src, v, "local-injectivity", "two neighbors share an image")
            missing = sorted(set(img_nb[k].tolist()) - set(tgt_nb[k].tolist()))
            w = src.decode(v)
            return _cert(src, v, "adjacency",
                         f"neighbor image {tgt.decode(missing[0])} is not adjacent to {apply_map(cmap, w)}")
    return None


def verify_covering(cmap: CoordinateMap, policy: str = "exhaustive", samples: int = DEFAULT_SAMPLES,
                    seed: int = DEFAULT_SEED, src: ImplicitGraph | None = None,
                    tgt: ImplicitGraph | None = None) -> CoverResult:
    """Check that ``cmap`` is a covering map.

    exhaustive: the image hits every target id, and every source vertex's
    neighborhood maps bijectively onto its image's neighborhood.
    sampled: the same neighborhood test on ``samples`` uniform source ids;
    surjectivity on ``samples`` uniform target ids via zero-padded preimages.
    Failure certificates name the least offending id.
    """
    src = src or cmap.source.build()
    tgt = tgt or cmap.target.build(src.field)
    if policy == "exhaustive":
        if src.order > EXHAUSTIVE_MAX_ORDER:
            raise ResourceRefusal(f"exhaustive cover check needs source order <= 10^6, {src.name} has {src.order}")
        hit = np.zeros(tgt.order, dtype=bool)
        for start in range(0, src.order, CHUNK):
            hit[apply_ids(cmap, src, tgt, np.arange(start, min(start + CHUNK, src.order)))] = True
        if not hit.all():
            miss = int(np.flatnonzero(~hit)[0])
            return CoverResult(False, src.order, {
                "vertex": str(tgt.decode(miss)), "vertex_id": miss, "condition": "surjectivity",
                "detail": "target vertex has no preimage"})
        ids = np.arange(src.order, dtype=np.int64)
    elif policy == "sampled":
        rng = np.random.default_rng(seed)
        targets = np.unique(rng.integers(0, tgt.order, size=samples))
        coords = np.zeros((targets.size, src.n), dtype=np.int64)
        coords[:, np.array(cmap.index_map) - 1] = tgt.coords_of(targets)
        pre = src.ids_of(coords, targets >= tgt.num_points)
        back = apply_ids(cmap, src, tgt, pre)
        if not np.array_equal(back, targets):
            k = int(np.flatnonzero(back != targets)[0])
            return CoverResult(False, targets.size, {
                "vertex": str(tgt.decode(targets[k])), "vertex_id": int(targets[k]), "condition": "surjectivity",
                "detail": "zero-padded preimage does not map back"})
        ids = np.unique(rng.integers(0, src.order, size=samples))
    else:
        raise ValueError(f"unknown policy {policy!r}; expected exhaustive or sampled")
    cert = _check_neighborhoods(cmap, src, tgt, ids)
    return CoverResult(cert is None, int(ids.size), cert)


def extract_cycle(walk: list) -> list | None:
    """A simple cycle (length >= 3) inside the closed walk ``walk``, or None if it only backtracks."""
    stack, pos = [], {}
    for v in list(walk) + list(walk):
        if v in pos:
            k = pos[v]
            if len(stack) - k >= 3:
                return stack[k:]
            # cut the short loop and keep walking
            for w in stack[k + 1:]:
                del pos[w]
            del stack[k + 1:]
            continue
        pos[v] = len(stack)
        stack.append(v)
    return None


def image_cycle(cmap: CoordinateMap, src: ImplicitGraph, tgt: ImplicitGraph, cycle: list) -> list | None:
    """Map a source cycle (vertex ids) and return a target cycle contained in the image walk."""
    img = apply_ids(cmap, src, tgt, np.array(cycle)).tolist()
    return extract_cycle(img)
