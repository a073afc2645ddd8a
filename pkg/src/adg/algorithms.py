"""Breadth-first machinery over the neighbor oracle: layers, cycles through a
vertex, girth, connected components and the distance-layer shape check for A(n, q).

All searches keep flat arrays indexed by vertex id; nothing is materialized
beyond what the BFS itself touches.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .graph import CHUNK, LINE, POINT, ImplicitGraph, Vertex, check_budget

# bound on (roots in a batch) * (graph order) for the multi-root cycle scan
BATCH_CELLS = 1 << 23
EXHAUSTIVE_LIMIT = 10**5


def _vid(graph: ImplicitGraph, v) -> int:
    return graph.encode(v) if isinstance(v, Vertex) else int(v)


@dataclass
class BfsResult:
    root: int
    dist: np.ndarray
    layer_sizes: list
    parent: np.ndarray | None = None

    def layer(self, d: int) -> np.ndarray:
        return np.flatnonzero(self.dist == d)


def bfs_layers(graph: ImplicitGraph, root, max_depth: int | None = None, parents: bool = False) -> BfsResult:
    """Layered BFS from ``root``; ``dist`` is -1 for vertices beyond ``max_depth`` or unreachable."""
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    check_budget(graph.order * (4 + (8 if parents else 0)), f"BFS over {graph.name}")
    rid = _vid(graph, root)
    dist = np.full(graph.order, -1, dtype=np.int32)
    parent = np.full(graph.order, -1, dtype=np.int64) if parents else None
    dist[rid] = 0
    frontier = np.array([rid], dtype=np.int64)
    sizes = [1]
    d = 0
    while frontier.size and (max_depth is None or d < max_depth):
        found = []
        for start in range(0, frontier.size, CHUNK):
            src = frontier[start:start + CHUNK]
            nb = graph.neighbor_ids(src)
            tgt = nb.ravel()
            fresh = dist[tgt] < 0
            tgt = tgt[fresh]
            uniq, first = np.unique(tgt, return_index=True)
            dist[uniq] = d + 1
            if parents:
                parent[uniq] = np.repeat(src, graph.q)[fresh][first]
            found.append(uniq)
        frontier = np.sort(np.concatenate(found)) if found else frontier[:0]
        d += 1
        if frontier.size:
            sizes.append(int(frontier.size))
    return BfsResult(rid, dist, sizes, parent)


@dataclass
class GirthReport:
    """Shortest cycle length found below ``cap``; ``value`` is None when there is none."""

    value: int | None
    cap: int
    witness: list | None = None
    scanned: int = 0
    root: int | None = None

    @property
    def exact(self) -> bool:
        return self.value is not None

    def at_least(self, bound: int) -> bool:
        """Whether the reported girth is certainly >= bound."""
        return self.value >= bound if self.exact else self.cap >= bound

    def result(self):
        return self.value if self.exact else f">={self.cap}"

    def __str__(self):
        return str(self.result())


def _check_cap(cap: int):
    if cap < 4 or cap % 2:
        raise ValueError(f"cap must be an even integer >= 4, got {cap}")


def _scan_cycles(graph: ImplicitGraph, roots: np.ndarray, cap: int) -> tuple[np.ndarray, int]:
    """Shortest cycle through each root, searched below ``cap``.

    Runs one BFS per root, all roots in lockstep.  Every discovered vertex is
    stamped with the depth-1 vertex on its BFS branch; a vertex at depth d
    reached from two different branches closes a cycle of length 2d through
    the root.  Returns (lengths, vertices visited); length 0 means none < cap.
    """
    N = graph.order
    R = roots.size
    lengths = np.zeros(R, dtype=np.int64)
    seen = np.zeros(R * N, dtype=bool)
    seen[np.arange(R) * N + roots] = True
    fr_key = np.arange(R, dtype=np.int64) * N + roots
    fr_branch = np.full(R, -1, dtype=np.int64)
    pack = R * N * N < 2**62
    d = 0
    while fr_key.size and 2 * (d + 1) < cap:
        d += 1
        nb = graph.neighbor_ids(fr_key % N)
        r = np.repeat(fr_key // N, graph.q)
        keys = r * N + nb.ravel()
        branch = nb.ravel() if d == 1 else np.repeat(fr_branch, graph.q)
        fresh = ~seen[keys]
        keys, branch = keys[fresh], branch[fresh]
        if pack:
            pairs = np.unique(keys * N + branch)
            ukeys, ubranch = pairs // N, pairs % N
        else:
            order = np.lexsort((branch, keys))
            keys, branch = keys[order], branch[order]
            keep = np.ones(keys.size, dtype=bool)
            keep[1:] = (keys[1:] != keys[:-1]) | (branch[1:] != branch[:-1])
            ukeys, ubranch = keys[keep], branch[keep]
        clash = np.zeros(ukeys.size, dtype=bool)
        clash[1:] = ukeys[1:] == ukeys[:-1]
        if clash.any():
            done = np.unique(ukeys[clash] // N)
            lengths[done] = 2 * d
            alive = lengths[ukeys // N] == 0
            ukeys, ubranch = ukeys[alive], ubranch[alive]
        seen[ukeys] = True
        fr_key, fr_branch = ukeys, ubranch
    return lengths, int(seen.sum())


def _cycle_witness(graph: ImplicitGraph, root: int, length: int) -> list:
    """Reconstruct a cycle of the given length through ``root`` (single-root BFS with parents)."""
    N, q = graph.order, graph.q
    parent = np.full(N, -1, dtype=np.int64)
    branch = np.full(N, -1, dtype=np.int64)
    parent[root] = root
    frontier = np.array([root], dtype=np.int64)
    for d in range(1, length // 2 + 1):
        nb = graph.neighbor_ids(frontier)
        src = np.repeat(frontier, q)
        tgt = nb.ravel()
        fresh = parent[tgt] < 0
        src, tgt = src[fresh], tgt[fresh]
        br = tgt if d == 1 else branch[src]
        if d == length // 2:
            order = np.lexsort((src, tgt))
            src, tgt, br = src[order], tgt[order], br[order]
            for w in np.unique(tgt):
                sel = tgt == w
                cand, cb = src[sel], br[sel]
                other = cand[cb != cb[0]]
                if other.size:
                    x1, x2 = int(cand[0]), int(other.min())
                    break
            else:
                raise RuntimeError(f"no cycle of length {length} through vertex {root}")

            def path(x):
                out = [x]
                while out[-1] != root:
                    out.append(int(parent[out[-1]]))
                return out[::-1]

            return path(x1) + [int(w)] + path(x2)[:0:-1]
        uniq, first = np.unique(tgt, return_index=True)
        parent[uniq] = src[first]
        branch[uniq] = br[first]
        frontier = uniq
    raise RuntimeError("unreachable")


def shortest_cycle_through(graph: ImplicitGraph, v, cap: int, witness: bool = True) -> GirthReport:
    """Length of the shortest cycle containing ``v``, or a ">= cap" report if none is shorter than cap."""
    _check_cap(cap)
    rid = _vid(graph, v)
    check_budget(graph.order * 25, f"cycle search over {graph.name}")
    lengths, scanned = _scan_cycles(graph, np.array([rid], dtype=np.int64), cap)
    g = int(lengths[0])
    if not g:
        return GirthReport(None, cap, None, scanned, rid)
    w = _cycle_witness(graph, rid, g) if witness else None
    return GirthReport(g, cap, w, scanned, rid)


def default_cap(graph: ImplicitGraph) -> int:
    return 2 * graph.n + 8


def girth(graph: ImplicitGraph, cap: int | None = None, mode: str = "full", assume_transitive: bool = False,
          roots=None, witness: bool = True, workers: int = 1) -> GirthReport:
    """Girth below ``cap``.

    ``full`` takes the minimum over all point roots (every cycle of a
    bipartite graph meets a point); ``single_source`` scans from (0) only and
    is valid only for graphs transitive on points, which the caller must
    assert with ``assume_transitive``.
    """
    cap = default_cap(graph) if cap is None else cap
    _check_cap(cap)
    if mode == "single_source":
        if not assume_transitive:
            raise ValueError("single_source mode requires assume_transitive=True")
        return shortest_cycle_through(graph, 0, cap, witness=witness)
    if mode != "full":
        raise ValueError(f"unknown girth mode {mode!r}")
    roots = np.arange(graph.num_points, dtype=np.int64) if roots is None else np.asarray(roots, dtype=np.int64)
    check_budget(graph.order * 25, f"girth scan over {graph.name}")
    batch = max(1, min(roots.size, BATCH_CELLS // graph.order))
    batches = [roots[i:i + batch] for i in range(0, roots.size, batch)]
    best, best_root, scanned = None, None, 0

    def run(b, c):
        return _scan_cycles(graph, b, c)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda b: run(b, cap), batches))
        iterator = zip(batches, results)
    else:
        iterator = ((b, None) for b in batches)
    for b, res in iterator:
        c = cap if best is None else best
        if res is None:
            if c <= 4:
                break
            res = run(b, c)
        lengths, n_seen = res
        scanned += n_seen
        hit = np.flatnonzero((lengths > 0) & (lengths < c))
        if hit.size:
            m = lengths[hit].min()
            best = int(m)
            best_root = int(b[hit[lengths[hit] == m][0]])
    if best is None:
        return GirthReport(None, cap, None, scanned, None)
    w = _cycle_witness(graph, best_root, best) if witness else None
    return GirthReport(best, cap, w, scanned, best_root)


def is_cycle(graph: ImplicitGraph, cycle) -> bool:
    """Distinct vertices, consecutive (cyclically) adjacent."""
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        va, vb = graph.decode(a), graph.decode(b)
        if va.side == vb.side:
            return False
        p, l = (va, vb) if va.side == POINT else (vb, va)
        if not graph.adjacent(p, l):
            return False
    return True


@dataclass
class Components:
    count: int
    sizes: list
    labels: np.ndarray = dc_field(repr=False)


def components(graph: ImplicitGraph, root_order=None) -> Components:
    """Connected components by repeated BFS, seeding from the first unlabeled id in ``root_order``."""
    check_budget(graph.order * 4 + graph.order, f"component labeling of {graph.name}")
    labels = np.full(graph.order, -1, dtype=np.int32)
    seeds = np.arange(graph.order, dtype=np.int64) if root_order is None else np.asarray(root_order, dtype=np.int64)
    sizes = []
    i = 0
    while i < seeds.size:
        block = seeds[i:i + CHUNK]
        free = np.flatnonzero(labels[block] < 0)
        if not free.size:
            i += CHUNK
            continue
        i += int(free[0])
        root = seeds[i]
        c = len(sizes)
        labels[root] = c
        frontier = np.array([root], dtype=np.int64)
        size = 1
        while frontier.size:
            found = []
            for start in range(0, frontier.size, CHUNK):
                tgt = graph.neighbor_ids(frontier[start:start + CHUNK]).ravel()
                tgt = np.unique(tgt[labels[tgt] < 0])
                labels[tgt] = c
                found.append(tgt)
            frontier = np.concatenate(found)
            size += frontier.size
        sizes.append(size)
    return Components(len(sizes), sorted(sizes), labels)


@dataclass
class ShapeCounterexample:
    j: int
    vertex: Vertex
    reason: str

    def __str__(self):
        return f"vertex {self.vertex} at distance {self.j}: {self.reason}"


def lemma22_shape_check(graph: ImplicitGraph, max_j: int | None = None) -> ShapeCounterexample | None:
    """Check the distance-layer shape of A(n, q) around (0).

    A vertex at distance j (2 <= j <= max_j) must be a line for odd j and a
    point for even j, with coordinates j+1..n zero and coordinate j-1 nonzero.
    Returns the first counterexample (least id in the lowest failing layer) or None.
    """
    if graph.label != "A":
        raise ValueError("the layer-shape check applies to the A(n, q) family only")
    max_j = graph.n if max_j is None else max_j
    if not 2 <= max_j <= graph.n:
        raise ValueError(f"max_j must lie in [2, {graph.n}]")
    res = bfs_layers(graph, 0, max_depth=max_j)
    for j in range(2, max_j + 1):
        ids = res.layer(j)
        want_line = j % 2 == 1
        side_ok = (ids >= graph.num_points) == want_line
        coords = graph.coords_of(ids)
        tail_ok = ~coords[:, j:].any(axis=1)
        lead_ok = coords[:, j - 2] != 0
        bad = np.flatnonzero(~(side_ok & tail_ok & lead_ok))
        if bad.size:
            k = bad[0]
            v = graph.decode(ids[k])
            if not side_ok[k]:
                reason = f"expected a {'line' if want_line else 'point'}"
            elif not tail_ok[k]:
                reason = f"coordinates {j + 1}..{graph.n} are not all zero"
            else:
                reason = f"coordinate {j - 1} is zero"
            return ShapeCounterexample(j, v, reason)
    return None


def edge_count(graph: ImplicitGraph, sweep: bool | None = None) -> int:
    """q^(n+1) edges; when ``sweep`` (default for order <= 10^5), cross-checked by enumerating the oracle from both sides."""
    formula = graph.q ** (graph.n + 1)
    if sweep is None:
        sweep = graph.order <= EXHAUSTIVE_LIMIT
    if sweep:
        pts = np.arange(graph.num_points, dtype=np.int64)
        from_points = np.unique(pts.repeat(graph.q) * graph.order + graph.neighbor_ids(pts).ravel())
        lns = pts + graph.num_points
        from_lines = np.unique(graph.neighbor_ids(lns).ravel() * graph.order + lns.repeat(graph.q))
        if from_points.size != formula or not np.array_equal(from_points, from_lines):
            raise RuntimeError(f"edge sweep disagrees with q^(n+1) = {formula} on {graph.name}")
    return formula
