"""Implicit bipartite graphs Gamma_q(f_2, ..., f_n) backed by a neighbor oracle.

Vertex ids: a point with coordinates c has id ``sum(c[i] * q**i)`` in
``[0, q^n)``; the line with the same coordinates has that id plus ``q^n``.
"""

from __future__ import annotations

import os
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .equations import CompiledSystem, EquationSystem, builtin_system, run_program, validate_system
from .field import Field, field_from_order

POINT, LINE = "P", "L"
MAX_ID = 2**63
DEFAULT_MEM_BUDGET = 4 * 2**30
CHUNK = 1 << 16
# neighbor tables are memoized for graphs with at most this many edges-ends
TABLE_CACHE_LIMIT = 1 << 22


class ResourceRefusal(RuntimeError):
    """The requested job exceeds the id space or the memory budget."""


def mem_budget() -> int:
    raw = os.environ.get("ADG_MEM_BUDGET")
    if not raw:
        return DEFAULT_MEM_BUDGET
    units = {"K": 2**10, "M": 2**20, "G": 2**30}
    raw = raw.strip().upper().rstrip("IB")
    if raw and raw[-1] in units:
        return int(float(raw[:-1]) * units[raw[-1]])
    return int(raw)


def check_budget(nbytes: int, what: str, budget: int | None = None):
    budget = mem_budget() if budget is None else budget
    if nbytes > budget:
        raise ResourceRefusal(f"{what} needs ~{nbytes / 2**20:.0f} MiB, over the {budget / 2**20:.0f} MiB budget")


class Vertex(NamedTuple):
    side: str
    coords: tuple

    def __str__(self):
        body = ", ".join(str(c) for c in self.coords)
        return f"({body})" if self.side == POINT else f"[{body}]"

    @property
    def is_point(self) -> bool:
        return self.side == POINT


def point(*coords) -> Vertex:
    return Vertex(POINT, tuple(int(c) for c in coords))


def line(*coords) -> Vertex:
    return Vertex(LINE, tuple(int(c) for c in coords))


class ImplicitGraph:
    """The bipartite graph on two copies of F_q^n defined by an equation system."""

    def __init__(self, field: Field, system: EquationSystem, label: str = "custom"):
        v = validate_system(system)
        if v is not None:
            raise ValueError(f"invalid system: {v}")
        self.field = field
        self.q = field.q
        self.n = system.n
        self.system = system
        self.compiled = CompiledSystem(system)
        self.label = label
        if 2 * self.q**self.n >= MAX_ID:
            raise ResourceRefusal(f"2*q^n = 2*{self.q}^{self.n} overflows the 64-bit vertex id space")
        self.num_points = self.q**self.n
        self.order = 2 * self.num_points
        self._pows = np.array([self.q**i for i in range(self.n)], dtype=np.int64)

    def __repr__(self):
        name = f"{self.label}({self.n},{self.q})" if self.label in ("D", "A") else f"custom(n={self.n}, q={self.q})"
        return f"<ImplicitGraph {name}>"

    @property
    def name(self) -> str:
        return f"{self.label}({self.n},{self.q})"

    @property
    def num_edges(self) -> int:
        return self.q**(self.n + 1)

    # -- encoding -----------------------------------------------------------------

    def zero_point(self) -> Vertex:
        return point(*([0] * self.n))

    def check_vertex(self, v: Vertex):
        if v.side not in (POINT, LINE) or len(v.coords) != self.n:
            raise ValueError(f"{v!r} is not a vertex of {self!r}")
        for c in v.coords:
            self.field._check(c)

    def encode(self, v: Vertex) -> int:
        self.check_vertex(v)
        code = sum(c * self.q**i for i, c in enumerate(v.coords))
        return code + (self.num_points if v.side == LINE else 0)

    def decode(self, vid: int) -> Vertex:
        vid = int(vid)
        if not 0 <= vid < self.order:
            raise ValueError(f"vertex id {vid} outside [0, {self.order})")
        side = LINE if vid >= self.num_points else POINT
        code = vid % self.num_points
        return Vertex(side, tuple((code // self.q**i) % self.q for i in range(self.n)))

    def coords_of(self, ids: np.ndarray) -> np.ndarray:
        """Coordinate matrix (len(ids), n) of an id array."""
        code = np.asarray(ids, dtype=np.int64) % self.num_points
        return (code[:, None] // self._pows) % self.q

    def ids_of(self, coords: np.ndarray, lines) -> np.ndarray:
        ids = coords.astype(np.int64) @ self._pows
        return ids + np.where(lines, self.num_points, 0)

    # -- oracle -------------------------------------------------------------------

    def _solve(self, known: np.ndarray, known_is_point: bool, x: np.ndarray) -> np.ndarray:
        """Forward substitution: the vertex w on the other side with w_1 = x adjacent to ``known``.

        ``known`` is (m, n); ``x`` is (m,).  Returns w's coordinates (m, n).
        """
        m = known.shape[0]
        w = np.empty((m, self.n), dtype=np.int64)
        w[:, 0] = x
        kcols = [known[:, i] for i in range(self.n)]
        wcols = [w[:, 0]]
        for j in range(2, self.n + 1):
            P, L = (kcols, wcols) if known_is_point else (wcols, kcols)
            rhs = run_program(self.compiled.program(j), self.field, P, L, shape=(m,))
            w[:, j - 1] = self.field.vsub(rhs, kcols[j - 1])
            wcols.append(w[:, j - 1])
        return w

    def _neighbor_ids_oracle(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        out = np.empty((ids.size, self.q), dtype=np.int64)
        for start in range(0, ids.size, CHUNK):
            chunk = ids[start:start + CHUNK]
            is_line = chunk >= self.num_points
            for mask, known_is_point in ((~is_line, True), (is_line, False)):
                if not mask.any():
                    continue
                sel = chunk[mask]
                coords = self.coords_of(sel)
                k = sel.size
                rep = np.repeat(coords, self.q, axis=0)
                xs = np.tile(np.arange(self.q, dtype=np.int64), k)
                w = self._solve(rep, known_is_point, xs)
                nb = self.ids_of(w, known_is_point).reshape(k, self.q)
                out[start:start + CHUNK][mask] = nb
        return out

    @cached_property
    def _table(self) -> np.ndarray:
        return self._neighbor_ids_oracle(np.arange(self.order, dtype=np.int64))

    @property
    def memoizable(self) -> bool:
        return self.order * self.q <= TABLE_CACHE_LIMIT

    def neighbor_ids(self, ids) -> np.ndarray:
        """Neighbor ids, shape (len(ids), q); column x holds the neighbor with first coordinate x."""
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        if ids.size and (ids.min() < 0 or ids.max() >= self.order):
            raise ValueError("vertex id out of range")
        if self.memoizable:
            return self._table[ids]
        return self._neighbor_ids_oracle(ids)

    def neighbor_by_first_coord(self, v: Vertex, x: int) -> Vertex:
        self.check_vertex(v)
        self.field._check(x)
        known = np.array([v.coords], dtype=np.int64)
        w = self._solve(known, v.is_point, np.array([x], dtype=np.int64))[0]
        return Vertex(LINE if v.is_point else POINT, tuple(int(c) for c in w))

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return [self.neighbor_by_first_coord(v, x) for x in self.field.elements()]

    def adjacent(self, p: Vertex, l: Vertex) -> bool:
        """True iff every equation p_j + l_j = f_j(...) holds."""
        self.check_vertex(p)
        self.check_vertex(l)
        if not (p.side == POINT and l.side == LINE):
            raise ValueError("adjacent() takes a point and a line, in that order")
        P = [np.int64(c) for c in p.coords]
        L = [np.int64(c) for c in l.coords]
        f = self.field
        for j in range(2, self.n + 1):
            rhs = int(run_program(self.compiled.program(j), f, P, L))
            if f.add(p.coords[j - 1], l.coords[j - 1]) != rhs:
                return False
        return True

    def adjacent_ids(self, pids, lids) -> np.ndarray:
        """Vectorized ``adjacent``: evaluate every equation directly on (point id, line id) pairs."""
        pids = np.asarray(pids, dtype=np.int64)
        lids = np.asarray(lids, dtype=np.int64)
        if (pids >= self.num_points).any() or (lids < self.num_points).any():
            raise ValueError("adjacent_ids takes point ids and line ids, in that order")
        pc, lc = self.coords_of(pids), self.coords_of(lids)
        P = [pc[:, i] for i in range(self.n)]
        L = [lc[:, i] for i in range(self.n)]
        ok = np.ones(pids.size, dtype=bool)
        for j in range(2, self.n + 1):
            rhs = run_program(self.compiled.program(j), self.field, P, L, shape=(pids.size,))
            ok &= self.field.vadd(P[j - 1], L[j - 1]) == rhs
        return ok

    def edges(self) -> np.ndarray:
        """All edges as an (E, 2) array of (point id, line id), sorted."""
        check_budget(self.num_edges * 16, "edge list")
        pts = np.arange(self.num_points, dtype=np.int64)
        out = []
        for start in range(0, pts.size, CHUNK):
            chunk = pts[start:start + CHUNK]
            nb = self.neighbor_ids(chunk)
            nb.sort(axis=1)
            out.append(np.column_stack([np.repeat(chunk, self.q), nb.ravel()]))
        return np.concatenate(out)


def build_graph(field: Field, system: EquationSystem, label: str = "custom") -> ImplicitGraph:
    return ImplicitGraph(field, system, label)


def family_graph(family: str, n: int, q: int | Field, modulus=None) -> ImplicitGraph:
    """D(n, q) or A(n, q)."""
    field = q if isinstance(q, Field) else field_from_order(q, modulus)
    family = family.upper()
    return ImplicitGraph(field, builtin_system(family, n), label=family)


def parse_graph_spec(text: str) -> tuple[str, int, int]:
    """Parse the ``FAMILY:n:q`` shorthand."""
    parts = text.split(":")
    if len(parts) != 3 or parts[0].upper() not in ("D", "A"):
        raise ValueError(f"expected FAMILY:n:q with FAMILY in D, A; got {text!r}")
    try:
        return parts[0].upper(), int(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"expected integer n and q in {text!r}") from None
