import itertools
import subprocess
import sys

import numpy as np
import pytest

from adg.equations import builtin_system
from adg.field import field_from_order
from adg.graph import (
    ImplicitGraph,
    ResourceRefusal,
    Vertex,
    build_graph,
    family_graph,
    line,
    mem_budget,
    parse_graph_spec,
    point,
)

EXHAUSTIVE = [(f, n, q) for f in "DA" for q in (2, 3, 4, 5, 7, 8, 9) for n in range(2, 7) if 2 * q**n <= 20000]


def test_orders():
    g = build_graph(field_from_order(3), builtin_system("D", 2))
    assert g.order == 18 and all(len(g.neighbors(g.decode(v))) == 3 for v in range(g.order))
    assert family_graph("A", 4, 5).order == 1250
    assert family_graph("D", 6, 2).order == 128


def test_neighbor_examples():
    for n in range(2, 8):
        g = family_graph("A", n, 3)
        zero = g.zero_point()
        for a in range(3):
            assert g.neighbor_by_first_coord(zero, a) == line(a, *[0] * (n - 1))
            for x in (1, 2):
                w = g.neighbor_by_first_coord(line(a, *[0] * (n - 1)), x)
                assert w == point(x, a * x % 3, *[0] * (n - 2))
    g = family_graph("A", 3, 3)
    assert g.neighbor_by_first_coord(point(1, 1, 1), 2) == line(2, 1, 0)
    assert not g.adjacent(point(1, 1, 1), line(2, 1, 1))
    assert g.adjacent(point(1, 1, 1), line(2, 1, 0))
    assert set(family_graph("D", 2, 3).neighbors(point(0, 0))) == {line(0, 0), line(1, 0), line(2, 0)}
    for fam in "DA":
        g = family_graph(fam, 5, 4)
        for a in range(4):
            assert g.adjacent(g.zero_point(), line(a, 0, 0, 0, 0))


def test_encoding():
    g = family_graph("D", 4, 5)
    assert g.encode(g.zero_point()) == 0
    assert g.encode(line(0, 0, 0, 0)) == 5**4
    assert g.decode(1) == point(1, 0, 0, 0)
    assert g.decode(5) == point(0, 1, 0, 0)
    with pytest.raises(ValueError):
        g.decode(g.order)
    with pytest.raises(ValueError):
        g.decode(-1)
    with pytest.raises(ValueError):
        g.encode(point(1, 2, 3))
    with pytest.raises(ValueError):
        g.encode(point(5, 0, 0, 0))
    with pytest.raises(ValueError):
        g.adjacent(line(0, 0, 0, 0), point(0, 0, 0, 0))
    with pytest.raises(ValueError):
        g.adjacent(point(0, 0, 0, 0), point(0, 0, 0, 0))
    assert str(point(1, 2)) == "(1, 2)" and str(line(1, 2)) == "[1, 2]"


@pytest.mark.parametrize("family,n,q", EXHAUSTIVE)
def test_oracle_properties_exhaustive(family, n, q):
    g = family_graph(family, n, q)
    ids = np.arange(g.order)
    assert all(g.decode(i) == Vertex(g.decode(i).side, g.decode(i).coords) for i in range(0, g.order, 97))
    assert np.array_equal(g.ids_of(g.coords_of(ids), ids >= g.num_points), ids)
    nb = g.neighbor_ids(ids)
    # column x is the neighbor with first coordinate x: unique, hence q distinct neighbors
    assert np.array_equal(g.coords_of(nb.ravel())[:, 0], np.tile(np.arange(q), g.order))
    # bipartite
    assert ((nb >= g.num_points) == (ids < g.num_points)[:, None]).all()
    # symmetric
    back = g.neighbor_ids(nb.ravel()).reshape(g.order, q, q)
    assert (back == ids[:, None, None]).any(axis=2).all()
    # consistent with direct evaluation of the equations
    pts = ids[: g.num_points]
    assert g.adjacent_ids(np.repeat(pts, q), nb[: g.num_points].ravel()).all()


@pytest.mark.parametrize("family,n,q", [("D", 3, 3), ("A", 4, 3), ("D", 2, 5), ("A", 3, 5), ("D", 4, 2)])
def test_adjacency_matches_brute_force(family, n, q, brute):
    G = brute(family, n, q)
    g = family_graph(family, n, q)
    for p in itertools.product(range(q), repeat=n):
        expect = {g.encode(Vertex("L", v[1])) for v in G[("P", p)]}
        got = set(g.neighbor_ids([g.encode(point(*p))])[0].tolist())
        assert got == expect
    rng = np.random.default_rng(3)
    for _ in range(300):
        p = tuple(rng.integers(0, q, n).tolist())
        l = tuple(rng.integers(0, q, n).tolist())
        assert g.adjacent(point(*p), line(*l)) == G.has_edge(("P", p), ("L", l))


def test_large_graph_uses_oracle_directly():
    g = family_graph("A", 10, 5)
    assert not g.memoizable
    ids = np.array([0, 17, g.num_points + 12345, g.order - 1])
    nb = g.neighbor_ids(ids)
    assert nb.shape == (4, 5)
    for v, row in zip(ids, nb):
        for w in row:
            p, l = (v, w) if v < g.num_points else (w, v)
            assert g.adjacent(g.decode(p), g.decode(l))


def test_size_refusal():
    with pytest.raises(ResourceRefusal):
        family_graph("D", 9, 999999937)


def test_mem_budget_env(monkeypatch):
    monkeypatch.setenv("ADG_MEM_BUDGET", "512M")
    assert mem_budget() == 512 * 2**20
    monkeypatch.setenv("ADG_MEM_BUDGET", "2GiB")
    assert mem_budget() == 2 * 2**30
    monkeypatch.delenv("ADG_MEM_BUDGET")
    assert mem_budget() == 4 * 2**30


def test_edges_and_export(brute):
    g = family_graph("A", 4, 3)
    e = g.edges()
    assert e.shape == (3**5, 2)
    assert np.array_equal(e, np.unique(e, axis=0))
    G = brute("A", 4, 3)
    expect = sorted(
        (g.encode(point(*pt[1])), g.encode(line(*ln[1])))
        for ln, pt in (sorted(edge) for edge in G.edges())  # "L" sorts before "P"
    )
    assert e.tolist() == [list(t) for t in expect]
    out = subprocess.run([sys.executable, "-m", "adg", "export", "--family", "A", "--n", "4", "--q", "3",
                          "--format", "edgelist"], capture_output=True, text=True, check=True).stdout
    assert out == "".join(f"P{p} L{l}\n" for p, l in expect)


def test_graph_spec_parsing():
    assert parse_graph_spec("D:5:3") == ("D", 5, 3)
    assert parse_graph_spec("a:4:9") == ("A", 4, 9)
    for bad in ("D:5", "X:5:3", "D:x:3"):
        with pytest.raises(ValueError):
            parse_graph_spec(bad)


def test_custom_system_graph():
    from adg.equations import parse_system

    s = parse_system("p2 + l2 = p1*l1 + p1^2\np3 + l3 = 2*p2*l1 - l2\n")
    g = ImplicitGraph(field_from_order(5), s)
    ids = np.arange(g.num_points)
    nb = g.neighbor_ids(ids)
    assert g.adjacent_ids(np.repeat(ids, 5), nb.ravel()).all()
    assert repr(g) == "<ImplicitGraph custom(n=3, q=5)>"
