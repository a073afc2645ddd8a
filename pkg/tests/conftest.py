"""Independent reference implementations shared by the test modules."""

import itertools

import networkx as nx
import pytest


def poly_mulmod(a, b, modulus, p):
    """Schoolbook product of little-endian coefficient lists, reduced by a monic modulus."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    e = len(modulus) - 1
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for i in range(e + 1):
                prod[d - e + i] = (prod[d - e + i] - c * modulus[i]) % p
    return (prod + [0] * e)[:e]


def digits(code, p, e):
    return [(code // p**i) % p for i in range(e)]


def undigits(cs, p):
    return sum(c * p**i for i, c in enumerate(cs))


def monomial_indices(family, n):
    """(a, b) with f_j = p_a * l_b, written out straight from the family definitions."""
    out = {}
    for j in range(2, n + 1):
        if family == "A":
            out[j] = (j - 1, 1) if j % 2 == 0 else (1, j - 1)
        elif j == 2:
            out[j] = (1, 1)
        elif j == 3:
            out[j] = (1, 2)
        elif j % 4 in (0, 1):
            out[j] = (j - 2, 1)
        else:
            out[j] = (1, j - 2)
    return out


def brute_graph(family, n, q):
    """networkx graph for a prime q by testing every (point, line) pair against the equations mod q."""
    rules = monomial_indices(family, n)
    vecs = list(itertools.product(range(q), repeat=n))
    G = nx.Graph()
    for p in vecs:
        G.add_node(("P", p))
        for l in vecs:
            if all((p[j - 1] + l[j - 1] - p[a - 1] * l[b - 1]) % q == 0 for j, (a, b) in rules.items()):
                G.add_edge(("P", p), ("L", l))
    for l in vecs:
        G.add_node(("L", l))
    return G


@pytest.fixture(scope="session")
def brute():
    cache = {}

    def get(family, n, q):
        key = (family, n, q)
        if key not in cache:
            cache[key] = brute_graph(family, n, q)
        return cache[key]

    return get


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
