"""The reproduction matrix: every computational claim checked end to end.

Each entry is one row of the report with expected/actual/verdict; a row
passes only when its property holds and it finished inside its time limit.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import mpmath
import numpy as np

from .algorithms import components, girth, lemma22_shape_check, shortest_cycle_through
from .covering import CoordinateMap, GraphDescriptor, lemma21_map, projection_map, verify_covering
from .extremal import turan_bounds
from .field import Field, field_from_order
from .graph import ImplicitGraph, family_graph
from .spectral import lambda2

SMALL_FIELD_ORDERS = (2, 3, 4, 5, 7, 8, 9)
EXHAUSTIVE_ORDER = 10**5


@dataclass
class Row:
    id: int
    name: str
    expected: str
    actual: str
    passed: bool
    elapsed_s: float
    limit_s: float

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "FAIL"

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


# -- reusable property sweeps ------------------------------------------------------

def field_axiom_failures(F: Field) -> list[str]:
    """Exhaustive field-axiom check over all elements (intended for q <= 9)."""
    q = F.q
    r = np.arange(q)
    a, b, c = (x.ravel() for x in np.meshgrid(r, r, r, indexing="ij"))
    out = []
    if not (F.vadd(F.vadd(a, b), c) == F.vadd(a, F.vadd(b, c))).all():
        out.append("add associativity")
    if not (F.vmul(F.vmul(a, b), c) == F.vmul(a, F.vmul(b, c))).all():
        out.append("mul associativity")
    if not (F.vadd(a, b) == F.vadd(b, a)).all():
        out.append("add commutativity")
    if not (F.vmul(a, b) == F.vmul(b, a)).all():
        out.append("mul commutativity")
    if not (F.vmul(a, F.vadd(b, c)) == F.vadd(F.vmul(a, b), F.vmul(a, c))).all():
        out.append("distributivity")
    if not ((F.vadd(r, 0) == r).all() and (F.vmul(r, 1) == r).all() and (F.vmul(r, 0) == 0).all()):
        out.append("identities")
    if not (F.vadd(r, F.vneg(r)) == 0).all() or not (F.vsub(a, b) == F.vadd(a, F.vneg(b))).all():
        out.append("additive inverses")
    if any(F.mul(x, F.inv(x)) != 1 for x in range(1, q)):
        out.append("multiplicative inverses")
    if not (F.vpow(r, q) == r).all():
        out.append("Frobenius a^q = a")
    return out


def oracle_failures(g: ImplicitGraph) -> list[str]:
    """Exhaustive unique-neighbor, regularity, bipartiteness, symmetry and encoding checks."""
    out = []
    ids = np.arange(g.order, dtype=np.int64)
    coords = g.coords_of(ids)
    if not np.array_equal(g.ids_of(coords, ids >= g.num_points), ids):
        out.append("encode/decode round trip")
    nb = g.neighbor_ids(ids)
    first = g.coords_of(nb.ravel())[:, 0].reshape(nb.shape)
    if not (first == np.arange(g.q)).all():
        out.append("unique neighbor per first coordinate")
    srt = np.sort(nb, axis=1)
    if (srt[:, 1:] == srt[:, :-1]).any():
        out.append("q-regularity (repeated neighbor)")
    is_line = ids >= g.num_points
    if not ((nb >= g.num_points) != is_line[:, None]).all():
        out.append("bipartiteness")
    pts = ids[~is_line]
    pnb = nb[~is_line]
    if not g.adjacent_ids(np.repeat(pts, g.q), pnb.ravel()).all():
        out.append("oracle neighbor fails the equations")
    back = nb[pnb.ravel()]
    if not (back == np.repeat(pts, g.q)[:, None]).any(axis=1).all():
        out.append("symmetry")
    return out


def small_graphs(limit: int = EXHAUSTIVE_ORDER):
    for q in SMALL_FIELD_ORDERS:
        n = 2
        while 2 * q**n <= limit:
            for fam in ("D", "A"):
                yield fam, n, q
            n += 1


def _relerr(x: float, ref) -> float:
    return float(abs(mpmath.mpf(x) - ref) / abs(ref))


def turan_reference(n: int, k: int):
    """Closed forms at 50 significant digits."""
    with mpmath.workdps(50):
        eps = 1 if k % 2 == 0 else 0
        n = mpmath.mpf(n)
        scale = mpmath.power(2, 1 + mpmath.mpf(1) / k)
        lower = mpmath.power(n, 1 + mpmath.mpf(2) / (3 * k - 3 + eps)) / scale
        upper = mpmath.power(n, 1 + mpmath.mpf(1) / k) / scale + n / 2
        return lower, upper


# -- the criteria -----------------------------------------------------------------

def c1_girth_base_cases():
    bad, got = [], []
    for n, want in ((2, 6), (3, 8)):
        for q in (3, 4, 5, 7, 8, 9):
            r = girth(family_graph("D", n, q), mode="full", witness=False)
            got.append(f"D({n},{q})={r}")
            if r.value != want:
                bad.append(got[-1])
    return "girth D(2,q)=6, D(3,q)=8, q in {3,4,5,7,8,9}", "; ".join(bad or got), not bad


def c2_girth_lower_bound():
    bad, n_checked = [], 0
    for n in range(2, 7):
        for q in (2, 3, 4, 5):
            bound = n + 5 if n % 2 else n + 4
            r = girth(family_graph("D", n, q), witness=False)
            n_checked += 1
            if not r.at_least(bound):
                bad.append(f"D({n},{q})={r} < {bound}")
    return "girth D(n,q) >= n+5 (odd n) / n+4 (even n)", "; ".join(bad) or f"{n_checked} instances hold", not bad


def c3_cycles_through_origin():
    bad, vals = [], []
    for q in (3, 4, 5):
        for n in range(2, 9):
            g = family_graph("A", n, q)
            r = shortest_cycle_through(g, 0, 2 * n + 8, witness=False)
            vals.append(f"A({n},{q}):{r}")
            if not r.at_least(2 * n + 2):
                bad.append(vals[-1])
    return "cycle through (0) in A(n,q) >= 2n+2", "; ".join(bad or vals), not bad


def c4_covering():
    maps = [lemma21_map(k, q) for k, q in ((1, 3), (2, 3), (3, 3), (2, 5))]
    maps += [projection_map("D", 5, 3, 3), projection_map("A", 6, 4, 3)]
    bad = [str(m) for m in maps if not verify_covering(m, "exhaustive").passed]
    tampered = CoordinateMap(GraphDescriptor("D", 5, 3), GraphDescriptor("A", 4, 3), (1, 2, 3, 4))
    t = verify_covering(tampered, "exhaustive")
    if t.passed or not t.certificate:
        bad.append("tampered map not rejected")
    actual = "; ".join(bad) or f"{len(maps)} maps pass; tampered map fails at {t.certificate['vertex']}"
    return "maps are coverings; tampered map fails", actual, not bad


def c5_layer_shapes():
    bad = []
    for q in (3, 5):
        for n in range(2, 9):
            ce = lemma22_shape_check(family_graph("A", n, q), n)
            if ce is not None:
                bad.append(f"A({n},{q}): {ce}")
    return "layer shapes hold for A(n,q), n<=8, q in {3,5}", "; ".join(bad) or "14 instances hold", not bad


def c6_connectivity():
    ranges = {3: 10, 4: 10, 5: 8, 7: 7}
    bad, total = [], 0
    for q, top in ranges.items():
        for n in range(2, top + 1):
            c = components(family_graph("A", n, q)).count
            total += 1
            if c != 1:
                bad.append(f"A({n},{q}) has {c} components")
    return "A(n,q) connected on the scaled range", "; ".join(bad) or f"{total} instances connected", not bad


def c7_disconnection():
    counts = {n: components(family_graph("D", n, 3)).count for n in (6, 7)}
    ok = all(c > 1 for c in counts.values())
    return "D(6,3), D(7,3) disconnected", ", ".join(f"D({n},3): {c} components" for n, c in counts.items()), ok


def c8_spectral():
    bad, worst_gap, margins, notes = [], 0.0, [], []
    for n in (2, 3, 4):
        for q in (3, 4, 5):
            g = family_graph("D", n, q)
            d = lambda2(g, "dense")
            it = lambda2(g, "iterative")
            gap = abs(d.lambda2 - it.lambda2)
            worst_gap = max(worst_gap, gap)
            margins.append(d.margin)
            if d.lambda2 > d.bound + 1e-8:
                bad.append(f"D({n},{q}) lambda2={d.lambda2:.6f} > {d.bound:.6f}")
            if d.component_note:
                pc = lambda2(g, "dense", per_component=True)
                notes.append(f"D({n},{q}) has {d.components} components, raw lambda2={d.lambda2:.6f}, "
                             f"per-component {pc.lambda2:.6f}")
            if gap > 1e-6 or not it.converged:
                bad.append(f"D({n},{q}) dense/iterative differ by {gap:.2e}")
    actual = "; ".join(bad) or "; ".join(
        [f"min margin {min(margins):.4f}, max dense/iterative gap {worst_gap:.1e}"] + notes)
    return "lambda2(D(n,q)) <= 2 sqrt(q), n<=4, q in {3,4,5}", actual, not bad


def c9_embedding():
    bad, vals = [], []
    for q in (3, 5):
        a = lambda2(family_graph("A", 4, q)).lambda2
        d = lambda2(family_graph("D", 5, q)).lambda2
        vals.append(f"q={q}: {a:.6f} <= {d:.6f}")
        if a > d + 1e-6:
            bad.append(vals[-1])
    return "lambda2(A(4,q)) <= lambda2(D(5,q))", "; ".join(bad or vals), not bad


def c10_turan():
    worst = 0.0
    for k in range(2, 7):
        for n in (10**2, 10**3, 10**4):
            b = turan_bounds(n, k)
            lo, hi = turan_reference(n, k)
            worst = max(worst, _relerr(b.lower, lo), _relerr(b.upper, hi))
    return "relative error <= 1e-12 vs 50-digit reference", f"max relative error {worst:.1e}", worst <= 1e-12


def c11_properties():
    bad = []
    for q in SMALL_FIELD_ORDERS:
        bad += [f"GF({q}): {f}" for f in field_axiom_failures(field_from_order(q))]
    n_graphs = 0
    for fam, n, q in small_graphs():
        n_graphs += 1
        bad += [f"{fam}({n},{q}): {f}" for f in oracle_failures(family_graph(fam, n, q))]
    for fam, q, moduli in (("D", 8, ((1, 1, 0, 1), (1, 0, 1, 1))), ("A", 9, ((1, 0, 1), (2, 1, 1)))):
        outs = []
        for m in moduli:
            g = family_graph(fam, 4, field_from_order(q, m))
            outs.append((girth(g, witness=False).value, components(g).count))
        if outs[0] != outs[1]:
            bad.append(f"{fam}(4,{q}) depends on the modulus: {outs}")
    actual = "; ".join(bad) or f"{len(SMALL_FIELD_ORDERS)} fields, {n_graphs} graphs, 2 modulus pairs clean"
    return "field axioms, oracle properties, representation independence", actual, not bad


CRITERIA = [
    (1, "girth base cases", c1_girth_base_cases, 120),
    (2, "girth lower bound for D(n,q)", c2_girth_lower_bound, 300),
    (3, "cycles through (0) in A(n,q)", c3_cycles_through_origin, 300),
    (4, "covering maps", c4_covering, 120),
    (5, "distance-layer shapes in A(n,q)", c5_layer_shapes, 180),
    (6, "connectivity of A(n,q)", c6_connectivity, 900),
    (7, "disconnection of D(n,3)", c7_disconnection, 60),
    (8, "2 sqrt(q) bound for D(n,q)", c8_spectral, 600),
    (9, "spectrum embedding A(4,q) in D(5,q)", c9_embedding, 300),
    (10, "Turan bound formulas", c10_turan, 5),
    (11, "property suites", c11_properties, 300),
]
MATRIX_SIZE = len(CRITERIA)


def run_row(cid: int) -> Row:
    _, name, fn, limit = next(c for c in CRITERIA if c[0] == cid)
    t = time.perf_counter()
    try:
        expected, actual, ok = fn()
    except Exception as exc:  # a crash is a failed row, not a crashed suite
        expected, actual, ok = "completes", f"{type(exc).__name__}: {exc}", False
    elapsed = time.perf_counter() - t
    if elapsed > limit:
        ok = False
        actual += f" (took {elapsed:.1f}s, limit {limit}s)"
    return Row(cid, name, expected, actual, ok, round(elapsed, 3), limit)


def repro_suite(only=None) -> list[Row]:
    ids = [c[0] for c in CRITERIA] if only is None else list(only)
    return [run_row(i) for i in ids]
