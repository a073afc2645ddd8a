import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adg.equations import (
    MAX_DEPTH,
    Add,
    EquationSystem,
    Mul,
    Neg,
    Num,
    ParseError,
    Pow,
    Sub,
    Var,
    builtin_system,
    eval_rhs,
    format_system,
    make_add,
    make_mul,
    parse_system,
    validate_system,
)
from adg.field import field_from_order

from conftest import monomial_indices


def mono(a, b):
    return make_mul([Var("p", a), Var("l", b)])


def test_parse_examples():
    s = parse_system("p2 + l2 = p1*l1")
    assert s.n == 2 and s.f(2) == mono(1, 1)
    with pytest.raises(ParseError, match="left-hand side"):
        parse_system("p2 + l3 = p1")
    with pytest.raises(ParseError, match="l3 not among the 2 admissible"):
        parse_system("p2 + l2 = l3")


def test_parse_error_positions():
    with pytest.raises(ParseError) as e:
        parse_system("p2 + l2 = p1*l1\np3 + l3 = p1 * $\n")
    assert (e.value.line, e.value.col) == (2, 16)
    with pytest.raises(ParseError) as e:
        parse_system("p2 + l2 = p1 l1")
    assert e.value.col == 14
    with pytest.raises(ParseError, match="index 3"):
        parse_system("p2 + l2 = p1*l1\np4 + l4 = p1*l1")
    with pytest.raises(ParseError, match="index 2"):
        parse_system("p3 + l3 = p1*l1")
    with pytest.raises(ParseError, match="no equations"):
        parse_system("# nothing here\n\n")
    with pytest.raises(ParseError, match="exponent"):
        parse_system("p2 + l2 = p1^l1")
    with pytest.raises(ParseError, match="nested too deeply"):
        parse_system("p2 + l2 = " + "(" * (MAX_DEPTH + 1) + "p1" + ")" * (MAX_DEPTH + 1))


def test_depth_limit_is_generous():
    parse_system("p2 + l2 = " + "(" * 64 + "p1" + ")" * 64)


def test_comments_and_whitespace():
    text = "# D(3, q)\n  p2 + l2 = p1 * l1   # first\n\np3+l3=p1*l2\n"
    assert parse_system(text) == builtin_system("D", 3)


def test_builtin_examples():
    assert builtin_system("D", 3).rhs == (mono(1, 1), mono(1, 2))
    assert builtin_system("A", 4).rhs == (mono(1, 1), mono(1, 2), mono(3, 1))
    assert builtin_system("D", 2) == builtin_system("A", 2)
    assert builtin_system("A", 3) == builtin_system("D", 3)
    with pytest.raises(ValueError):
        builtin_system("D", 1)
    with pytest.raises(ValueError):
        builtin_system("B", 4)


@pytest.mark.parametrize("family", ["D", "A"])
@pytest.mark.parametrize("n", range(2, 14))
def test_builtin_matches_definition(family, n):
    s = builtin_system(family, n)
    assert validate_system(s) is None
    for j, (a, b) in monomial_indices(family, n).items():
        assert s.f(j) == mono(a, b)


@pytest.mark.parametrize("family", ["D", "A"])
def test_truncation(family):
    for n in range(2, 12):
        for m in range(2, n + 1):
            assert builtin_system(family, n).truncate(m) == builtin_system(family, m)


def test_validate_violations():
    bad3 = EquationSystem(3, (mono(1, 1), make_add([Var("p", 3), Var("l", 1)])))
    v = validate_system(bad3)
    assert (v.j, v.variable) == (3, "p3")
    v = validate_system(EquationSystem(2, (Var("l", 2),)))
    assert (v.j, v.variable) == (2, "l2")
    assert validate_system(builtin_system("D", 7)) is None


def test_eval_examples():
    F = field_from_order(3)
    assert eval_rhs(builtin_system("D", 4), F, 2, [2], [2]) == 1
    assert eval_rhs(builtin_system("A", 3), F, 3, [1, 0], [0, 1]) == 1
    for fam in ("D", "A"):
        s = builtin_system(fam, 8)
        for j in range(2, 9):
            assert eval_rhs(s, F, j, [0] * 7, [0] * 7) == 0
    with pytest.raises(ValueError):
        eval_rhs(builtin_system("D", 4), F, 4, [1, 1], [1, 1, 1])
    with pytest.raises(ValueError):
        eval_rhs(builtin_system("D", 4), F, 5, [1] * 4, [1] * 4)


# -- random expressions ------------------------------------------------------------

def expr_strategy(j):
    leaves = st.one_of(
        st.builds(Var, st.sampled_from("pl"), st.integers(1, j - 1)),
        st.builds(Num, st.integers(0, 40)),
    )

    def extend(children):
        return st.one_of(
            st.lists(children, min_size=2, max_size=4).map(make_add),
            st.lists(children, min_size=2, max_size=4).map(make_mul),
            st.builds(Sub, children, children),
            st.builds(Neg, children),
            st.builds(Pow, children, st.integers(0, 5)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@st.composite
def systems(draw):
    n = draw(st.integers(2, 6))
    return EquationSystem(n, tuple(draw(expr_strategy(j)) for j in range(2, n + 1)))


@settings(max_examples=200, deadline=None)
@given(systems())
def test_round_trip(s):
    assert parse_system(format_system(s)) == s


def reference_eval(e, p, P, L):
    """Tree walk over integers mod a prime p."""
    if isinstance(e, Var):
        return (P if e.side == "p" else L)[e.index - 1]
    if isinstance(e, Num):
        return e.value % p
    if isinstance(e, Add):
        return sum(reference_eval(t, p, P, L) for t in e.terms) % p
    if isinstance(e, Mul):
        out = 1
        for f in e.factors:
            out = out * reference_eval(f, p, P, L) % p
        return out
    if isinstance(e, Sub):
        return (reference_eval(e.left, p, P, L) - reference_eval(e.right, p, P, L)) % p
    if isinstance(e, Neg):
        return -reference_eval(e.operand, p, P, L) % p
    return pow(reference_eval(e.base, p, P, L), e.exponent, p)


@settings(max_examples=200, deadline=None)
@given(systems(), st.sampled_from([2, 3, 5, 7, 11]), st.data())
def test_compiled_matches_tree_walk(s, p, data):
    F = field_from_order(p)
    P = data.draw(st.lists(st.integers(0, p - 1), min_size=s.n, max_size=s.n))
    L = data.draw(st.lists(st.integers(0, p - 1), min_size=s.n, max_size=s.n))
    for j in range(2, s.n + 1):
        got = eval_rhs(s, F, j, P, L)
        assert got == reference_eval(s.f(j), p, P, L)
        assert got == eval_rhs(s, F, j, P, L)


def test_literals_in_extension_fields():
    # integer literals are reduced mod p, so 3 is 1 in GF(4)
    s = parse_system("p2 + l2 = 3*p1 + 2")
    F = field_from_order(4)
    for x in F.elements():
        assert eval_rhs(s, F, 2, [x], [0]) == x
