import itertools
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from cotlab.classes.linear import (
    LinearGen,
    all_boolean_functions,
    is_threshold_function,
    latch_constants,
    latch_embed,
    latch_instance,
    linear_eval,
    ltf_representatives,
    threshold_truth_tables,
)
from cotlab.core import cot, e2e
from cotlab.tokens import Bits, all_strings


def test_eval_examples() -> None:
    assert linear_eval(LinearGen((1,), 0), "0") == 1
    g = LinearGen((1, 1, 6), -2)
    assert linear_eval(g, "110") == 1
    assert linear_eval(g, "000") == 0
    # short inputs use the trailing weights only
    assert g.score("1") == 4
    assert g.score("") == -2


def test_rejects_float_weights() -> None:
    try:
        LinearGen((0.5,), 0)
    except TypeError:
        pass
    else:
        raise AssertionError("float accepted")
    assert LinearGen(("1/3",), "-1/3")("1") == 1


def test_latch_embed_example() -> None:
    e = latch_constants((1,), -1)
    assert (e.L, e.U, e.B, e.A) == (-1, 0, 1, 3)
    assert e.outer.w == (1, 1, 6) and e.outer.b == -2
    assert latch_embed((1,), -1) == e.outer
    for z in ("0", "1"):
        for M in range(2, 9):
            assert e2e(e.outer, latch_instance(z), M) == int(z == "1")


vectors = st.integers(1, 3).flatmap(lambda m: st.tuples(*[st.integers(-2, 2)] * m))


@given(vectors, st.integers(-3, 3), st.integers(2, 8))
def test_latch_chain_is_constant(v, c, M) -> None:
    inner = LinearGen(v, c)
    outer = latch_embed(v, c)
    assert outer.d == len(v) + 2
    for z in all_strings(len(v)):
        want = Bits.ones(M) if inner(z) else Bits.zeros(M)
        assert cot(outer, latch_instance(z), M) == want


def test_threshold_counts() -> None:
    assert [len(threshold_truth_tables(d)) for d in (1, 2, 3)] == [4, 14, 104]


def test_threshold_tables_agree_with_lp() -> None:
    for d in (1, 2, 3):
        grid = set(threshold_truth_tables(d))
        lp = {t for t in all_boolean_functions(d) if is_threshold_function(t, d)}
        assert grid == lp


def test_xor_is_not_a_threshold_function() -> None:
    assert not is_threshold_function((0, 1, 1, 0), 2)
    assert not is_threshold_function((1, 0, 0, 1), 2)
    assert is_threshold_function((0, 0, 0, 1), 2)


def test_representatives_realise_their_tables() -> None:
    tables = threshold_truth_tables(3)
    pts = all_strings(3)
    for g in ltf_representatives(3):
        key = tuple(g(z) for z in pts)
        assert key in tables
    assert len({tuple(g(z) for z in pts) for g in ltf_representatives(3)}) == 104


def test_exact_tie_goes_to_one() -> None:
    g = LinearGen((Fraction(1, 3), Fraction(2, 3)), -1)
    assert g("11") == 1
    assert g("01") == 0
