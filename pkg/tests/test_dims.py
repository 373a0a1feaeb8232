import itertools
from functools import lru_cache

from hypothesis import given
from hypothesis import strategies as st

from cotlab.classes.taxonomy import TaxonomyParams, shatter_set, taxonomy_window
from cotlab.core import Generator
from cotlab.dims import (
    CotGameValue,
    EmptyClassError,
    FiniteClassTable,
    LittlestoneSolver,
    LittlestoneTree,
    base_table,
    inflate_tree,
    littlestone_dim,
    littlestone_dim_multiclass,
    optimal_cot_mistake_bound,
    optimal_e2e_mistake_bound,
    realized_branches,
    ssp_bound,
    tree_is_shattered,
    vc_dim,
)
from cotlab.experiments import ClassSpec, build_class
from cotlab.game import minimax_value
from cotlab.tokens import EMPTY, Bits, all_strings


def _table(rows, n=None) -> FiniteClassTable:
    n = len(rows[0]) if n is None else n
    pool = all_strings(3)[:n]
    return FiniteClassTable(pool, [f"m{i}" for i in range(len(rows))], rows)


def _naive_ldim(rows: tuple) -> int:
    """Plain recursion over sets of rows: no memo sharing, no pruning."""

    @lru_cache(maxsize=None)
    def L(S: frozenset) -> int:
        best = 0
        for j in range(len(rows[0])):
            zero = frozenset(r for r in S if r[j] == 0)
            one = S - zero
            if zero and one:
                best = max(best, 1 + min(L(zero), L(one)))
        return best

    return L(frozenset(rows))


def _naive_vc(rows: tuple) -> int:
    n = len(rows[0])
    best = 0
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            if len({tuple(r[i] for i in S) for r in rows}) == 2**k:
                best = k
    return best


tables = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.tuples(*[st.sampled_from([0, 1])] * n), min_size=1, max_size=9)
)


def test_ssp_bound_examples() -> None:
    assert ssp_bound(5, 0) == 1
    assert ssp_bound(4, 2) == 11
    assert ssp_bound(3, 5) == 8


def test_littlestone_examples() -> None:
    assert littlestone_dim(_table([(0, 0), (0, 1)])) == 1
    for n in range(1, 5):
        cube = list(itertools.product((0, 1), repeat=n))
        assert littlestone_dim(_table(cube)) == n
        assert vc_dim(_table(cube)) == n
    assert littlestone_dim(_table([(1, 0, 1)])) == 0
    assert vc_dim(_table([(1, 0, 1)])) == 0


def test_thresholds_have_vc_one_and_larger_ldim() -> None:
    # thresholds on 7 ordered points: VC 1, Littlestone floor(log2 8) = 3
    rows = [tuple(int(i >= t) for i in range(7)) for t in range(8)]
    t = FiniteClassTable(all_strings(3)[:7], [str(k) for k in range(8)], rows)
    assert vc_dim(t) == 1
    assert littlestone_dim(t) == 3


@given(tables)
def test_ldim_matches_naive_recursion(rows) -> None:
    rows = [tuple(r) for r in rows]
    assert littlestone_dim(_table(rows)) == _naive_ldim(tuple(rows))


@given(tables)
def test_vc_matches_subset_search_and_sits_below_ldim(rows) -> None:
    rows = [tuple(r) for r in rows]
    t = _table(rows)
    assert vc_dim(t) == _naive_vc(tuple(rows))
    assert vc_dim(t) <= littlestone_dim(t)


@given(tables)
def test_ldim_matches_minimax_game(rows) -> None:
    t = _table([tuple(r) for r in rows])
    assert littlestone_dim(t) == minimax_value(t)


@given(tables)
def test_witness_tree_is_perfect_and_shattered(rows) -> None:
    t = _table([tuple(r) for r in rows])
    solver = LittlestoneSolver(t)
    tree = solver.witness_tree()
    assert tree.depth == solver.dim()
    assert len(tree.branches()) == 2**tree.depth
    assert tree.is_binary
    assert tree_is_shattered(t, tree)


def test_multiclass_examples() -> None:
    gens = [Generator.constant(0), Generator.constant(1)]
    t = FiniteClassTable.from_generators(gens, [EMPTY], "cot", 2)
    assert {str(r[0]) for r in t.rows} == {"00", "11"}
    assert littlestone_dim_multiclass(t) == 1
    same = FiniteClassTable.from_generators([Generator.constant(0)] * 3, ["0", "1"], "cot", 3)
    assert littlestone_dim_multiclass(same) == 0


@given(tables)
def test_multiclass_on_binary_labels_equals_binary(rows) -> None:
    t = _table([tuple(r) for r in rows])
    assert LittlestoneSolver(t, multiclass=True).dim() == littlestone_dim(t)


def test_multiclass_witness_uses_label_pairs() -> None:
    gens = [Generator.constant(0), Generator.constant(1)]
    t = FiniteClassTable.from_generators(gens, [EMPTY], "cot", 2)
    tree = LittlestoneSolver(t).witness_tree()
    assert tree.depth == 1
    assert not tree.is_binary
    assert tree_is_shattered(t, tree)


def test_empty_class_is_rejected() -> None:
    t = FiniteClassTable(["0"], [], [])
    try:
        littlestone_dim(t)
    except EmptyClassError:
        pass
    else:
        raise AssertionError("empty class accepted")


def test_table_shape_checks() -> None:
    for kwargs in [
        dict(pool=["0"], member_ids=["a"], rows=[(0, 1)]),
        dict(pool=["0"], member_ids=["a", "a"], rows=[(0,), (1,)]),
        dict(pool=["0"], member_ids=["a"], rows=[(0,), (1,)]),
    ]:
        try:
            FiniteClassTable(**kwargs)
        except ValueError:
            pass
        else:
            raise AssertionError(kwargs)


def test_taxonomy_window_base_and_cot_dimensions() -> None:
    p = TaxonomyParams(s_max=300)
    gens = taxonomy_window(p, [256, 300])
    pool = shatter_set(p, 256) + [Bits.pattern((0, 256), (1, 1), (0, k)) for k in p.K(256)]
    base = base_table(gens, pool, 3)
    assert littlestone_dim(base.dedup()) == 1
    assert optimal_cot_mistake_bound(gens, pool, 3) <= 1
    assert littlestone_dim_multiclass(FiniteClassTable.from_generators(gens, pool, "cot", 3).dedup()) <= 1


def test_taxonomy_shatter_set_at_m256() -> None:
    p = TaxonomyParams(s_max=256)
    gens = taxonomy_window(p, [256])
    t = FiniteClassTable.from_generators(gens, shatter_set(p, 256), "e2e", 256)
    assert vc_dim(t) == 2


def test_constant_generator_realises_only_the_zero_branch() -> None:
    tree = LittlestoneTree.perfect(3, lambda p: Bits.of("1") + Bits.of(p))
    assert realized_branches([Generator.constant(0)], tree) == {(0, 0, 0)}


def test_full_cube_realises_every_branch() -> None:
    pts = all_strings(2)
    gens = [Generator.from_table(dict(zip(pts, bits)), str(bits)) for bits in itertools.product((0, 1), repeat=4)]
    tree = LittlestoneTree.perfect(3, lambda p: pts[len(p)])
    assert len(realized_branches(gens, tree)) == 8


@given(st.integers(0, 10_000))
def test_realized_branches_obey_ssp(seed: int) -> None:
    bundle = build_class(ClassSpec("random", {"max_members": 8, "max_pool": 4}, seed), 1)
    t = FiniteClassTable.from_generators(bundle.generators, bundle.pool, "base")
    depth = 1 + seed % 4
    tree = LittlestoneTree.perfect(depth, lambda p: bundle.pool[(len(p) + sum(p)) % len(bundle.pool)])
    L = littlestone_dim(t)
    assert len(realized_branches(bundle.generators, tree)) <= ssp_bound(depth, L)


def test_inflate_tree_small_cases() -> None:
    base = LittlestoneTree({(): Bits.of("01")})
    one = inflate_tree(base, 1)
    assert one.nodes == base.nodes
    two = inflate_tree(base, 2)
    assert two.depth == 2
    assert sorted(str(x) for x in two.nodes.values()) == ["01", "010", "011"]


def _prefix_cube() -> list[Generator]:
    """Every labelling of {0,1}^2, applied to the first two bits; e2e output is M-independent."""
    pts = all_strings(2)

    def make(bits):
        lab = dict(zip(pts, bits))
        return Generator(lambda x: lab[x[:2]] if len(x) >= 2 else 0, str(bits))

    return [make(bits) for bits in itertools.product((0, 1), repeat=4)]


def test_inflated_tree_depth_and_branch_count() -> None:
    pts = all_strings(2)
    gens = _prefix_cube()
    base = LittlestoneTree.perfect(2, lambda p: pts[len(p) + 2 * (p[:1] == (1,))])
    for M in (1, 2, 3):
        inflated = inflate_tree(base, M, gens)
        assert inflated.depth == 2 * M
        n = len(realized_branches(gens, inflated))
        base_L = littlestone_dim(base_table(gens, base.instances(), M))
        assert 4 <= n <= ssp_bound(2 * M, base_L)


def test_inflate_rejects_unshattered_base() -> None:
    base = LittlestoneTree({(): Bits.of("0")})
    try:
        inflate_tree(base, 2, [Generator.constant(0)])
    except ValueError:
        pass
    else:
        raise AssertionError("accepted an unshattered tree")


def test_mistake_bound_examples() -> None:
    same = [Generator.constant(0), Generator.from_table({"1": 1}, "t")]
    assert optimal_e2e_mistake_bound(same, ["0"], 2) == 0
    assert optimal_e2e_mistake_bound([Generator.constant(0), Generator.constant(1)], ["0"], 2) == 1
    assert optimal_cot_mistake_bound([Generator.constant(1)], ["0", "1"], 3) == 0


@given(st.integers(0, 10_000))
def test_cot_value_below_e2e_and_base(seed: int) -> None:
    M = 1 + seed % 3
    bundle = build_class(ClassSpec("random", {}, seed), M)
    gens, pool = bundle.generators, bundle.pool
    cot_v = optimal_cot_mistake_bound(gens, pool, M)
    assert cot_v <= optimal_e2e_mistake_bound(gens, pool, M)
    assert cot_v <= littlestone_dim(base_table(gens, pool, M).dedup())
    cot_t = FiniteClassTable.from_generators(gens, pool, "cot", M).dedup()
    assert cot_v == minimax_value(cot_t)
    assert CotGameValue(cot_t).value() == cot_v
