import itertools

from hypothesis import given
from hypothesis import strategies as st

from cotlab.classes.linear import LinearGen, ltf_representatives
from cotlab.classes.taxonomy import TaxonomyParams, bucket_instance, taxonomy_member, taxonomy_window
from cotlab.core import Generator, cot, e2e
from cotlab.dims import FiniteClassTable, base_table, littlestone_dim
from cotlab.experiments import ClassSpec, build_class, taxonomy_pool
from cotlab.game import FeedbackMode, FixedTargetAdversary, RandomAdversary, exhaustive_worst_case, run_game
from cotlab.learners import (
    CotReduction,
    EmptyVersionSpace,
    Halving,
    SoaCot,
    SuffixProjection,
    TaxonomyLearner,
    ltf_halving_base,
    replay_base_mistakes,
    suffix_map,
)
from cotlab.tokens import Bits, all_strings, strings_up_to

E2E, COT = FeedbackMode.E2E, FeedbackMode.COT


def _cube(n: int) -> tuple[list[Generator], list[Bits]]:
    pts = strings_up_to(2)[1 : n + 1]
    gens = [Generator.from_table(dict(zip(pts, b)), str(b)) for b in itertools.product((0, 1), repeat=n)]
    return gens, pts


def test_soa_cot_singleton() -> None:
    g = Generator(lambda x: x.count(0) % 2, "g")
    tr = run_game(SoaCot([g], 3, ["0", "1"]), FixedTargetAdversary(g, ["0", "1", "10"]), 3, COT, 5)
    assert tr.mistakes == 0


def test_soa_cot_tie_break_is_lexicographic() -> None:
    gens = [Generator.constant(1), Generator.constant(0)]
    learner = SoaCot(gens, 2, [Bits.of("0")])
    assert learner.predict("0") == 0
    assert set(learner.last_scores) == {Bits.of("00"), Bits.of("11")}
    learner.update("0", Bits.of("11"))
    assert learner.predict("0") == 1


def test_soa_cot_rejects_bare_bits() -> None:
    learner = SoaCot([Generator.constant(0)], 2, ["0"])
    try:
        learner.update("0", 0)
    except TypeError:
        pass
    else:
        raise AssertionError("bit feedback accepted")


@given(st.integers(0, 5000))
def test_soa_cot_within_base_dimension(seed: int) -> None:
    M = 1 + seed % 3
    b = build_class(ClassSpec("random", {"max_members": 8, "max_pool": 3}, seed), M)
    L = littlestone_dim(base_table(b.generators, b.pool, M).dedup())
    worst = exhaustive_worst_case(lambda: SoaCot(b.generators, M, b.pool), b.generators, b.pool, M, COT, len(b.pool))
    assert worst <= L


def test_halving_counts() -> None:
    gens, pts = _cube(3)
    h = Halving.from_generators(gens, 1)
    assert h.bound == 3
    assert exhaustive_worst_case(lambda: Halving.from_generators(gens, 1), gens, pts, 1, E2E, 3) == 3
    one = [gens[0]]
    assert exhaustive_worst_case(lambda: Halving.from_generators(one, 1), one, pts, 1, E2E, 3) == 0


def test_halving_on_table_and_empty_space() -> None:
    t = FiniteClassTable(["0", "1"], ["a", "b"], [(0, 1), (1, 1)])
    h = Halving.from_table(t)
    assert h.predict("0") == 1
    h.update("0", 0)
    assert h.alive == frozenset({0})
    try:
        h.update("1", 0)
    except EmptyVersionSpace:
        pass
    else:
        raise AssertionError("inconsistent feedback accepted")


def test_halving_taxonomy_bucket_within_r() -> None:
    p = TaxonomyParams(s_max=256)
    members = [taxonomy_member(p, 256, k) for k in p.K(256)]
    pool = [bucket_instance(256, i) for i in range(0, 7)]
    worst = exhaustive_worst_case(lambda: Halving.from_generators(members, 3), members, pool, 3, E2E, len(pool))
    assert worst <= p.rate(256)


def test_taxonomy_learner_baseline_stream() -> None:
    p = TaxonomyParams(s_max=300)
    g = taxonomy_member(p, 256, 3)
    xs = [Bits.of("0101"), Bits.pattern((0, 256), (1, 1), (0, 3), (1, 1), (0, 252))]
    tr = run_game(TaxonomyLearner(p, 3), FixedTargetAdversary(g, xs), 3, E2E, 5)
    assert tr.mistakes == 0


def test_taxonomy_learner_infers_k_for_large_buckets() -> None:
    p = TaxonomyParams(s_max=300)
    M = 3
    for s in (256, 300):  # both exceed 10M
        for k in p.K(s):
            i = k - M + 1
            if i < 0:
                continue
            learner = TaxonomyLearner(p, M)
            x = bucket_instance(s, i)
            target = taxonomy_member(p, s, k)
            assert e2e(target, x, M) == 1
            assert learner.predict(x) == 0
            learner.update(x, 1)
            assert learner.phase == "known"
            assert learner.k_star == k


def test_taxonomy_learner_halves_small_buckets() -> None:
    p = TaxonomyParams(s_max=300)
    M = 256
    gens = taxonomy_window(p, [256, 257])
    pool = taxonomy_pool(p, [256, 257])
    worst = exhaustive_worst_case(lambda: TaxonomyLearner(p, M), gens, pool[:12], M, E2E, 6)
    assert worst <= 1 + 10 * p.rate(M) + 1


def test_suffix_map() -> None:
    assert suffix_map("1", 3) == "001"
    assert suffix_map("110101", 3) == "101"
    assert suffix_map("", 2) == "00"


def test_ltf_base_counts() -> None:
    assert ltf_halving_base(1).bound == 2
    assert len(ltf_halving_base(2).names) == 14
    assert ltf_halving_base(2).bound == 3
    assert len(ltf_halving_base(3).names) == 104
    try:
        ltf_halving_base(5)
    except ValueError:
        pass
    else:
        raise AssertionError("d = 5 accepted")


def test_reduction_with_perfect_base_makes_no_mistakes() -> None:
    g = Generator(lambda x: x.last(0), "copy")
    base = lambda: Halving.from_generators([g], 1)
    tr = run_game(CotReduction(base, 4), FixedTargetAdversary(g, ["0", "1", "10"]), 4, COT, 5)
    assert tr.mistakes == 0


@given(st.integers(0, 5000), st.booleans())
def test_reduction_charges_distinct_base_mistakes(seed: int, incremental: bool) -> None:
    M = 1 + seed % 3
    b = build_class(ClassSpec("random", {"max_members": 8, "max_pool": 4}, seed), M)
    base = lambda: Halving.from_generators(b.generators, 1)
    learner = CotReduction(base, M, incremental)
    tr = run_game(learner, RandomAdversary(b.generators, b.pool, seed), M, COT, 8)
    positions = [c.position for c in learner.charges]
    assert len(positions) == tr.mistakes == len(set(positions))
    assert set(positions) <= set(replay_base_mistakes(base, learner.transcript))
    assert tr.mistakes <= base().bound


@given(st.integers(0, 5000))
def test_incremental_matches_from_scratch(seed: int) -> None:
    M = 2
    b = build_class(ClassSpec("random", {"max_members": 8, "max_pool": 4}, seed), M)
    base = lambda: Halving.from_generators(b.generators, 1)
    a = run_game(CotReduction(base, M, True), RandomAdversary(b.generators, b.pool, seed), M, COT, 6)
    c = run_game(CotReduction(base, M, False), RandomAdversary(b.generators, b.pool, seed), M, COT, 6)
    assert a.to_jsonl() == c.to_jsonl()


def test_reduction_over_four_members() -> None:
    gens, pts = _cube(2)
    worst = exhaustive_worst_case(
        lambda: CotReduction(lambda: Halving.from_generators(gens, 1), 1), gens, pts, 1, COT, 4
    )
    assert worst <= 2


def test_ltf_reduction_stays_within_base_bound() -> None:
    d = 3
    reps = ltf_representatives(d)
    gens = [r.generator() for r in reps[::7]]
    pool = [Bits.of(x) for x in ["1", "10", "0110", "111"]]
    make = lambda: CotReduction(lambda: SuffixProjection(ltf_halving_base(d), d), 2)
    for seed in range(5):
        tr = run_game(make(), RandomAdversary(gens, pool, seed), 2, COT, 8)
        assert tr.mistakes <= ltf_halving_base(d).bound
