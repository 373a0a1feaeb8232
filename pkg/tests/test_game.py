import itertools

from hypothesis import given
from hypothesis import strategies as st

from cotlab.classes.linear import LinearGen, latch_instance
from cotlab.classes.taxonomy import TaxonomyParams, shatter_set, taxonomy_window
from cotlab.core import Generator, cot
from cotlab.dims import FiniteClassTable, LittlestoneSolver, LittlestoneTree, littlestone_dim
from cotlab.experiments import ClassSpec, build_class
from cotlab.game import (
    FeedbackMode,
    FixedTargetAdversary,
    GameTranscript,
    LatchAdversary,
    MinimaxLearner,
    RandomAdversary,
    RealizabilityError,
    TreeAdversary,
    exhaustive_worst_case,
    minimax_value,
    run_game,
)
from cotlab.learners import Halving
from cotlab.tokens import Bits, all_strings, strings_up_to

E2E, COT = FeedbackMode.E2E, FeedbackMode.COT


class Stubborn:
    """Always predicts the same bit; ignores feedback."""

    def __init__(self, bit: int = 0):
        self.bit = bit

    def predict(self, x) -> int:
        return self.bit

    def update(self, x, fb) -> None:
        pass


def _cube(n: int) -> tuple[list[Generator], list[Bits]]:
    pts = strings_up_to(2)[1 : n + 1]
    gens = [Generator.from_table(dict(zip(pts, b)), str(b)) for b in itertools.product((0, 1), repeat=n)]
    return gens, pts


def test_minimax_oracle_small_cases() -> None:
    t = FiniteClassTable(["0", "1"], ["a", "b", "c"], [(0, 0), (0, 1), (1, 1)])
    assert minimax_value(t) == 1
    assert minimax_value(FiniteClassTable(["0"], ["a"], [(1,)])) == 0
    assert minimax_value(FiniteClassTable(["0", "1"], list("abcd"), list(itertools.product((0, 1), repeat=2)))) == 2


@given(st.integers(0, 5000))
def test_minimax_learner_achieves_ldim_under_e2e(seed: int) -> None:
    M = 1 + seed % 3
    b = build_class(ClassSpec("random", {"max_members": 6, "max_pool": 3}, seed), M)
    pool = b.pool
    e2e_t = FiniteClassTable.from_generators(b.generators, pool, "e2e", M).dedup()
    L = littlestone_dim(e2e_t)
    worst = exhaustive_worst_case(lambda: MinimaxLearner(b.generators, pool, M, E2E), b.generators, pool, M, E2E, len(pool) + 1)
    assert worst == L == minimax_value(e2e_t)
    worst_cot = exhaustive_worst_case(lambda: MinimaxLearner(b.generators, pool, M, COT), b.generators, pool, M, COT, len(pool) + 1)
    assert worst_cot <= worst


def test_singleton_class_costs_nothing() -> None:
    g = Generator.from_table({"0": 1, "01": 0}, "g")
    for mode in (E2E, COT):
        assert exhaustive_worst_case(lambda: MinimaxLearner([g], ["0", "1"], 2, mode), [g], ["0", "1"], 2, mode, 3) == 0


def test_stubborn_learner_is_punished() -> None:
    gens, pts = _cube(3)
    assert exhaustive_worst_case(lambda: Stubborn(0), gens, pts, 1, E2E, 3) == 3


def test_run_game_records_and_round_trips() -> None:
    gens, pts = _cube(2)
    target = gens[2]
    adv = FixedTargetAdversary(target, pts * 2, gens)
    tr = run_game(Halving.from_generators(gens, 1), adv, 1, E2E, 10, seed=3, config={"k": 1})
    assert len(tr.rounds) == 4
    assert tr.mistakes <= 2
    assert tr.check_flags(target)
    back = GameTranscript.from_jsonl(tr.to_jsonl())
    assert back.rounds == tr.rounds
    assert (back.M, back.mode, back.seed, back.config, back.target_id) == (1, E2E, 3, {"k": 1}, target.name)


def test_cot_transcript_round_trip() -> None:
    g = Generator(lambda x: x.count(1) % 2, "parity")
    adv = FixedTargetAdversary(g, ["1", "10", "111"])
    tr = run_game(Stubborn(1), adv, 3, COT, 5)
    assert all(isinstance(r.feedback, Bits) and len(r.feedback) == 3 for r in tr.rounds)
    back = GameTranscript.from_jsonl(tr.to_jsonl())
    assert back.rounds == tr.rounds
    assert back.check_flags(g)
    bad = tr.rounds[0]
    bad.mistake = 1 - bad.mistake
    assert not tr.check_flags()


def test_unrealizable_feedback_raises() -> None:
    declared = [Generator.constant(0)]
    adv = FixedTargetAdversary(Generator.constant(1), ["0"], declared)
    try:
        run_game(Stubborn(), adv, 2, E2E, 1)
    except RealizabilityError:
        pass
    else:
        raise AssertionError("unrealizable game accepted")
    try:
        run_game(Stubborn(), adv, 2, E2E, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("horizon 0 accepted")


def test_tree_adversary_forces_depth() -> None:
    for n in (1, 2, 3):
        gens, pts = _cube(n)
        tree = LittlestoneTree.perfect(n, lambda p: pts[len(p)])
        for learner in (Stubborn(0), Stubborn(1), Halving.from_generators(gens, 1)):
            tr = run_game(learner, TreeAdversary(tree, gens, 1), 1, E2E, 10)
            assert tr.mistakes == n


def test_tree_adversary_rejects_unshattered_trees() -> None:
    tree = LittlestoneTree({(): Bits.of("0")})
    try:
        TreeAdversary(tree, [Generator.constant(0)], 1)
    except ValueError:
        pass
    else:
        raise AssertionError("accepted")


def test_taxonomy_tree_forces_two_mistakes() -> None:
    p = TaxonomyParams(s_max=256)
    M = 256
    gens = taxonomy_window(p, [M])
    a1, a2 = shatter_set(p, M)
    tree = LittlestoneTree({(): a1, (0,): a2, (1,): a2})
    for learner in (Stubborn(0), Halving.from_generators(gens, M)):
        tr = run_game(learner, TreeAdversary(tree, gens, M), M, E2E, 5)
        assert tr.mistakes == 2


def _inner_thresholds() -> list[LinearGen]:
    reps = {}
    for v, c in itertools.product(range(-2, 3), range(-3, 4)):
        g = LinearGen((v,), c)
        reps.setdefault(tuple(g(z) for z in all_strings(1)), g)
    return list(reps.values())


def test_latch_adversary_lifts_forced_mistakes() -> None:
    inner = _inner_thresholds()
    assert len(inner) == 4
    inner_gens = [g.generator() for g in inner]
    for depth in (1, 2):
        tree = LittlestoneTree.perfect(depth, lambda p: all_strings(1)[len(p)])
        for M in (2, 3):
            for mode in (E2E, COT):
                adv = LatchAdversary(TreeAdversary(tree, inner_gens, 1), inner, M)
                learner = Halving.from_generators(adv.declared, M)
                tr = run_game(learner, adv, M, mode, 10)
                assert tr.mistakes >= depth
                assert all(r.instance == latch_instance(r.instance[:1]) for r in tr.rounds)
                if mode is COT:
                    assert all(r.feedback.is_constant(r.feedback.last()) for r in tr.rounds)


def test_random_adversary_is_reproducible() -> None:
    gens, pts = _cube(3)
    a = run_game(Halving.from_generators(gens, 1), RandomAdversary(gens, pts, 7), 1, E2E, 12, seed=7)
    b = run_game(Halving.from_generators(gens, 1), RandomAdversary(gens, pts, 7), 1, E2E, 12, seed=7)
    assert a.to_jsonl() == b.to_jsonl()
    assert a.mistakes <= 3
